#include "hrank/tuning.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>
#include <random>

namespace hrank {
namespace {

// Deterministic Fisher-Yates; std::shuffle's draw sequence is
// implementation-defined, this is not.
std::vector<std::size_t> random_permutation(std::size_t m, std::uint64_t seed) {
    std::mt19937_64 rng(seed);
    std::vector<std::size_t> perm(m);
    std::iota(perm.begin(), perm.end(), std::size_t{0});
    for (std::size_t i = m; i > 1; --i) {
        // Unbiased bounded draw by rejection.
        const std::uint64_t bound = i;
        const std::uint64_t limit = std::numeric_limits<std::uint64_t>::max() -
                                    std::numeric_limits<std::uint64_t>::max() % bound;
        std::uint64_t r;
        do {
            r = rng();
        } while (r >= limit);
        std::swap(perm[i - 1], perm[r % bound]);
    }
    return perm;
}

Schedule sort_by_key(std::size_t m, auto key_desc) {
    Schedule s = Schedule::identity(m);
    std::stable_sort(s.order.begin(), s.order.end(),
                     [&](std::size_t a, std::size_t b) { return key_desc(a) > key_desc(b); });
    return s;
}

double dist_to_ideal(const AccuracyCostPoint& p) {
    return std::hypot(p.accuracy - 1.0, p.cost);
}

// Row processing order used by the pruning pass (reordering on): decreasing
// weighted first scheduled attribute, ties by row index.
std::vector<std::size_t> replay_order(const Dataset& data, const Schedule& schedule) {
    const std::size_t j0 = schedule.order[0];
    const double w0 = data.weights()[j0];
    std::vector<std::size_t> order(data.rows());
    std::iota(order.begin(), order.end(), std::size_t{0});
    std::stable_sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) {
        return w0 * data.cell(a, j0) > w0 * data.cell(b, j0);
    });
    return order;
}

// Precomputed static-delta pruning structure for one training matrix: for
// every non-seed row the prefix cost at which it would be pruned as a
// function of alpha, reduced to a per-row pruning threshold sequence.
struct ReplayProfile {
    std::size_t n = 0;
    std::size_t k = 0;
    double total_cost = 0.0;             // n * sum C
    double seed_cost = 0.0;              // full rows paid by the first k rows
    // Per non-seed row: probabilities p_h for h = 1..m-1 and cumulative
    // prefix costs; the row is pruned at the first h with p_h < alpha.
    std::vector<std::vector<double>> probs;
    std::vector<double> cumulative_cost;  // cost of prefix length h at [h-1]
    double full_row_cost = 0.0;
    std::vector<char> is_topk;            // per non-seed row
    std::size_t seeded_topk = 0;          // top-k rows inside the seed set
};

ReplayProfile build_replay_profile(const Dataset& data, std::size_t k,
                                   const Schedule& schedule,
                                   const ScoreEstimator& estimator) {
    if (k < 1 || k > data.rows()) throw std::out_of_range("replay: k out of range");
    const std::size_t n = data.rows();
    const std::size_t m = data.cols();

    ReplayProfile profile;
    profile.n = n;
    profile.k = k;
    profile.full_row_cost = data.total_row_cost();
    profile.total_cost = static_cast<double>(n) * profile.full_row_cost;
    profile.cumulative_cost.resize(m);
    double acc = 0.0;
    for (std::size_t h = 0; h < m; ++h) {
        acc += data.costs()[schedule.order[h]];
        profile.cumulative_cost[h] = acc;
    }

    const TopKSet topk = exact_topk(data, k);
    const double delta = *std::min_element(topk.scores.begin(), topk.scores.end());
    const auto order = replay_order(data, schedule);

    profile.seed_cost = static_cast<double>(k) * profile.full_row_cost;
    for (std::size_t p = 0; p < k; ++p)
        if (topk.contains(order[p])) ++profile.seeded_topk;

    const std::size_t depth = std::min(estimator.max_prefix(), m - 1);
    for (std::size_t p = k; p < n; ++p) {
        const std::size_t i = order[p];
        std::vector<double> probs(depth);
        for (std::size_t h = 1; h <= depth; ++h)
            probs[h - 1] =
                estimator.tail_probability(h, prefix_score(data, schedule, i, h), delta);
        profile.probs.push_back(std::move(probs));
        profile.is_topk.push_back(topk.contains(i) ? 1 : 0);
    }
    return profile;
}

AccuracyCostPoint evaluate_replay(const ReplayProfile& profile, double alpha) {
    double cost = profile.seed_cost;
    std::size_t surviving_topk = profile.seeded_topk;
    for (std::size_t r = 0; r < profile.probs.size(); ++r) {
        const auto& probs = profile.probs[r];
        std::size_t prune_h = 0;  // 0 = never pruned
        for (std::size_t h = 1; h <= probs.size(); ++h) {
            if (probs[h - 1] < alpha) {  // survives at equality
                prune_h = h;
                break;
            }
        }
        if (prune_h == 0) {
            cost += profile.full_row_cost;
            if (profile.is_topk[r]) ++surviving_topk;
        } else {
            cost += profile.cumulative_cost[prune_h - 1];
        }
    }
    AccuracyCostPoint point;
    point.alpha = alpha;
    point.cost = cost / profile.total_cost;
    point.accuracy =
        static_cast<double>(surviving_topk) / static_cast<double>(profile.k);
    return point;
}

// Q for a (possibly partial) schedule: per exact-top-k row the minimum tail
// probability over the prefix lengths the estimator covers.
std::vector<double> q_values(const Dataset& training, std::size_t k,
                             const Schedule& schedule, const ScoreEstimator& estimator) {
    if (k < 1 || k > training.rows()) throw std::out_of_range("compute_q: k out of range");
    const std::size_t depth = std::min(estimator.max_prefix(), training.cols() - 1);
    if (depth == 0)
        throw std::invalid_argument("compute_q: estimator covers no prefix length");
    const TopKSet topk = exact_topk(training, k);
    const double delta = *std::min_element(topk.scores.begin(), topk.scores.end());
    std::vector<double> values;
    values.reserve(k);
    for (std::size_t i : topk.members) {
        double best = std::numeric_limits<double>::infinity();
        for (std::size_t h = 1; h <= depth; ++h) {
            best = std::min(best, estimator.tail_probability(
                                      h, prefix_score(training, schedule, i, h), delta));
        }
        values.push_back(best);
    }
    std::sort(values.begin(), values.end());
    return values;
}

Schedule padded_schedule(const std::vector<std::size_t>& partial_order, std::size_t m) {
    Schedule s;
    s.order = partial_order;
    std::vector<char> used(m, 0);
    for (std::size_t j : partial_order) used[j] = 1;
    for (std::size_t j = 0; j < m; ++j)
        if (!used[j]) s.order.push_back(j);
    s.validate(m);
    return s;
}

// Unnormalized partial-schedule cost bound for one training matrix.
double cost_upper_one(const Dataset& training, std::size_t k,
                      const std::vector<std::size_t>& partial_order,
                      const ScoreEstimator& estimator) {
    const std::size_t m = training.cols();
    const std::size_t n = training.rows();
    const Schedule schedule = padded_schedule(partial_order, m);
    const std::size_t depth = std::min({estimator.max_prefix(), partial_order.size(), m - 1});
    if (depth == 0)
        throw std::invalid_argument("schedule_cost_upper: empty partial schedule");

    const std::vector<double> q = q_values(training, k, schedule, estimator);

    std::vector<double> cumulative(depth);
    double acc = 0.0;
    for (std::size_t h = 0; h < depth; ++h) {
        acc += training.costs()[schedule.order[h]];
        cumulative[h] = acc;
    }
    const double full = training.total_row_cost();

    const TopKSet topk = exact_topk(training, k);
    const double delta = *std::min_element(topk.scores.begin(), topk.scores.end());

    // Probabilities per row and prefix length, computed once.
    std::vector<std::vector<double>> probs(n, std::vector<double>(depth));
    for (std::size_t i = 0; i < n; ++i)
        for (std::size_t h = 1; h <= depth; ++h)
            probs[i][h - 1] =
                estimator.tail_probability(h, prefix_score(training, schedule, i, h), delta);

    double total = 0.0;
    for (double alpha : q) {
        for (std::size_t i = 0; i < n; ++i) {
            double row_cost = full;
            for (std::size_t h = 1; h <= depth; ++h) {
                if (probs[i][h - 1] < alpha) {
                    row_cost = cumulative[h - 1];
                    break;
                }
            }
            total += row_cost;
        }
    }
    return total;
}

}  // namespace

AlphaCandidateSet compute_q(const Dataset& training, std::size_t k, const Schedule& schedule,
                            const ScoreEstimator& estimator) {
    return AlphaCandidateSet{q_values(training, k, schedule, estimator)};
}

AccuracyCostPoint evaluate_alpha(const Dataset& training, std::size_t k,
                                 const Schedule& schedule, const ScoreEstimator& estimator,
                                 double alpha) {
    const QueryResult result = run_pr(training, k, schedule, estimator, alpha, true);
    AccuracyCostPoint point;
    point.alpha = alpha;
    point.cost = result.cost;
    point.accuracy = accuracy_metric(exact_topk(training, k), result.topk);
    return point;
}

AccuracyCostPoint replay_static_delta(const Dataset& training, std::size_t k,
                                      const Schedule& schedule,
                                      const ScoreEstimator& estimator, double alpha) {
    return evaluate_replay(build_replay_profile(training, k, schedule, estimator), alpha);
}

double select_alpha(std::span<const Dataset> training, std::size_t k,
                    const Schedule& schedule, const ScoreEstimator& estimator) {
    if (training.empty()) throw std::invalid_argument("select_alpha: empty training set");

    std::vector<double> candidates;
    std::vector<ReplayProfile> profiles;
    profiles.reserve(training.size());
    for (const Dataset& data : training) {
        const auto q = q_values(data, k, schedule, estimator);
        candidates.insert(candidates.end(), q.begin(), q.end());
        profiles.push_back(build_replay_profile(data, k, schedule, estimator));
    }
    std::sort(candidates.begin(), candidates.end());
    candidates.erase(std::unique(candidates.begin(), candidates.end()), candidates.end());

    double best_alpha = candidates.front();
    double best_dist = std::numeric_limits<double>::infinity();
    for (double alpha : candidates) {
        double mean_dist = 0.0;
        for (const auto& profile : profiles)
            mean_dist += dist_to_ideal(evaluate_replay(profile, alpha));
        mean_dist /= static_cast<double>(profiles.size());
        // Ties go to the larger alpha (candidates are ascending).
        if (mean_dist <= best_dist) {
            best_dist = mean_dist;
            best_alpha = alpha;
        }
    }
    return best_alpha;
}

Schedule baseline_schedule(const Dataset& data, BaselineVariant variant, std::uint64_t seed) {
    const std::size_t m = data.cols();
    switch (variant) {
        case BaselineVariant::A:
            return Schedule{random_permutation(m, seed)};
        case BaselineVariant::B:
            return sort_by_key(m, [&](std::size_t j) { return std::abs(data.weights()[j]); });
        case BaselineVariant::C:
            return sort_by_key(m, [&](std::size_t j) { return -data.costs()[j]; });
        case BaselineVariant::D:
            return sort_by_key(
                m, [&](std::size_t j) { return std::abs(data.weights()[j]) / data.costs()[j]; });
    }
    throw std::invalid_argument("baseline_schedule: unknown variant");
}

double schedule_cost(const Dataset& training, std::size_t k, const Schedule& schedule,
                     const ScoreEstimator& estimator) {
    const auto q = q_values(training, k, schedule, estimator);
    double total = 0.0;
    for (double alpha : q)
        total += evaluate_alpha(training, k, schedule, estimator, alpha).cost;
    return total;
}

double schedule_cost_upper(const Dataset& training, std::size_t k,
                           const std::vector<std::size_t>& partial_order,
                           const ScoreEstimator& estimator) {
    return cost_upper_one(training, k, partial_order, estimator);
}

PrefixModelCache::PrefixModelCache(std::span<const Dataset> training) : training_(training) {
    if (training_.empty()) throw std::invalid_argument("PrefixModelCache: empty training set");
}

const PrefixModel& PrefixModelCache::model_for(const std::vector<std::size_t>& prefix_order) {
    std::vector<std::size_t> key = prefix_order;
    std::sort(key.begin(), key.end());
    auto it = cache_.find(key);
    if (it != cache_.end()) return it->second;

    const std::size_t m = training_.front().cols();
    const Schedule padded = padded_schedule(prefix_order, m);
    const std::size_t h = prefix_order.size();
    const auto pairs = build_training_pairs(training_, padded, h);
    return cache_.emplace(std::move(key), train_prefix_model(pairs, h)).first->second;
}

Schedule learn_schedule(std::span<const Dataset> training, std::size_t k) {
    if (training.empty()) throw std::invalid_argument("learn_schedule: empty training set");
    const std::size_t m = training.front().cols();
    if (m == 1) return Schedule::identity(1);

    PrefixModelCache cache(training);
    std::vector<std::size_t> prefix;
    std::vector<char> used(m, 0);

    while (prefix.size() < m) {
        std::size_t best_attr = m;
        double best_cost = std::numeric_limits<double>::infinity();
        for (std::size_t j = 0; j < m; ++j) {
            if (used[j]) continue;
            std::vector<std::size_t> candidate = prefix;
            candidate.push_back(j);

            // Assemble models for every covered prefix length of the
            // candidate; lengths below the new one are shared across
            // candidates through the cache.
            const std::size_t depth = std::min(candidate.size(), m - 1);
            std::vector<PrefixModel> models;
            for (std::size_t h = 1; h <= depth; ++h)
                models.push_back(cache.model_for(
                    std::vector<std::size_t>(candidate.begin(), candidate.begin() + h)));
            const ScoreEstimator estimator(std::move(models));

            double total = 0.0;
            for (const Dataset& data : training)
                total += cost_upper_one(data, k, candidate, estimator);
            if (total < best_cost) {
                best_cost = total;
                best_attr = j;
            }
        }
        prefix.push_back(best_attr);
        used[best_attr] = 1;
    }

    Schedule result{std::move(prefix)};
    result.validate(m);
    return result;
}

}  // namespace hrank
