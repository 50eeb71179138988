#include "hrank/bench.hpp"

#include <algorithm>
#include <cmath>
#include <iomanip>
#include <limits>
#include <sstream>

#include "hrank/algorithms.hpp"
#include "hrank/tuning.hpp"

namespace hrank {
namespace {

struct MeanStd {
    double mean = 0.0;
    double std = 0.0;
};

// Two-pass mean and population standard deviation.
MeanStd summarize(const std::vector<double>& values) {
    MeanStd out;
    if (values.empty()) return out;
    for (double v : values) out.mean += v;
    out.mean /= static_cast<double>(values.size());
    double var = 0.0;
    for (double v : values) var += (v - out.mean) * (v - out.mean);
    out.std = std::sqrt(var / static_cast<double>(values.size()));
    return out;
}

Schedule make_schedule(const std::string& variant, const Dataset& train, std::size_t k,
                       std::uint64_t seed) {
    if (variant == "A") return baseline_schedule(train, BaselineVariant::A, seed);
    if (variant == "B") return baseline_schedule(train, BaselineVariant::B, seed);
    if (variant == "C") return baseline_schedule(train, BaselineVariant::C, seed);
    if (variant == "D") return baseline_schedule(train, BaselineVariant::D, seed);
    if (variant == "learned") {
        const Dataset* one = &train;
        return learn_schedule(std::span<const Dataset>(one, 1), k);
    }
    throw ValidationError("unknown schedule variant '" + variant + "'");
}

struct TrialContext {
    Dataset train;
    Dataset test;
    TopKSet exact;
};

TrialContext make_trial(const ExperimentSpec& spec, std::size_t trial) {
    TrialContext ctx{generate_dataset(trial_train_config(spec, trial)),
                     generate_dataset(trial_test_config(spec, trial)), {}};
    ctx.exact = exact_topk(ctx.test, spec.k);
    return ctx;
}

double learned_alpha(const TrialContext& ctx, const ExperimentSpec& spec,
                     const Schedule& schedule, const ScoreEstimator& estimator) {
    const Dataset* one = &ctx.train;
    return select_alpha(std::span<const Dataset>(one, 1), spec.k, schedule, estimator);
}

double resolve_alpha(const TrialContext& ctx, const ExperimentSpec& spec,
                     const Schedule& schedule, const ScoreEstimator& estimator) {
    switch (spec.alpha_policy) {
        case AlphaPolicy::Fixed:
            return spec.alpha_value;
        case AlphaPolicy::Learned:
            return learned_alpha(ctx, spec, schedule, estimator);
        case AlphaPolicy::FactorOfLearned:
            return std::clamp(spec.alpha_value * learned_alpha(ctx, spec, schedule, estimator),
                              0.0, 1.0);
    }
    throw ValidationError("unknown alpha policy");
}

std::string format_stat(double mean, double std) {
    std::ostringstream out;
    out << std::fixed << std::setprecision(3) << mean << " (" << std << ")";
    return out.str();
}

}  // namespace

const char* algorithm_name(Algorithm a) {
    switch (a) {
        case Algorithm::Trivial: return "trivial";
        case Algorithm::Ub: return "ub";
        case Algorithm::Mpro: return "mpro";
        case Algorithm::Pr: return "pr";
    }
    return "?";
}

Algorithm parse_algorithm(const std::string& name) {
    if (name == "trivial") return Algorithm::Trivial;
    if (name == "ub") return Algorithm::Ub;
    if (name == "mpro") return Algorithm::Mpro;
    if (name == "pr") return Algorithm::Pr;
    throw ValidationError("unknown algorithm '" + name + "'");
}

bool is_schedule_variant(const std::string& name) {
    return name == "A" || name == "B" || name == "C" || name == "D" || name == "learned";
}

GeneratorConfig trial_train_config(const ExperimentSpec& spec, std::size_t trial) {
    GeneratorConfig config;
    config.n = spec.n;
    config.m = spec.m;
    config.meta_seed = spec.seed + 3 * trial;
    config.seed = spec.seed + 3 * trial + 1;
    config.weight_mode = spec.equal_cost ? WeightMode::EqualToCost : WeightMode::Independent;
    return config;
}

GeneratorConfig trial_test_config(const ExperimentSpec& spec, std::size_t trial) {
    GeneratorConfig config = trial_train_config(spec, trial);
    config.seed = spec.seed + 3 * trial + 2;
    return config;
}

std::string ResultTable::to_csv() const {
    std::ostringstream out;
    out << "algorithm,schedule,cost_mean,cost_std,accuracy_mean,accuracy_std\n";
    out << std::setprecision(17);
    for (const ResultCell& c : cells) {
        out << c.algorithm << ',' << c.schedule << ',' << c.cost_mean << ',' << c.cost_std
            << ',' << c.accuracy_mean << ',' << c.accuracy_std << '\n';
    }
    return out.str();
}

ResultTable ResultTable::from_csv(const std::string& csv) {
    std::istringstream in(csv);
    std::string line;
    if (!std::getline(in, line)) throw ValidationError("empty result table CSV");
    ResultTable table;
    while (std::getline(in, line)) {
        if (line.empty()) continue;
        std::istringstream ls(line);
        ResultCell cell;
        std::string field;
        std::getline(ls, cell.algorithm, ',');
        std::getline(ls, cell.schedule, ',');
        auto next_double = [&ls, &field, &line]() {
            if (!std::getline(ls, field, ','))
                throw ValidationError("short result table row: " + line);
            return std::stod(field);
        };
        cell.cost_mean = next_double();
        cell.cost_std = next_double();
        cell.accuracy_mean = next_double();
        cell.accuracy_std = next_double();
        table.cells.push_back(std::move(cell));
    }
    return table;
}

std::string ResultTable::to_text() const {
    std::ostringstream out;
    out << std::left << std::setw(10) << "algorithm" << std::setw(10) << "schedule"
        << std::setw(16) << "cost" << std::setw(16) << "accuracy" << '\n';
    for (const ResultCell& c : cells) {
        out << std::left << std::setw(10) << c.algorithm << std::setw(10) << c.schedule
            << std::setw(16) << format_stat(c.cost_mean, c.cost_std) << std::setw(16)
            << format_stat(c.accuracy_mean, c.accuracy_std) << '\n';
    }
    return out.str();
}

ResultTable run_experiment(const ExperimentSpec& spec) {
    if (spec.trials < 1 || spec.k < 1) throw ValidationError("trials and k must be >= 1");

    struct Series {
        std::vector<double> costs;
        std::vector<double> accuracies;
    };
    // Keyed by (algorithm, schedule) in listing order.
    std::vector<Series> series(spec.algorithms.size() * spec.schedules.size());

    for (std::size_t trial = 0; trial < spec.trials; ++trial) {
        TrialContext ctx = make_trial(spec, trial);
        const Dataset* train_one = &ctx.train;
        const std::span<const Dataset> train_span(train_one, 1);

        for (std::size_t s = 0; s < spec.schedules.size(); ++s) {
            const Schedule schedule =
                make_schedule(spec.schedules[s], ctx.train, spec.k,
                              spec.seed + 3 * trial + 0x5bd1e995ULL + s);

            const bool needs_pr =
                std::find(spec.algorithms.begin(), spec.algorithms.end(), Algorithm::Pr) !=
                spec.algorithms.end();
            ScoreEstimator estimator;
            double alpha = 0.0;
            if (needs_pr) {
                estimator = train_estimator(train_span, schedule);
                alpha = resolve_alpha(ctx, spec, schedule, estimator);
            }
            const UpperBounds bounds = spec.true_bounds
                                           ? true_bounds(ctx.test)
                                           : compute_upper_bounds(train_span,
                                                                  ctx.train.weights());

            for (std::size_t a = 0; a < spec.algorithms.size(); ++a) {
                QueryResult result = [&] {
                    switch (spec.algorithms[a]) {
                        case Algorithm::Trivial:
                            return run_trivial(ctx.test, spec.k);
                        case Algorithm::Ub:
                            return run_ub(ctx.test, spec.k, schedule, bounds,
                                          spec.reorder_rows);
                        case Algorithm::Mpro:
                            return run_mpro(ctx.test, spec.k, schedule, bounds);
                        case Algorithm::Pr:
                            return run_pr(ctx.test, spec.k, schedule, estimator, alpha,
                                          spec.reorder_rows);
                    }
                    throw ValidationError("unknown algorithm");
                }();
                Series& cell = series[a * spec.schedules.size() + s];
                cell.costs.push_back(result.cost);
                cell.accuracies.push_back(accuracy_metric(ctx.exact, result.topk));
            }
        }
    }

    ResultTable table;
    for (std::size_t a = 0; a < spec.algorithms.size(); ++a) {
        for (std::size_t s = 0; s < spec.schedules.size(); ++s) {
            const Series& cell = series[a * spec.schedules.size() + s];
            const MeanStd cost = summarize(cell.costs);
            const MeanStd accuracy = summarize(cell.accuracies);
            table.cells.push_back({algorithm_name(spec.algorithms[a]), spec.schedules[s],
                                   cost.mean, cost.std, accuracy.mean, accuracy.std});
        }
    }
    return table;
}

std::string AlphaSweepResult::to_csv() const {
    std::ostringstream out;
    out << "factor,cost_mean,cost_std,accuracy_mean,accuracy_std\n";
    out << std::setprecision(17);
    for (const AlphaSweepRow& row : rows) {
        out << row.factor << ',' << row.cost_mean << ',' << row.cost_std << ','
            << row.accuracy_mean << ',' << row.accuracy_std << '\n';
    }
    out << "g_down," << g_down << "\ng_up," << g_up << '\n';
    return out.str();
}

std::string AlphaSweepResult::to_text() const {
    std::ostringstream out;
    out << std::left << std::setw(12) << "alpha" << std::setw(16) << "cost" << std::setw(16)
        << "accuracy" << '\n';
    const char* labels[] = {"alpha*/2", "alpha*", "2*alpha*"};
    for (std::size_t i = 0; i < rows.size(); ++i) {
        out << std::left << std::setw(12) << labels[i] << std::setw(16)
            << format_stat(rows[i].cost_mean, rows[i].cost_std) << std::setw(16)
            << format_stat(rows[i].accuracy_mean, rows[i].accuracy_std) << '\n';
    }
    auto g_text = [](double g) {
        if (std::isnan(g)) return std::string("undefined");
        std::ostringstream s;
        s << std::fixed << std::setprecision(3) << g;
        return s.str();
    };
    out << "g_down = " << g_text(g_down) << "\ng_up   = " << g_text(g_up) << '\n';
    return out.str();
}

AlphaSweepResult run_alpha_sweep(const ExperimentSpec& spec) {
    if (spec.schedules.size() != 1)
        throw ValidationError("alpha sweep expects exactly one schedule variant");

    const double factors[] = {0.5, 1.0, 2.0};
    std::vector<double> costs[3], accuracies[3];

    for (std::size_t trial = 0; trial < spec.trials; ++trial) {
        TrialContext ctx = make_trial(spec, trial);
        const Dataset* train_one = &ctx.train;
        const std::span<const Dataset> train_span(train_one, 1);
        const Schedule schedule = make_schedule(spec.schedules[0], ctx.train, spec.k,
                                                spec.seed + 3 * trial + 0x5bd1e995ULL);
        const ScoreEstimator estimator = train_estimator(train_span, schedule);
        const double alpha_star = learned_alpha(ctx, spec, schedule, estimator);

        for (int f = 0; f < 3; ++f) {
            const double alpha = std::clamp(factors[f] * alpha_star, 0.0, 1.0);
            const QueryResult result =
                run_pr(ctx.test, spec.k, schedule, estimator, alpha, spec.reorder_rows);
            costs[f].push_back(result.cost);
            accuracies[f].push_back(accuracy_metric(ctx.exact, result.topk));
        }
    }

    AlphaSweepResult result;
    for (int f = 0; f < 3; ++f) {
        const MeanStd cost = summarize(costs[f]);
        const MeanStd accuracy = summarize(accuracies[f]);
        result.rows.push_back({factors[f], cost.mean, cost.std, accuracy.mean, accuracy.std});
    }
    const auto& half = result.rows[0];
    const auto& star = result.rows[1];
    const auto& twice = result.rows[2];
    const double nan = std::numeric_limits<double>::quiet_NaN();
    result.g_down = (star.accuracy_mean == 0.0 || star.cost_mean == 0.0 ||
                     half.cost_mean == 0.0)
                        ? nan
                        : (half.accuracy_mean / star.accuracy_mean) /
                              (half.cost_mean / star.cost_mean);
    result.g_up = (star.accuracy_mean == 0.0 || star.cost_mean == 0.0 ||
                   twice.cost_mean == 0.0)
                      ? nan
                      : (twice.accuracy_mean / star.accuracy_mean) /
                            (twice.cost_mean / star.cost_mean);
    return result;
}

}  // namespace hrank
