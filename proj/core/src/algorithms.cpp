#include "hrank/algorithms.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>
#include <queue>

namespace hrank {
namespace {

using Clock = std::chrono::steady_clock;

// Mutable top-k candidate set with a running minimum (delta).
class CandidateSet {
public:
    explicit CandidateSet(std::size_t k) : k_(k) {}

    void seed(std::size_t row, double score) {
        members_.emplace_back(score, row);
        if (members_.size() == k_) rebuild_min();
    }

    double delta() const { return min_score_; }

    // Replaces the current minimum when score strictly beats it.
    void offer(std::size_t row, double score) {
        if (score > min_score_) {
            members_[min_index_] = {score, row};
            rebuild_min();
        }
    }

    TopKSet finish() const {
        auto sorted = members_;
        std::sort(sorted.begin(), sorted.end(), [](const auto& a, const auto& b) {
            if (a.first != b.first) return a.first > b.first;
            return a.second < b.second;
        });
        TopKSet out;
        for (const auto& [score, row] : sorted) {
            out.members.push_back(row);
            out.scores.push_back(score);
        }
        return out;
    }

private:
    void rebuild_min() {
        min_index_ = 0;
        min_score_ = members_[0].first;
        for (std::size_t i = 1; i < members_.size(); ++i) {
            if (members_[i].first < min_score_) {
                min_score_ = members_[i].first;
                min_index_ = i;
            }
        }
    }

    std::size_t k_;
    std::vector<std::pair<double, std::size_t>> members_;  // (score, row)
    std::size_t min_index_ = 0;
    double min_score_ = -std::numeric_limits<double>::infinity();
};

double inspect(const Dataset& data, AccessLog& log, std::size_t i, std::size_t j) {
    log.mark(i, j);
    return data.cell(i, j);
}

// Reads the whole row through the schedule, returning the full score.
double inspect_full_row(const Dataset& data, const Schedule& schedule, AccessLog& log,
                        std::size_t i, std::size_t from_position) {
    double s = prefix_score(data, schedule, i, from_position);
    for (std::size_t p = from_position; p < data.cols(); ++p) {
        const std::size_t j = schedule.order[p];
        s += data.weights()[j] * inspect(data, log, i, j);
    }
    return s;
}

// Rows in decreasing order of the weighted first scheduled attribute,
// ties by row index. Assumes that column was already inspected.
std::vector<std::size_t> reorder_by_first_attribute(const Dataset& data,
                                                    const Schedule& schedule) {
    const std::size_t j0 = schedule.order[0];
    const double w0 = data.weights()[j0];
    std::vector<std::size_t> order(data.rows());
    std::iota(order.begin(), order.end(), std::size_t{0});
    std::stable_sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) {
        return w0 * data.cell(a, j0) > w0 * data.cell(b, j0);
    });
    return order;
}

QueryResult finalize(const Dataset& data, TopKSet topk, AccessLog log,
                     Clock::time_point start) {
    QueryResult result{std::move(topk), std::move(log), 0.0, Clock::now() - start};
    result.cost = cost_metric(data, result.log);
    return result;
}

void check_k(const Dataset& data, std::size_t k) {
    if (k < 1 || k > data.rows()) throw std::out_of_range("k out of range");
}

}  // namespace

UpperBounds compute_upper_bounds(std::span<const Dataset> training,
                                 std::span<const double> weights) {
    if (training.empty())
        throw std::invalid_argument("compute_upper_bounds: empty training set");
    const std::size_t m = weights.size();
    UpperBounds bounds;
    bounds.contribution.resize(m);
    for (std::size_t j = 0; j < m; ++j) {
        double max_cell = -std::numeric_limits<double>::infinity();
        double min_cell = std::numeric_limits<double>::infinity();
        for (const Dataset& data : training) {
            for (std::size_t i = 0; i < data.rows(); ++i) {
                max_cell = std::max(max_cell, data.cell(i, j));
                min_cell = std::min(min_cell, data.cell(i, j));
            }
        }
        bounds.contribution[j] =
            weights[j] >= 0.0 ? weights[j] * max_cell : weights[j] * min_cell;
    }
    return bounds;
}

UpperBounds true_bounds(const Dataset& data) {
    const Dataset* one = &data;
    return compute_upper_bounds(std::span<const Dataset>(one, 1), data.weights());
}

double upper_bound_full(double prefix, const UpperBounds& bounds, const Schedule& schedule,
                        std::size_t h) {
    double u = prefix;
    for (std::size_t p = h; p < schedule.order.size(); ++p)
        u += bounds.contribution[schedule.order[p]];
    return u;
}

QueryResult run_trivial(const Dataset& data, std::size_t k) {
    check_k(data, k);
    const auto start = Clock::now();
    AccessLog log(data.rows(), data.cols());
    for (std::size_t i = 0; i < data.rows(); ++i)
        for (std::size_t j = 0; j < data.cols(); ++j) log.mark(i, j);
    return finalize(data, exact_topk(data, k), std::move(log), start);
}

QueryResult run_ub(const Dataset& data, std::size_t k, const Schedule& schedule,
                   const UpperBounds& bounds, bool reorder_rows) {
    check_k(data, k);
    schedule.validate(data.cols());
    const auto start = Clock::now();
    const std::size_t n = data.rows();
    const std::size_t m = data.cols();
    AccessLog log(n, m);

    std::vector<std::size_t> order(n);
    std::iota(order.begin(), order.end(), std::size_t{0});
    std::size_t start_h = 0;
    if (reorder_rows) {
        for (std::size_t i = 0; i < n; ++i) inspect(data, log, i, schedule.order[0]);
        order = reorder_by_first_attribute(data, schedule);
        start_h = 1;
    }

    CandidateSet candidates(k);
    for (std::size_t p = 0; p < k; ++p) {
        const std::size_t i = order[p];
        candidates.seed(i, inspect_full_row(data, schedule, log, i, start_h));
    }

    // Suffix sums of the contribution bounds under this schedule.
    std::vector<double> suffix(m + 1, 0.0);
    for (std::size_t h = m; h-- > 0;)
        suffix[h] = suffix[h + 1] + bounds.contribution[schedule.order[h]];

    for (std::size_t p = k; p < n; ++p) {
        const std::size_t i = order[p];
        std::size_t h = start_h;
        double prefix = prefix_score(data, schedule, i, start_h);
        while (h < m && prefix + suffix[h] >= candidates.delta()) {
            const std::size_t j = schedule.order[h];
            prefix += data.weights()[j] * inspect(data, log, i, j);
            ++h;
        }
        if (h == m) candidates.offer(i, prefix);
    }
    return finalize(data, candidates.finish(), std::move(log), start);
}

QueryResult run_mpro(const Dataset& data, std::size_t k, const Schedule& schedule,
                     const UpperBounds& bounds) {
    check_k(data, k);
    schedule.validate(data.cols());
    const auto start = Clock::now();
    const std::size_t n = data.rows();
    const std::size_t m = data.cols();
    AccessLog log(n, m);

    std::vector<double> suffix(m + 1, 0.0);
    for (std::size_t h = m; h-- > 0;)
        suffix[h] = suffix[h + 1] + bounds.contribution[schedule.order[h]];

    struct Entry {
        double bound;
        std::size_t row;
        std::size_t h;       // prefix length inspected so far
        double prefix;
    };
    // Max-first by bound; equal keys pop the lower row index.
    auto cmp = [](const Entry& a, const Entry& b) {
        if (a.bound != b.bound) return a.bound < b.bound;
        return a.row > b.row;
    };
    std::priority_queue<Entry, std::vector<Entry>, decltype(cmp)> queue(cmp);

    for (std::size_t i = 0; i < n; ++i) {
        const std::size_t j0 = schedule.order[0];
        const double prefix = data.weights()[j0] * inspect(data, log, i, j0);
        queue.push({prefix + suffix[1], i, 1, prefix});
    }

    TopKSet out;
    while (out.members.size() < k) {
        Entry top = queue.top();
        queue.pop();
        if (top.h == m) {
            out.members.push_back(top.row);
            out.scores.push_back(top.prefix);
            continue;
        }
        const std::size_t j = schedule.order[top.h];
        top.prefix += data.weights()[j] * inspect(data, log, top.row, j);
        ++top.h;
        top.bound = top.prefix + suffix[top.h];
        queue.push(top);
    }
    return finalize(data, std::move(out), std::move(log), start);
}

QueryResult run_pr(const Dataset& data, std::size_t k, const Schedule& schedule,
                   const ScoreEstimator& estimator, double alpha, bool reorder_rows) {
    check_k(data, k);
    schedule.validate(data.cols());
    if (alpha < 0.0 || alpha > 1.0) throw std::invalid_argument("run_pr: alpha not in [0,1]");
    const auto start = Clock::now();
    const std::size_t n = data.rows();
    const std::size_t m = data.cols();
    AccessLog log(n, m);

    // The first scheduled column is always read for every row; it drives the
    // optional row reordering and every prefix starts with it.
    for (std::size_t i = 0; i < n; ++i) inspect(data, log, i, schedule.order[0]);
    std::vector<std::size_t> order(n);
    std::iota(order.begin(), order.end(), std::size_t{0});
    if (reorder_rows) order = reorder_by_first_attribute(data, schedule);

    CandidateSet candidates(k);
    for (std::size_t p = 0; p < k; ++p) {
        const std::size_t i = order[p];
        candidates.seed(i, inspect_full_row(data, schedule, log, i, 1));
    }

    for (std::size_t p = k; p < n; ++p) {
        const std::size_t i = order[p];
        std::size_t h = 1;
        const std::size_t j0 = schedule.order[0];
        double prefix = data.weights()[j0] * data.cell(i, j0);
        while (h < m &&
               estimator.tail_probability(h, prefix, candidates.delta()) > alpha) {
            const std::size_t j = schedule.order[h];
            prefix += data.weights()[j] * inspect(data, log, i, j);
            ++h;
        }
        if (h == m) candidates.offer(i, prefix);
    }
    return finalize(data, candidates.finish(), std::move(log), start);
}

}  // namespace hrank
