#ifndef HRANK_ALGORITHMS_HPP
#define HRANK_ALGORITHMS_HPP

#include <chrono>
#include <cstddef>
#include <span>
#include <vector>

#include "hrank/dataset.hpp"
#include "hrank/estimator.hpp"

namespace hrank {

/// Per-attribute upper bounds on the weighted contribution w_j * X_ij,
/// derived from training data. Valid on the training rows by construction;
/// only heuristic on unseen data.
struct UpperBounds {
    std::vector<double> contribution;  // one per attribute
};

/// Outcome of one query execution.
struct QueryResult {
    TopKSet topk;
    AccessLog log;
    double cost = 0.0;  // always equals cost_metric(data, log)
    std::chrono::duration<double> wall_time{0.0};
};

/// U(A_j) = max over training rows of w_j * X_ij for w_j >= 0, else
/// w_j * min X_ij (the least negative contribution).
UpperBounds compute_upper_bounds(std::span<const Dataset> training,
                                 std::span<const double> weights);

/// Bounds taken from the matrix itself. Makes UB / MPro exact; used by tests
/// and the --true-bounds query mode.
UpperBounds true_bounds(const Dataset& data);

/// prefix_score + sum of contribution bounds for the attributes after
/// position h in the schedule.
double upper_bound_full(double prefix, const UpperBounds& bounds, const Schedule& schedule,
                        std::size_t h);

/// Reads everything, returns the exact top-k, cost exactly 1.
QueryResult run_trivial(const Dataset& data, std::size_t k);

/// Branch-and-bound scan: a row is abandoned once its optimistic full-score
/// bound drops below the k-th best score seen so far. With reorder_rows the
/// first scheduled column is read for every row up front and rows are
/// processed in decreasing order of that weighted value.
QueryResult run_ub(const Dataset& data, std::size_t k, const Schedule& schedule,
                   const UpperBounds& bounds, bool reorder_rows);

/// Best-first variant: rows live in a priority queue keyed by their current
/// upper bound; completed rows are emitted until k have been output.
QueryResult run_mpro(const Dataset& data, std::size_t k, const Schedule& schedule,
                     const UpperBounds& bounds);

/// Probability pruning: a row's prefix is extended while the estimated
/// probability of its full score beating the current k-th best stays above
/// alpha. Equality prunes.
QueryResult run_pr(const Dataset& data, std::size_t k, const Schedule& schedule,
                   const ScoreEstimator& estimator, double alpha, bool reorder_rows);

}  // namespace hrank

#endif  // HRANK_ALGORITHMS_HPP
