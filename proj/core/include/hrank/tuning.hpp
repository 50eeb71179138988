#ifndef HRANK_TUNING_HPP
#define HRANK_TUNING_HPP

#include <cstddef>
#include <map>
#include <span>
#include <vector>

#include "hrank/algorithms.hpp"
#include "hrank/dataset.hpp"
#include "hrank/estimator.hpp"

namespace hrank {

/// Candidate pruning thresholds derived from a training matrix: one value per
/// exact-top-k row, sorted ascending. Duplicates are kept.
struct AlphaCandidateSet {
    std::vector<double> values;
};

/// One point on the accuracy-cost plane for a given alpha.
struct AccuracyCostPoint {
    double accuracy = 0.0;
    double cost = 0.0;
    double alpha = 0.0;
};

enum class BaselineVariant { A, B, C, D };

/// For each exact-top-k row, the smallest tail probability over prefix
/// lengths 1..m-1, evaluated against the static threshold
/// delta = min full score of the exact top-k.
AlphaCandidateSet compute_q(const Dataset& training, std::size_t k, const Schedule& schedule,
                            const ScoreEstimator& estimator);

/// Runs the pruning query (row reordering on) on the training matrix and
/// scores it against the matrix's own exact top-k.
AccuracyCostPoint evaluate_alpha(const Dataset& training, std::size_t k,
                                 const Schedule& schedule, const ScoreEstimator& estimator,
                                 double alpha);

/// Accuracy and cost of a pruning pass where the threshold delta is frozen at
/// the min exact-top-k score instead of evolving with the candidate set.
/// Rows survive at probability == alpha; accuracy is the fraction of true
/// top-k rows that are never pruned. This is the step-function setting in
/// which the candidate set provably contains the optimum.
AccuracyCostPoint replay_static_delta(const Dataset& training, std::size_t k,
                                      const Schedule& schedule,
                                      const ScoreEstimator& estimator, double alpha);

/// Picks the candidate alpha (union of Q over the training matrices,
/// deduplicated) minimizing the mean distance of (accuracy, cost) to the
/// ideal point (1, 0) under the static-delta replay. Ties go to the larger
/// (cheaper) alpha.
double select_alpha(std::span<const Dataset> training, std::size_t k,
                    const Schedule& schedule, const ScoreEstimator& estimator);

/// A: seeded uniform random permutation. B: decreasing |w|. C: increasing
/// cost. D: decreasing |w| / cost. Ties by attribute index.
Schedule baseline_schedule(const Dataset& data, BaselineVariant variant, std::uint64_t seed);

/// Sum over Q of the pruning cost at each candidate threshold; the area under
/// the schedule's cost curve. In [0, k].
double schedule_cost(const Dataset& training, std::size_t k, const Schedule& schedule,
                     const ScoreEstimator& estimator);

/// Upper bound on schedule_cost for a partial schedule: rows never pruned
/// within the prefix are charged the full row cost. Unnormalized (raw cost
/// units, summed over Q candidates and rows).
double schedule_cost_upper(const Dataset& training, std::size_t k,
                           const std::vector<std::size_t>& partial_order,
                           const ScoreEstimator& estimator);

/// Greedy scheduler: repeatedly appends the attribute minimizing the partial
/// schedule's cost upper bound, retraining (memoized by unordered prefix set)
/// as the prefix grows. Sums the bound over all training matrices.
Schedule learn_schedule(std::span<const Dataset> training, std::size_t k);

/// Memoizes one PrefixModel per unordered prefix attribute set. Prefix scores
/// depend only on the set, so schedule search shares models across orders.
class PrefixModelCache {
public:
    explicit PrefixModelCache(std::span<const Dataset> training);

    /// Model for prefix length prefix_order.size() whose prefix covers
    /// exactly the given attributes.
    const PrefixModel& model_for(const std::vector<std::size_t>& prefix_order);

private:
    std::span<const Dataset> training_;
    std::map<std::vector<std::size_t>, PrefixModel> cache_;  // key: sorted attribute set
};

}  // namespace hrank

#endif  // HRANK_TUNING_HPP
