#ifndef HRANK_ESTIMATOR_HPP
#define HRANK_ESTIMATOR_HPP

#include <cstddef>
#include <span>
#include <utility>
#include <vector>

#include "hrank/dataset.hpp"

namespace hrank {

/// One training example: the prefix score of a fully observed row at a fixed
/// prefix length, paired with the row's full score.
struct PrefixScorePair {
    double prefix_score;
    double full_score;
};

struct KernelConfig {
    double beta;  // kernel width, > 0
};

/// Linear models mapping a prefix score of length h to the mean and standard
/// deviation of the full score.
struct PrefixModel {
    std::size_t h = 0;
    double q0_mu = 0.0;
    double q1_mu = 0.0;
    double q0_sigma = 0.0;
    double q1_sigma = 0.0;

    double mu(double s) const { return q1_mu * s + q0_mu; }
    double sigma(double s) const { return q1_sigma * s + q0_sigma; }
};

/// Standard normal CDF, computed via erfc. Absolute error well below 1e-12.
double normal_cdf(double z);

/// exp(-|x - y| / beta). Symmetric, in (0, 1], equal to 1 iff x == y.
double kernel(double x, double y, double beta);

/// Kernel width heuristic: one fifth of the population standard deviation of
/// the prefix scores. Constant prefix scores fall back to the sigma floor.
double default_beta(std::span<const PrefixScorePair> pairs);

/// Kernel-weighted mean of the full scores around s.
double kernel_mu(std::span<const PrefixScorePair> pairs, double s, double beta);

/// Kernel-weighted standard deviation of the full scores around s. The
/// E[X^2] - E[X]^2 form can go fractionally negative in floating point, so the
/// result is clamped at zero.
double kernel_sigma(std::span<const PrefixScorePair> pairs, double s, double beta);

/// Ordinary least squares fit of y = q1 * x + q0.
/// Throws std::invalid_argument on fewer than 2 points or constant x.
std::pair<double, double> fit_linear(std::span<const std::pair<double, double>> points);

/// Pooled (prefix score, full score) pairs at length h over all rows of all
/// training matrices.
std::vector<PrefixScorePair> build_training_pairs(std::span<const Dataset> training,
                                                  const Schedule& schedule,
                                                  std::size_t h);

/// Fits the mu / sigma linear models for one prefix length from its training
/// pairs: kernel estimates evaluated at every training prefix score, then OLS
/// on both target sets. Constant prefix scores degrade to mean-only models.
PrefixModel train_prefix_model(std::span<const PrefixScorePair> pairs, std::size_t h);

/// Per-prefix-length Gaussian models of the full score. Immutable after
/// training; safe to share across queries.
class ScoreEstimator {
public:
    static constexpr double kSigmaFloor = 1e-9;

    ScoreEstimator() = default;
    explicit ScoreEstimator(std::vector<PrefixModel> models);

    /// Largest prefix length covered by a model.
    std::size_t max_prefix() const { return models_.size(); }
    bool has_model(std::size_t h) const { return h >= 1 && h <= models_.size(); }
    const PrefixModel& model(std::size_t h) const;
    const std::vector<PrefixModel>& models() const { return models_; }

    /// Pr(full score > delta | prefix score s at length h), read off the tail
    /// of N(mu(s), sigma(s)). The result is clamped to stay strictly positive:
    /// a Gaussian tail never vanishes, but erfc underflows.
    double tail_probability(std::size_t h, double s, double delta) const;

private:
    std::vector<PrefixModel> models_;  // models_[h-1] covers prefix length h
};

/// Trains one PrefixModel per prefix length 1..m-1 under the given schedule.
/// Rows of all training matrices are pooled.
ScoreEstimator train_estimator(std::span<const Dataset> training, const Schedule& schedule);

/// Same, but only for prefix lengths 1..min(p, m-1) of a partial schedule
/// (a length-p prefix of some permutation).
ScoreEstimator train_estimator_prefix(std::span<const Dataset> training,
                                      const std::vector<std::size_t>& partial_order,
                                      std::size_t m);

}  // namespace hrank

#endif  // HRANK_ESTIMATOR_HPP
