#include "hrank/estimator.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <stdexcept>

namespace hrank {
namespace {

// Floor for tail probabilities: mathematically the Gaussian tail is strictly
// positive, but erfc underflows near z = 38.
constexpr double kTailFloor = 1e-300;

double population_std(std::span<const PrefixScorePair> pairs) {
    double mean = 0.0;
    for (const auto& p : pairs) mean += p.prefix_score;
    mean /= static_cast<double>(pairs.size());
    double var = 0.0;
    for (const auto& p : pairs) {
        const double d = p.prefix_score - mean;
        var += d * d;
    }
    var /= static_cast<double>(pairs.size());
    return std::sqrt(var);
}

}  // namespace

double normal_cdf(double z) { return 0.5 * std::erfc(-z / std::sqrt(2.0)); }

double kernel(double x, double y, double beta) {
    return std::exp(-std::abs(x - y) / beta);
}

double default_beta(std::span<const PrefixScorePair> pairs) {
    if (pairs.empty()) throw std::invalid_argument("default_beta: empty training pairs");
    const double sd = population_std(pairs);
    if (sd <= 0.0) return ScoreEstimator::kSigmaFloor;
    return sd / 5.0;
}

double kernel_mu(std::span<const PrefixScorePair> pairs, double s, double beta) {
    if (pairs.empty()) throw std::invalid_argument("kernel_mu: empty training pairs");
    double num = 0.0, den = 0.0;
    for (const auto& p : pairs) {
        const double w = kernel(p.prefix_score, s, beta);
        num += w * p.full_score;
        den += w;
    }
    return num / den;
}

double kernel_sigma(std::span<const PrefixScorePair> pairs, double s, double beta) {
    if (pairs.empty()) throw std::invalid_argument("kernel_sigma: empty training pairs");
    double num = 0.0, num2 = 0.0, den = 0.0;
    for (const auto& p : pairs) {
        const double w = kernel(p.prefix_score, s, beta);
        num += w * p.full_score;
        num2 += w * p.full_score * p.full_score;
        den += w;
    }
    const double mu = num / den;
    return std::sqrt(std::max(0.0, num2 / den - mu * mu));
}

std::pair<double, double> fit_linear(std::span<const std::pair<double, double>> points) {
    if (points.size() < 2) throw std::invalid_argument("fit_linear: need at least 2 points");
    double mx = 0.0, my = 0.0;
    for (const auto& [x, y] : points) {
        mx += x;
        my += y;
    }
    mx /= static_cast<double>(points.size());
    my /= static_cast<double>(points.size());
    double sxx = 0.0, sxy = 0.0;
    for (const auto& [x, y] : points) {
        sxx += (x - mx) * (x - mx);
        sxy += (x - mx) * (y - my);
    }
    if (sxx == 0.0) throw std::invalid_argument("fit_linear: constant x, degenerate fit");
    const double slope = sxy / sxx;
    return {my - slope * mx, slope};
}

std::vector<PrefixScorePair> build_training_pairs(std::span<const Dataset> training,
                                                  const Schedule& schedule, std::size_t h) {
    if (training.empty())
        throw std::invalid_argument("build_training_pairs: empty training set");
    const std::size_t m = training.front().cols();
    if (h < 1 || h > m) throw std::out_of_range("build_training_pairs: h out of range");
    std::vector<PrefixScorePair> pairs;
    for (const Dataset& data : training) {
        for (std::size_t i = 0; i < data.rows(); ++i)
            pairs.push_back({prefix_score(data, schedule, i, h), full_score(data, i)});
    }
    return pairs;
}

PrefixModel train_prefix_model(std::span<const PrefixScorePair> pairs, std::size_t h) {
    if (pairs.empty()) throw std::invalid_argument("train_prefix_model: empty training pairs");
    const double beta = default_beta(pairs);

    std::vector<std::pair<double, double>> t_mu, t_sigma;
    t_mu.reserve(pairs.size());
    t_sigma.reserve(pairs.size());
    for (const auto& p : pairs) {
        t_mu.emplace_back(p.prefix_score, kernel_mu(pairs, p.prefix_score, beta));
        t_sigma.emplace_back(p.prefix_score, kernel_sigma(pairs, p.prefix_score, beta));
    }

    auto fit_or_mean = [](std::span<const std::pair<double, double>> pts) {
        try {
            return fit_linear(pts);
        } catch (const std::invalid_argument&) {
            // Constant prefix scores: mean-only model, slope 0.
            double my = 0.0;
            for (const auto& [x, y] : pts) my += y;
            return std::pair<double, double>{my / static_cast<double>(pts.size()), 0.0};
        }
    };

    PrefixModel model;
    model.h = h;
    std::tie(model.q0_mu, model.q1_mu) = fit_or_mean(t_mu);
    std::tie(model.q0_sigma, model.q1_sigma) = fit_or_mean(t_sigma);
    return model;
}

ScoreEstimator::ScoreEstimator(std::vector<PrefixModel> models) : models_(std::move(models)) {
    for (std::size_t h = 1; h <= models_.size(); ++h) {
        if (models_[h - 1].h != h)
            throw std::invalid_argument("ScoreEstimator: model at slot " + std::to_string(h) +
                                        " trained for a different prefix length");
    }
}

const PrefixModel& ScoreEstimator::model(std::size_t h) const {
    if (!has_model(h))
        throw std::out_of_range("ScoreEstimator: no model for prefix length " +
                                std::to_string(h));
    return models_[h - 1];
}

double ScoreEstimator::tail_probability(std::size_t h, double s, double delta) const {
    const PrefixModel& pm = model(h);
    const double sigma = std::max(pm.sigma(s), kSigmaFloor);
    const double p = 1.0 - normal_cdf((delta - pm.mu(s)) / sigma);
    return std::clamp(p, kTailFloor, 1.0);
}

ScoreEstimator train_estimator(std::span<const Dataset> training, const Schedule& schedule) {
    if (training.empty()) throw std::invalid_argument("train_estimator: empty training set");
    const std::size_t m = training.front().cols();
    schedule.validate(m);
    std::vector<PrefixModel> models;
    for (std::size_t h = 1; h + 1 <= m; ++h) {
        const auto pairs = build_training_pairs(training, schedule, h);
        models.push_back(train_prefix_model(pairs, h));
    }
    return ScoreEstimator(std::move(models));
}

ScoreEstimator train_estimator_prefix(std::span<const Dataset> training,
                                      const std::vector<std::size_t>& partial_order,
                                      std::size_t m) {
    if (training.empty())
        throw std::invalid_argument("train_estimator_prefix: empty training set");
    Schedule padded;
    padded.order = partial_order;
    // Pad to a full permutation; positions past the prefix are never scored.
    std::vector<char> used(m, 0);
    for (std::size_t j : partial_order) used[j] = 1;
    for (std::size_t j = 0; j < m; ++j)
        if (!used[j]) padded.order.push_back(j);
    padded.validate(m);

    const std::size_t depth = std::min(partial_order.size(), m - 1);
    std::vector<PrefixModel> models;
    for (std::size_t h = 1; h <= depth; ++h) {
        const auto pairs = build_training_pairs(training, padded, h);
        models.push_back(train_prefix_model(pairs, h));
    }
    return ScoreEstimator(std::move(models));
}

}  // namespace hrank
