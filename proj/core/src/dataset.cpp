#include "hrank/dataset.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>

namespace hrank {

Dataset::Dataset(std::vector<double> cells, std::size_t n, std::size_t m,
                 std::vector<std::string> attribute_names, std::vector<double> costs,
                 std::vector<double> weights)
    : cells_(std::move(cells)),
      n_(n),
      m_(m),
      names_(std::move(attribute_names)),
      costs_(std::move(costs)),
      weights_(std::move(weights)) {
    if (n_ < 1 || m_ < 1) throw ValidationError("dataset must have n >= 1 and m >= 1");
    if (cells_.size() != n_ * m_)
        throw ValidationError("cell buffer size does not match n * m");
    if (names_.size() != m_ || costs_.size() != m_ || weights_.size() != m_)
        throw ValidationError("attribute_names, costs and weights must all have length m");
    for (std::size_t i = 0; i < n_; ++i) {
        for (std::size_t j = 0; j < m_; ++j) {
            const double v = cells_[i * m_ + j];
            if (!(v >= 0.0))
                throw ValidationError("negative or non-finite cell at row " +
                                      std::to_string(i) + ", column " + std::to_string(j));
        }
    }
    for (std::size_t j = 0; j < m_; ++j) {
        if (!(costs_[j] > 0.0))
            throw ValidationError("cost of attribute " + std::to_string(j) +
                                  " must be positive");
        if (!std::isfinite(weights_[j]))
            throw ValidationError("weight of attribute " + std::to_string(j) +
                                  " must be finite");
    }
    total_row_cost_ = std::accumulate(costs_.begin(), costs_.end(), 0.0);
}

Schedule Schedule::identity(std::size_t m) {
    Schedule s;
    s.order.resize(m);
    std::iota(s.order.begin(), s.order.end(), std::size_t{0});
    return s;
}

void Schedule::validate(std::size_t m) const {
    if (order.size() != m) throw ValidationError("schedule length does not match m");
    std::vector<char> seen(m, 0);
    for (std::size_t j : order) {
        if (j >= m) throw ValidationError("schedule entry out of range");
        if (seen[j]) throw ValidationError("schedule repeats attribute " + std::to_string(j));
        seen[j] = 1;
    }
}

AccessLog::AccessLog(std::size_t n, std::size_t m)
    : n_(n), m_(m), flags_(n * m, 0), column_counts_(m, 0) {}

void AccessLog::mark(std::size_t i, std::size_t j) {
    if (i >= n_ || j >= m_) throw std::out_of_range("AccessLog::mark: cell out of range");
    char& f = flags_[i * m_ + j];
    if (!f) {
        f = 1;
        ++column_counts_[j];
        ++inspected_;
    }
}

bool TopKSet::contains(std::size_t row) const {
    return std::find(members.begin(), members.end(), row) != members.end();
}

double full_score(const Dataset& data, std::size_t row) {
    if (row >= data.rows()) throw std::out_of_range("full_score: row index out of range");
    double s = 0.0;
    for (std::size_t j = 0; j < data.cols(); ++j) s += data.weights()[j] * data.cell(row, j);
    return s;
}

double prefix_score(const Dataset& data, const Schedule& schedule, std::size_t row,
                    std::size_t h) {
    if (row >= data.rows()) throw std::out_of_range("prefix_score: row index out of range");
    if (h > data.cols()) throw std::out_of_range("prefix_score: h out of range");
    double s = 0.0;
    for (std::size_t p = 0; p < h; ++p) {
        const std::size_t j = schedule.order[p];
        s += data.weights()[j] * data.cell(row, j);
    }
    return s;
}

TopKSet exact_topk(const Dataset& data, std::size_t k) {
    if (k < 1 || k > data.rows()) throw std::out_of_range("exact_topk: k out of range");
    std::vector<std::size_t> idx(data.rows());
    std::iota(idx.begin(), idx.end(), std::size_t{0});
    std::vector<double> scores(data.rows());
    for (std::size_t i = 0; i < data.rows(); ++i) scores[i] = full_score(data, i);
    std::partial_sort(idx.begin(), idx.begin() + static_cast<std::ptrdiff_t>(k), idx.end(),
                      [&](std::size_t a, std::size_t b) {
                          if (scores[a] != scores[b]) return scores[a] > scores[b];
                          return a < b;
                      });
    TopKSet result;
    result.members.assign(idx.begin(), idx.begin() + static_cast<std::ptrdiff_t>(k));
    result.scores.reserve(k);
    for (std::size_t i : result.members) result.scores.push_back(scores[i]);
    return result;
}

double cost_metric(const Dataset& data, const AccessLog& log) {
    if (log.rows() != data.rows() || log.cols() != data.cols())
        throw std::invalid_argument("cost_metric: log shape does not match dataset");
    // Numerator and denominator accumulate in the same order so that a full
    // scan is exactly 1 and partial scans never exceed it.
    double inspected = 0.0;
    double everything = 0.0;
    const double n = static_cast<double>(data.rows());
    for (std::size_t j = 0; j < data.cols(); ++j) {
        inspected += static_cast<double>(log.column_counts()[j]) * data.costs()[j];
        everything += n * data.costs()[j];
    }
    return inspected / everything;
}

double accuracy_metric(const TopKSet& exact, const TopKSet& approx) {
    if (exact.members.size() != approx.members.size())
        throw std::invalid_argument("accuracy_metric: top-k sizes differ");
    const std::size_t k = exact.members.size();
    std::size_t hits = 0;
    for (std::size_t i : approx.members)
        if (exact.contains(i)) ++hits;
    return static_cast<double>(hits) / static_cast<double>(k);
}

}  // namespace hrank
