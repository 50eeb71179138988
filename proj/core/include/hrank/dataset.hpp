#ifndef HRANK_DATASET_HPP
#define HRANK_DATASET_HPP

#include <cstddef>
#include <stdexcept>
#include <string>
#include <vector>

namespace hrank {

/// Raised when input data violates a structural constraint (bad file,
/// negative cell, non-positive cost, malformed schedule, ...).
class ValidationError : public std::runtime_error {
public:
    explicit ValidationError(const std::string& what) : std::runtime_error(what) {}
};

/// An n x m relation with per-attribute access costs and scoring weights.
/// Cells are nonnegative; costs are strictly positive. Immutable after
/// construction.
class Dataset {
public:
    Dataset(std::vector<double> cells, std::size_t n, std::size_t m,
            std::vector<std::string> attribute_names, std::vector<double> costs,
            std::vector<double> weights);

    std::size_t rows() const { return n_; }
    std::size_t cols() const { return m_; }

    double cell(std::size_t i, std::size_t j) const { return cells_[i * m_ + j]; }

    const std::vector<std::string>& attribute_names() const { return names_; }
    const std::vector<double>& costs() const { return costs_; }
    const std::vector<double>& weights() const { return weights_; }
    const std::vector<double>& cells() const { return cells_; }

    /// Sum of all attribute costs (the price of one full row).
    double total_row_cost() const { return total_row_cost_; }

private:
    std::vector<double> cells_;  // row-major
    std::size_t n_ = 0;
    std::size_t m_ = 0;
    std::vector<std::string> names_;
    std::vector<double> costs_;
    std::vector<double> weights_;
    double total_row_cost_ = 0.0;
};

/// The fixed attribute inspection order, shared by every row.
/// order[p] is the (0-based) column read at position p+1.
struct Schedule {
    std::vector<std::size_t> order;

    static Schedule identity(std::size_t m);

    /// Throws ValidationError unless order is a permutation of {0..m-1}.
    void validate(std::size_t m) const;
};

/// Records which cells a query inspected. Single writer per query.
class AccessLog {
public:
    AccessLog(std::size_t n, std::size_t m);

    /// Idempotent: marking a cell twice counts it once.
    void mark(std::size_t i, std::size_t j);
    bool marked(std::size_t i, std::size_t j) const { return flags_[i * m_ + j] != 0; }

    std::size_t rows() const { return n_; }
    std::size_t cols() const { return m_; }

    /// Number of inspected cells per column.
    const std::vector<std::size_t>& column_counts() const { return column_counts_; }
    std::size_t inspected_cells() const { return inspected_; }

private:
    std::size_t n_;
    std::size_t m_;
    std::vector<char> flags_;
    std::vector<std::size_t> column_counts_;
    std::size_t inspected_ = 0;
};

/// k row indices with the highest full scores, plus those scores.
struct TopKSet {
    std::vector<std::size_t> members;
    std::vector<double> scores;  // parallel to members

    bool contains(std::size_t row) const;
};

/// Inner product of row i with the full weight vector.
double full_score(const Dataset& data, std::size_t row);

/// Weighted sum of the first h scheduled attributes of row i. h = 0 gives 0,
/// h = m gives the full score under any schedule.
double prefix_score(const Dataset& data, const Schedule& schedule, std::size_t row,
                    std::size_t h);

/// The exact top-k by full score. Ties broken by lower row index.
TopKSet exact_topk(const Dataset& data, std::size_t k);

/// Inspected-cell cost normalized by the cost of reading the whole matrix.
double cost_metric(const Dataset& data, const AccessLog& log);

/// Fraction of the exact top-k recovered by the approximate set.
double accuracy_metric(const TopKSet& exact, const TopKSet& approx);

}  // namespace hrank

#endif  // HRANK_DATASET_HPP
