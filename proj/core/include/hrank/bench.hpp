#ifndef HRANK_BENCH_HPP
#define HRANK_BENCH_HPP

#include <cstdint>
#include <iosfwd>
#include <string>
#include <vector>

#include "hrank/data_io.hpp"

namespace hrank {

enum class Algorithm { Trivial, Ub, Mpro, Pr };

const char* algorithm_name(Algorithm a);
Algorithm parse_algorithm(const std::string& name);  // throws ValidationError

/// Schedule variants accepted by the harness: "A", "B", "C", "D", "learned".
bool is_schedule_variant(const std::string& name);

enum class AlphaPolicy { Learned, Fixed, FactorOfLearned };

/// One benchmark run: trials independent train/test pairs, every listed
/// algorithm under every listed schedule variant.
struct ExperimentSpec {
    std::size_t k = 10;
    std::vector<Algorithm> algorithms{Algorithm::Pr};
    std::vector<std::string> schedules{"D"};
    std::size_t trials = 1;
    bool reorder_rows = true;
    AlphaPolicy alpha_policy = AlphaPolicy::Learned;
    double alpha_value = 0.0;   // Fixed: the alpha; FactorOfLearned: the factor
    std::uint64_t seed = 0;
    std::size_t n = 1000;
    std::size_t m = 10;
    bool equal_cost = false;  // C(A_j) = w_j protocol
    bool true_bounds = false; // UB/MPro bounds from the test matrix itself
};

/// Mean and population standard deviation of cost and accuracy for one
/// (algorithm, schedule) pair.
struct ResultCell {
    std::string algorithm;
    std::string schedule;
    double cost_mean = 0.0;
    double cost_std = 0.0;
    double accuracy_mean = 0.0;
    double accuracy_std = 0.0;
};

struct ResultTable {
    std::vector<ResultCell> cells;

    std::string to_csv() const;
    std::string to_text() const;
    static ResultTable from_csv(const std::string& csv);
};

/// Generator configs for the t-th train/test pair of a run. Weights and costs
/// are shared within a pair; matrices differ.
GeneratorConfig trial_train_config(const ExperimentSpec& spec, std::size_t trial);
GeneratorConfig trial_test_config(const ExperimentSpec& spec, std::size_t trial);

ResultTable run_experiment(const ExperimentSpec& spec);

/// Alpha sensitivity: evaluates the learned alpha at factors 0.5, 1 and 2 and
/// reports the relative accuracy/cost elasticities g_down and g_up. A NaN g
/// marks an undefined (zero-denominator) cell.
struct AlphaSweepRow {
    double factor = 1.0;
    double cost_mean = 0.0;
    double cost_std = 0.0;
    double accuracy_mean = 0.0;
    double accuracy_std = 0.0;
};

struct AlphaSweepResult {
    std::vector<AlphaSweepRow> rows;  // factors 0.5, 1, 2
    double g_down = 0.0;
    double g_up = 0.0;

    std::string to_csv() const;
    std::string to_text() const;
};

AlphaSweepResult run_alpha_sweep(const ExperimentSpec& spec);

}  // namespace hrank

#endif  // HRANK_BENCH_HPP
