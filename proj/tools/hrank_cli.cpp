// Command-line front end: generate synthetic corpora, train models, run
// single queries, and reproduce the benchmark tables at desk scale.

#include <cstdio>
#include <fstream>
#include <iostream>
#include <optional>
#include <string>
#include <vector>

#include <CLI11.hpp>

#include "hrank/algorithms.hpp"
#include "hrank/bench.hpp"
#include "hrank/data_io.hpp"
#include "hrank/tuning.hpp"

namespace {

constexpr int kExitUsage = 2;
constexpr int kExitValidation = 3;
constexpr int kExitInternal = 4;

struct CommonOpts {
    std::vector<std::string> data_dirs;
    std::string model_path;
    std::size_t k = 10;
    std::uint64_t seed = 0;
    std::size_t trials = 50;
    std::string schedule = "D";
    std::string algorithm = "pr";
    std::optional<double> alpha;
    double alpha_factor = 1.0;
    bool no_reorder = false;
    bool true_bounds_flag = false;
    std::string out;
    std::string format = "text";
};

hrank::Schedule schedule_from_model(const hrank::ModelArtifact& model) {
    return hrank::Schedule{model.schedule};
}

hrank::ScoreEstimator estimator_from_model(const hrank::ModelArtifact& model) {
    return hrank::ScoreEstimator(model.models);
}

void write_output(const std::string& text, const std::string& out) {
    if (out.empty()) {
        std::cout << text;
    } else {
        std::ofstream file(out);
        if (!file) throw hrank::ValidationError("cannot write " + out);
        file << text;
        std::cout << out << '\n';
    }
}

int cmd_generate(std::size_t n, std::size_t m, std::uint64_t seed,
                 std::optional<std::uint64_t> meta_seed, bool equal_cost,
                 const std::string& out) {
    hrank::GeneratorConfig config;
    config.n = n;
    config.m = m;
    config.seed = seed;
    config.meta_seed = meta_seed;
    config.weight_mode =
        equal_cost ? hrank::WeightMode::EqualToCost : hrank::WeightMode::Independent;
    const hrank::Dataset data = hrank::generate_dataset(config);
    hrank::write_dataset(data, out, config);
    std::cout << out << '\n';
    return 0;
}

int cmd_train(const CommonOpts& opts) {
    if (opts.data_dirs.empty())
        throw hrank::ValidationError("train requires at least one --data directory");
    std::vector<hrank::Dataset> training;
    for (const auto& dir : opts.data_dirs) training.push_back(hrank::read_dataset(dir));

    hrank::Schedule schedule;
    if (opts.schedule == "learned") {
        schedule = hrank::learn_schedule(training, opts.k);
    } else if (hrank::is_schedule_variant(opts.schedule)) {
        const auto variant = opts.schedule == "A"   ? hrank::BaselineVariant::A
                             : opts.schedule == "B" ? hrank::BaselineVariant::B
                             : opts.schedule == "C" ? hrank::BaselineVariant::C
                                                    : hrank::BaselineVariant::D;
        schedule = hrank::baseline_schedule(training.front(), variant, opts.seed);
    } else {
        throw CLI::ValidationError("--schedule must be one of A, B, C, D, learned");
    }

    const hrank::ScoreEstimator estimator = hrank::train_estimator(training, schedule);
    const double alpha = hrank::select_alpha(training, opts.k, schedule, estimator);
    const hrank::UpperBounds bounds =
        hrank::compute_upper_bounds(training, training.front().weights());

    hrank::ModelArtifact model;
    model.schedule = schedule.order;
    model.alpha = alpha;
    model.models = estimator.models();
    model.upper_bounds = bounds.contribution;
    model.attribute_names = training.front().attribute_names();
    model.weights = training.front().weights();
    for (const auto& data : training)
        model.training_checksums.push_back(hrank::dataset_checksum(data));

    const std::string out = opts.out.empty() ? "model.json" : opts.out;
    hrank::write_model(model, out);
    std::cout << out << '\n';
    return 0;
}

int cmd_query(const CommonOpts& opts) {
    if (opts.data_dirs.size() != 1)
        throw hrank::ValidationError("query requires exactly one --data directory");
    const hrank::Dataset data = hrank::read_dataset(opts.data_dirs.front());
    if (opts.k > data.rows())
        throw hrank::ValidationError("k exceeds the number of rows");

    const hrank::Algorithm algorithm = hrank::parse_algorithm(opts.algorithm);

    hrank::QueryResult result = [&] {
        if (algorithm == hrank::Algorithm::Trivial) return hrank::run_trivial(data, opts.k);

        if (opts.model_path.empty())
            throw hrank::ValidationError("this algorithm requires --model");
        const hrank::ModelArtifact model = hrank::read_model(opts.model_path);
        if (model.schedule.size() != data.cols())
            throw hrank::ValidationError("model attribute count does not match dataset");
        const hrank::Schedule schedule = schedule_from_model(model);
        const bool reorder = !opts.no_reorder;

        switch (algorithm) {
            case hrank::Algorithm::Ub: {
                const auto bounds = opts.true_bounds_flag
                                        ? hrank::true_bounds(data)
                                        : hrank::UpperBounds{model.upper_bounds};
                return hrank::run_ub(data, opts.k, schedule, bounds, reorder);
            }
            case hrank::Algorithm::Mpro: {
                const auto bounds = opts.true_bounds_flag
                                        ? hrank::true_bounds(data)
                                        : hrank::UpperBounds{model.upper_bounds};
                return hrank::run_mpro(data, opts.k, schedule, bounds);
            }
            case hrank::Algorithm::Pr: {
                const double alpha = opts.alpha.value_or(model.alpha);
                return hrank::run_pr(data, opts.k, schedule, estimator_from_model(model),
                                     alpha, reorder);
            }
            default:
                throw hrank::ValidationError("unknown algorithm");
        }
    }();

    std::printf("rank,row,score\n");
    for (std::size_t r = 0; r < result.topk.members.size(); ++r)
        std::printf("%zu,%zu,%.12g\n", r + 1, result.topk.members[r], result.topk.scores[r]);
    std::printf("cost %.6f\n", result.cost);
    std::printf("inspected cells per attribute:");
    for (std::size_t j = 0; j < data.cols(); ++j)
        std::printf(" %s=%zu", data.attribute_names()[j].c_str(),
                    result.log.column_counts()[j]);
    std::printf("\n");
    return 0;
}

hrank::ExperimentSpec build_spec(const CommonOpts& opts, std::size_t n, std::size_t m,
                                 bool equal_cost,
                                 const std::vector<std::string>& algorithms,
                                 const std::vector<std::string>& schedules) {
    hrank::ExperimentSpec spec;
    spec.k = opts.k;
    spec.trials = opts.trials;
    spec.seed = opts.seed;
    spec.n = n;
    spec.m = m;
    spec.equal_cost = equal_cost;
    spec.reorder_rows = !opts.no_reorder;
    spec.true_bounds = opts.true_bounds_flag;
    spec.algorithms.clear();
    for (const auto& name : algorithms) spec.algorithms.push_back(hrank::parse_algorithm(name));
    spec.schedules.clear();
    for (const auto& name : schedules) {
        if (!hrank::is_schedule_variant(name))
            throw hrank::ValidationError("unknown schedule variant '" + name + "'");
        spec.schedules.push_back(name);
    }
    if (opts.alpha) {
        spec.alpha_policy = hrank::AlphaPolicy::Fixed;
        spec.alpha_value = *opts.alpha;
    } else if (opts.alpha_factor != 1.0) {
        spec.alpha_policy = hrank::AlphaPolicy::FactorOfLearned;
        spec.alpha_value = opts.alpha_factor;
    }
    return spec;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"Approximate top-k retrieval from pay-per-cell relations"};
    app.require_subcommand(1);

    CommonOpts opts;
    std::size_t n = 1000, m = 10;
    std::optional<std::uint64_t> meta_seed;
    bool equal_cost = false;
    std::vector<std::string> algorithms{"trivial", "ub", "mpro", "pr"};
    std::vector<std::string> schedules{"D"};

    auto add_common = [&](CLI::App* cmd) {
        cmd->add_option("--k", opts.k, "Top-k size")->check(CLI::PositiveNumber);
        cmd->add_option("--seed", opts.seed, "Base random seed");
    };

    auto* generate = app.add_subcommand("generate", "Generate a synthetic dataset directory");
    generate->add_option("--n", n, "Number of rows")->check(CLI::PositiveNumber);
    generate->add_option("--m", m, "Number of attributes")->check(CLI::PositiveNumber);
    generate->add_option("--seed", opts.seed, "Matrix seed");
    generate->add_option("--meta-seed", meta_seed, "Weights/costs seed (defaults to --seed)");
    generate->add_flag("--equal-cost", equal_cost, "Set C(A_j) = w_j");
    generate->add_option("--out", opts.out, "Output directory")->required();

    auto* train = app.add_subcommand("train", "Train a model from dataset directories");
    add_common(train);
    train->add_option("--data", opts.data_dirs, "Training dataset directory (repeatable)")
        ->required();
    train->add_option("--schedule", opts.schedule, "A|B|C|D|learned");
    train->add_option("--out", opts.out, "Model output path");

    auto* query = app.add_subcommand("query", "Run one query against a dataset");
    add_common(query);
    query->add_option("--data", opts.data_dirs, "Dataset directory")->required();
    query->add_option("--model", opts.model_path, "Model artifact path");
    query->add_option("--algorithm", opts.algorithm, "trivial|ub|mpro|pr");
    query->add_option("--alpha", opts.alpha, "Override the model's alpha");
    query->add_flag("--no-reorder", opts.no_reorder, "Disable the row reordering heuristic");
    query->add_flag("--true-bounds", opts.true_bounds_flag,
                    "Derive UB/MPro bounds from the queried matrix itself");

    auto* bench = app.add_subcommand("bench", "Run the train/test benchmark protocol");
    add_common(bench);
    bench->add_option("--trials", opts.trials, "Train/test pairs")->check(CLI::PositiveNumber);
    bench->add_option("--n", n, "Rows per matrix")->check(CLI::PositiveNumber);
    bench->add_option("--m", m, "Attributes per matrix")->check(CLI::PositiveNumber);
    bench->add_option("--algorithm", algorithms, "Algorithms to run (repeatable)");
    bench->add_option("--schedule", schedules, "Schedule variants (repeatable)");
    bench->add_option("--alpha", opts.alpha, "Fixed alpha instead of the learned one");
    bench->add_option("--alpha-factor", opts.alpha_factor, "Multiply the learned alpha");
    bench->add_flag("--no-reorder", opts.no_reorder, "Disable the row reordering heuristic");
    bench->add_flag("--true-bounds", opts.true_bounds_flag,
                    "UB/MPro bounds from the test matrix");
    bench->add_flag("--equal-cost", equal_cost, "Set C(A_j) = w_j");
    bench->add_option("--format", opts.format, "csv|text")
        ->check(CLI::IsMember({"csv", "text"}));
    bench->add_option("--out", opts.out, "Write output to a file");

    auto* sweep = app.add_subcommand("sweep-alpha",
                                     "Alpha sensitivity at alpha*/2, alpha*, 2*alpha*");
    add_common(sweep);
    sweep->add_option("--trials", opts.trials, "Train/test pairs")->check(CLI::PositiveNumber);
    sweep->add_option("--n", n, "Rows per matrix")->check(CLI::PositiveNumber);
    sweep->add_option("--m", m, "Attributes per matrix")->check(CLI::PositiveNumber);
    sweep->add_option("--schedule", opts.schedule, "A|B|C|D|learned");
    sweep->add_flag("--no-reorder", opts.no_reorder, "Disable the row reordering heuristic");
    sweep->add_flag("--equal-cost", equal_cost, "Set C(A_j) = w_j");
    sweep->add_option("--format", opts.format, "csv|text")
        ->check(CLI::IsMember({"csv", "text"}));
    sweep->add_option("--out", opts.out, "Write output to a file");

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        app.exit(e);
        return e.get_exit_code() == 0 ? 0 : kExitUsage;
    }

    try {
        if (generate->parsed())
            return cmd_generate(n, m, opts.seed, meta_seed, equal_cost, opts.out);
        if (train->parsed()) return cmd_train(opts);
        if (query->parsed()) return cmd_query(opts);
        if (bench->parsed()) {
            const auto spec = build_spec(opts, n, m, equal_cost, algorithms, schedules);
            const hrank::ResultTable table = hrank::run_experiment(spec);
            write_output(opts.format == "csv" ? table.to_csv() : table.to_text(), opts.out);
            return 0;
        }
        if (sweep->parsed()) {
            const auto spec = build_spec(opts, n, m, equal_cost, {"pr"}, {opts.schedule});
            const hrank::AlphaSweepResult result = hrank::run_alpha_sweep(spec);
            write_output(opts.format == "csv" ? result.to_csv() : result.to_text(), opts.out);
            return 0;
        }
    } catch (const hrank::ValidationError& e) {
        std::cerr << "error: " << e.what() << '\n';
        return kExitValidation;
    } catch (const std::exception& e) {
        std::cerr << "internal error: " << e.what() << '\n';
        return kExitInternal;
    }
    return kExitUsage;
}
