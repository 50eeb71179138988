#ifndef HRANK_DATA_IO_HPP
#define HRANK_DATA_IO_HPP

#include <cstdint>
#include <filesystem>
#include <optional>
#include <string>
#include <vector>

#include "hrank/dataset.hpp"
#include "hrank/estimator.hpp"

namespace hrank {

enum class WeightMode { Independent, EqualToCost };
enum class CostMode { Uniform01, Fixed };

/// Fully describes one synthetic dataset. Generation is a pure function of
/// this struct.
struct GeneratorConfig {
    std::size_t n = 1;
    std::size_t m = 1;
    std::uint64_t seed = 0;
    /// Weights and costs get their own stream so that train/test pairs can
    /// share metadata while drawing different matrices. Defaults to seed.
    std::optional<std::uint64_t> meta_seed;
    WeightMode weight_mode = WeightMode::Independent;
    CostMode cost_mode = CostMode::Uniform01;
    std::vector<double> fixed_costs;  // used when cost_mode == Fixed
};

/// X_ij = |z|, z ~ N(0,1); weights uniform on [0,1]; costs uniform on [0,1],
/// fixed, or equal to the weights. Normal variates come from an explicitly
/// seeded Marsaglia polar generator, uniforms from the top 53 bits of
/// mt19937_64, so a seed fully determines the dataset.
Dataset generate_dataset(const GeneratorConfig& config);

/// On-disk dataset layout: a directory holding matrix.csv (header of
/// attribute names, one row per item) and meta.json (weights, costs,
/// attribute_names, optional generator provenance). Doubles are written in
/// shortest round-trip form; read(write(d)) is bitwise identical.
void write_dataset(const Dataset& data, const std::filesystem::path& dir,
                   const std::optional<GeneratorConfig>& provenance = std::nullopt);
Dataset read_dataset(const std::filesystem::path& dir);

/// Everything a query node needs: the schedule, the pruning threshold, the
/// per-prefix-length regression coefficients, and the attribute bounds, plus
/// a fingerprint of the training corpus.
struct ModelArtifact {
    static constexpr const char* kVersion = "1";

    std::vector<std::size_t> schedule;
    double alpha = 0.0;
    std::vector<PrefixModel> models;
    std::vector<double> upper_bounds;
    std::vector<std::string> attribute_names;
    std::vector<double> weights;
    std::vector<std::uint64_t> training_seeds;      // empty when unknown
    std::vector<std::uint64_t> training_checksums;  // one per training matrix
};

/// FNV-1a over the raw bits of the cells, weights and costs.
std::uint64_t dataset_checksum(const Dataset& data);

void write_model(const ModelArtifact& model, const std::filesystem::path& path);
ModelArtifact read_model(const std::filesystem::path& path);

}  // namespace hrank

#endif  // HRANK_DATA_IO_HPP
