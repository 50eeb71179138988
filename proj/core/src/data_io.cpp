#include "hrank/data_io.hpp"

#include <charconv>
#include <cmath>
#include <cstring>
#include <limits>
#include <fstream>
#include <random>
#include <sstream>

#include <json.hpp>

namespace hrank {
namespace {

using nlohmann::json;

/// Deterministic variate source: uniforms from the top 53 bits of mt19937_64,
/// normals via the Marsaglia polar method. Fixed here so a seed means the
/// same dataset on every platform with a conforming mt19937_64.
class Rng {
public:
    explicit Rng(std::uint64_t seed) : gen_(seed) {}

    double uniform01() { return static_cast<double>(gen_() >> 11) * 0x1.0p-53; }

    double normal() {
        if (have_spare_) {
            have_spare_ = false;
            return spare_;
        }
        double u, v, s;
        do {
            u = 2.0 * uniform01() - 1.0;
            v = 2.0 * uniform01() - 1.0;
            s = u * u + v * v;
        } while (s >= 1.0 || s == 0.0);
        const double factor = std::sqrt(-2.0 * std::log(s) / s);
        spare_ = v * factor;
        have_spare_ = true;
        return u * factor;
    }

private:
    std::mt19937_64 gen_;
    double spare_ = 0.0;
    bool have_spare_ = false;
};

std::string format_double(double v) {
    char buf[64];
    const auto res = std::to_chars(buf, buf + sizeof(buf), v);
    return std::string(buf, res.ptr);
}

double parse_double(std::string_view text, const std::string& context) {
    double v = 0.0;
    const auto res = std::from_chars(text.data(), text.data() + text.size(), v);
    if (res.ec != std::errc{} || res.ptr != text.data() + text.size())
        throw ValidationError("malformed number '" + std::string(text) + "' in " + context);
    return v;
}

std::vector<std::string> split_csv_line(const std::string& line) {
    std::vector<std::string> fields;
    std::string field;
    std::stringstream ss(line);
    while (std::getline(ss, field, ',')) fields.push_back(field);
    if (!line.empty() && line.back() == ',') fields.emplace_back();
    return fields;
}

json load_json(const std::filesystem::path& path) {
    std::ifstream in(path);
    if (!in) throw ValidationError("cannot open " + path.string());
    json doc;
    try {
        in >> doc;
    } catch (const json::exception& e) {
        throw ValidationError("malformed JSON in " + path.string() + ": " + e.what());
    }
    return doc;
}

const char* weight_mode_name(WeightMode mode) {
    return mode == WeightMode::Independent ? "independent" : "equal_to_cost";
}

const char* cost_mode_name(CostMode mode) {
    return mode == CostMode::Uniform01 ? "uniform01" : "fixed";
}

}  // namespace

Dataset generate_dataset(const GeneratorConfig& config) {
    if (config.n < 1 || config.m < 1)
        throw ValidationError("generator config requires n >= 1 and m >= 1");
    if (config.cost_mode == CostMode::Fixed && config.fixed_costs.size() != config.m)
        throw ValidationError("fixed cost list length does not match m");

    Rng meta_rng(config.meta_seed.value_or(config.seed));
    std::vector<double> weights(config.m);
    for (double& w : weights) w = meta_rng.uniform01();

    std::vector<double> costs(config.m);
    if (config.weight_mode == WeightMode::EqualToCost) {
        costs = weights;
    } else if (config.cost_mode == CostMode::Fixed) {
        costs = config.fixed_costs;
    } else {
        for (double& c : costs) c = meta_rng.uniform01();
    }
    for (double& c : costs)
        if (c <= 0.0) c = std::numeric_limits<double>::min();  // uniform draw of exactly 0

    Rng matrix_rng(config.seed + 0x9e3779b97f4a7c15ULL);
    std::vector<double> cells(config.n * config.m);
    for (double& v : cells) v = std::abs(matrix_rng.normal());

    std::vector<std::string> names(config.m);
    for (std::size_t j = 0; j < config.m; ++j) names[j] = "A" + std::to_string(j + 1);

    return Dataset(std::move(cells), config.n, config.m, std::move(names), std::move(costs),
                   std::move(weights));
}

void write_dataset(const Dataset& data, const std::filesystem::path& dir,
                   const std::optional<GeneratorConfig>& provenance) {
    std::filesystem::create_directories(dir);

    std::ofstream csv(dir / "matrix.csv");
    if (!csv) throw ValidationError("cannot write " + (dir / "matrix.csv").string());
    for (std::size_t j = 0; j < data.cols(); ++j) {
        if (j) csv << ',';
        csv << data.attribute_names()[j];
    }
    csv << '\n';
    for (std::size_t i = 0; i < data.rows(); ++i) {
        for (std::size_t j = 0; j < data.cols(); ++j) {
            if (j) csv << ',';
            csv << format_double(data.cell(i, j));
        }
        csv << '\n';
    }

    json meta;
    meta["attribute_names"] = data.attribute_names();
    meta["weights"] = data.weights();
    meta["costs"] = data.costs();
    if (provenance) {
        json gen;
        gen["n"] = provenance->n;
        gen["m"] = provenance->m;
        gen["seed"] = provenance->seed;
        if (provenance->meta_seed) gen["meta_seed"] = *provenance->meta_seed;
        gen["weight_mode"] = weight_mode_name(provenance->weight_mode);
        gen["cost_mode"] = cost_mode_name(provenance->cost_mode);
        meta["generator"] = gen;
    }
    std::ofstream mj(dir / "meta.json");
    if (!mj) throw ValidationError("cannot write " + (dir / "meta.json").string());
    mj << meta.dump(2) << '\n';
}

Dataset read_dataset(const std::filesystem::path& dir) {
    const auto csv_path = dir / "matrix.csv";
    const auto meta_path = dir / "meta.json";
    std::ifstream csv(csv_path);
    if (!csv) throw ValidationError("missing dataset file " + csv_path.string());

    std::string line;
    if (!std::getline(csv, line))
        throw ValidationError(csv_path.string() + " is empty (expected header)");
    const std::vector<std::string> names = split_csv_line(line);
    const std::size_t m = names.size();

    std::vector<double> cells;
    std::size_t n = 0;
    while (std::getline(csv, line)) {
        if (line.empty()) continue;
        const auto fields = split_csv_line(line);
        if (fields.size() != m)
            throw ValidationError(csv_path.string() + ": row " + std::to_string(n) + " has " +
                                  std::to_string(fields.size()) + " columns, header has " +
                                  std::to_string(m));
        for (std::size_t j = 0; j < m; ++j) {
            const double v = parse_double(
                fields[j], csv_path.string() + " row " + std::to_string(n));
            if (v < 0.0)
                throw ValidationError(csv_path.string() + ": negative entry at row " +
                                      std::to_string(n) + ", column " + std::to_string(j));
            cells.push_back(v);
        }
        ++n;
    }

    const json meta = load_json(meta_path);
    for (const char* key : {"attribute_names", "weights", "costs"})
        if (!meta.contains(key))
            throw ValidationError(meta_path.string() + ": missing key '" + key + "'");

    const auto meta_names = meta["attribute_names"].get<std::vector<std::string>>();
    const auto weights = meta["weights"].get<std::vector<double>>();
    const auto costs = meta["costs"].get<std::vector<double>>();
    if (meta_names.size() != m)
        throw ValidationError(meta_path.string() + ": metadata lists " +
                              std::to_string(meta_names.size()) +
                              " attributes, matrix header has " + std::to_string(m));
    if (meta_names != names)
        throw ValidationError(meta_path.string() +
                              ": attribute names disagree with the matrix header");
    for (std::size_t j = 0; j < costs.size(); ++j)
        if (!(costs[j] > 0.0))
            throw ValidationError(meta_path.string() + ": cost of attribute " +
                                  std::to_string(j) + " must be positive");

    return Dataset(std::move(cells), n, m, meta_names, costs, weights);
}

std::uint64_t dataset_checksum(const Dataset& data) {
    std::uint64_t hash = 0xcbf29ce484222325ULL;
    auto mix = [&hash](double v) {
        std::uint64_t bits;
        static_assert(sizeof(bits) == sizeof(v));
        std::memcpy(&bits, &v, sizeof(bits));
        for (int b = 0; b < 8; ++b) {
            hash ^= (bits >> (8 * b)) & 0xffU;
            hash *= 0x100000001b3ULL;
        }
    };
    for (double v : data.cells()) mix(v);
    for (double v : data.weights()) mix(v);
    for (double v : data.costs()) mix(v);
    return hash;
}

void write_model(const ModelArtifact& model, const std::filesystem::path& path) {
    json doc;
    doc["version"] = ModelArtifact::kVersion;
    doc["schedule"] = model.schedule;
    doc["alpha"] = model.alpha;
    json models = json::array();
    for (const PrefixModel& pm : model.models) {
        models.push_back({{"h", pm.h},
                          {"q0_mu", pm.q0_mu},
                          {"q1_mu", pm.q1_mu},
                          {"q0_sigma", pm.q0_sigma},
                          {"q1_sigma", pm.q1_sigma}});
    }
    doc["models"] = models;
    doc["upper_bounds"] = model.upper_bounds;
    doc["attribute_names"] = model.attribute_names;
    doc["weights"] = model.weights;
    doc["training_fingerprint"] = {{"seeds", model.training_seeds},
                                   {"checksums", model.training_checksums}};

    if (path.has_parent_path()) std::filesystem::create_directories(path.parent_path());
    std::ofstream out(path);
    if (!out) throw ValidationError("cannot write " + path.string());
    out << doc.dump(2) << '\n';
}

ModelArtifact read_model(const std::filesystem::path& path) {
    const json doc = load_json(path);
    if (!doc.contains("version") || !doc["version"].is_string())
        throw ValidationError(path.string() + ": missing model version");
    if (doc["version"].get<std::string>() != ModelArtifact::kVersion)
        throw ValidationError(path.string() + ": unsupported model version '" +
                              doc["version"].get<std::string>() + "' (expected " +
                              ModelArtifact::kVersion + ")");

    ModelArtifact model;
    model.schedule = doc.at("schedule").get<std::vector<std::size_t>>();
    model.alpha = doc.at("alpha").get<double>();
    for (const auto& entry : doc.at("models")) {
        PrefixModel pm;
        pm.h = entry.at("h").get<std::size_t>();
        pm.q0_mu = entry.at("q0_mu").get<double>();
        pm.q1_mu = entry.at("q1_mu").get<double>();
        pm.q0_sigma = entry.at("q0_sigma").get<double>();
        pm.q1_sigma = entry.at("q1_sigma").get<double>();
        model.models.push_back(pm);
    }
    model.upper_bounds = doc.at("upper_bounds").get<std::vector<double>>();
    model.attribute_names = doc.at("attribute_names").get<std::vector<std::string>>();
    model.weights = doc.at("weights").get<std::vector<double>>();
    if (doc.contains("training_fingerprint")) {
        const auto& fp = doc["training_fingerprint"];
        model.training_seeds = fp.at("seeds").get<std::vector<std::uint64_t>>();
        model.training_checksums = fp.at("checksums").get<std::vector<std::uint64_t>>();
    }

    Schedule schedule{model.schedule};
    try {
        schedule.validate(model.schedule.size());
    } catch (const ValidationError& e) {
        throw ValidationError(path.string() + ": invalid schedule: " + e.what());
    }
    if (model.weights.size() != model.schedule.size() ||
        model.attribute_names.size() != model.schedule.size() ||
        model.upper_bounds.size() != model.schedule.size())
        throw ValidationError(path.string() + ": field lengths disagree with schedule length");
    return model;
}

}  // namespace hrank
