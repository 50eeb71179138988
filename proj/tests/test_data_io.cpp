#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>
#include <filesystem>
#include <fstream>
#include <string>

#include <json.hpp>

#include "hrank/data_io.hpp"
#include "test_util.hpp"

using namespace hrank;
namespace fs = std::filesystem;

namespace {

fs::path fresh_dir(const std::string& name) {
    const fs::path dir = fs::temp_directory_path() / ("hrank_io_" + name);
    fs::remove_all(dir);
    fs::create_directories(dir);
    return dir;
}

void write_file(const fs::path& path, const std::string& text) {
    std::ofstream out(path);
    out << text;
}

std::string slurp(const fs::path& path) {
    std::ifstream in(path, std::ios::binary);
    return std::string(std::istreambuf_iterator<char>(in), {});
}

GeneratorConfig config(std::size_t n, std::size_t m, std::uint64_t seed) {
    GeneratorConfig c;
    c.n = n;
    c.m = m;
    c.seed = seed;
    return c;
}

}  // namespace

TEST_CASE("generation is a pure function of the config") {
    const auto a = generate_dataset(config(50, 4, 7));
    const auto b = generate_dataset(config(50, 4, 7));
    CHECK(a.cells() == b.cells());
    CHECK(a.weights() == b.weights());
    CHECK(a.costs() == b.costs());
    CHECK(a.attribute_names() == b.attribute_names());

    const auto other = generate_dataset(config(50, 4, 8));
    CHECK(a.cells() != other.cells());
}

TEST_CASE("meta_seed shares weights and costs across different matrices") {
    auto train = config(40, 5, 100);
    auto test = config(40, 5, 101);
    train.meta_seed = 99;
    test.meta_seed = 99;
    const auto dtrain = generate_dataset(train);
    const auto dtest = generate_dataset(test);
    CHECK(dtrain.weights() == dtest.weights());
    CHECK(dtrain.costs() == dtest.costs());
    CHECK(dtrain.cells() != dtest.cells());
}

TEST_CASE("generated values live in the documented ranges") {
    const auto data = generate_dataset(config(200, 6, 9));
    for (double v : data.cells()) {
        CHECK(v >= 0.0);
        CHECK(std::isfinite(v));
    }
    for (double w : data.weights()) {
        CHECK(w >= 0.0);
        CHECK(w <= 1.0);
    }
    for (double c : data.costs()) {
        CHECK(c > 0.0);
        CHECK(c <= 1.0);
    }
}

TEST_CASE("cells follow a half-normal distribution") {
    // E|Z| = sqrt(2/pi) ~ 0.79788; the sample mean of 1e5 draws has a
    // standard error around 0.002.
    const auto data = generate_dataset(config(100000, 1, 12345));
    double mean = 0.0;
    for (double v : data.cells()) mean += v;
    mean /= static_cast<double>(data.rows());
    CHECK(mean == doctest::Approx(std::sqrt(2.0 / M_PI)).epsilon(0.012));
}

TEST_CASE("equal-cost mode copies the weights") {
    auto c = config(10, 4, 13);
    c.weight_mode = WeightMode::EqualToCost;
    const auto data = generate_dataset(c);
    CHECK(data.costs() == data.weights());
}

TEST_CASE("fixed cost mode") {
    auto c = config(10, 3, 14);
    c.cost_mode = CostMode::Fixed;
    c.fixed_costs = {0.5, 1.0, 2.0};
    CHECK(generate_dataset(c).costs() == c.fixed_costs);

    c.fixed_costs = {0.5};
    CHECK_THROWS_AS((void)generate_dataset(c), ValidationError);
    CHECK_THROWS_AS((void)generate_dataset(config(0, 3, 1)), ValidationError);
}

TEST_CASE("dataset round trip is bitwise exact") {
    const auto dir = fresh_dir("roundtrip");
    const auto data = generate_dataset(config(60, 5, 15));
    write_dataset(data, dir);
    const auto back = read_dataset(dir);
    CHECK(back.cells() == data.cells());
    CHECK(back.weights() == data.weights());
    CHECK(back.costs() == data.costs());
    CHECK(back.attribute_names() == data.attribute_names());

    // Writing twice produces identical bytes.
    const auto dir2 = fresh_dir("roundtrip2");
    write_dataset(data, dir2);
    CHECK(slurp(dir / "matrix.csv") == slurp(dir2 / "matrix.csv"));
    CHECK(slurp(dir / "meta.json") == slurp(dir2 / "meta.json"));
}

TEST_CASE("read_dataset diagnostics name the offending location") {
    const std::string meta =
        R"({"attribute_names":["A1","A2"],"weights":[0.5,0.5],"costs":[1.0,1.0]})";

    {
        const auto dir = fresh_dir("missing");
        CHECK_THROWS_WITH_AS((void)read_dataset(dir),
                             doctest::Contains("matrix.csv"), ValidationError);
    }
    {
        const auto dir = fresh_dir("shortrow");
        write_file(dir / "matrix.csv", "A1,A2\n1.0\n");
        write_file(dir / "meta.json", meta);
        CHECK_THROWS_WITH_AS((void)read_dataset(dir), doctest::Contains("row 0"),
                             ValidationError);
    }
    {
        const auto dir = fresh_dir("negative");
        write_file(dir / "matrix.csv", "A1,A2\n1.0,2.0\n0.5,-3.0\n");
        write_file(dir / "meta.json", meta);
        CHECK_THROWS_WITH_AS((void)read_dataset(dir), doctest::Contains("row 1"),
                             ValidationError);
    }
    {
        const auto dir = fresh_dir("badcost");
        write_file(dir / "matrix.csv", "A1,A2\n1.0,2.0\n");
        write_file(dir / "meta.json",
                   R"({"attribute_names":["A1","A2"],"weights":[0.5,0.5],"costs":[0.0,1.0]})");
        CHECK_THROWS_WITH_AS((void)read_dataset(dir), doctest::Contains("cost"),
                             ValidationError);
    }
    {
        const auto dir = fresh_dir("badname");
        write_file(dir / "matrix.csv", "A1,B9\n1.0,2.0\n");
        write_file(dir / "meta.json", meta);
        CHECK_THROWS_AS((void)read_dataset(dir), ValidationError);
    }
    {
        const auto dir = fresh_dir("badnumber");
        write_file(dir / "matrix.csv", "A1,A2\n1.0,zebra\n");
        write_file(dir / "meta.json", meta);
        CHECK_THROWS_WITH_AS((void)read_dataset(dir), doctest::Contains("zebra"),
                             ValidationError);
    }
}

TEST_CASE("dataset_checksum ignores nothing") {
    const auto a = generate_dataset(config(30, 3, 16));
    CHECK(dataset_checksum(a) == dataset_checksum(a));
    const auto b = generate_dataset(config(30, 3, 17));
    CHECK(dataset_checksum(a) != dataset_checksum(b));

    auto cells = a.cells();
    cells[5] = std::nextafter(cells[5], 1e9);
    const Dataset perturbed(std::move(cells), 30, 3, a.attribute_names(), a.costs(),
                            a.weights());
    CHECK(dataset_checksum(a) != dataset_checksum(perturbed));
}

TEST_CASE("model artifact round trip") {
    const auto dir = fresh_dir("model");
    ModelArtifact model;
    model.schedule = {2, 0, 1};
    model.alpha = 0.03125;
    PrefixModel p1{1, 0.1, 0.9, 0.01, 0.002};
    PrefixModel p2{2, 0.2, 1.1, 0.02, -0.001};
    model.models = {p1, p2};
    model.upper_bounds = {1.5, 2.5, 0.25};
    model.attribute_names = {"A1", "A2", "A3"};
    model.weights = {0.25, 0.5, 0.75};
    model.training_seeds = {11, 12};
    model.training_checksums = {0xdeadbeefULL, 0x12345678ULL};

    const auto path = dir / "model.json";
    write_model(model, path);
    const auto back = read_model(path);
    CHECK(back.schedule == model.schedule);
    CHECK(back.alpha == model.alpha);
    REQUIRE(back.models.size() == 2);
    for (std::size_t i = 0; i < 2; ++i) {
        CHECK(back.models[i].h == model.models[i].h);
        CHECK(back.models[i].q0_mu == model.models[i].q0_mu);
        CHECK(back.models[i].q1_mu == model.models[i].q1_mu);
        CHECK(back.models[i].q0_sigma == model.models[i].q0_sigma);
        CHECK(back.models[i].q1_sigma == model.models[i].q1_sigma);
    }
    CHECK(back.upper_bounds == model.upper_bounds);
    CHECK(back.attribute_names == model.attribute_names);
    CHECK(back.weights == model.weights);
    CHECK(back.training_seeds == model.training_seeds);
    CHECK(back.training_checksums == model.training_checksums);
}

TEST_CASE("model artifact rejects bad files") {
    const auto dir = fresh_dir("badmodel");
    ModelArtifact model;
    model.schedule = {0, 1};
    PrefixModel pm{1, 0, 1, 0.5, 0};
    model.models = {pm};
    model.upper_bounds = {1.0, 2.0};
    model.attribute_names = {"A1", "A2"};
    model.weights = {0.5, 0.5};
    const auto path = dir / "model.json";
    write_model(model, path);

    // Unsupported version.
    auto doc = nlohmann::json::parse(slurp(path));
    doc["version"] = "999";
    write_file(path, doc.dump());
    CHECK_THROWS_WITH_AS((void)read_model(path), doctest::Contains("version"),
                         ValidationError);

    // Schedule that is not a permutation.
    write_model(model, path);
    doc = nlohmann::json::parse(slurp(path));
    doc["schedule"] = {0, 0};
    write_file(path, doc.dump());
    CHECK_THROWS_AS((void)read_model(path), ValidationError);

    // Field lengths disagreeing with the schedule length.
    write_model(model, path);
    doc = nlohmann::json::parse(slurp(path));
    doc["weights"] = {0.5};
    write_file(path, doc.dump());
    CHECK_THROWS_AS((void)read_model(path), ValidationError);

    CHECK_THROWS_AS((void)read_model(dir / "nope.json"), ValidationError);
}
