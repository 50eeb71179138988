// Microbenchmarks for the hot paths: estimator training, query execution and
// alpha selection at protocol scale.

#include <benchmark/benchmark.h>

#include "hrank/algorithms.hpp"
#include "hrank/data_io.hpp"
#include "hrank/tuning.hpp"

namespace {

hrank::Dataset make(std::size_t n, std::size_t m, std::uint64_t seed) {
    hrank::GeneratorConfig config;
    config.n = n;
    config.m = m;
    config.seed = seed;
    return hrank::generate_dataset(config);
}

void BM_TrainEstimator(benchmark::State& state) {
    const auto data = make(static_cast<std::size_t>(state.range(0)), 10, 1);
    const hrank::Dataset sets[] = {data};
    const auto sched = hrank::Schedule::identity(10);
    for (auto _ : state)
        benchmark::DoNotOptimize(hrank::train_estimator(sets, sched));
}
BENCHMARK(BM_TrainEstimator)->Arg(200)->Arg(1000);

void BM_RunTrivial(benchmark::State& state) {
    const auto data = make(1000, 10, 2);
    for (auto _ : state) benchmark::DoNotOptimize(hrank::run_trivial(data, 10));
}
BENCHMARK(BM_RunTrivial);

void BM_RunPr(benchmark::State& state) {
    const auto train = make(1000, 10, 3);
    const auto test = make(1000, 10, 4);
    const hrank::Dataset sets[] = {train};
    const auto sched = hrank::baseline_schedule(train, hrank::BaselineVariant::D, 0);
    const auto est = hrank::train_estimator(sets, sched);
    for (auto _ : state)
        benchmark::DoNotOptimize(hrank::run_pr(test, 10, sched, est, 0.05, true));
}
BENCHMARK(BM_RunPr);

void BM_RunMpro(benchmark::State& state) {
    const auto train = make(1000, 10, 5);
    const auto test = make(1000, 10, 6);
    const hrank::Dataset sets[] = {train};
    const auto sched = hrank::baseline_schedule(train, hrank::BaselineVariant::D, 0);
    const auto bounds = hrank::compute_upper_bounds(sets, train.weights());
    for (auto _ : state)
        benchmark::DoNotOptimize(hrank::run_mpro(test, 10, sched, bounds));
}
BENCHMARK(BM_RunMpro);

void BM_SelectAlpha(benchmark::State& state) {
    const auto train = make(static_cast<std::size_t>(state.range(0)), 10, 7);
    const hrank::Dataset sets[] = {train};
    const auto sched = hrank::baseline_schedule(train, hrank::BaselineVariant::D, 0);
    const auto est = hrank::train_estimator(sets, sched);
    for (auto _ : state)
        benchmark::DoNotOptimize(hrank::select_alpha(sets, 10, sched, est));
}
BENCHMARK(BM_SelectAlpha)->Arg(300)->Arg(1000);

}  // namespace

BENCHMARK_MAIN();
