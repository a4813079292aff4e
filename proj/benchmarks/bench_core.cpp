#include <benchmark/benchmark.h>

#include "arw/correlation.hpp"
#include "arw/kac_rice.hpp"
#include "arw/lattice.hpp"
#include "arw/sampler.hpp"
#include "arw/spectral.hpp"
#include "arw/torus_grid.hpp"

using namespace arw;

static void BM_EnumerateLambdaScan(benchmark::State& state) {
    u64 n = static_cast<u64>(state.range(0));
    for (auto _ : state) {
        auto fs = enumerate_lambda_scan(n);
        benchmark::DoNotOptimize(fs.points.data());
    }
}
BENCHMARK(BM_EnumerateLambdaScan)->Arg(1105)->Arg(32045)->Arg(1048585);

static void BM_CountS6(benchmark::State& state) {
    auto fs = enumerate_lambda(static_cast<u64>(state.range(0)));
    for (auto _ : state) {
        benchmark::DoNotOptimize(count_s6(fs));
    }
    state.SetComplexityN(fs.multiplicity());
}
BENCHMARK(BM_CountS6)->Arg(1105)->Arg(32045)->Complexity();

static void BM_MuHat4(benchmark::State& state) {
    auto fs = enumerate_lambda(static_cast<u64>(state.range(0)));
    for (auto _ : state) {
        benchmark::DoNotOptimize(mu_hat(fs, 4));
    }
}
BENCHMARK(BM_MuHat4)->Arg(1105)->Arg(32045);

static void BM_CovarianceJet(benchmark::State& state) {
    auto fs = enumerate_lambda(static_cast<u64>(state.range(0)));
    Point x{0.123, 0.456};
    for (auto _ : state) {
        benchmark::DoNotOptimize(covariance_jet(fs, x));
    }
}
BENCHMARK(BM_CovarianceJet)->Arg(65)->Arg(1105);

static void BM_K2Exact(benchmark::State& state) {
    auto fs = enumerate_lambda(1105);
    auto pert = perturbation(covariance_jet(fs, {0.123, 0.456}), fs.energy());
    int nodes = static_cast<int>(state.range(0));
    for (auto _ : state) {
        benchmark::DoNotOptimize(k2_exact(pert, K2Options{nodes, 0, 0, false}));
    }
}
BENCHMARK(BM_K2Exact)->Arg(32)->Arg(96)->Arg(192);

static void BM_RGrid(benchmark::State& state) {
    auto fs = enumerate_lambda(1105);
    int M = static_cast<int>(state.range(0));
    for (auto _ : state) {
        auto g = r_grid(fs, M);
        benchmark::DoNotOptimize(g.data());
    }
}
BENCHMARK(BM_RGrid)->Arg(405)->Arg(432)->Arg(512);

static void BM_SampleField(benchmark::State& state) {
    auto fs = enumerate_lambda(1105);
    int M = static_cast<int>(state.range(0));
    u64 seed = 1;
    for (auto _ : state) {
        auto g = sample_field(fs, M, seed++);
        benchmark::DoNotOptimize(g.values.data());
    }
}
BENCHMARK(BM_SampleField)->Arg(512)->Arg(1024);

static void BM_NodalLength(benchmark::State& state) {
    auto fs = enumerate_lambda(1105);
    auto g = sample_field(fs, static_cast<int>(state.range(0)), 9);
    for (auto _ : state) {
        benchmark::DoNotOptimize(nodal_length(g).total_length);
    }
}
BENCHMARK(BM_NodalLength)->Arg(512)->Arg(1024);

static void BM_LemmaSuite(benchmark::State& state) {
    auto fs = enumerate_lambda(static_cast<u64>(state.range(0)));
    for (auto _ : state) {
        auto rows = lemma_integral_suite(fs);
        benchmark::DoNotOptimize(rows.data());
    }
}
BENCHMARK(BM_LemmaSuite)->Arg(65)->Arg(1105);

BENCHMARK_MAIN();
