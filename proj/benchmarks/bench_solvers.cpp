#include <benchmark/benchmark.h>

#include "dispatch.hpp"
#include "far3/covariance.hpp"
#include "far3/fa3r.hpp"
#include "far3/fixed_point.hpp"
#include "far3/synth.hpp"
#include "harness.hpp"

namespace {

using namespace far3;

PointPairSet make_pairs(int n) {
    return generate(tools::bench_instance(n, 10.0, 42)).first;
}

void BM_Covariance(benchmark::State& state) {
    PointPairSet pairs = make_pairs(static_cast<int>(state.range(0)));
    for (auto _ : state) {
        CrossCovariance cov = cross_covariance(pairs);
        benchmark::DoNotOptimize(cov);
    }
    state.SetComplexityN(state.range(0));
}
BENCHMARK(BM_Covariance)->RangeMultiplier(2)->Range(1000, 16000)->Complexity(benchmark::oN);

void BM_Solver(benchmark::State& state, const char* solver) {
    PointPairSet pairs = make_pairs(10000);
    CrossCovariance cov = cross_covariance(pairs);
    Fa3rConfig fa3r;
    FixedConfig fixed;
    for (auto _ : state) {
        SolverReport rep = tools::solve_cov(cov, solver, fa3r, fixed);
        benchmark::DoNotOptimize(rep);
    }
}
BENCHMARK_CAPTURE(BM_Solver, svd, "svd");
BENCHMARK_CAPTURE(BM_Solver, eig_p, "eig-p");
BENCHMARK_CAPTURE(BM_Solver, eig_g, "eig-g");
BENCHMARK_CAPTURE(BM_Solver, eig_k, "eig-k");
BENCHMARK_CAPTURE(BM_Solver, eig_w, "eig-w");
BENCHMARK_CAPTURE(BM_Solver, fa3r, "fa3r");
BENCHMARK_CAPTURE(BM_Solver, fa3r_fixed, "fa3r-fixed");

void BM_Fa3rIterate(benchmark::State& state) {
    PointPairSet pairs = make_pairs(10000);
    CrossCovariance cov = cross_covariance(pairs);
    Fa3rConfig cfg;
    for (auto _ : state) {
        Fa3rTrace trace = fa3r_iterate(cov, cfg);
        benchmark::DoNotOptimize(trace);
    }
}
BENCHMARK(BM_Fa3rIterate);

void BM_FixedIterate(benchmark::State& state) {
    PointPairSet pairs = make_pairs(10000);
    CrossCovariance cov = cross_covariance(pairs);
    FixedConfig cfg;
    FixedSeed seed = to_fixed(cov, cfg);
    for (auto _ : state) {
        FixedTrace trace = fixed_iterate(seed, cfg);
        benchmark::DoNotOptimize(trace);
    }
}
BENCHMARK(BM_FixedIterate);

}  // namespace

BENCHMARK_MAIN();
