#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "dispatch.hpp"
#include "far3/synth.hpp"

namespace far3::tools {

struct BenchSpec {
    std::vector<std::string> solvers{"svd", "eig-w", "fa3r"};
    int n_points = 10000;
    double snr = 10.0;
    int trials = 10000;
    int warmup = 100;
    std::uint64_t seed = 1;
    Fa3rConfig fa3r;
    FixedConfig fixed;
};

struct BenchRow {
    std::string solver;
    int trials = 0;
    double total_time = 0.0;         // sum of per-call solver time, seconds
    double median_per_call = 0.0;
    double median_iterations = 0.0;  // 0 for non-iterative solvers
    double per_iteration = 0.0;      // median_per_call / median_iterations
};

struct BenchResult {
    double covariance_median = 0.0;  // covariance construction, timed separately
    std::vector<BenchRow> rows;
};

// A registration instance whose noise level realizes the requested SNR:
// sigma = box / (sqrt(3) snr) per axis. The motion is drawn from the seed.
SynthSpec bench_instance(int n_points, double snr_value, std::uint64_t seed);

// Per-trial fresh instances with per-trial seeds; every solver sees the same
// covariance within a trial. Honors FAR3_THREADS; aggregation is sorted, so
// results do not depend on the worker count.
BenchResult run_bench(const BenchSpec& spec);

struct ConvergenceRow {
    double snr = 0.0;
    int k = 0;
    double ln_metric_error = 0.0;
    double step_residual = 0.0;
};

// Objective value after each iteration (rotation read from the raw triple,
// translation re-optimized) for one instance per SNR.
std::vector<ConvergenceRow> run_convergence(const std::vector<double>& snrs, double epsilon,
                                            std::uint64_t seed, int n_points);

// FAR3_THREADS clamped into [1, 64]; 1 when unset or unparsable.
int thread_count_from_env();

// 17 significant digits; round-trips a double exactly.
std::string fmt17(double v);

std::string bench_csv(const BenchResult& result);
std::string convergence_csv(const std::vector<ConvergenceRow>& rows);
std::string cases_csv(const std::vector<EvalRecord>& records);
std::string cases_json(const std::vector<EvalRecord>& records);

}  // namespace far3::tools
