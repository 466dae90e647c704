#include "harness.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <sstream>
#include <thread>

#include "far3/errors.hpp"
#include "json.hpp"

namespace far3::tools {

namespace {

double median_sorted(std::vector<double>& v) {
    if (v.empty()) return 0.0;
    std::sort(v.begin(), v.end());
    std::size_t n = v.size();
    return n % 2 ? v[n / 2] : (v[n / 2 - 1] + v[n / 2]) / 2.0;
}

struct TrialSample {
    double time = 0.0;
    double iterations = 0.0;
};

}  // namespace

SynthSpec bench_instance(int n_points, double snr_value, std::uint64_t seed) {
    Rng rng(seed ^ 0xA5A5'A5A5'DEAD'BEEFull);
    SynthSpec spec;
    spec.phi = rng.uniform(-M_PI, M_PI);
    spec.theta = rng.uniform(-1.5, 1.5);
    spec.psi = rng.uniform(-M_PI, M_PI);
    spec.true_translation = {rng.uniform(-200, 200), rng.uniform(-200, 200),
                             rng.uniform(-200, 200)};
    spec.n_points = n_points;
    spec.rng_seed = seed;
    double sigma = spec.point_box / (std::sqrt(3.0) * snr_value);
    spec.noise_variances = {sigma * sigma, sigma * sigma, sigma * sigma};
    return spec;
}

BenchResult run_bench(const BenchSpec& spec) {
    int threads = thread_count_from_env();
    int solver_count = static_cast<int>(spec.solvers.size());

    for (int t = 0; t < spec.warmup; ++t) {
        auto [pairs, truth] = generate(bench_instance(spec.n_points, spec.snr, spec.seed + 1000000 + t));
        CrossCovariance cov = cross_covariance(pairs);
        for (const std::string& s : spec.solvers) solve_cov(cov, s, spec.fa3r, spec.fixed);
        (void)truth;
    }

    std::vector<std::vector<TrialSample>> samples(solver_count);
    for (auto& v : samples) v.resize(spec.trials);
    std::vector<double> cov_times(spec.trials);

    auto worker = [&](int w) {
        for (int t = w; t < spec.trials; t += threads) {
            auto [pairs, truth] = generate(bench_instance(spec.n_points, spec.snr, spec.seed + t));
            (void)truth;
            auto c0 = std::chrono::steady_clock::now();
            CrossCovariance cov = cross_covariance(pairs);
            cov_times[t] =
                std::chrono::duration<double>(std::chrono::steady_clock::now() - c0).count();
            for (int s = 0; s < solver_count; ++s) {
                SolverReport rep = solve_cov(cov, spec.solvers[s], spec.fa3r, spec.fixed);
                samples[s][t] = {rep.wall_time,
                                 static_cast<double>(rep.trace.iterations_used)};
            }
        }
    };
    if (threads == 1) {
        worker(0);
    } else {
        std::vector<std::thread> pool;
        for (int w = 0; w < threads; ++w) pool.emplace_back(worker, w);
        for (auto& th : pool) th.join();
    }

    BenchResult result;
    result.covariance_median = median_sorted(cov_times);
    for (int s = 0; s < solver_count; ++s) {
        BenchRow row;
        row.solver = spec.solvers[s];
        row.trials = spec.trials;
        std::vector<double> times(spec.trials), iters(spec.trials);
        for (int t = 0; t < spec.trials; ++t) {
            times[t] = samples[s][t].time;
            iters[t] = samples[s][t].iterations;
        }
        std::sort(times.begin(), times.end());
        for (double v : times) row.total_time += v;
        std::size_t n = times.size();
        row.median_per_call = n % 2 ? times[n / 2] : (times[n / 2 - 1] + times[n / 2]) / 2.0;
        row.median_iterations = median_sorted(iters);
        row.per_iteration =
            row.median_iterations > 0.0 ? row.median_per_call / row.median_iterations : 0.0;
        result.rows.push_back(std::move(row));
    }
    return result;
}

std::vector<ConvergenceRow> run_convergence(const std::vector<double>& snrs, double epsilon,
                                            std::uint64_t seed, int n_points) {
    std::vector<ConvergenceRow> rows;
    for (std::size_t i = 0; i < snrs.size(); ++i) {
        SynthSpec spec = bench_instance(n_points, snrs[i], seed + i);
        auto [pairs, truth] = generate(spec);
        (void)truth;
        CrossCovariance cov = cross_covariance(pairs);
        Fa3rConfig cfg;
        cfg.epsilon = epsilon;
        Fa3rTrace trace = fa3r_iterate(cov, cfg);
        for (std::size_t k = 0; k < trace.steps.size(); ++k) {
            const Fa3rStep& st = trace.steps[k];
            Mat3 c = from_rows(st.h_x, st.h_y, st.h_z);
            RigidTransform t{c, cov.b_mean - c * cov.r_mean};
            double err = std::max(metric_error(pairs, t), 1e-300);
            rows.push_back({snrs[i], static_cast<int>(k) + 1, std::log(err), st.step_residual});
        }
    }
    return rows;
}

int thread_count_from_env() {
    const char* env = std::getenv("FAR3_THREADS");
    if (!env) return 1;
    char* end = nullptr;
    long v = std::strtol(env, &end, 10);
    if (end == env) return 1;
    return static_cast<int>(std::clamp(v, 1L, 64L));
}

std::string fmt17(double v) {
    char buf[64];
    std::snprintf(buf, sizeof buf, "%.17g", v);
    return buf;
}

std::string bench_csv(const BenchResult& result) {
    std::ostringstream out;
    out << "solver,trials,total_time_s,median_per_call_s,median_iterations,per_iteration_s\n";
    out << "covariance,," << fmt17(result.covariance_median) << "," << fmt17(result.covariance_median)
        << ",,\n";
    for (const BenchRow& r : result.rows)
        out << r.solver << "," << r.trials << "," << fmt17(r.total_time) << ","
            << fmt17(r.median_per_call) << "," << fmt17(r.median_iterations) << ","
            << fmt17(r.per_iteration) << "\n";
    return out.str();
}

std::string convergence_csv(const std::vector<ConvergenceRow>& rows) {
    std::ostringstream out;
    out << "snr,k,ln_metric_error,step_residual\n";
    for (const ConvergenceRow& r : rows)
        out << fmt17(r.snr) << "," << r.k << "," << fmt17(r.ln_metric_error) << ","
            << fmt17(r.step_residual) << "\n";
    return out.str();
}

std::string cases_csv(const std::vector<EvalRecord>& records) {
    std::ostringstream out;
    out << "case,solver,phi,theta,psi,gimbal_lock,tx,ty,tz,metric_error,geodesic_error,"
           "iterations,wall_time_s,degenerate_rank\n";
    for (const EvalRecord& r : records)
        out << r.case_index << "," << r.solver_name << "," << fmt17(r.euler.phi) << ","
            << fmt17(r.euler.theta) << "," << fmt17(r.euler.psi) << ","
            << (r.euler.gimbal_lock ? 1 : 0) << "," << fmt17(r.translation.x) << ","
            << fmt17(r.translation.y) << "," << fmt17(r.translation.z) << ","
            << fmt17(r.metric_error) << "," << fmt17(r.geodesic_error) << "," << r.iterations
            << "," << fmt17(r.wall_time) << "," << (r.degenerate_rank ? 1 : 0) << "\n";
    return out.str();
}

std::string cases_json(const std::vector<EvalRecord>& records) {
    nlohmann::json arr = nlohmann::json::array();
    for (const EvalRecord& r : records) {
        arr.push_back({{"case", r.case_index},
                       {"solver", r.solver_name},
                       {"phi", r.euler.phi},
                       {"theta", r.euler.theta},
                       {"psi", r.euler.psi},
                       {"gimbal_lock", r.euler.gimbal_lock},
                       {"translation", {r.translation.x, r.translation.y, r.translation.z}},
                       {"metric_error", r.metric_error},
                       {"geodesic_error", r.geodesic_error},
                       {"iterations", r.iterations},
                       {"wall_time_s", r.wall_time},
                       {"degenerate_rank", r.degenerate_rank}});
    }
    return arr.dump(2) + "\n";
}

}  // namespace far3::tools
