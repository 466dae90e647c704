#include <algorithm>
#include <cstdint>
#include <cstdlib>
#include <iostream>
#include <sstream>
#include <string>
#include <vector>

#include "CLI11.hpp"
#include "dispatch.hpp"
#include "far3/errors.hpp"
#include "far3/synth.hpp"
#include "harness.hpp"
#include "icp.hpp"
#include "json.hpp"
#include "pointpair_io.hpp"

namespace {

using namespace far3;
using namespace far3::tools;

Mat3 parse_d_matrix(const std::string& text) {
    std::string s = text;
    for (char& ch : s)
        if (ch == ',') ch = ' ';
    std::istringstream ss(s);
    std::vector<double> vals;
    std::string tok;
    while (ss >> tok) {
        char* end = nullptr;
        double v = std::strtod(tok.c_str(), &end);
        if (end != tok.c_str() + tok.size())
            throw ParseError(0, "--d-matrix: invalid number '" + tok + "'");
        vals.push_back(v);
    }
    if (vals.size() != 9) throw ParseError(0, "--d-matrix needs 9 comma-separated numbers");
    Mat3 d;
    for (int i = 0; i < 3; ++i)
        for (int j = 0; j < 3; ++j) d.m[i][j] = vals[i * 3 + j];
    return d;
}

nlohmann::json report_json(const SolverReport& rep) {
    const Mat3& c = rep.transform.rotation;
    nlohmann::json j{
        {"solver", rep.solver_name},
        {"rotation",
         {{c.m[0][0], c.m[0][1], c.m[0][2]},
          {c.m[1][0], c.m[1][1], c.m[1][2]},
          {c.m[2][0], c.m[2][1], c.m[2][2]}}},
        {"quaternion", {rep.quaternion.q0, rep.quaternion.q1, rep.quaternion.q2, rep.quaternion.q3}},
        {"translation",
         {rep.transform.translation.x, rep.transform.translation.y, rep.transform.translation.z}},
        {"iterations", rep.trace.iterations_used},
        {"converged", rep.trace.converged},
        {"degenerate_rank", rep.degenerate_rank},
        {"degenerate_eigenvalue", rep.degenerate_eigenvalue},
        {"wall_time_s", rep.wall_time},
    };
    return j;
}

std::string report_csv(const SolverReport& rep, bool has_metric, double metric) {
    std::ostringstream out;
    out << "solver,q0,q1,q2,q3,r00,r01,r02,r10,r11,r12,r20,r21,r22,tx,ty,tz,"
           "metric_error,iterations,converged,wall_time_s\n";
    out << rep.solver_name << "," << fmt17(rep.quaternion.q0) << "," << fmt17(rep.quaternion.q1)
        << "," << fmt17(rep.quaternion.q2) << "," << fmt17(rep.quaternion.q3);
    for (int i = 0; i < 3; ++i)
        for (int j = 0; j < 3; ++j) out << "," << fmt17(rep.transform.rotation.m[i][j]);
    out << "," << fmt17(rep.transform.translation.x) << "," << fmt17(rep.transform.translation.y)
        << "," << fmt17(rep.transform.translation.z) << ","
        << (has_metric ? fmt17(metric) : std::string()) << "," << rep.trace.iterations_used << ","
        << (rep.trace.converged ? 1 : 0) << "," << fmt17(rep.wall_time) << "\n";
    return out.str();
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"rigid 3D point-set registration toolkit"};
    app.require_subcommand(1);

    std::string solver = "fa3r";
    double epsilon = 1e-12;
    int max_iter = 100;
    int scale_bits = 30;
    bool wide = false;
    std::string format = "json";
    std::uint64_t seed = 1;
    double snr_value = 10.0;
    int n_points = 10000;
    int trials = 10000;
    int warmup = 100;

    auto add_solver_opts = [&](CLI::App* cmd) {
        cmd->add_option("--solver", solver, "solver name")
            ->check(CLI::IsMember(solver_names()));
        cmd->add_option("--epsilon", epsilon, "iteration stop threshold");
        cmd->add_option("--max-iter", max_iter, "iteration cap");
        cmd->add_option("--scale-bits", scale_bits, "fixed-point scale bits")
            ->check(CLI::Range(8, 32));
        cmd->add_flag("--wide", wide, "128-bit fixed-point intermediates");
    };

    CLI::App* solve = app.add_subcommand("solve", "register one point-pair file");
    std::string solve_file, d_matrix_text;
    solve->add_option("file", solve_file, "point pair file");
    solve->add_option("--d-matrix", d_matrix_text, "9 comma-separated covariance entries");
    add_solver_opts(solve);
    solve->add_option("--format", format, "output format")
        ->check(CLI::IsMember({"json", "csv"}));

    CLI::App* bench = app.add_subcommand("bench", "timing comparison on synthetic instances");
    std::string solvers_text = "svd,eig-w,fa3r";
    bench->add_option("--solvers", solvers_text, "comma-separated solver list");
    bench->add_option("--n", n_points, "points per instance");
    bench->add_option("--trials", trials, "timed trials");
    bench->add_option("--warmup", warmup, "untimed warmup trials");
    bench->add_option("--snr", snr_value, "signal-to-noise ratio");
    bench->add_option("--seed", seed, "base RNG seed");
    add_solver_opts(bench);

    CLI::App* conv = app.add_subcommand("convergence", "per-iteration objective trace");
    std::vector<double> conv_snrs{0.0001, 0.01, 1.0, 100.0};
    int conv_n = 1000;
    conv->add_option("--snr", conv_snrs, "one or more SNR values");
    conv->add_option("--epsilon", epsilon, "iteration stop threshold");
    conv->add_option("--seed", seed, "base RNG seed");
    conv->add_option("--n", conv_n, "points per instance");

    CLI::App* icp = app.add_subcommand("icp", "align two point clouds without correspondences");
    std::string src_file, tgt_file, nn_text = "auto";
    int max_outer = 50;
    double threshold = 1e-8;
    icp->add_option("source", src_file, "source cloud file")->required();
    icp->add_option("target", tgt_file, "target cloud file")->required();
    icp->add_option("--max-outer", max_outer, "outer iteration cap");
    icp->add_option("--threshold", threshold, "transform delta stop threshold");
    icp->add_option("--nn", nn_text, "nearest-neighbor backend")
        ->check(CLI::IsMember({"auto", "brute", "grid"}));
    add_solver_opts(icp);

    CLI::App* cases = app.add_subcommand("cases", "run the built-in case catalog");
    std::string cases_format = "csv";
    cases->add_option("--format", cases_format, "output format")
        ->check(CLI::IsMember({"json", "csv"}));

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        int code = app.exit(e);
        return code == 0 ? 0 : 2;
    }

    Fa3rConfig fa3r_cfg;
    fa3r_cfg.epsilon = epsilon;
    fa3r_cfg.max_iterations = max_iter;
    FixedConfig fixed_cfg;
    fixed_cfg.scale_bits = scale_bits;
    fixed_cfg.max_iterations = max_iter;
    fixed_cfg.wide_intermediates = wide || scale_bits > 30;

    try {
        if (solve->parsed()) {
            if (solve_file.empty() && d_matrix_text.empty())
                throw ParseError(0, "need a point pair file or --d-matrix");
            SolverReport rep;
            bool has_metric = false;
            double metric = 0.0;
            if (!d_matrix_text.empty()) {
                CrossCovariance cov = covariance_from_matrix(parse_d_matrix(d_matrix_text));
                rep = solve_cov(cov, solver, fa3r_cfg, fixed_cfg);
            } else {
                PointPairSet pairs = read_pair_file(solve_file);
                rep = solve_pairs(pairs, solver, fa3r_cfg, fixed_cfg);
                has_metric = true;
                metric = metric_error(pairs, rep.transform);
            }
            if (format == "csv") {
                std::cout << report_csv(rep, has_metric, metric);
            } else {
                nlohmann::json j = report_json(rep);
                if (has_metric) j["metric_error"] = metric;
                std::cout << j.dump(2) << "\n";
            }
        } else if (bench->parsed()) {
            BenchSpec spec;
            spec.solvers.clear();
            std::istringstream ss(solvers_text);
            std::string name;
            while (std::getline(ss, name, ','))
                if (!name.empty()) spec.solvers.push_back(name);
            for (const std::string& s : spec.solvers)
                if (std::find(solver_names().begin(), solver_names().end(), s) ==
                    solver_names().end())
                    throw ParseError(0, "unknown solver '" + s + "'");
            spec.n_points = n_points;
            spec.trials = trials;
            spec.warmup = warmup;
            spec.snr = snr_value;
            spec.seed = seed;
            spec.fa3r = fa3r_cfg;
            spec.fixed = fixed_cfg;
            std::cout << bench_csv(run_bench(spec));
        } else if (conv->parsed()) {
            std::cout << convergence_csv(run_convergence(conv_snrs, epsilon, seed, conv_n));
        } else if (icp->parsed()) {
            IcpConfig cfg;
            cfg.max_outer_iterations = max_outer;
            cfg.threshold = threshold;
            cfg.solver = solver;
            cfg.fa3r = fa3r_cfg;
            cfg.fixed = fixed_cfg;
            cfg.nn = nn_text == "brute" ? IcpConfig::Nn::brute_force
                     : nn_text == "grid" ? IcpConfig::Nn::grid
                                         : IcpConfig::Nn::automatic;
            IcpResult res =
                icp_align(read_cloud_file(src_file), read_cloud_file(tgt_file), cfg);
            const Mat3& c = res.transform.rotation;
            nlohmann::json j{
                {"solver", cfg.solver},
                {"rotation",
                 {{c.m[0][0], c.m[0][1], c.m[0][2]},
                  {c.m[1][0], c.m[1][1], c.m[1][2]},
                  {c.m[2][0], c.m[2][1], c.m[2][2]}}},
                {"translation",
                 {res.transform.translation.x, res.transform.translation.y,
                  res.transform.translation.z}},
                {"outer_iterations", res.outer_iterations},
                {"rms_trace", res.rms_trace},
            };
            std::cout << j.dump(2) << "\n";
        } else if (cases->parsed()) {
            auto records = run_case_catalog();
            std::cout << (cases_format == "json" ? cases_json(records) : cases_csv(records));
        }
    } catch (const ParseError& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 2;
    } catch (const Error& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 1;
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 1;
    }
    return 0;
}
