#include "far3/fa3r.hpp"

#include <chrono>
#include <cmath>

#include "far3/errors.hpp"

namespace far3 {

namespace {

constexpr double kDegenerateTol = 1e-9;

double triple_norm2(const Vec3& a, const Vec3& b, const Vec3& c) {
    return norm2(a) + norm2(b) + norm2(c);
}

Fa3rTrace iterate_impl(Vec3 hx, Vec3 hy, Vec3 hz, double prescale, const Fa3rConfig& cfg) {
    Fa3rTrace trace;
    trace.initial_h_x = hx;
    trace.initial_h_y = hy;
    trace.initial_h_z = hz;
    trace.prescale = prescale;
    trace.rank_estimate = 3;

    for (int k = 0; k < cfg.max_iterations; ++k) {
        double rho = 2.0 / (triple_norm2(hx, hy, hz) + 1.0);
        Vec3 nx = rho * (hx + cross(hy, hz));
        Vec3 ny = rho * (hy + cross(hz, hx));
        Vec3 nz = rho * (hz + cross(hx, hy));
        double resid = triple_norm2(nx - hx, ny - hy, nz - hz);
        hx = nx;
        hy = ny;
        hz = nz;
        trace.steps.push_back({hx, hy, hz, rho, resid});
        trace.iterations_used = k + 1;
        if (resid < cfg.epsilon) {
            trace.converged = true;
            break;
        }
    }
    return trace;
}

void final_triple(const Fa3rTrace& trace, Vec3& hx, Vec3& hy, Vec3& hz) {
    if (trace.steps.empty()) {
        hx = trace.initial_h_x;
        hy = trace.initial_h_y;
        hz = trace.initial_h_z;
    } else {
        const Fa3rStep& s = trace.steps.back();
        hx = s.h_x;
        hy = s.h_y;
        hz = s.h_z;
    }
}

double orthonormality_defect(const Vec3& hx, const Vec3& hy, const Vec3& hz) {
    double d = 0.0;
    d = std::max(d, std::fabs(norm(hx) - 1.0));
    d = std::max(d, std::fabs(norm(hy) - 1.0));
    d = std::max(d, std::fabs(norm(hz) - 1.0));
    d = std::max(d, std::fabs(dot(hx, hy)));
    d = std::max(d, std::fabs(dot(hy, hz)));
    d = std::max(d, std::fabs(dot(hz, hx)));
    return d;
}

}  // namespace

int rank_surrogate(const Mat3& d) {
    double scale = max_abs_entry(d);
    if (scale < 1e-300) return 0;
    Mat3 s = (1.0 / scale) * d;
    Vec3 c0 = col(s, 0), c1 = col(s, 1), c2 = col(s, 2);
    double cmax = std::max({norm(cross(c0, c1)), norm(cross(c1, c2)), norm(cross(c2, c0))});
    if (cmax < kDegenerateTol) return 1;
    if (std::fabs(determinant(s)) < kDegenerateTol) return 2;
    return 3;
}

Mat3 degenerate_completion(const Mat3& d) {
    double scale = max_abs_entry(d);
    if (scale < 1e-300) throw DegenerateInput("covariance matrix is all zeros");
    Mat3 s = (1.0 / scale) * d;
    Vec3 cols[3] = {col(s, 0), col(s, 1), col(s, 2)};
    int best = 0;
    for (int j = 1; j < 3; ++j)
        if (norm2(cols[j]) > norm2(cols[best])) best = j;
    Vec3 u = normalized(cols[best]);
    Vec3 w = transpose(s) * u;
    if (norm(w) < 1e-300) throw DegenerateInput("covariance matrix has no usable direction");
    return minimal_rotation(u, normalized(w));
}

Fa3rTrace fa3r_iterate(const CrossCovariance& cov, const Fa3rConfig& cfg) {
    double scale = max_abs_entry(cov.D);
    if (scale < 1e-300) throw DegenerateInput("covariance matrix is all zeros");
    double inv = 1.0 / scale;
    Fa3rTrace trace = iterate_impl(inv * cov.h_x, inv * cov.h_y, inv * cov.h_z, inv, cfg);
    trace.rank_estimate = rank_surrogate(cov.D);
    trace.degenerate_rank = trace.rank_estimate < 3;
    return trace;
}

Fa3rTrace fa3r_iterate_columns(const CrossCovariance& cov, const Fa3rConfig& cfg) {
    double scale = max_abs_entry(cov.D);
    if (scale < 1e-300) throw DegenerateInput("covariance matrix is all zeros");
    double inv = 1.0 / scale;
    Fa3rTrace trace = iterate_impl(inv * row(cov.D, 0), inv * row(cov.D, 1),
                                   inv * row(cov.D, 2), inv, cfg);
    trace.rank_estimate = rank_surrogate(cov.D);
    trace.degenerate_rank = trace.rank_estimate < 3;
    return trace;
}

Mat3 rotation_from_trace(const Fa3rTrace& trace) {
    Vec3 hx, hy, hz;
    final_triple(trace, hx, hy, hz);
    if (orthonormality_defect(hx, hy, hz) > 1e-6)
        throw NotOrthonormal("final iteration triple is not orthonormal within 1e-6");
    return from_rows(hx, hy, hz);
}

QuatScalarFirst quaternion_from_trace(const Fa3rTrace& trace) {
    Vec3 hx, hy, hz;
    final_triple(trace, hx, hy, hz);
    if (orthonormality_defect(hx, hy, hz) > 1e-6)
        throw NotOrthonormal("final iteration triple is not orthonormal within 1e-6");
    QuatScalarFirst q{1.0 + hx.x + hy.y + hz.z,
                      hz.y - hy.z,
                      hx.z - hz.x,
                      hy.x - hx.y};
    double n = quat_norm(q);
    if (n < 1e-5)  // 180-degree ambiguity: the closed form loses precision
        return rotation_to_quat(rotation_from_trace(trace));
    return quat_canonicalized(QuatScalarFirst{q.q0 / n, q.q1 / n, q.q2 / n, q.q3 / n});
}

SolverReport fa3r_solve(const CrossCovariance& cov, const Fa3rConfig& cfg) {
    auto t0 = std::chrono::steady_clock::now();
    SolverReport report;
    report.solver_name = cfg.mode == Fa3rConfig::Mode::row_variant ? "fa3r" : "fa3r-columns";
    Fa3rTrace trace = cfg.mode == Fa3rConfig::Mode::row_variant
                          ? fa3r_iterate(cov, cfg)
                          : fa3r_iterate_columns(cov, cfg);
    Mat3 c;
    if (trace.rank_estimate <= 1) {
        c = degenerate_completion(cov.D);
        report.quaternion = rotation_to_quat(c);
    } else {
        c = rotation_from_trace(trace);
        if (cfg.mode == Fa3rConfig::Mode::column_variant) {
            c = transpose(c);
            report.quaternion = rotation_to_quat(c);
        } else {
            report.quaternion = quaternion_from_trace(trace);
        }
    }
    report.transform.rotation = c;
    report.transform.translation = cov.b_mean - c * cov.r_mean;
    report.trace = std::move(trace);
    report.degenerate_rank = report.trace.degenerate_rank;
    report.wall_time = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
    return report;
}

SolverReport fa3r_register(const PointPairSet& pairs, const Fa3rConfig& cfg) {
    if (pairs.size() < 3) throw TooFewPoints("registration needs at least 3 point pairs");
    return fa3r_solve(cross_covariance(pairs), cfg);
}

}  // namespace far3
