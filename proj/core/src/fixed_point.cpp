#include "far3/fixed_point.hpp"

#include <chrono>
#include <cmath>

#include "far3/errors.hpp"

namespace far3 {

namespace {

using i128 = __int128;

void validate(const FixedConfig& cfg) {
    if (cfg.scale_bits < 8 || cfg.scale_bits > 32)
        throw Error("scale_bits must lie in [8, 32]");
    if (cfg.scale_bits > 30 && !cfg.wide_intermediates)
        throw Overflow("scale_bits above 30 requires wide_intermediates");
}

std::int64_t encode(double v, std::int64_t s) {
    return std::llround(v * static_cast<double>(s));
}

i128 norm2_i(const FixedVec3& v) {
    return i128(v.x) * v.x + i128(v.y) * v.y + i128(v.z) * v.z;
}

FixedVec3 cross_i(const FixedVec3& a, const FixedVec3& b, std::int64_t s) {
    // Each product stays within 64 bits for scale_bits <= 30 under the
    // component guard; the difference and rescale are taken at full width.
    return {static_cast<std::int64_t>((i128(a.y) * b.z - i128(a.z) * b.y) / s),
            static_cast<std::int64_t>((i128(a.z) * b.x - i128(a.x) * b.z) / s),
            static_cast<std::int64_t>((i128(a.x) * b.y - i128(a.y) * b.x) / s)};
}

FixedVec3 scale_update(const FixedVec3& h, const FixedVec3& c, std::int64_t rho, std::int64_t s) {
    return {static_cast<std::int64_t>((i128(h.x) + c.x) * rho / s),
            static_cast<std::int64_t>((i128(h.y) + c.y) * rho / s),
            static_cast<std::int64_t>((i128(h.z) + c.z) * rho / s)};
}

i128 diff_norm2(const FixedVec3& a, const FixedVec3& b) {
    return i128(a.x - b.x) * (a.x - b.x) + i128(a.y - b.y) * (a.y - b.y) +
           i128(a.z - b.z) * (a.z - b.z);
}

void check_range(const FixedVec3& v, std::int64_t limit) {
    if (std::llabs(v.x) > limit || std::llabs(v.y) > limit || std::llabs(v.z) > limit)
        throw Overflow("iteration state left the guarded component range");
}

Vec3 decode(const FixedVec3& v, std::int64_t s) {
    double inv = 1.0 / static_cast<double>(s);
    return {v.x * inv, v.y * inv, v.z * inv};
}

}  // namespace

std::int64_t effective_epsilon(const FixedConfig& cfg) {
    if (cfg.epsilon_fixed >= 0) return cfg.epsilon_fixed;
    std::int64_t s = std::int64_t(1) << cfg.scale_bits;
    return std::llround(1e-9 * static_cast<double>(s) * static_cast<double>(s));
}

FixedSeed to_fixed(const CrossCovariance& cov, const FixedConfig& cfg) {
    validate(cfg);
    double scale = max_abs_entry(cov.D);
    if (scale == 0.0) throw ZeroMatrix("covariance matrix is all zeros");
    double inv = 1.0 / scale;
    std::int64_t s = std::int64_t(1) << cfg.scale_bits;
    FixedSeed seed;
    seed.prescale = inv;
    Vec3 hx = inv * cov.h_x, hy = inv * cov.h_y, hz = inv * cov.h_z;
    seed.h_x = {encode(hx.x, s), encode(hx.y, s), encode(hx.z, s)};
    seed.h_y = {encode(hy.x, s), encode(hy.y, s), encode(hy.z, s)};
    seed.h_z = {encode(hz.x, s), encode(hz.y, s), encode(hz.z, s)};
    return seed;
}

FixedTrace fixed_iterate(const FixedSeed& seed, const FixedConfig& cfg) {
    validate(cfg);
    std::int64_t s = std::int64_t(1) << cfg.scale_bits;
    std::int64_t limit = s * 5 / 2;
    std::int64_t eps = effective_epsilon(cfg);
    double s2 = static_cast<double>(s) * static_cast<double>(s);

    FixedTrace trace;
    trace.initial_h_x = seed.h_x;
    trace.initial_h_y = seed.h_y;
    trace.initial_h_z = seed.h_z;
    trace.prescale = seed.prescale;
    trace.scale_bits = cfg.scale_bits;

    FixedVec3 hx = seed.h_x, hy = seed.h_y, hz = seed.h_z;
    check_range(hx, limit);
    check_range(hy, limit);
    check_range(hz, limit);

    for (int k = 0; k < cfg.max_iterations; ++k) {
        i128 denom = norm2_i(hx) + norm2_i(hy) + norm2_i(hz) + i128(s) * s;
        std::int64_t rho = static_cast<std::int64_t>((i128(2) * s * s * s) / denom);
        FixedVec3 nx = scale_update(hx, cross_i(hy, hz, s), rho, s);
        FixedVec3 ny = scale_update(hy, cross_i(hz, hx, s), rho, s);
        FixedVec3 nz = scale_update(hz, cross_i(hx, hy, s), rho, s);
        check_range(nx, limit);
        check_range(ny, limit);
        check_range(nz, limit);
        i128 resid = diff_norm2(nx, hx) + diff_norm2(ny, hy) + diff_norm2(nz, hz);
        bool repeated = nx == hx && ny == hy && nz == hz;
        hx = nx;
        hy = ny;
        hz = nz;
        trace.steps.push_back({hx, hy, hz, rho, static_cast<double>(resid) / s2});
        trace.iterations_used = k + 1;
        if (resid < i128(eps)) {
            trace.converged = true;
            break;
        }
        if (repeated) {
            trace.stationary = true;
            break;
        }
    }
    return trace;
}

// Same branch selection as rotation_to_quat, minus its orthonormality gate:
// a decoded triple carries a defect of order 1/S, which exceeds that gate at
// coarse scales.
static QuatScalarFirst quat_from_decoded(const Mat3& c) {
    double t = trace(c);
    QuatScalarFirst q;
    if (t >= c.m[0][0] && t >= c.m[1][1] && t >= c.m[2][2]) {
        double s = std::sqrt(t + 1.0) * 2.0;
        q.q0 = 0.25 * s;
        q.q1 = (c.m[2][1] - c.m[1][2]) / s;
        q.q2 = (c.m[0][2] - c.m[2][0]) / s;
        q.q3 = (c.m[1][0] - c.m[0][1]) / s;
    } else if (c.m[0][0] >= c.m[1][1] && c.m[0][0] >= c.m[2][2]) {
        double s = std::sqrt(1.0 + c.m[0][0] - c.m[1][1] - c.m[2][2]) * 2.0;
        q.q0 = (c.m[2][1] - c.m[1][2]) / s;
        q.q1 = 0.25 * s;
        q.q2 = (c.m[0][1] + c.m[1][0]) / s;
        q.q3 = (c.m[0][2] + c.m[2][0]) / s;
    } else if (c.m[1][1] >= c.m[2][2]) {
        double s = std::sqrt(1.0 + c.m[1][1] - c.m[0][0] - c.m[2][2]) * 2.0;
        q.q0 = (c.m[0][2] - c.m[2][0]) / s;
        q.q1 = (c.m[0][1] + c.m[1][0]) / s;
        q.q2 = 0.25 * s;
        q.q3 = (c.m[1][2] + c.m[2][1]) / s;
    } else {
        double s = std::sqrt(1.0 + c.m[2][2] - c.m[0][0] - c.m[1][1]) * 2.0;
        q.q0 = (c.m[1][0] - c.m[0][1]) / s;
        q.q1 = (c.m[0][2] + c.m[2][0]) / s;
        q.q2 = (c.m[1][2] + c.m[2][1]) / s;
        q.q3 = 0.25 * s;
    }
    return quat_canonicalized(quat_normalized(q));
}

Mat3 rotation_from_fixed(const FixedTrace& trace) {
    std::int64_t s = std::int64_t(1) << trace.scale_bits;
    FixedVec3 fx = trace.initial_h_x, fy = trace.initial_h_y, fz = trace.initial_h_z;
    if (!trace.steps.empty()) {
        const FixedStep& last = trace.steps.back();
        fx = last.h_x;
        fy = last.h_y;
        fz = last.h_z;
    }
    Mat3 raw = from_rows(decode(fx, s), decode(fy, s), decode(fz, s));
    // Quantization leaves a symmetric orthonormality defect of order 1/S;
    // the quaternion round trip removes it without biasing the rotation.
    return quat_to_rotation(quat_from_decoded(raw));
}

SolverReport fixed_solve(const CrossCovariance& cov, const FixedConfig& cfg) {
    auto t0 = std::chrono::steady_clock::now();
    SolverReport report;
    report.solver_name = "fa3r-fixed";
    int rank = rank_surrogate(cov.D);
    if (max_abs_entry(cov.D) == 0.0) throw ZeroMatrix("covariance matrix is all zeros");
    Mat3 c;
    if (rank <= 1) {
        c = degenerate_completion(cov.D);
        report.degenerate_rank = true;
        report.trace.converged = true;
        report.trace.rank_estimate = rank;
        report.trace.degenerate_rank = true;
    } else {
        FixedSeed seed = to_fixed(cov, cfg);
        FixedTrace trace = fixed_iterate(seed, cfg);
        c = rotation_from_fixed(trace);
        std::int64_t s = std::int64_t(1) << cfg.scale_bits;
        report.trace.prescale = seed.prescale;
        report.trace.initial_h_x = decode(seed.h_x, s);
        report.trace.initial_h_y = decode(seed.h_y, s);
        report.trace.initial_h_z = decode(seed.h_z, s);
        for (const FixedStep& st : trace.steps)
            report.trace.steps.push_back({decode(st.h_x, s), decode(st.h_y, s),
                                          decode(st.h_z, s),
                                          static_cast<double>(st.rho) / s,
                                          st.step_residual});
        report.trace.iterations_used = trace.iterations_used;
        report.trace.converged = trace.converged || trace.stationary;
        report.trace.rank_estimate = rank;
        report.trace.degenerate_rank = rank < 3;
        report.degenerate_rank = rank < 3;
    }
    report.quaternion = rotation_to_quat(c);
    report.transform.rotation = c;
    report.transform.translation = cov.b_mean - c * cov.r_mean;
    report.wall_time = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
    return report;
}

SolverReport fixed_register(const PointPairSet& pairs, const FixedConfig& cfg) {
    if (pairs.size() < 3) throw TooFewPoints("registration needs at least 3 point pairs");
    return fixed_solve(cross_covariance(pairs), cfg);
}

}  // namespace far3
