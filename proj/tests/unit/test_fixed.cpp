#include <doctest.h>

#include <cstdint>

#include "far3/errors.hpp"
#include "far3/fixed_point.hpp"
#include "test_helpers.hpp"

using namespace far3;
using namespace far3::testutil;

namespace {

constexpr std::int64_t kS30 = std::int64_t(1) << 30;

CrossCovariance noisy_instance(Rng& rng, Mat3* c_true_out = nullptr) {
    Mat3 c_true = random_rotation(rng);
    if (c_true_out) *c_true_out = c_true;
    Mat3 d = random_matrix(rng, 0.02) + transpose(c_true);
    return covariance_from_matrix(d);
}

bool traces_identical(const FixedTrace& a, const FixedTrace& b) {
    if (a.steps.size() != b.steps.size()) return false;
    if (!(a.initial_h_x == b.initial_h_x && a.initial_h_y == b.initial_h_y &&
          a.initial_h_z == b.initial_h_z))
        return false;
    for (std::size_t i = 0; i < a.steps.size(); ++i) {
        if (!(a.steps[i].h_x == b.steps[i].h_x && a.steps[i].h_y == b.steps[i].h_y &&
              a.steps[i].h_z == b.steps[i].h_z && a.steps[i].rho == b.steps[i].rho))
            return false;
    }
    return a.converged == b.converged && a.stationary == b.stationary;
}

}  // namespace

TEST_CASE("encoding rounds to the nearest representable value") {
    Mat3 d = from_rows({1.0, 0.5, -0.25}, {0.125, -1.0, 0.75}, {0.0, 0.3, -0.6});
    FixedConfig cfg;
    FixedSeed seed = to_fixed(covariance_from_matrix(d), cfg);
    CHECK(seed.prescale == 1.0);  // max |entry| is already 1
    CHECK(seed.h_x.x == kS30);
    CHECK(seed.h_x.y == kS30 / 8);
    CHECK(seed.h_x.z == 0);
    CHECK(seed.h_y.x == kS30 / 2);
    CHECK(seed.h_y.y == -kS30);
    CHECK(seed.h_z.y == kS30 * 3 / 4);
    CHECK(seed.h_z.x == -kS30 / 4);
    // 0.3 is not exactly representable; nearest integer multiple of 2^-30
    CHECK(seed.h_y.z == std::llround(0.3 * static_cast<double>(kS30)));
    CHECK(seed.h_z.z == std::llround(-0.6 * static_cast<double>(kS30)));
}

TEST_CASE("default epsilon follows the scale") {
    FixedConfig cfg;
    CHECK(effective_epsilon(cfg) ==
          std::llround(1e-9 * static_cast<double>(kS30) * static_cast<double>(kS30)));
    cfg.epsilon_fixed = 123;
    CHECK(effective_epsilon(cfg) == 123);
    cfg.epsilon_fixed = 0;
    CHECK(effective_epsilon(cfg) == 0);
}

TEST_CASE("configuration validation") {
    CrossCovariance cov = covariance_from_matrix(Mat3::identity());
    FixedConfig cfg;
    cfg.scale_bits = 7;
    CHECK_THROWS_AS((void)to_fixed(cov, cfg), Error);
    cfg.scale_bits = 33;
    CHECK_THROWS_AS((void)to_fixed(cov, cfg), Error);
    cfg.scale_bits = 31;
    CHECK_THROWS_AS((void)to_fixed(cov, cfg), Overflow);
    cfg.wide_intermediates = true;
    CHECK_NOTHROW((void)to_fixed(cov, cfg));
    CHECK_THROWS_AS((void)to_fixed(covariance_from_matrix(Mat3{}), FixedConfig{}), ZeroMatrix);
}

TEST_CASE("identity covariance fixes in one update with rho = S/2") {
    FixedConfig cfg;
    FixedSeed seed = to_fixed(covariance_from_matrix(Mat3::identity()), cfg);
    FixedTrace trace = fixed_iterate(seed, cfg);
    CHECK(trace.converged);
    CHECK_FALSE(trace.stationary);
    CHECK(trace.iterations_used == 1);
    CHECK(trace.steps[0].rho == kS30 / 2);
    CHECK(trace.steps[0].step_residual == 0.0);
    CHECK(max_diff(rotation_from_fixed(trace), Mat3::identity()) < 1e-9);
}

TEST_CASE("an exact state repeat stops as stationary when epsilon is zero") {
    FixedConfig cfg;
    cfg.epsilon_fixed = 0;  // residual 0 is not < 0, so only the repeat guard can stop
    FixedSeed seed = to_fixed(covariance_from_matrix(Mat3::identity()), cfg);
    FixedTrace trace = fixed_iterate(seed, cfg);
    CHECK(trace.stationary);
    CHECK_FALSE(trace.converged);
    CHECK(trace.iterations_used == 1);
}

TEST_CASE("reruns are bit-identical") {
    Rng rng(41);
    for (int t = 0; t < 20; ++t) {
        CrossCovariance cov = noisy_instance(rng);
        FixedConfig cfg;
        FixedSeed s1 = to_fixed(cov, cfg), s2 = to_fixed(cov, cfg);
        CHECK(traces_identical(fixed_iterate(s1, cfg), fixed_iterate(s2, cfg)));
    }
}

TEST_CASE("wide flag does not change scale-30 results") {
    Rng rng(42);
    CrossCovariance cov = noisy_instance(rng);
    FixedConfig narrow, wide;
    wide.wide_intermediates = true;
    CHECK(traces_identical(fixed_iterate(to_fixed(cov, narrow), narrow),
                           fixed_iterate(to_fixed(cov, wide), wide)));
}

TEST_CASE("matches the floating solver to quantization accuracy") {
    Rng rng(43);
    double worst = 0.0;
    for (int t = 0; t < 100; ++t) {
        CrossCovariance cov = noisy_instance(rng);
        SolverReport fixed = fixed_solve(cov, {});
        SolverReport dbl = fa3r_solve(cov, {});
        CHECK(fixed.trace.converged);
        worst = std::max(worst,
                         geodesic_angle(fixed.transform.rotation, dbl.transform.rotation));
    }
    CHECK(worst < 1e-4);      // acceptance bound
    CHECK(worst < 5e-6);      // typical quantization level at 30 bits
}

TEST_CASE("result is an exact rotation after the quaternion round trip") {
    Rng rng(44);
    for (int t = 0; t < 30; ++t) {
        SolverReport rep = fixed_solve(noisy_instance(rng), {});
        CHECK(rotation_defect(rep.transform.rotation) < 1e-12);
    }
}

TEST_CASE("scale bits 32 works with wide intermediates") {
    Rng rng(45);
    CrossCovariance cov = noisy_instance(rng);
    FixedConfig cfg;
    cfg.scale_bits = 32;
    cfg.wide_intermediates = true;
    SolverReport rep = fixed_solve(cov, cfg);
    CHECK(rep.trace.converged);
    SolverReport dbl = fa3r_solve(cov, {});
    CHECK(geodesic_angle(rep.transform.rotation, dbl.transform.rotation) < 1e-6);
}

TEST_CASE("coarse scales still converge, with looser agreement") {
    Rng rng(46);
    CrossCovariance cov = noisy_instance(rng);
    FixedConfig cfg;
    cfg.scale_bits = 12;
    SolverReport rep = fixed_solve(cov, cfg);
    CHECK(rep.trace.converged);  // residual stop or exact state repeat
    SolverReport dbl = fa3r_solve(cov, {});
    CHECK(geodesic_angle(rep.transform.rotation, dbl.transform.rotation) < 2e-2);
}

TEST_CASE("solver report plumbing") {
    Rng rng(47);
    PointPairSet pairs;
    Mat3 c_true = random_rotation(rng);
    for (int i = 0; i < 20; ++i) {
        Vec3 r{rng.uniform(-10, 10), rng.uniform(-10, 10), rng.uniform(-10, 10)};
        pairs.reference_points.push_back(r);
        pairs.body_points.push_back(c_true * r + Vec3{1, 2, 3});
    }
    SolverReport rep = fixed_register(pairs, {});
    CHECK(rep.solver_name == "fa3r-fixed");
    CHECK(geodesic_angle(rep.transform.rotation, c_true) < 1e-5);
    CHECK(max_diff(rep.transform.translation, Vec3{1, 2, 3}) < 1e-3);

    PointPairSet two;
    two.reference_points = {{1, 0, 0}, {0, 1, 0}};
    two.body_points = two.reference_points;
    CHECK_THROWS_AS((void)fixed_register(two, {}), TooFewPoints);
}

TEST_CASE("rank-1 input falls back to the canonical completion") {
    Rng rng(48);
    Vec3 u = random_unit(rng), v = random_unit(rng);
    Mat3 d = from_cols(v.x * u, v.y * u, v.z * u);
    SolverReport rep = fixed_solve(covariance_from_matrix(d), {});
    CHECK(rep.degenerate_rank);
    CHECK(rotation_defect(rep.transform.rotation) < 1e-12);
}
