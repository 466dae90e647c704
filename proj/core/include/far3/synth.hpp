#pragma once

#include <array>
#include <cstdint>
#include <random>
#include <string>
#include <utility>
#include <vector>

#include "far3/covariance.hpp"
#include "far3/geometry.hpp"

namespace far3 {

// Deterministic generator: 64-bit Mersenne Twister, uniform doubles from the
// top 53 bits, Gaussians through Box-Muller with a cached spare.
class Rng {
public:
    explicit Rng(std::uint64_t seed) : eng_(seed) {}

    double uniform();                       // [0, 1)
    double uniform(double a, double b);
    double gaussian();                      // standard normal

private:
    std::mt19937_64 eng_;
    bool has_spare_ = false;
    double spare_ = 0.0;
};

struct SynthSpec {
    double phi = 0.0, theta = 0.0, psi = 0.0;  // z-y-x Euler angles of the true rotation
    Vec3 true_translation;
    Vec3 noise_variances;      // per-axis variance of the additive noise on b
    int n_points = 100;
    int target_rank = 3;       // 3 = full box, 2 = random plane, 1 = random line
    std::uint64_t rng_seed = 0;
    double point_box = 100.0;  // reference points uniform in [-box, box]^3
};

struct EulerAngles {
    double phi = 0.0, theta = 0.0, psi = 0.0;
    bool gimbal_lock = false;  // |theta| within 1e-9 of pi/2; phi forced to 0
};

struct EvalRecord {
    int case_index = 0;
    std::string solver_name;
    EulerAngles euler;
    Vec3 translation;
    double metric_error = 0.0;
    double geodesic_error = 0.0;
    int iterations = 0;
    double wall_time = 0.0;
    bool degenerate_rank = false;
};

// C = Rz(psi) Ry(theta) Rx(phi)
Mat3 euler_to_rotation(double phi, double theta, double psi);
EulerAngles euler_from_rotation(const Mat3& c);

// Draws reference points, applies the true motion, adds axis-wise Gaussian
// noise to the body side. Returns the pairs and the true transform.
std::pair<PointPairSet, RigidTransform> generate(const SynthSpec& spec);

// ||r_mean|| / ||b_mean - T_true||. Throws ZeroDenominator.
double snr(const PointPairSet& pairs, const Vec3& true_translation);

// Mean squared residual (1/n) sum ||b - C r - T||^2.
double metric_error(const PointPairSet& pairs, const RigidTransform& t);

// Nine catalog cases: exact motions across full-rank, plane, line, gimbal
// lock, large n, and anisotropic noise configurations.
std::array<SynthSpec, 9> case_catalog_specs();

// Runs every catalog case through the closed-form, eigenvalue, and iterative
// solvers; one record per (case, solver).
std::vector<EvalRecord> run_case_catalog();

}  // namespace far3
