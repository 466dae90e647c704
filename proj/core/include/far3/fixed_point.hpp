#pragma once

#include <cstdint>
#include <vector>

#include "far3/covariance.hpp"
#include "far3/fa3r.hpp"
#include "far3/geometry.hpp"

namespace far3 {

// Integer-only variant of the cross-product iteration. Values are stored as
// round(x * S) with S = 2^scale_bits; every division truncates toward zero.
struct FixedVec3 {
    std::int64_t x = 0, y = 0, z = 0;

    bool operator==(const FixedVec3&) const = default;
};

struct FixedConfig {
    int scale_bits = 30;            // valid range 8..32
    int max_iterations = 100;
    std::int64_t epsilon_fixed = -1;  // -1 selects round(1e-9 * S^2)
    bool wide_intermediates = false;  // 128-bit products; required above 30 bits
};

struct FixedSeed {
    FixedVec3 h_x, h_y, h_z;
    double prescale = 1.0;  // 1 / max|D_jk| applied before encoding
};

struct FixedStep {
    FixedVec3 h_x, h_y, h_z;
    std::int64_t rho = 0;          // scaled by S
    double step_residual = 0.0;    // exact integer residual divided by S^2
};

struct FixedTrace {
    FixedVec3 initial_h_x, initial_h_y, initial_h_z;
    std::vector<FixedStep> steps;
    int iterations_used = 0;
    bool converged = false;
    bool stationary = false;  // stopped on an exact state repeat (limit cycle)
    double prescale = 1.0;
    int scale_bits = 30;
};

std::int64_t effective_epsilon(const FixedConfig& cfg);

// Prescales by 1/max|D_jk| and encodes the columns of D. Throws ZeroMatrix
// when D is all zeros.
FixedSeed to_fixed(const CrossCovariance& cov, const FixedConfig& cfg);

// Integer iteration; stops on residual < epsilon, an exact state repeat, or
// max_iterations. Throws Overflow when a component leaves the guarded range
// or when scale_bits > 30 without wide_intermediates.
FixedTrace fixed_iterate(const FixedSeed& seed, const FixedConfig& cfg);

// Decodes the final triple, stacks as rows, and projects the result onto an
// exact rotation through a quaternion round trip.
Mat3 rotation_from_fixed(const FixedTrace& trace);

SolverReport fixed_solve(const CrossCovariance& cov, const FixedConfig& cfg);

// Throws TooFewPoints for n < 3.
SolverReport fixed_register(const PointPairSet& pairs, const FixedConfig& cfg);

}  // namespace far3
