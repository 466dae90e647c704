#pragma once

#include <string>
#include <vector>

#include "far3/covariance.hpp"
#include "far3/geometry.hpp"

namespace far3 {

struct Fa3rConfig {
    double epsilon = 1e-12;       // stop when sum of squared h deltas falls below
    int max_iterations = 100;
    enum class Mode { row_variant, column_variant } mode = Mode::row_variant;
};

struct Fa3rStep {
    Vec3 h_x, h_y, h_z;    // triple after this update
    double rho = 0.0;
    double step_residual = 0.0;  // sum of squared deltas against previous triple
};

struct Fa3rTrace {
    Vec3 initial_h_x, initial_h_y, initial_h_z;  // prescaled seeds
    double prescale = 1.0;                       // 1 / max|D_jk|
    std::vector<Fa3rStep> steps;
    int iterations_used = 0;
    bool converged = false;
    bool degenerate_rank = false;
    int rank_estimate = 3;
};

struct SolverReport {
    RigidTransform transform;
    QuatScalarFirst quaternion;
    Fa3rTrace trace;
    double wall_time = 0.0;  // seconds, solver kernel only
    std::string solver_name;
    bool degenerate_rank = false;
    bool degenerate_eigenvalue = false;
};

// Estimated rank of D from its prescaled columns: pairwise cross-product
// norms below 1e-9 mean rank <= 1; |det| below 1e-9 means rank <= 2.
int rank_surrogate(const Mat3& d);

// Best rotation for a rank-1 covariance: maps the dominant column direction
// u onto normalize(D^T u) with the smallest rotation.
Mat3 degenerate_completion(const Mat3& d);

// Cross-product iteration seeded with the columns of D (prescaled by
// 1/max|D_jk|): h_x <- rho (h_x + h_y x h_z) and cyclic, rho = 2/(sum|h|^2+1).
// Throws DegenerateInput when D is all zeros.
Fa3rTrace fa3r_iterate(const CrossCovariance& cov, const Fa3rConfig& cfg);

// Same update rule seeded with the rows of D; converges to the transpose of
// the row-variant result.
Fa3rTrace fa3r_iterate_columns(const CrossCovariance& cov, const Fa3rConfig& cfg);

// Stacks the converged triple as rows. Throws NotOrthonormal when the final
// triple deviates from orthonormality by more than 1e-6.
Mat3 rotation_from_trace(const Fa3rTrace& trace);

// Closed-form quaternion from the converged triple, canonical sign. Falls
// back to rotation extraction near the 180-degree ambiguity.
QuatScalarFirst quaternion_from_trace(const Fa3rTrace& trace);

// Full solve from a covariance: iterate, assemble rotation (degenerate
// completion for rank <= 1), translation b_mean - C r_mean.
SolverReport fa3r_solve(const CrossCovariance& cov, const Fa3rConfig& cfg);

// Throws TooFewPoints for n < 3.
SolverReport fa3r_register(const PointPairSet& pairs, const Fa3rConfig& cfg);

}  // namespace far3
