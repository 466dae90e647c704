#pragma once

#include <array>

#include "far3/covariance.hpp"
#include "far3/fa3r.hpp"
#include "far3/geometry.hpp"

namespace far3 {

enum class EigMatrix { P, G, K, W };

struct EigenResult {
    std::array<double, 4> eigenvalues{};  // sorted descending
    // Unit eigenvector in the matrix's own component order (K is
    // vector-first; the others are scalar-first).
    QuatScalarFirst chosen_eigenvector;
    char matrix_label = '?';
    double residual = 0.0;  // ||M v - lambda v||
};

// Depressed quartic y^4 + tau1 y^2 + tau2 y + tau3 obtained from the
// characteristic polynomial by the quarter-trace shift.
struct QuarticCoefficients {
    double tau1 = 0.0, tau2 = 0.0, tau3 = 0.0;
};

struct Svd3 {
    Mat3 U;
    Vec3 sigma;  // descending, nonnegative
    Mat3 V;      // a = U diag(sigma) V^T
};

// One-sided cyclic Jacobi, column tolerance 1e-15, at most 30 sweeps.
// Throws SvdNotConverged.
Svd3 jacobi_svd(const Mat3& a);

// Classic closed-form baseline: C = V diag(1, 1, det(U)det(V)) U^T.
SolverReport svd_solve(const CrossCovariance& cov);
SolverReport svd_register(const PointPairSet& pairs);

// Symmetric 4x4 eigenproblem formulations sharing one spectrum. P and G are
// scalar-first, K is vector-first, W is built from the product table.
Mat4Sym build_P(const Mat3& d);
Mat4Sym build_G(const Mat3& x);
Mat4Sym build_K(const Mat3& b, const Vec3& z);
Mat4Sym build_W(const HTable& t);

// Rank-one building blocks of W and the constant structure matrices that
// relate them: h2(x) = M h1(x), h3(x) = N h1(x), M^2 = N^2 = -I.
Mat4 h1_matrix(const Vec3& x);
Mat4 h2_matrix(const Vec3& y);
Mat4 h3_matrix(const Vec3& z);
Mat4 m_matrix();
Mat4 n_matrix();

// Faddeev-LeVerrier trace recursion followed by the quarter-trace shift.
QuarticCoefficients characteristic_quartic(const Mat4Sym& m);

// All four eigenvalues, descending: Ferrari resolvent with a trigonometric
// cubic, then two Newton polish steps on the undepressed quartic.
std::array<double, 4> quartic_eigenvalues(const Mat4Sym& m);

// Eigenpair whose eigenvalue is nearest to target (+infinity selects the
// largest). Eigenvector from the adjugate of M - lambda I, falling back to
// power iteration when the adjugate collapses.
EigenResult eigen_pair(const Mat4Sym& m, double target, char label);

// Independent cross-check: shifted power iteration with orthogonal deflation
// recovers all four eigenpairs. Pass shift > -lambda_min (for example twice
// the Frobenius norm) so the ordering follows algebraic value.
EigenResult power_method_oracle(const Mat4Sym& m, double shift, int iterations);

// Quaternion solve through one of the four formulations. A degenerate top
// eigenvalue is flagged on the report, not thrown; rank <= 1 covariance
// falls back to the canonical completion.
SolverReport eig_solve(const CrossCovariance& cov, EigMatrix which);
SolverReport eig_register(const PointPairSet& pairs, EigMatrix which);

}  // namespace far3
