#include "far3/baselines.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <limits>

#include "far3/errors.hpp"

namespace far3 {

namespace {

double trace4(const Mat4& a) { return a.m[0][0] + a.m[1][1] + a.m[2][2] + a.m[3][3]; }

Mat4 add_diag(const Mat4& a, double c) {
    Mat4 r = a;
    for (int i = 0; i < 4; ++i) r.m[i][i] += c;
    return r;
}

// det of the 3x3 minor of a with row i and column j removed
double minor3(const Mat4& a, int i, int j) {
    int r[3], c[3], ri = 0, ci = 0;
    for (int k = 0; k < 4; ++k) {
        if (k != i) r[ri++] = k;
        if (k != j) c[ci++] = k;
    }
    return a.m[r[0]][c[0]] * (a.m[r[1]][c[1]] * a.m[r[2]][c[2]] - a.m[r[1]][c[2]] * a.m[r[2]][c[1]]) -
           a.m[r[0]][c[1]] * (a.m[r[1]][c[0]] * a.m[r[2]][c[2]] - a.m[r[1]][c[2]] * a.m[r[2]][c[0]]) +
           a.m[r[0]][c[2]] * (a.m[r[1]][c[0]] * a.m[r[2]][c[1]] - a.m[r[1]][c[1]] * a.m[r[2]][c[0]]);
}

// Largest real root of w^3 + a w^2 + b w + c, polished once.
double cubic_largest_root(double a, double b, double c) {
    double p = b - a * a / 3.0;
    double q = 2.0 * a * a * a / 27.0 - a * b / 3.0 + c;
    double t;
    double disc = q * q / 4.0 + p * p * p / 27.0;
    if (p < 0.0 && disc <= 0.0) {
        double m = 2.0 * std::sqrt(-p / 3.0);
        double arg = 3.0 * q / (p * m);
        double phi = std::acos(std::clamp(arg, -1.0, 1.0));
        t = m * std::cos(phi / 3.0);
    } else {
        double s = std::sqrt(std::max(disc, 0.0));
        t = std::cbrt(-q / 2.0 + s) + std::cbrt(-q / 2.0 - s);
    }
    double w = t - a / 3.0;
    double f = ((w + a) * w + b) * w + c;
    double fp = (3.0 * w + 2.0 * a) * w + b;
    if (std::fabs(fp) > 1e-300) w -= f / fp;
    return w;
}

// Real roots of y^4 + p y^2 + q y + r; callers guarantee a symmetric-matrix
// origin so all four roots are real up to rounding.
std::array<double, 4> solve_depressed_quartic(double p, double q, double r) {
    std::array<double, 4> y;
    if (std::fabs(q) < 1e-14 * (1.0 + std::fabs(p) + std::fabs(r))) {
        double disc = std::sqrt(std::max(p * p - 4.0 * r, 0.0));
        double a2 = std::max((-p + disc) / 2.0, 0.0);
        double b2 = std::max((-p - disc) / 2.0, 0.0);
        y = {std::sqrt(a2), -std::sqrt(a2), std::sqrt(b2), -std::sqrt(b2)};
        return y;
    }
    double w = cubic_largest_root(2.0 * p, p * p - 4.0 * r, -q * q);
    w = std::max(w, 0.0);
    double s = std::sqrt(w);
    double qs = s > 0.0 ? q / s : 0.0;
    double u = (p + w - qs) / 2.0;
    double v = (p + w + qs) / 2.0;
    double d1 = std::sqrt(std::max(w - 4.0 * u, 0.0));
    double d2 = std::sqrt(std::max(w - 4.0 * v, 0.0));
    y = {(-s + d1) / 2.0, (-s - d1) / 2.0, (s + d2) / 2.0, (s - d2) / 2.0};
    return y;
}

struct CharPoly {
    double c3, c2, c1, c0;  // lambda^4 + c3 l^3 + c2 l^2 + c1 l + c0

    double eval(double x) const { return (((x + c3) * x + c2) * x + c1) * x + c0; }
    double deriv(double x) const { return ((4.0 * x + 3.0 * c3) * x + 2.0 * c2) * x + c1; }
};

CharPoly faddeev_leverrier(const Mat4& m) {
    CharPoly p{};
    Mat4 n = m;
    p.c3 = -trace4(n);
    n = m * add_diag(n, p.c3);
    p.c2 = -trace4(n) / 2.0;
    n = m * add_diag(n, p.c2);
    p.c1 = -trace4(n) / 3.0;
    n = m * add_diag(n, p.c1);
    p.c0 = -trace4(n) / 4.0;
    return p;
}

std::array<double, 4> quartic_roots(const CharPoly& cp) {
    double c3 = cp.c3, c2 = cp.c2, c1 = cp.c1, c0 = cp.c0;
    double p = c2 - 0.375 * c3 * c3;
    double q = c1 - 0.5 * c3 * c2 + 0.125 * c3 * c3 * c3;
    double r = c0 - 0.25 * c3 * c1 + c3 * c3 * c2 / 16.0 - 3.0 * c3 * c3 * c3 * c3 / 256.0;
    std::array<double, 4> roots = solve_depressed_quartic(p, q, r);
    for (double& x : roots) {
        x -= c3 / 4.0;
        for (int it = 0; it < 2; ++it) {
            double d = cp.deriv(x);
            if (std::fabs(d) < 1e-12) break;
            x -= cp.eval(x) / d;
        }
    }
    std::sort(roots.begin(), roots.end(), std::greater<double>());
    return roots;
}

// Unit null-ish vector of a via the largest adjugate column; false when the
// adjugate collapses (eigenvalue multiplicity).
bool adjugate_direction(const Mat4& a, double v[4]) {
    double best2 = 0.0;
    int best = -1;
    double cof[4][4];
    for (int i = 0; i < 4; ++i)
        for (int j = 0; j < 4; ++j)
            cof[i][j] = ((i + j) % 2 ? -1.0 : 1.0) * minor3(a, i, j);
    // column k of adj(a) is row k of the cofactor matrix
    for (int k = 0; k < 4; ++k) {
        double n2 = 0.0;
        for (int i = 0; i < 4; ++i) n2 += cof[k][i] * cof[k][i];
        if (n2 > best2) {
            best2 = n2;
            best = k;
        }
    }
    if (best < 0 || std::sqrt(best2) < 1e-12) return false;
    double inv = 1.0 / std::sqrt(best2);
    for (int i = 0; i < 4; ++i) v[i] = cof[best][i] * inv;
    return true;
}

double eig_residual(const Mat4& m, const double v[4], double lambda) {
    double r2 = 0.0;
    for (int i = 0; i < 4; ++i) {
        double s = -lambda * v[i];
        for (int j = 0; j < 4; ++j) s += m.m[i][j] * v[j];
        r2 += s * s;
    }
    return std::sqrt(r2);
}

}  // namespace

Svd3 jacobi_svd(const Mat3& d) {
    Mat3 a = d;
    Mat3 v = Mat3::identity();
    constexpr double tol = 1e-15;
    bool clean = false;
    for (int sweep = 0; sweep < 30 && !clean; ++sweep) {
        clean = true;
        for (int p = 0; p < 2; ++p) {
            for (int q = p + 1; q < 3; ++q) {
                double alpha = 0.0, beta = 0.0, gamma = 0.0;
                for (int i = 0; i < 3; ++i) {
                    alpha += a.m[i][p] * a.m[i][p];
                    beta += a.m[i][q] * a.m[i][q];
                    gamma += a.m[i][p] * a.m[i][q];
                }
                if (gamma == 0.0 || std::fabs(gamma) <= tol * std::sqrt(alpha * beta)) continue;
                clean = false;
                double zeta = (beta - alpha) / (2.0 * gamma);
                double t = (zeta >= 0.0 ? 1.0 : -1.0) / (std::fabs(zeta) + std::sqrt(1.0 + zeta * zeta));
                double c = 1.0 / std::sqrt(1.0 + t * t);
                double s = c * t;
                for (int i = 0; i < 3; ++i) {
                    double ap = a.m[i][p], aq = a.m[i][q];
                    a.m[i][p] = c * ap - s * aq;
                    a.m[i][q] = s * ap + c * aq;
                    double vp = v.m[i][p], vq = v.m[i][q];
                    v.m[i][p] = c * vp - s * vq;
                    v.m[i][q] = s * vp + c * vq;
                }
            }
        }
    }
    if (!clean) throw SvdNotConverged("column orthogonalization did not settle in 30 sweeps");

    double sig[3];
    for (int j = 0; j < 3; ++j) sig[j] = norm(col(a, j));
    int order[3] = {0, 1, 2};
    std::sort(order, order + 3, [&](int i, int j) { return sig[i] > sig[j]; });

    Svd3 out;
    out.sigma = {sig[order[0]], sig[order[1]], sig[order[2]]};
    Vec3 ucols[3], vcols[3];
    double tiny = sig[order[0]] * 1e-12;
    int valid = 0;
    for (int j = 0; j < 3; ++j) {
        vcols[j] = col(v, order[j]);
        if (sig[order[j]] > tiny && sig[order[j]] > 0.0) {
            ucols[j] = col(a, order[j]) / sig[order[j]];
            valid = j + 1;
        }
    }
    if (valid == 0) {
        out.U = Mat3::identity();
        out.V = from_cols(vcols[0], vcols[1], vcols[2]);
        return out;
    }
    if (valid == 1) {
        Vec3 e{1, 0, 0};
        double ax = std::fabs(ucols[0].x), ay = std::fabs(ucols[0].y), az = std::fabs(ucols[0].z);
        if (ay <= ax && ay <= az) e = {0, 1, 0};
        else if (az <= ax && az <= ay) e = {0, 0, 1};
        ucols[1] = normalized(e - dot(e, ucols[0]) * ucols[0]);
    }
    if (valid <= 2) ucols[2] = cross(ucols[0], ucols[1]);
    out.U = from_cols(ucols[0], ucols[1], ucols[2]);
    out.V = from_cols(vcols[0], vcols[1], vcols[2]);
    return out;
}

SolverReport svd_solve(const CrossCovariance& cov) {
    auto t0 = std::chrono::steady_clock::now();
    Svd3 f = jacobi_svd(cov.D);
    double sgn = determinant(f.U) * determinant(f.V) < 0.0 ? -1.0 : 1.0;
    Mat3 c;
    for (int i = 0; i < 3; ++i)
        for (int j = 0; j < 3; ++j)
            c.m[i][j] = f.V.m[i][0] * f.U.m[j][0] + f.V.m[i][1] * f.U.m[j][1] +
                        sgn * f.V.m[i][2] * f.U.m[j][2];
    SolverReport report;
    report.solver_name = "svd";
    report.trace.converged = true;
    report.transform.rotation = c;
    report.transform.translation = cov.b_mean - c * cov.r_mean;
    report.quaternion = rotation_to_quat(c);
    report.degenerate_rank = rank_surrogate(cov.D) < 3;
    report.wall_time = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
    return report;
}

SolverReport svd_register(const PointPairSet& pairs) {
    if (pairs.size() < 3) throw TooFewPoints("registration needs at least 3 point pairs");
    return svd_solve(cross_covariance(pairs));
}

Mat4Sym build_P(const Mat3& d) {
    Mat4Sym p;
    p.set(0, 0, trace(d));
    p.set(0, 1, d.m[1][2] - d.m[2][1]);
    p.set(0, 2, d.m[2][0] - d.m[0][2]);
    p.set(0, 3, d.m[0][1] - d.m[1][0]);
    double t = trace(d);
    for (int i = 0; i < 3; ++i)
        for (int j = i; j < 3; ++j)
            p.set(i + 1, j + 1, d.m[i][j] + d.m[j][i] - (i == j ? t : 0.0));
    return p;
}

Mat4Sym build_G(const Mat3& x) {
    Mat4Sym g;
    double xx = x.m[0][0], yy = x.m[1][1], zz = x.m[2][2];
    g.set(0, 0, xx + yy + zz);
    g.set(0, 1, x.m[1][2] - x.m[2][1]);
    g.set(0, 2, x.m[2][0] - x.m[0][2]);
    g.set(0, 3, x.m[0][1] - x.m[1][0]);
    g.set(1, 1, xx - yy - zz);
    g.set(1, 2, x.m[0][1] + x.m[1][0]);
    g.set(1, 3, x.m[0][2] + x.m[2][0]);
    g.set(2, 2, -xx + yy - zz);
    g.set(2, 3, x.m[1][2] + x.m[2][1]);
    g.set(3, 3, -xx - yy + zz);
    return g;
}

Mat4Sym build_K(const Mat3& b, const Vec3& z) {
    Mat4Sym k;
    double t = trace(b);
    for (int i = 0; i < 3; ++i)
        for (int j = i; j < 3; ++j)
            k.set(i, j, b.m[i][j] + b.m[j][i] - (i == j ? t : 0.0));
    k.set(0, 3, z.x);
    k.set(1, 3, z.y);
    k.set(2, 3, z.z);
    k.set(3, 3, t);
    return k;
}

Mat4Sym build_W(const HTable& t) {
    Mat4Sym w;
    w.set(0, 0, t.Hx1 + t.Hy2 + t.Hz3);
    w.set(0, 1, -t.Hy3 + t.Hz2);
    w.set(0, 2, -t.Hz1 + t.Hx3);
    w.set(0, 3, -t.Hx2 + t.Hy1);
    w.set(1, 1, t.Hx1 - t.Hy2 - t.Hz3);
    w.set(1, 2, t.Hx2 + t.Hy1);
    w.set(1, 3, t.Hx3 + t.Hz1);
    w.set(2, 2, t.Hy2 - t.Hx1 - t.Hz3);
    w.set(2, 3, t.Hy3 + t.Hz2);
    w.set(3, 3, t.Hz3 - t.Hy2 - t.Hx1);
    return w;
}

Mat4 h1_matrix(const Vec3& x) {
    Mat4 h;
    double a = x.x, b = x.y, c = x.z;
    double rows[4][4] = {{a, 0, -c, b}, {0, a, b, c}, {-c, b, -a, 0}, {b, c, 0, -a}};
    for (int i = 0; i < 4; ++i)
        for (int j = 0; j < 4; ++j) h.m[i][j] = rows[i][j];
    return h;
}

Mat4 h2_matrix(const Vec3& y) {
    Mat4 h;
    double a = y.x, b = y.y, c = y.z;
    double rows[4][4] = {{b, c, 0, -a}, {c, -b, a, 0}, {0, a, b, c}, {-a, 0, c, -b}};
    for (int i = 0; i < 4; ++i)
        for (int j = 0; j < 4; ++j) h.m[i][j] = rows[i][j];
    return h;
}

Mat4 h3_matrix(const Vec3& z) {
    Mat4 h;
    double a = z.x, b = z.y, c = z.z;
    double rows[4][4] = {{c, -b, a, 0}, {-b, -c, 0, a}, {a, 0, -c, b}, {0, a, b, c}};
    for (int i = 0; i < 4; ++i)
        for (int j = 0; j < 4; ++j) h.m[i][j] = rows[i][j];
    return h;
}

Mat4 m_matrix() {
    Mat4 m;
    m.m[0][3] = 1;
    m.m[1][2] = -1;
    m.m[2][1] = 1;
    m.m[3][0] = -1;
    return m;
}

Mat4 n_matrix() {
    Mat4 n;
    n.m[0][2] = -1;
    n.m[1][3] = -1;
    n.m[2][0] = 1;
    n.m[3][1] = 1;
    return n;
}

QuarticCoefficients characteristic_quartic(const Mat4Sym& m) {
    CharPoly cp = faddeev_leverrier(m.full());
    QuarticCoefficients q;
    double c3 = cp.c3;
    q.tau1 = cp.c2 - 0.375 * c3 * c3;
    q.tau2 = cp.c1 - 0.5 * c3 * cp.c2 + 0.125 * c3 * c3 * c3;
    q.tau3 = cp.c0 - 0.25 * c3 * cp.c1 + c3 * c3 * cp.c2 / 16.0 - 3.0 * c3 * c3 * c3 * c3 / 256.0;
    return q;
}

std::array<double, 4> quartic_eigenvalues(const Mat4Sym& m) {
    Mat4 full = m.full();
    double f = frobenius_norm(full);
    if (f < 1e-300) return {0.0, 0.0, 0.0, 0.0};
    Mat4Sym scaled;
    for (int i = 0; i < 4; ++i)
        for (int j = i; j < 4; ++j) scaled.set(i, j, m.at(i, j) / f);
    std::array<double, 4> roots = quartic_roots(faddeev_leverrier(scaled.full()));
    for (double& x : roots) x *= f;
    return roots;
}

EigenResult eigen_pair(const Mat4Sym& m, double target, char label) {
    EigenResult out;
    out.matrix_label = label;
    out.eigenvalues = quartic_eigenvalues(m);

    int pick = 0;
    if (!std::isinf(target)) {
        for (int i = 1; i < 4; ++i)
            if (std::fabs(out.eigenvalues[i] - target) <
                std::fabs(out.eigenvalues[pick] - target))
                pick = i;
    }
    double lambda = out.eigenvalues[pick];

    Mat4 full = m.full();
    double f = frobenius_norm(full);
    Mat4 shifted = add_diag((1.0 / f) * full, -lambda / f);
    double v[4];
    if (!adjugate_direction(shifted, v)) {
        // The adjugate vanishes only when lambda is (numerically) repeated.
        // Power-iterate on c I - (M - lambda I)^2: its dominant eigenvector
        // belongs to the eigenvalue nearest lambda, even inside a cluster.
        Mat4 sq = shifted * shifted;
        double c = frobenius_norm(sq) + 1.0;
        Mat4 b = add_diag(-1.0 * sq, c);
        v[0] = 1.0;
        v[1] = 0.7;
        v[2] = -0.5;
        v[3] = 0.3;
        for (int it = 0; it < 2000; ++it) {
            double w[4];
            for (int i = 0; i < 4; ++i) {
                w[i] = 0.0;
                for (int j = 0; j < 4; ++j) w[i] += b.m[i][j] * v[j];
            }
            double n = std::sqrt(w[0] * w[0] + w[1] * w[1] + w[2] * w[2] + w[3] * w[3]);
            if (n < 1e-300) break;
            for (int i = 0; i < 4; ++i) v[i] = w[i] / n;
            if (it % 64 == 63 && eig_residual(full, v, lambda) < 1e-13 * f) break;
        }
    }
    out.chosen_eigenvector = {v[0], v[1], v[2], v[3]};
    out.residual = eig_residual(full, v, lambda);
    return out;
}

EigenResult power_method_oracle(const Mat4Sym& m, double shift, int iterations) {
    Mat4 a = add_diag(m.full(), shift);
    double found[4][4];
    double lambdas[4];
    for (int e = 0; e < 4; ++e) {
        double v[4];
        for (int i = 0; i < 4; ++i) v[i] = 1.0 / (1.0 + i + 3.0 * e) + (i == e ? 1.0 : 0.0);
        for (int it = 0; it < iterations; ++it) {
            for (int k = 0; k < e; ++k) {
                double d = 0.0;
                for (int i = 0; i < 4; ++i) d += v[i] * found[k][i];
                for (int i = 0; i < 4; ++i) v[i] -= d * found[k][i];
            }
            double w[4];
            for (int i = 0; i < 4; ++i) {
                w[i] = 0.0;
                for (int j = 0; j < 4; ++j) w[i] += a.m[i][j] * v[j];
            }
            double n = std::sqrt(w[0] * w[0] + w[1] * w[1] + w[2] * w[2] + w[3] * w[3]);
            if (n < 1e-300) break;
            for (int i = 0; i < 4; ++i) v[i] = w[i] / n;
        }
        double lam = 0.0;
        for (int i = 0; i < 4; ++i)
            for (int j = 0; j < 4; ++j) lam += v[i] * a.m[i][j] * v[j];
        lambdas[e] = lam - shift;
        for (int i = 0; i < 4; ++i) found[e][i] = v[i];
    }
    int order[4] = {0, 1, 2, 3};
    std::sort(order, order + 4, [&](int i, int j) { return lambdas[i] > lambdas[j]; });
    EigenResult out;
    out.matrix_label = '?';
    for (int i = 0; i < 4; ++i) out.eigenvalues[i] = lambdas[order[i]];
    const double* top = found[order[0]];
    out.chosen_eigenvector = {top[0], top[1], top[2], top[3]};
    out.residual = eig_residual(m.full(), top, out.eigenvalues[0]);
    return out;
}

SolverReport eig_solve(const CrossCovariance& cov, EigMatrix which) {
    auto t0 = std::chrono::steady_clock::now();
    double f = frobenius_norm(cov.D);
    if (f < 1e-300) throw DegenerateInput("covariance matrix is all zeros");
    Mat3 dn = (1.0 / f) * cov.D;

    SolverReport report;
    report.trace.converged = true;
    int rank = rank_surrogate(cov.D);
    report.degenerate_rank = rank < 3;
    report.trace.rank_estimate = rank;
    report.trace.degenerate_rank = rank < 3;

    Mat4Sym mat;
    double target = std::numeric_limits<double>::infinity();
    bool conjugate = false, vector_first = false;
    char label = '?';
    switch (which) {
        case EigMatrix::P:
            report.solver_name = "eig-p";
            label = 'P';
            mat = build_P(dn);
            break;
        case EigMatrix::G:
            report.solver_name = "eig-g";
            label = 'G';
            mat = build_G(transpose(dn));
            conjugate = true;
            break;
        case EigMatrix::K: {
            report.solver_name = "eig-k";
            label = 'K';
            Mat3 b = transpose(dn);
            Vec3 z{b.m[1][2] - b.m[2][1], b.m[2][0] - b.m[0][2], b.m[0][1] - b.m[1][0]};
            mat = build_K(b, z);
            conjugate = true;
            vector_first = true;
            break;
        }
        case EigMatrix::W:
            report.solver_name = "eig-w";
            label = 'W';
            mat = build_W(h_table_from_matrix(dn));
            target = 1.0;
            conjugate = true;
            break;
    }

    Mat3 c;
    if (rank <= 1) {
        c = degenerate_completion(cov.D);
        report.degenerate_eigenvalue = true;
    } else {
        EigenResult eig = eigen_pair(mat, target, label);
        if (eig.eigenvalues[0] - eig.eigenvalues[1] < 1e-10) report.degenerate_eigenvalue = true;
        QuatScalarFirst q = eig.chosen_eigenvector;
        if (vector_first)
            q = convert_convention(QuatVectorFirst{q.q0, q.q1, q.q2, q.q3});
        if (conjugate) q = quat_conjugate(q);
        q = quat_canonicalized(quat_normalized(q));
        c = quat_to_rotation(q);
    }
    report.transform.rotation = c;
    report.transform.translation = cov.b_mean - c * cov.r_mean;
    report.quaternion = rotation_to_quat(c);
    report.wall_time = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
    return report;
}

SolverReport eig_register(const PointPairSet& pairs, EigMatrix which) {
    if (pairs.size() < 3) throw TooFewPoints("registration needs at least 3 point pairs");
    return eig_solve(cross_covariance(pairs), which);
}

}  // namespace far3
