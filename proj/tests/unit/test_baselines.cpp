#include <doctest.h>

#include <algorithm>
#include <array>
#include <cmath>
#include <functional>
#include <limits>

#include "far3/baselines.hpp"
#include "far3/errors.hpp"
#include "far3/fa3r.hpp"
#include "test_helpers.hpp"

using namespace far3;
using namespace far3::testutil;

namespace {

Mat3 reconstruct(const Svd3& f) {
    Mat3 s;
    s.m[0][0] = f.sigma.x;
    s.m[1][1] = f.sigma.y;
    s.m[2][2] = f.sigma.z;
    return f.U * (s * transpose(f.V));
}

Mat4Sym symmetrize(const Mat4& a) {
    Mat4Sym s;
    for (int i = 0; i < 4; ++i)
        for (int j = i; j < 4; ++j) s.set(i, j, 0.5 * (a.m[i][j] + a.m[j][i]));
    return s;
}

// The four formulations exactly as the quaternion solver assembles them.
std::array<Mat4Sym, 4> formulations(const Mat3& d) {
    Mat3 b = transpose(d);
    Vec3 z{b.m[1][2] - b.m[2][1], b.m[2][0] - b.m[0][2], b.m[0][1] - b.m[1][0]};
    return {build_P(d), build_G(transpose(d)), build_K(b, z), build_W(h_table_from_matrix(d))};
}

std::array<double, 4> expected_spectrum(const Mat3& d) {
    Svd3 f = jacobi_svd(d);
    double s = determinant(d) < 0.0 ? -1.0 : 1.0;
    std::array<double, 4> lam = {
        f.sigma.x + f.sigma.y + s * f.sigma.z,
        f.sigma.x - f.sigma.y - s * f.sigma.z,
        -f.sigma.x + f.sigma.y - s * f.sigma.z,
        -f.sigma.x - f.sigma.y + s * f.sigma.z,
    };
    std::sort(lam.begin(), lam.end(), std::greater<>());
    return lam;
}

double det4(const Mat4& a) {
    double det = 0.0;
    for (int j = 0; j < 4; ++j) {
        double minor[3][3];
        for (int r = 1; r < 4; ++r) {
            int cc = 0;
            for (int c = 0; c < 4; ++c) {
                if (c == j) continue;
                minor[r - 1][cc++] = a.m[r][c];
            }
        }
        double m3 = minor[0][0] * (minor[1][1] * minor[2][2] - minor[1][2] * minor[2][1]) -
                    minor[0][1] * (minor[1][0] * minor[2][2] - minor[1][2] * minor[2][0]) +
                    minor[0][2] * (minor[1][0] * minor[2][1] - minor[1][1] * minor[2][0]);
        det += (j % 2 == 0 ? 1.0 : -1.0) * a.m[0][j] * m3;
    }
    return det;
}

HTable random_table(Rng& rng) {
    return h_table_from_matrix(random_matrix(rng, 2.0));
}

Vec3 table_row(const HTable& t, int i) {
    if (i == 0) return {t.Hx1, t.Hx2, t.Hx3};
    if (i == 1) return {t.Hy1, t.Hy2, t.Hy3};
    return {t.Hz1, t.Hz2, t.Hz3};
}

HTable table_from_rows(const Vec3& x, const Vec3& y, const Vec3& z) {
    return h_table_from_matrix(from_rows(x, y, z));
}

}  // namespace

TEST_CASE("jacobi svd reconstructs and factors are orthogonal") {
    Rng rng(51);
    for (int t = 0; t < 200; ++t) {
        Mat3 a = random_matrix(rng, t % 3 == 0 ? 1e-4 : 2.0);
        if (t % 7 == 0) {
            // squeeze toward rank deficiency
            Vec3 u = random_unit(rng), v = random_unit(rng);
            a = from_cols(v.x * u, v.y * u, v.z * u) + random_matrix(rng, 1e-9);
        }
        Svd3 f = jacobi_svd(a);
        CHECK(max_diff(reconstruct(f), a) < 1e-12 * std::max(1.0, frobenius_norm(a)));
        CHECK(orthogonality_defect(f.U) < 1e-12);
        CHECK(orthogonality_defect(f.V) < 1e-12);
        CHECK(f.sigma.x >= f.sigma.y);
        CHECK(f.sigma.y >= f.sigma.z);
        CHECK(f.sigma.z >= 0.0);
    }
    Svd3 z = jacobi_svd(Mat3{});
    CHECK(z.sigma.x == 0.0);
    CHECK(orthogonality_defect(z.U) < 1e-15);
}

TEST_CASE("svd baseline applies the determinant correction") {
    // det(D) < 0 forces the reflection fix; the optimum is sigma1+sigma2-sigma3.
    Mat3 d;
    d.m[0][0] = 2.0;
    d.m[1][1] = 1.0;
    d.m[2][2] = -0.5;
    SolverReport rep = svd_solve(covariance_from_matrix(d));
    CHECK(rotation_defect(rep.transform.rotation) < 1e-12);
    CHECK(trace(rep.transform.rotation * d) == doctest::Approx(2.5).epsilon(1e-12));
    CHECK(rep.trace.converged);
}

TEST_CASE("svd baseline recovers exact motions") {
    Rng rng(52);
    for (int t = 0; t < 50; ++t) {
        Mat3 c_true = random_rotation(rng);
        Vec3 t_true{rng.uniform(-20, 20), rng.uniform(-20, 20), rng.uniform(-20, 20)};
        PointPairSet pairs;
        for (int i = 0; i < 30; ++i) {
            Vec3 r{rng.uniform(-10, 10), rng.uniform(-10, 10), rng.uniform(-10, 10)};
            pairs.reference_points.push_back(r);
            pairs.body_points.push_back(c_true * r + t_true);
        }
        SolverReport rep = svd_register(pairs);
        CHECK(geodesic_angle(rep.transform.rotation, c_true) < 1e-11);
        CHECK(max_diff(rep.transform.translation, t_true) < 1e-9);
    }
}

TEST_CASE("rank-one building blocks and structure matrices") {
    Rng rng(53);
    Mat4 m = m_matrix(), n = n_matrix();
    Mat4 neg_i = -1.0 * Mat4::identity();
    CHECK(max_diff(m * m, neg_i) == 0.0);
    CHECK(max_diff(n * n, neg_i) == 0.0);
    for (int t = 0; t < 50; ++t) {
        Vec3 x{rng.uniform(-2, 2), rng.uniform(-2, 2), rng.uniform(-2, 2)};
        Vec3 y{rng.uniform(-2, 2), rng.uniform(-2, 2), rng.uniform(-2, 2)};
        Mat4 blocks[3] = {h1_matrix(x), h2_matrix(x), h3_matrix(x)};
        CHECK(max_diff(blocks[1], m * blocks[0]) == 0.0);
        CHECK(max_diff(blocks[2], n * blocks[0]) == 0.0);
        for (const Mat4& h : blocks) {
            // symmetric, and squares to |x|^2 I
            for (int i = 0; i < 4; ++i)
                for (int j = 0; j < 4; ++j) CHECK(h.m[i][j] == h.m[j][i]);
            CHECK(max_diff(h * h, norm2(x) * Mat4::identity()) < 1e-13);
        }
        CHECK(max_diff(h1_matrix(x + y), h1_matrix(x) + h1_matrix(y)) == 0.0);
        CHECK(max_diff(h2_matrix(x + y), h2_matrix(x) + h2_matrix(y)) == 0.0);
        CHECK(max_diff(h3_matrix(x + y), h3_matrix(x) + h3_matrix(y)) == 0.0);
    }
}

TEST_CASE("product-table matrix splits into the rank-one blocks") {
    Rng rng(54);
    for (int t = 0; t < 50; ++t) {
        HTable tab = random_table(rng);
        Mat4 w = build_W(tab).full();
        Vec3 c1{tab.Hx1, tab.Hy1, tab.Hz1};
        Vec3 c2{tab.Hx2, tab.Hy2, tab.Hz2};
        Vec3 c3{tab.Hx3, tab.Hy3, tab.Hz3};
        CHECK(max_diff(w, h1_matrix(c1) + h2_matrix(c2) + h3_matrix(c3)) < 1e-14);
        CHECK(std::fabs(w.m[0][0] + w.m[1][1] + w.m[2][2] + w.m[3][3]) < 1e-13);
    }
}

TEST_CASE("squaring the table matrix produces the cross-product table") {
    Rng rng(55);
    for (int t = 0; t < 50; ++t) {
        HTable tab = random_table(rng);
        Vec3 hx = table_row(tab, 0), hy = table_row(tab, 1), hz = table_row(tab, 2);
        double kappa = norm2(hx) + norm2(hy) + norm2(hz);
        Mat4 w = build_W(tab).full();
        Mat4 lhs = w * w - kappa * Mat4::identity();
        Mat4 rhs = build_W(table_from_rows(2.0 * cross(hy, hz), 2.0 * cross(hz, hx),
                                           2.0 * cross(hx, hy)))
                       .full();
        CHECK(max_diff(lhs, rhs) < 1e-12);
    }
}

TEST_CASE("shifted square exposes the iteration update vectors") {
    // (W+I)^2 = (kappa+1) I + 2 W(S) where the rows of S are exactly the
    // unscaled update vectors h_x + h_y x h_z (cyclic) of the iteration.
    Rng rng(56);
    for (int t = 0; t < 50; ++t) {
        HTable tab = random_table(rng);
        Vec3 hx = table_row(tab, 0), hy = table_row(tab, 1), hz = table_row(tab, 2);
        double kappa = norm2(hx) + norm2(hy) + norm2(hz);
        Mat4 wi = build_W(tab).full() + Mat4::identity();
        Mat4 rhs = (kappa + 1.0) * Mat4::identity() +
                   2.0 * build_W(table_from_rows(hx + cross(hy, hz), hy + cross(hz, hx),
                                                 hz + cross(hx, hy)))
                             .full();
        CHECK(max_diff(wi * wi, rhs) < 1e-12);
    }
}

TEST_CASE("all four formulations share one spectrum") {
    Rng rng(57);
    for (int t = 0; t < 100; ++t) {
        Mat3 d = random_matrix(rng, 1.0);
        auto mats = formulations(d);
        std::array<double, 4> expect = expected_spectrum(d);
        double scale = std::max(1.0, std::fabs(expect[0]));
        for (const Mat4Sym& m : mats) {
            std::array<double, 4> lam = quartic_eigenvalues(m);
            for (int i = 0; i < 4; ++i)
                CHECK(lam[i] == doctest::Approx(expect[i]).epsilon(1e-9).scale(scale));
            double tr = m.at(0, 0) + m.at(1, 1) + m.at(2, 2) + m.at(3, 3);
            CHECK(std::fabs(tr) < 1e-13);
        }
    }
}

TEST_CASE("identity product matrix has the known exact spectrum") {
    Mat4Sym k = build_K(Mat3::identity(), Vec3{});
    for (int i = 0; i < 3; ++i) CHECK(k.at(i, i) == -1.0);
    CHECK(k.at(3, 3) == 3.0);
    for (int i = 0; i < 4; ++i)
        for (int j = i + 1; j < 4; ++j) CHECK(k.at(i, j) == 0.0);
    std::array<double, 4> lam = quartic_eigenvalues(k);
    CHECK(lam[0] == doctest::Approx(3.0).epsilon(1e-12));
    // -1 is a triple root; repeated roots resolve to roughly sqrt(eps) only.
    CHECK(lam[1] == doctest::Approx(-1.0).epsilon(1e-7));
    CHECK(lam[3] == doctest::Approx(-1.0).epsilon(1e-7));
}

TEST_CASE("characteristic quartic matches the numeric determinant") {
    Rng rng(58);
    for (int t = 0; t < 100; ++t) {
        Mat4Sym m = symmetrize(rng.uniform(-1.5, 1.5) * Mat4::identity() +
                               h1_matrix({rng.uniform(-2, 2), rng.uniform(-2, 2),
                                          rng.uniform(-2, 2)}) +
                               h2_matrix({rng.uniform(-2, 2), rng.uniform(-2, 2),
                                          rng.uniform(-2, 2)}));
        std::array<double, 4> lam = quartic_eigenvalues(m);
        double scale = std::pow(std::max(1.0, frobenius_norm(m.full())), 4);
        for (double l : lam) {
            Mat4 shifted = m.full() + -l * Mat4::identity();
            CHECK(std::fabs(det4(shifted)) < 1e-8 * scale);
        }
        // Vieta spot checks on the undepressed polynomial.
        double tr = m.at(0, 0) + m.at(1, 1) + m.at(2, 2) + m.at(3, 3);
        CHECK(lam[0] + lam[1] + lam[2] + lam[3] == doctest::Approx(tr).epsilon(1e-9).scale(
                  std::max(1.0, std::fabs(tr))));
        CHECK(lam[0] * lam[1] * lam[2] * lam[3] ==
              doctest::Approx(det4(m.full())).epsilon(1e-8).scale(scale));
    }
}

TEST_CASE("quartic roots agree with the power-iteration oracle") {
    // The oracle's deflated power iterations resolve a pair of eigenvalues no
    // finer than their gap allows, so clustered spectra are skipped here; the
    // determinant-residual test above covers those.
    Rng rng(59);
    double worst = 0.0;
    int kept = 0;
    for (int t = 0; t < 1000; ++t) {
        Mat3 d = random_matrix(rng, 1.0);
        std::array<double, 4> expect = expected_spectrum(d);
        double gap = 1e300;
        for (int i = 0; i < 4; ++i)
            for (int j = i + 1; j < 4; ++j)
                gap = std::min(gap, std::fabs(expect[i] - expect[j]));
        if (gap < 0.02 * (1.0 + std::fabs(expect[0]))) continue;
        ++kept;
        Mat4Sym m = build_P(d);
        std::array<double, 4> lam = quartic_eigenvalues(m);
        EigenResult power = power_method_oracle(m, 2.0 * frobenius_norm(m.full()), 4000);
        double scale = std::max(1.0, std::fabs(lam[0]));
        for (int i = 0; i < 4; ++i)
            worst = std::max(worst, std::fabs(lam[i] - power.eigenvalues[i]) / scale);
    }
    CHECK(kept > 700);
    CHECK(worst < 1e-7);
}

TEST_CASE("eigen pair residual and target selection") {
    Rng rng(60);
    for (int t = 0; t < 100; ++t) {
        Mat3 d = random_matrix(rng, 1.0);
        Mat4Sym m = build_P(d);
        double fscale = frobenius_norm(m.full());
        EigenResult top = eigen_pair(m, std::numeric_limits<double>::infinity(), 'P');
        CHECK(top.matrix_label == 'P');
        CHECK(top.residual < 1e-9 * std::max(1.0, fscale));
        std::array<double, 4> lam = top.eigenvalues;
        CHECK(std::is_sorted(lam.begin(), lam.end(), std::greater<>()));
        // targeting the smallest
        EigenResult bottom = eigen_pair(m, lam[3] - 0.01, 'P');
        const QuatScalarFirst& v = bottom.chosen_eigenvector;
        Mat4 full = m.full();
        double vv[4] = {v.q0, v.q1, v.q2, v.q3};
        double rmax = 0.0;
        for (int i = 0; i < 4; ++i) {
            double mv = 0.0;
            for (int j = 0; j < 4; ++j) mv += full.m[i][j] * vv[j];
            rmax = std::max(rmax, std::fabs(mv - lam[3] * vv[i]));
        }
        CHECK(rmax < 1e-8 * std::max(1.0, fscale));
    }
}

TEST_CASE("rank-one covariance yields the doubled spectrum") {
    Rng rng(61);
    for (int t = 0; t < 50; ++t) {
        Vec3 u = random_unit(rng), v = random_unit(rng);
        double sigma = rng.uniform(0.2, 3.0);
        Mat3 d = from_cols(sigma * v.x * u, sigma * v.y * u, sigma * v.z * u);
        std::array<double, 4> lam = quartic_eigenvalues(build_P(d));
        CHECK(lam[0] == doctest::Approx(sigma).epsilon(1e-8));
        CHECK(lam[1] == doctest::Approx(sigma).epsilon(1e-8));
        CHECK(lam[2] == doctest::Approx(-sigma).epsilon(1e-8));
        CHECK(lam[3] == doctest::Approx(-sigma).epsilon(1e-8));
    }
}

TEST_CASE("largest eigenvalue stays below one for unit vectors") {
    // Normalized weights and unit-length directions bound the top eigenvalue
    // of the uncentered product formulation by the total weight.
    Rng rng(62);
    for (int t = 0; t < 30; ++t) {
        PointPairSet pairs;
        int n = 5 + t;
        for (int i = 0; i < n; ++i) {
            pairs.reference_points.push_back(random_unit(rng));
            pairs.body_points.push_back(random_unit(rng));
        }
        HTable tab = h_table(pairs);
        Mat3 bmat = transpose(from_rows(table_row(tab, 0), table_row(tab, 1), table_row(tab, 2)));
        Vec3 z{bmat.m[1][2] - bmat.m[2][1], bmat.m[2][0] - bmat.m[0][2],
               bmat.m[0][1] - bmat.m[1][0]};
        std::array<double, 4> lam = quartic_eigenvalues(build_K(bmat, z));
        CHECK(lam[0] < 1.0 + 1e-12);
    }
}

TEST_CASE("eigen solvers match the svd baseline in every formulation") {
    Rng rng(63);
    for (int t = 0; t < 200; ++t) {
        Mat3 d = random_matrix(rng, 0.3) + transpose(random_rotation(rng));
        if (rank_surrogate(d) < 3) continue;
        CrossCovariance cov = covariance_from_matrix(d);
        SolverReport svd = svd_solve(cov);
        for (EigMatrix which :
             {EigMatrix::P, EigMatrix::G, EigMatrix::K, EigMatrix::W}) {
            SolverReport rep = eig_solve(cov, which);
            CHECK(geodesic_angle(rep.transform.rotation, svd.transform.rotation) < 1e-8);
            CHECK(rotation_defect(rep.transform.rotation) < 1e-12);
            CHECK(rep.trace.converged);
        }
    }
}

TEST_CASE("eigen solver names and degenerate flags") {
    Rng rng(64);
    Mat3 d = transpose(random_rotation(rng));
    CHECK(eig_solve(covariance_from_matrix(d), EigMatrix::P).solver_name == "eig-p");
    CHECK(eig_solve(covariance_from_matrix(d), EigMatrix::G).solver_name == "eig-g");
    CHECK(eig_solve(covariance_from_matrix(d), EigMatrix::K).solver_name == "eig-k");
    CHECK(eig_solve(covariance_from_matrix(d), EigMatrix::W).solver_name == "eig-w");

    Vec3 u = random_unit(rng), v = random_unit(rng);
    Mat3 rank1 = from_cols(v.x * u, v.y * u, v.z * u);
    SolverReport rep = eig_solve(covariance_from_matrix(rank1), EigMatrix::W);
    CHECK(rep.degenerate_rank);
    CHECK(rep.degenerate_eigenvalue);
    CHECK(rotation_defect(rep.transform.rotation) < 1e-12);
    Svd3 f = jacobi_svd(rank1);
    CHECK(trace(rep.transform.rotation * rank1) == doctest::Approx(f.sigma.x).epsilon(1e-9));

    CHECK_THROWS_AS((void)eig_solve(covariance_from_matrix(Mat3{}), EigMatrix::P),
                    DegenerateInput);
}

TEST_CASE("registration wrappers validate input size") {
    PointPairSet two;
    two.reference_points = {{1, 0, 0}, {0, 1, 0}};
    two.body_points = two.reference_points;
    CHECK_THROWS_AS((void)svd_register(two), TooFewPoints);
    CHECK_THROWS_AS((void)eig_register(two, EigMatrix::W), TooFewPoints);
}

TEST_CASE("eigenvalues of matrix powers are powers of eigenvalues") {
    Rng rng(65);
    for (int t = 0; t < 30; ++t) {
        Mat4Sym w = build_W(random_table(rng));
        std::array<double, 4> lam = quartic_eigenvalues(w);
        Mat4 w2 = w.full() * w.full();
        Mat4 w4 = w2 * w2;
        std::array<double, 4> lam4 = quartic_eigenvalues(symmetrize(w4));
        std::array<double, 4> expect;
        for (int i = 0; i < 4; ++i) expect[i] = std::pow(lam[i], 4.0);
        std::sort(expect.begin(), expect.end(), std::greater<>());
        double scale = std::max(1.0, std::fabs(expect[0]));
        for (int i = 0; i < 4; ++i)
            CHECK(lam4[i] == doctest::Approx(expect[i]).epsilon(1e-8).scale(scale));
    }
}
