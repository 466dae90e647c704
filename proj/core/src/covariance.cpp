#include "far3/covariance.hpp"

#include "far3/errors.hpp"

namespace far3 {

namespace {

std::vector<double> normalized_weights(const PointPairSet& pairs) {
    std::size_t n = pairs.size();
    std::vector<double> w(n, 1.0 / static_cast<double>(n));
    if (!pairs.weights.empty()) {
        double total = 0.0;
        for (double v : pairs.weights) total += v;
        for (std::size_t i = 0; i < n; ++i) w[i] = pairs.weights[i] / total;
    }
    return w;
}

}  // namespace

std::pair<Vec3, Vec3> centroids(const PointPairSet& pairs) {
    if (pairs.size() == 0) throw EmptySet("point pair set is empty");
    auto w = normalized_weights(pairs);
    Vec3 rm, bm;
    for (std::size_t i = 0; i < pairs.size(); ++i) {
        rm = rm + w[i] * pairs.reference_points[i];
        bm = bm + w[i] * pairs.body_points[i];
    }
    return {rm, bm};
}

CrossCovariance cross_covariance(const PointPairSet& pairs) {
    auto [rm, bm] = centroids(pairs);
    auto w = normalized_weights(pairs);
    Mat3 d;
    for (std::size_t i = 0; i < pairs.size(); ++i) {
        Vec3 r = pairs.reference_points[i] - rm;
        Vec3 b = pairs.body_points[i] - bm;
        d.m[0][0] += w[i] * r.x * b.x;
        d.m[0][1] += w[i] * r.x * b.y;
        d.m[0][2] += w[i] * r.x * b.z;
        d.m[1][0] += w[i] * r.y * b.x;
        d.m[1][1] += w[i] * r.y * b.y;
        d.m[1][2] += w[i] * r.y * b.z;
        d.m[2][0] += w[i] * r.z * b.x;
        d.m[2][1] += w[i] * r.z * b.y;
        d.m[2][2] += w[i] * r.z * b.z;
    }
    CrossCovariance cov = covariance_from_matrix(d);
    cov.r_mean = rm;
    cov.b_mean = bm;
    return cov;
}

CrossCovariance covariance_from_matrix(const Mat3& d) {
    CrossCovariance cov;
    cov.D = d;
    cov.h_x = col(d, 0);
    cov.h_y = col(d, 1);
    cov.h_z = col(d, 2);
    return cov;
}

HTable h_table(const PointPairSet& pairs) {
    if (pairs.size() == 0) throw EmptySet("point pair set is empty");
    auto w = normalized_weights(pairs);
    HTable t;
    for (std::size_t i = 0; i < pairs.size(); ++i) {
        const Vec3& r = pairs.reference_points[i];
        const Vec3& b = pairs.body_points[i];
        t.Hx1 += w[i] * r.x * b.x;
        t.Hx2 += w[i] * r.x * b.y;
        t.Hx3 += w[i] * r.x * b.z;
        t.Hy1 += w[i] * r.y * b.x;
        t.Hy2 += w[i] * r.y * b.y;
        t.Hy3 += w[i] * r.y * b.z;
        t.Hz1 += w[i] * r.z * b.x;
        t.Hz2 += w[i] * r.z * b.y;
        t.Hz3 += w[i] * r.z * b.z;
    }
    return t;
}

HTable h_table_from_matrix(const Mat3& d) {
    HTable t;
    t.Hx1 = d.m[0][0]; t.Hx2 = d.m[0][1]; t.Hx3 = d.m[0][2];
    t.Hy1 = d.m[1][0]; t.Hy2 = d.m[1][1]; t.Hy3 = d.m[1][2];
    t.Hz1 = d.m[2][0]; t.Hz2 = d.m[2][1]; t.Hz3 = d.m[2][2];
    return t;
}

}  // namespace far3
