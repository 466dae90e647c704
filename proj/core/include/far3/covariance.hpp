#pragma once

#include <cstddef>
#include <utility>
#include <vector>

#include "far3/geometry.hpp"

namespace far3 {

// Paired measurements b_i ~ C r_i + T. Empty weights means uniform; when
// present, weights must be positive and are normalized to sum 1 internally.
struct PointPairSet {
    std::vector<Vec3> reference_points;
    std::vector<Vec3> body_points;
    std::vector<double> weights;

    std::size_t size() const { return reference_points.size(); }
};

struct CrossCovariance {
    Mat3 D;             // sum of w_i (r_i - r_mean)(b_i - b_mean)^T
    Vec3 h_x, h_y, h_z; // columns of D
    Vec3 r_mean, b_mean;
};

// Nine weighted sums of products <r_a * b_c>; for centered data this equals
// the cross-covariance matrix read row by row (Hx1 = D11, Hx2 = D12, ...).
struct HTable {
    double Hx1 = 0, Hx2 = 0, Hx3 = 0;
    double Hy1 = 0, Hy2 = 0, Hy3 = 0;
    double Hz1 = 0, Hz2 = 0, Hz3 = 0;
};

// Weighted centroids (r_mean, b_mean). Throws EmptySet.
std::pair<Vec3, Vec3> centroids(const PointPairSet& pairs);

// Two-pass: centroids first, then D_jk = sum w_i (r~_i)_j (b~_i)_k over the
// centered points; the optimal rotation maximizes tr(C D). Throws EmptySet.
CrossCovariance cross_covariance(const PointPairSet& pairs);

// Wraps an externally supplied matrix (means zero), filling the column views.
CrossCovariance covariance_from_matrix(const Mat3& d);

// Raw (uncentered) product table over the pair set.
HTable h_table(const PointPairSet& pairs);

// Reads a matrix into table form row by row.
HTable h_table_from_matrix(const Mat3& d);

}  // namespace far3
