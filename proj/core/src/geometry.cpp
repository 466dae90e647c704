#include "far3/geometry.hpp"

#include <algorithm>
#include <cmath>

#include "far3/errors.hpp"

namespace far3 {

Mat3 operator+(const Mat3& a, const Mat3& b) {
    Mat3 r;
    for (int i = 0; i < 3; ++i)
        for (int j = 0; j < 3; ++j) r.m[i][j] = a.m[i][j] + b.m[i][j];
    return r;
}

Mat3 operator-(const Mat3& a, const Mat3& b) {
    Mat3 r;
    for (int i = 0; i < 3; ++i)
        for (int j = 0; j < 3; ++j) r.m[i][j] = a.m[i][j] - b.m[i][j];
    return r;
}

Mat3 operator*(const Mat3& a, const Mat3& b) {
    Mat3 r;
    for (int i = 0; i < 3; ++i)
        for (int j = 0; j < 3; ++j) {
            double s = 0.0;
            for (int k = 0; k < 3; ++k) s += a.m[i][k] * b.m[k][j];
            r.m[i][j] = s;
        }
    return r;
}

Mat3 operator*(double s, const Mat3& a) {
    Mat3 r;
    for (int i = 0; i < 3; ++i)
        for (int j = 0; j < 3; ++j) r.m[i][j] = s * a.m[i][j];
    return r;
}

Vec3 operator*(const Mat3& a, const Vec3& v) {
    return {a.m[0][0] * v.x + a.m[0][1] * v.y + a.m[0][2] * v.z,
            a.m[1][0] * v.x + a.m[1][1] * v.y + a.m[1][2] * v.z,
            a.m[2][0] * v.x + a.m[2][1] * v.y + a.m[2][2] * v.z};
}

Mat3 transpose(const Mat3& a) {
    Mat3 r;
    for (int i = 0; i < 3; ++i)
        for (int j = 0; j < 3; ++j) r.m[i][j] = a.m[j][i];
    return r;
}

double determinant(const Mat3& a) {
    return a.m[0][0] * (a.m[1][1] * a.m[2][2] - a.m[1][2] * a.m[2][1]) -
           a.m[0][1] * (a.m[1][0] * a.m[2][2] - a.m[1][2] * a.m[2][0]) +
           a.m[0][2] * (a.m[1][0] * a.m[2][1] - a.m[1][1] * a.m[2][0]);
}

double trace(const Mat3& a) { return a.m[0][0] + a.m[1][1] + a.m[2][2]; }

double frobenius_norm(const Mat3& a) {
    double s = 0.0;
    for (int i = 0; i < 3; ++i)
        for (int j = 0; j < 3; ++j) s += a.m[i][j] * a.m[i][j];
    return std::sqrt(s);
}

double max_abs_entry(const Mat3& a) {
    double s = 0.0;
    for (int i = 0; i < 3; ++i)
        for (int j = 0; j < 3; ++j) s = std::max(s, std::fabs(a.m[i][j]));
    return s;
}

Mat3 from_rows(const Vec3& r0, const Vec3& r1, const Vec3& r2) {
    Mat3 r;
    r.m[0][0] = r0.x; r.m[0][1] = r0.y; r.m[0][2] = r0.z;
    r.m[1][0] = r1.x; r.m[1][1] = r1.y; r.m[1][2] = r1.z;
    r.m[2][0] = r2.x; r.m[2][1] = r2.y; r.m[2][2] = r2.z;
    return r;
}

Mat3 from_cols(const Vec3& c0, const Vec3& c1, const Vec3& c2) {
    return transpose(from_rows(c0, c1, c2));
}

Vec3 row(const Mat3& a, int i) { return {a.m[i][0], a.m[i][1], a.m[i][2]}; }
Vec3 col(const Mat3& a, int j) { return {a.m[0][j], a.m[1][j], a.m[2][j]}; }

double rotation_defect(const Mat3& c) {
    Mat3 g = transpose(c) * c;
    double d = 0.0;
    for (int i = 0; i < 3; ++i)
        for (int j = 0; j < 3; ++j)
            d = std::max(d, std::fabs(g.m[i][j] - (i == j ? 1.0 : 0.0)));
    return std::max(d, std::fabs(determinant(c) - 1.0));
}

Mat4 operator+(const Mat4& a, const Mat4& b) {
    Mat4 r;
    for (int i = 0; i < 4; ++i)
        for (int j = 0; j < 4; ++j) r.m[i][j] = a.m[i][j] + b.m[i][j];
    return r;
}

Mat4 operator-(const Mat4& a, const Mat4& b) {
    Mat4 r;
    for (int i = 0; i < 4; ++i)
        for (int j = 0; j < 4; ++j) r.m[i][j] = a.m[i][j] - b.m[i][j];
    return r;
}

Mat4 operator*(const Mat4& a, const Mat4& b) {
    Mat4 r;
    for (int i = 0; i < 4; ++i)
        for (int j = 0; j < 4; ++j) {
            double s = 0.0;
            for (int k = 0; k < 4; ++k) s += a.m[i][k] * b.m[k][j];
            r.m[i][j] = s;
        }
    return r;
}

Mat4 operator*(double s, const Mat4& a) {
    Mat4 r;
    for (int i = 0; i < 4; ++i)
        for (int j = 0; j < 4; ++j) r.m[i][j] = s * a.m[i][j];
    return r;
}

double frobenius_norm(const Mat4& a) {
    double s = 0.0;
    for (int i = 0; i < 4; ++i)
        for (int j = 0; j < 4; ++j) s += a.m[i][j] * a.m[i][j];
    return std::sqrt(s);
}

QuatScalarFirst quat_normalized(const QuatScalarFirst& q) {
    double n = quat_norm(q);
    return {q.q0 / n, q.q1 / n, q.q2 / n, q.q3 / n};
}

QuatScalarFirst quat_conjugate(const QuatScalarFirst& q) {
    return {q.q0, -q.q1, -q.q2, -q.q3};
}

QuatScalarFirst quat_canonicalized(const QuatScalarFirst& q) {
    double lead = q.q0;
    if (lead == 0.0) lead = q.q1 != 0.0 ? q.q1 : (q.q2 != 0.0 ? q.q2 : q.q3);
    if (lead < 0.0) return {-q.q0, -q.q1, -q.q2, -q.q3};
    return q;
}

Vec3 apply(const RigidTransform& t, const Vec3& p) {
    return t.rotation * p + t.translation;
}

Mat3 quat_to_rotation(const QuatScalarFirst& q) {
    if (std::fabs(quat_norm(q) - 1.0) > 1e-6)
        throw NonUnitQuaternion("quaternion norm deviates from 1 by more than 1e-6");
    QuatScalarFirst u = quat_normalized(q);
    double w = u.q0, x = u.q1, y = u.q2, z = u.q3;
    Mat3 c;
    c.m[0][0] = 1 - 2 * (y * y + z * z);
    c.m[0][1] = 2 * (x * y - z * w);
    c.m[0][2] = 2 * (x * z + y * w);
    c.m[1][0] = 2 * (x * y + z * w);
    c.m[1][1] = 1 - 2 * (x * x + z * z);
    c.m[1][2] = 2 * (y * z - x * w);
    c.m[2][0] = 2 * (x * z - y * w);
    c.m[2][1] = 2 * (y * z + x * w);
    c.m[2][2] = 1 - 2 * (x * x + y * y);
    return c;
}

QuatScalarFirst rotation_to_quat(const Mat3& c) {
    if (rotation_defect(c) > 1e-6)
        throw NotARotation("matrix is not orthonormal with det 1 within 1e-6");
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

QuatScalarFirst convert_convention(const QuatVectorFirst& q) {
    return {q.q0, q.q1, q.q2, q.q3};
}

QuatVectorFirst convert_convention(const QuatScalarFirst& q) {
    return {q.q1, q.q2, q.q3, q.q0};
}

double geodesic_angle(const Mat3& a, const Mat3& b) {
    Mat3 r = transpose(a) * b;
    double c = (trace(r) - 1.0) / 2.0;
    // atan2 on (|sin|, cos) instead of acos(cos): near 0 and pi the cosine
    // alone cannot resolve angles below ~1e-8.
    Vec3 skew{r.m[2][1] - r.m[1][2], r.m[0][2] - r.m[2][0], r.m[1][0] - r.m[0][1]};
    return std::atan2(0.5 * norm(skew), c);
}

Mat3 minimal_rotation(const Vec3& u, const Vec3& v) {
    Vec3 w = cross(u, v);
    double c = dot(u, v);
    if (c < -1.0 + 1e-12) {
        // Antipodal: rotate by pi about any axis orthogonal to u.
        Vec3 e{1, 0, 0};
        double ax = std::fabs(u.x), ay = std::fabs(u.y), az = std::fabs(u.z);
        if (ay <= ax && ay <= az) e = {0, 1, 0};
        else if (az <= ax && az <= ay) e = {0, 0, 1};
        Vec3 axis = normalized(e - dot(e, u) * u);
        QuatScalarFirst q{0.0, axis.x, axis.y, axis.z};
        return quat_to_rotation(q);
    }
    // Rodrigues with (1 - cos)/sin^2 = 1/(1 + cos).
    double k = 1.0 / (1.0 + c);
    Mat3 r;
    r.m[0][0] = c + k * w.x * w.x;
    r.m[0][1] = -w.z + k * w.x * w.y;
    r.m[0][2] = w.y + k * w.x * w.z;
    r.m[1][0] = w.z + k * w.y * w.x;
    r.m[1][1] = c + k * w.y * w.y;
    r.m[1][2] = -w.x + k * w.y * w.z;
    r.m[2][0] = -w.y + k * w.z * w.x;
    r.m[2][1] = w.x + k * w.z * w.y;
    r.m[2][2] = c + k * w.z * w.z;
    return r;
}

}  // namespace far3
