#pragma once

#include <cmath>

namespace far3 {

struct Vec3 {
    double x = 0.0, y = 0.0, z = 0.0;
};

inline Vec3 operator+(const Vec3& a, const Vec3& b) { return {a.x + b.x, a.y + b.y, a.z + b.z}; }
inline Vec3 operator-(const Vec3& a, const Vec3& b) { return {a.x - b.x, a.y - b.y, a.z - b.z}; }
inline Vec3 operator-(const Vec3& a) { return {-a.x, -a.y, -a.z}; }
inline Vec3 operator*(double s, const Vec3& a) { return {s * a.x, s * a.y, s * a.z}; }
inline Vec3 operator*(const Vec3& a, double s) { return s * a; }
inline Vec3 operator/(const Vec3& a, double s) { return {a.x / s, a.y / s, a.z / s}; }

inline double dot(const Vec3& a, const Vec3& b) { return a.x * b.x + a.y * b.y + a.z * b.z; }

inline Vec3 cross(const Vec3& a, const Vec3& b) {
    return {a.y * b.z - a.z * b.y, a.z * b.x - a.x * b.z, a.x * b.y - a.y * b.x};
}

inline double norm2(const Vec3& a) { return dot(a, a); }
inline double norm(const Vec3& a) { return std::sqrt(norm2(a)); }
inline Vec3 normalized(const Vec3& a) { return a / norm(a); }

// Row-major 3x3 matrix.
struct Mat3 {
    double m[3][3] = {{0, 0, 0}, {0, 0, 0}, {0, 0, 0}};

    double* operator[](int i) { return m[i]; }
    const double* operator[](int i) const { return m[i]; }

    static Mat3 identity() {
        Mat3 r;
        r.m[0][0] = r.m[1][1] = r.m[2][2] = 1.0;
        return r;
    }
};

Mat3 operator+(const Mat3& a, const Mat3& b);
Mat3 operator-(const Mat3& a, const Mat3& b);
Mat3 operator*(const Mat3& a, const Mat3& b);
Mat3 operator*(double s, const Mat3& a);
Vec3 operator*(const Mat3& a, const Vec3& v);

Mat3 transpose(const Mat3& a);
double determinant(const Mat3& a);
double trace(const Mat3& a);
double frobenius_norm(const Mat3& a);
double max_abs_entry(const Mat3& a);

Mat3 from_rows(const Vec3& r0, const Vec3& r1, const Vec3& r2);
Mat3 from_cols(const Vec3& c0, const Vec3& c1, const Vec3& c2);
Vec3 row(const Mat3& a, int i);
Vec3 col(const Mat3& a, int j);

// Largest deviation from C^T C = I plus |det - 1|; 0 for an exact rotation.
double rotation_defect(const Mat3& c);

// General 4x4 matrix, row-major.
struct Mat4 {
    double m[4][4] = {{0, 0, 0, 0}, {0, 0, 0, 0}, {0, 0, 0, 0}, {0, 0, 0, 0}};

    double* operator[](int i) { return m[i]; }
    const double* operator[](int i) const { return m[i]; }

    static Mat4 identity() {
        Mat4 r;
        for (int i = 0; i < 4; ++i) r.m[i][i] = 1.0;
        return r;
    }
};

Mat4 operator+(const Mat4& a, const Mat4& b);
Mat4 operator-(const Mat4& a, const Mat4& b);
Mat4 operator*(const Mat4& a, const Mat4& b);
Mat4 operator*(double s, const Mat4& a);
double frobenius_norm(const Mat4& a);

// Symmetric 4x4 matrix; the upper triangle is authoritative and set() mirrors
// into the lower triangle so both reads agree exactly.
struct Mat4Sym {
    double m[4][4] = {{0, 0, 0, 0}, {0, 0, 0, 0}, {0, 0, 0, 0}, {0, 0, 0, 0}};

    void set(int i, int j, double v) {
        m[i][j] = v;
        m[j][i] = v;
    }
    double at(int i, int j) const { return m[i][j]; }

    Mat4 full() const {
        Mat4 r;
        for (int i = 0; i < 4; ++i)
            for (int j = 0; j < 4; ++j) r.m[i][j] = m[i][j];
        return r;
    }
};

// Scalar-first (Hamilton) unit quaternion: q0 + q1 i + q2 j + q3 k.
struct QuatScalarFirst {
    double q0 = 1.0, q1 = 0.0, q2 = 0.0, q3 = 0.0;
};

// Vector-first storage of the same quaternion: (q1, q2, q3, q0).
struct QuatVectorFirst {
    double q1 = 0.0, q2 = 0.0, q3 = 0.0, q0 = 1.0;
};

inline double quat_norm(const QuatScalarFirst& q) {
    return std::sqrt(q.q0 * q.q0 + q.q1 * q.q1 + q.q2 * q.q2 + q.q3 * q.q3);
}

QuatScalarFirst quat_normalized(const QuatScalarFirst& q);
QuatScalarFirst quat_conjugate(const QuatScalarFirst& q);

// Flips the overall sign so q0 >= 0; if q0 == 0, the first nonzero vector
// component is made positive.
QuatScalarFirst quat_canonicalized(const QuatScalarFirst& q);

struct RigidTransform {
    Mat3 rotation = Mat3::identity();
    Vec3 translation;
};

Vec3 apply(const RigidTransform& t, const Vec3& p);

// Throws NonUnitQuaternion if | ||q|| - 1 | > 1e-6; normalizes internally.
Mat3 quat_to_rotation(const QuatScalarFirst& q);

// Branch on the largest of trace and the diagonal entries; canonical sign.
// Throws NotARotation if the orthonormality defect exceeds 1e-6.
QuatScalarFirst rotation_to_quat(const Mat3& c);

QuatScalarFirst convert_convention(const QuatVectorFirst& q);
QuatVectorFirst convert_convention(const QuatScalarFirst& q);

// Angle of a^T b, clamped into [0, pi].
double geodesic_angle(const Mat3& a, const Mat3& b);

// Smallest rotation taking unit vector u onto unit vector v.
Mat3 minimal_rotation(const Vec3& u, const Vec3& v);

}  // namespace far3
