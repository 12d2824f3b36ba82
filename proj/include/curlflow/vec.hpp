#pragma once

#include <algorithm>
#include <array>
#include <cmath>

namespace curlflow {

struct Vec2 {
    double x = 0.0, y = 0.0;

    constexpr double& operator[](int a) { return a == 0 ? x : y; }
    constexpr double operator[](int a) const { return a == 0 ? x : y; }

    constexpr Vec2& operator+=(const Vec2& o) { x += o.x; y += o.y; return *this; }
    constexpr Vec2& operator-=(const Vec2& o) { x -= o.x; y -= o.y; return *this; }
    constexpr Vec2& operator*=(double s) { x *= s; y *= s; return *this; }
    friend constexpr Vec2 operator+(Vec2 a, const Vec2& b) { return a += b; }
    friend constexpr Vec2 operator-(Vec2 a, const Vec2& b) { return a -= b; }
    friend constexpr Vec2 operator*(Vec2 a, double s) { return a *= s; }
    friend constexpr Vec2 operator*(double s, Vec2 a) { return a *= s; }
    friend constexpr Vec2 operator/(Vec2 a, double s) { return a *= 1.0 / s; }
    friend constexpr Vec2 operator-(const Vec2& a) { return {-a.x, -a.y}; }
    friend constexpr bool operator==(const Vec2&, const Vec2&) = default;
};

struct Vec3 {
    double x = 0.0, y = 0.0, z = 0.0;

    constexpr double& operator[](int a) { return a == 0 ? x : (a == 1 ? y : z); }
    constexpr double operator[](int a) const { return a == 0 ? x : (a == 1 ? y : z); }

    constexpr Vec3& operator+=(const Vec3& o) { x += o.x; y += o.y; z += o.z; return *this; }
    constexpr Vec3& operator-=(const Vec3& o) { x -= o.x; y -= o.y; z -= o.z; return *this; }
    constexpr Vec3& operator*=(double s) { x *= s; y *= s; z *= s; return *this; }
    friend constexpr Vec3 operator+(Vec3 a, const Vec3& b) { return a += b; }
    friend constexpr Vec3 operator-(Vec3 a, const Vec3& b) { return a -= b; }
    friend constexpr Vec3 operator*(Vec3 a, double s) { return a *= s; }
    friend constexpr Vec3 operator*(double s, Vec3 a) { return a *= s; }
    friend constexpr Vec3 operator/(Vec3 a, double s) { return a *= 1.0 / s; }
    friend constexpr Vec3 operator-(const Vec3& a) { return {-a.x, -a.y, -a.z}; }
    friend constexpr bool operator==(const Vec3&, const Vec3&) = default;
};

constexpr double dot(const Vec2& a, const Vec2& b) { return a.x * b.x + a.y * b.y; }
constexpr double dot(const Vec3& a, const Vec3& b) { return a.x * b.x + a.y * b.y + a.z * b.z; }
inline double norm(const Vec2& a) { return std::sqrt(dot(a, a)); }
inline double norm(const Vec3& a) { return std::sqrt(dot(a, a)); }
constexpr Vec3 cross(const Vec3& a, const Vec3& b) {
    return {a.y * b.z - a.z * b.y, a.z * b.x - a.x * b.z, a.x * b.y - a.y * b.x};
}
/// Counter-clockwise rotation by 90 degrees.
constexpr Vec2 perp(const Vec2& a) { return {-a.y, a.x}; }

/// Row-major dense matrix; `m[r][c]`.
template <int N>
struct Mat {
    std::array<std::array<double, N>, N> m{};

    static constexpr Mat identity() {
        Mat r;
        for (int i = 0; i < N; ++i) r.m[i][i] = 1.0;
        return r;
    }
    constexpr std::array<double, N>& operator[](int r) { return m[r]; }
    constexpr const std::array<double, N>& operator[](int r) const { return m[r]; }

    constexpr Mat& operator+=(const Mat& o) {
        for (int i = 0; i < N; ++i)
            for (int j = 0; j < N; ++j) m[i][j] += o.m[i][j];
        return *this;
    }
    constexpr Mat& operator-=(const Mat& o) {
        for (int i = 0; i < N; ++i)
            for (int j = 0; j < N; ++j) m[i][j] -= o.m[i][j];
        return *this;
    }
    constexpr Mat& operator*=(double s) {
        for (auto& row : m)
            for (double& v : row) v *= s;
        return *this;
    }
    friend constexpr Mat operator+(Mat a, const Mat& b) { return a += b; }
    friend constexpr Mat operator-(Mat a, const Mat& b) { return a -= b; }
    friend constexpr Mat operator*(Mat a, double s) { return a *= s; }
    friend constexpr Mat operator*(double s, Mat a) { return a *= s; }

    constexpr Mat transposed() const {
        Mat r;
        for (int i = 0; i < N; ++i)
            for (int j = 0; j < N; ++j) r.m[i][j] = m[j][i];
        return r;
    }
};

using Mat2 = Mat<2>;
using Mat3 = Mat<3>;

constexpr Vec2 operator*(const Mat2& a, const Vec2& v) {
    return {a[0][0] * v.x + a[0][1] * v.y, a[1][0] * v.x + a[1][1] * v.y};
}
constexpr Vec3 operator*(const Mat3& a, const Vec3& v) {
    return {a[0][0] * v.x + a[0][1] * v.y + a[0][2] * v.z,
            a[1][0] * v.x + a[1][1] * v.y + a[1][2] * v.z,
            a[2][0] * v.x + a[2][1] * v.y + a[2][2] * v.z};
}
template <int N>
constexpr Mat<N> operator*(const Mat<N>& a, const Mat<N>& b) {
    Mat<N> r;
    for (int i = 0; i < N; ++i)
        for (int j = 0; j < N; ++j)
            for (int k = 0; k < N; ++k) r.m[i][j] += a.m[i][k] * b.m[k][j];
    return r;
}
constexpr Mat2 outer(const Vec2& a, const Vec2& b) {
    Mat2 r;
    for (int i = 0; i < 2; ++i)
        for (int j = 0; j < 2; ++j) r.m[i][j] = a[i] * b[j];
    return r;
}
constexpr Mat3 outer(const Vec3& a, const Vec3& b) {
    Mat3 r;
    for (int i = 0; i < 3; ++i)
        for (int j = 0; j < 3; ++j) r.m[i][j] = a[i] * b[j];
    return r;
}

/// Axis-aligned box used for domain extents and clamping.
template <class V>
struct Box {
    V lo, hi;
    V clamp(V p) const {
        for (int a = 0; a < kDim; ++a) p[a] = std::min(std::max(p[a], lo[a]), hi[a]);
        return p;
    }
    bool contains(const V& p, double slack = 0.0) const {
        for (int a = 0; a < kDim; ++a)
            if (p[a] < lo[a] - slack || p[a] > hi[a] + slack) return false;
        return true;
    }
    static constexpr int kDim = sizeof(V) / sizeof(double);
};
using Box2 = Box<Vec2>;
using Box3 = Box<Vec3>;

}  // namespace curlflow
