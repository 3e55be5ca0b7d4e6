#pragma once

#include <array>
#include <cmath>

namespace vpmcf {

// Small fixed-size vector/matrix helpers. Everything is stored with three
// components; 2D code leaves the z slot at zero.
using Vec = std::array<double, 3>;
using Mat = std::array<std::array<double, 3>, 3>;

inline Vec vec2(double x, double y) { return {x, y, 0.0}; }
inline Vec vec3(double x, double y, double z) { return {x, y, z}; }

inline Vec operator+(const Vec& a, const Vec& b) { return {a[0] + b[0], a[1] + b[1], a[2] + b[2]}; }
inline Vec operator-(const Vec& a, const Vec& b) { return {a[0] - b[0], a[1] - b[1], a[2] - b[2]}; }
inline Vec operator*(double s, const Vec& a) { return {s * a[0], s * a[1], s * a[2]}; }
inline Vec operator*(const Vec& a, double s) { return s * a; }
inline Vec operator/(const Vec& a, double s) { return {a[0] / s, a[1] / s, a[2] / s}; }
inline Vec& operator+=(Vec& a, const Vec& b) { a = a + b; return a; }
inline Vec& operator-=(Vec& a, const Vec& b) { a = a - b; return a; }

inline double dot(const Vec& a, const Vec& b) { return a[0] * b[0] + a[1] * b[1] + a[2] * b[2]; }
inline double norm2(const Vec& a) { return dot(a, a); }
inline double norm(const Vec& a) { return std::sqrt(norm2(a)); }
inline Vec normalized(const Vec& a) { return a / norm(a); }

inline Mat zeroMat() { return {{{0, 0, 0}, {0, 0, 0}, {0, 0, 0}}}; }

inline Mat outer(const Vec& a, const Vec& b) {
    Mat m;
    for (int i = 0; i < 3; ++i)
        for (int j = 0; j < 3; ++j) m[i][j] = a[i] * b[j];
    return m;
}

inline Mat operator+(const Mat& a, const Mat& b) {
    Mat m;
    for (int i = 0; i < 3; ++i)
        for (int j = 0; j < 3; ++j) m[i][j] = a[i][j] + b[i][j];
    return m;
}

inline Mat operator*(double s, const Mat& a) {
    Mat m;
    for (int i = 0; i < 3; ++i)
        for (int j = 0; j < 3; ++j) m[i][j] = s * a[i][j];
    return m;
}

inline Vec matvec(const Mat& m, const Vec& v) {
    return {m[0][0] * v[0] + m[0][1] * v[1] + m[0][2] * v[2],
            m[1][0] * v[0] + m[1][1] * v[1] + m[1][2] * v[2],
            m[2][0] * v[0] + m[2][1] * v[1] + m[2][2] * v[2]};
}

// v^T M applied from the left, i.e. M^T v.
inline Vec matTvec(const Mat& m, const Vec& v) {
    return {m[0][0] * v[0] + m[1][0] * v[1] + m[2][0] * v[2],
            m[0][1] * v[0] + m[1][1] * v[1] + m[2][1] * v[2],
            m[0][2] * v[0] + m[1][2] * v[1] + m[2][2] * v[2]};
}

inline double trace(const Mat& m) { return m[0][0] + m[1][1] + m[2][2]; }

} // namespace vpmcf
