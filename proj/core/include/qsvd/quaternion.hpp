#pragma once

#include <cmath>
#include <iosfwd>

namespace qsvd {

/// Real quaternion w + x i + y j + z k.
struct Quaternion {
    double w = 0.0;
    double x = 0.0;
    double y = 0.0;
    double z = 0.0;

    constexpr Quaternion() = default;
    constexpr Quaternion(double w_, double x_ = 0.0, double y_ = 0.0, double z_ = 0.0)
        : w(w_), x(x_), y(y_), z(z_) {}

    /// Component by index: 0 -> w, 1 -> x (i), 2 -> y (j), 3 -> z (k).
    constexpr double operator[](int c) const { return c == 0 ? w : c == 1 ? x : c == 2 ? y : z; }

    constexpr Quaternion conj() const { return {w, -x, -y, -z}; }
    constexpr double norm_squared() const { return w * w + x * x + y * y + z * z; }
    double norm() const { return std::sqrt(norm_squared()); }

    constexpr Quaternion& operator+=(const Quaternion& o) {
        w += o.w; x += o.x; y += o.y; z += o.z;
        return *this;
    }
    constexpr Quaternion& operator-=(const Quaternion& o) {
        w -= o.w; x -= o.x; y -= o.y; z -= o.z;
        return *this;
    }
    constexpr Quaternion& operator*=(double s) {
        w *= s; x *= s; y *= s; z *= s;
        return *this;
    }

    friend constexpr bool operator==(const Quaternion&, const Quaternion&) = default;
};

/// Hamilton product a*b (noncommutative).
constexpr Quaternion quat_mul(const Quaternion& a, const Quaternion& b) {
    return {a.w * b.w - a.x * b.x - a.y * b.y - a.z * b.z,
            a.w * b.x + a.x * b.w + a.y * b.z - a.z * b.y,
            a.w * b.y - a.x * b.z + a.y * b.w + a.z * b.x,
            a.w * b.z + a.x * b.y - a.y * b.x + a.z * b.w};
}

constexpr Quaternion operator*(const Quaternion& a, const Quaternion& b) { return quat_mul(a, b); }
constexpr Quaternion operator*(const Quaternion& a, double s) { return {a.w * s, a.x * s, a.y * s, a.z * s}; }
constexpr Quaternion operator*(double s, const Quaternion& a) { return a * s; }
constexpr Quaternion operator+(Quaternion a, const Quaternion& b) { return a += b; }
constexpr Quaternion operator-(Quaternion a, const Quaternion& b) { return a -= b; }
constexpr Quaternion operator-(const Quaternion& a) { return {-a.w, -a.x, -a.y, -a.z}; }

inline double norm(const Quaternion& q) { return q.norm(); }

std::ostream& operator<<(std::ostream& os, const Quaternion& q);

}  // namespace qsvd
