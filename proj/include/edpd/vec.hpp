#pragma once

#include <cmath>

namespace edpd {

/// Cartesian 3-vector. 2D runs keep z == 0 throughout.
struct Vec3 {
    double x = 0.0;
    double y = 0.0;
    double z = 0.0;

    constexpr Vec3() = default;
    constexpr Vec3(double x_, double y_, double z_ = 0.0) : x(x_), y(y_), z(z_) {}

    constexpr Vec3& operator+=(const Vec3& o) { x += o.x; y += o.y; z += o.z; return *this; }
    constexpr Vec3& operator-=(const Vec3& o) { x -= o.x; y -= o.y; z -= o.z; return *this; }
    constexpr Vec3& operator*=(double s) { x *= s; y *= s; z *= s; return *this; }

    constexpr double& operator[](int i) { return i == 0 ? x : (i == 1 ? y : z); }
    constexpr double operator[](int i) const { return i == 0 ? x : (i == 1 ? y : z); }
};

constexpr Vec3 operator+(Vec3 a, const Vec3& b) { return a += b; }
constexpr Vec3 operator-(Vec3 a, const Vec3& b) { return a -= b; }
constexpr Vec3 operator*(Vec3 a, double s) { return a *= s; }
constexpr Vec3 operator*(double s, Vec3 a) { return a *= s; }
constexpr Vec3 operator/(Vec3 a, double s) { return a *= (1.0 / s); }
constexpr Vec3 operator-(const Vec3& a) { return {-a.x, -a.y, -a.z}; }

constexpr double dot(const Vec3& a, const Vec3& b) { return a.x * b.x + a.y * b.y + a.z * b.z; }
constexpr Vec3 cross(const Vec3& a, const Vec3& b) {
    return {a.y * b.z - a.z * b.y, a.z * b.x - a.x * b.z, a.x * b.y - a.y * b.x};
}
constexpr double norm2(const Vec3& a) { return dot(a, a); }
inline double norm(const Vec3& a) { return std::sqrt(norm2(a)); }
inline Vec3 normalized(const Vec3& a) { return a / norm(a); }

/// Symmetric second-order tensor (Voigt-like storage).
struct Sym3 {
    double xx = 0.0, yy = 0.0, zz = 0.0;
    double xy = 0.0, xz = 0.0, yz = 0.0;

    constexpr Sym3& operator+=(const Sym3& o) {
        xx += o.xx; yy += o.yy; zz += o.zz;
        xy += o.xy; xz += o.xz; yz += o.yz;
        return *this;
    }
    constexpr Sym3& operator*=(double s) {
        xx *= s; yy *= s; zz *= s; xy *= s; xz *= s; yz *= s;
        return *this;
    }
};

constexpr Sym3 operator+(Sym3 a, const Sym3& b) { return a += b; }
constexpr Sym3 operator*(Sym3 a, double s) { return a *= s; }
constexpr Sym3 operator*(double s, Sym3 a) { return a *= s; }

/// sigma . v
constexpr Vec3 apply(const Sym3& s, const Vec3& v) {
    return {s.xx * v.x + s.xy * v.y + s.xz * v.z,
            s.xy * v.x + s.yy * v.y + s.yz * v.z,
            s.xz * v.x + s.yz * v.y + s.zz * v.z};
}

constexpr double trace(const Sym3& s) { return s.xx + s.yy + s.zz; }

} // namespace edpd
