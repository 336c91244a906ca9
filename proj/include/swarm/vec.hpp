#pragma once

#include <array>
#include <cmath>
#include <cstddef>

namespace swarm
{
//---------------------------------------------------------------------------//
/*!
 * Fixed-capacity spatial vector for d <= 3.
 *
 * Two-dimensional problems leave the trailing component at zero; every
 * operation below is closed on that subspace, so dot products and norms are
 * exact for either dimension without branching on d.
 */
struct Vec
{
    std::array<double, 3> c{0.0, 0.0, 0.0};

    constexpr Vec() = default;
    constexpr Vec(double x, double y, double z = 0.0) : c{x, y, z} {}

    constexpr double& operator[](std::size_t i) { return c[i]; }
    constexpr double operator[](std::size_t i) const { return c[i]; }

    constexpr Vec& operator+=(Vec const& o)
    {
        c[0] += o.c[0];
        c[1] += o.c[1];
        c[2] += o.c[2];
        return *this;
    }
    constexpr Vec& operator-=(Vec const& o)
    {
        c[0] -= o.c[0];
        c[1] -= o.c[1];
        c[2] -= o.c[2];
        return *this;
    }
    constexpr Vec& operator*=(double s)
    {
        c[0] *= s;
        c[1] *= s;
        c[2] *= s;
        return *this;
    }

    friend constexpr bool operator==(Vec const&, Vec const&) = default;
};

constexpr Vec operator+(Vec a, Vec const& b) { return a += b; }
constexpr Vec operator-(Vec a, Vec const& b) { return a -= b; }
constexpr Vec operator-(Vec a) { return a *= -1.0; }
constexpr Vec operator*(double s, Vec a) { return a *= s; }
constexpr Vec operator*(Vec a, double s) { return a *= s; }
constexpr Vec operator/(Vec a, double s) { return a *= 1.0 / s; }

constexpr double dot(Vec const& a, Vec const& b)
{
    return a.c[0] * b.c[0] + a.c[1] * b.c[1] + a.c[2] * b.c[2];
}

constexpr double norm2(Vec const& a) { return dot(a, a); }
inline double norm(Vec const& a) { return std::sqrt(norm2(a)); }

inline bool is_finite(Vec const& a)
{
    return std::isfinite(a.c[0]) && std::isfinite(a.c[1])
           && std::isfinite(a.c[2]);
}

}  // namespace swarm
