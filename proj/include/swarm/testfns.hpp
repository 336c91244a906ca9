#pragma once

#include <vector>

#include "geometry.hpp"
#include "vec.hpp"

namespace swarm
{
//---------------------------------------------------------------------------//
//! Value and derivatives of a test function at one phase-space point.
struct TestFunctionJet
{
    double value{0};
    Vec grad_x;
    Vec grad_v;
    double laplacian_v{0};
};

/*!
 * Product bump psi(x, v) = A b(|x - xc|^2 / r_x^2) b(|v - vc|^2 / r_v^2)
 * with b(u) = exp(1 - 1 / (1 - u)) on u < 1 and zero elsewhere.
 */
struct TestFunction
{
    Vec x_center;
    Vec v_center;
    double r_x{1};
    double r_v{1};
    double amplitude{1};
    int dim{2};

    double eval(Vec const& x, Vec const& v) const;
    Vec grad_x(Vec const& x, Vec const& v) const;
    Vec grad_v(Vec const& x, Vec const& v) const;
    double laplacian_v(Vec const& x, Vec const& v) const;
    TestFunctionJet jet(Vec const& x, Vec const& v) const;

    //! True if x lies in the open spatial support
    bool in_spatial_support(Vec const& x) const
    {
        return norm2(x - x_center) < r_x * r_x;
    }
};

//! Bump profile and its first two derivatives.
double bump(double u);
double bump_d1(double u);
double bump_d2(double u);

//! Family overrides (count, velocity scale, amplitude).
struct TestFamilyConfig
{
    int count{8};
    double velocity_scale{1.0};
    double amplitude{1.0};
};

/*!
 * Deterministic family with r_x = 0.3 inradius, r_v = 2 velocity_scale and
 * centers placed so that l >= 0.1 inradius on every spatial support.
 */
std::vector<TestFunction>
default_family(Domain const& domain, TestFamilyConfig const& cfg = {});

}  // namespace swarm
