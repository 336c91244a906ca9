#pragma once

#include <span>
#include <variant>
#include <vector>

#include "vec.hpp"

namespace swarm
{
//---------------------------------------------------------------------------//
// INTERACTION KERNELS
//---------------------------------------------------------------------------//
struct ZeroKernel
{
};

/*!
 * Cucker-Smale alignment with clipped relative velocity:
 * H(dx, dv) = -lambda (1 + |dx|^2)^(-beta) clip(dv, v_clip).
 */
struct CuckerSmale
{
    double lambda{1.0};
    double beta{0.5};
    double v_clip{10.0};
};

/*!
 * Negative gradient of the Morse potential
 * U(r) = C_r l_r exp(-r / l_r) - C_a l_a exp(-r / l_a).
 */
struct MorseGradient
{
    double c_a{1.0};
    double c_r{2.0};
    double l_a{2.0};
    double l_r{0.5};
};

using KernelSpec = std::variant<ZeroKernel, CuckerSmale, MorseGradient>;

//! Throws ValidationError on non-positive scales or negative exponents.
void validate(KernelSpec const& kernel);

//! Pairwise force H(dx, dv).
Vec evaluate(KernelSpec const& kernel, Vec const& dx, Vec const& dv);

//! Analytic upper bound on |H| over all inputs.
double sup_norm(KernelSpec const& kernel);

bool is_zero(KernelSpec const& kernel);

//! (1/N) sum_j H(x_i - x_j, v_i - v_j), self term included.
Vec mean_field_drift(KernelSpec const& kernel, std::span<Vec const> x,
                     std::span<Vec const> v, std::size_t i);

/*!
 * Drift for every particle at once.
 *
 * Both shipped kernels are odd under (dx, dv) -> (-dx, -dv), so each pair is
 * evaluated once and scattered with opposite signs.
 */
void mean_field_drift_all(KernelSpec const& kernel, std::span<Vec const> x,
                          std::span<Vec const> v, std::span<Vec> out);

}  // namespace swarm
