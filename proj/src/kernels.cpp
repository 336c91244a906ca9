#include "swarm/kernels.hpp"

#include <algorithm>
#include <cmath>

#include "swarm/errors.hpp"

namespace swarm
{
namespace
{
Vec clip(Vec const& dv, double v_clip)
{
    double const s = norm(dv);
    return s > v_clip ? (v_clip / s) * dv : dv;
}

double communication_rate(CuckerSmale const& cs, double r2)
{
    if (cs.beta == 0.0)
        return cs.lambda;
    if (cs.beta == 0.5)
        return cs.lambda / std::sqrt(1.0 + r2);
    return cs.lambda * std::pow(1.0 + r2, -cs.beta);
}

struct Evaluator
{
    Vec const& dx;
    Vec const& dv;

    Vec operator()(ZeroKernel const&) const { return {}; }

    Vec operator()(CuckerSmale const& cs) const
    {
        return (-communication_rate(cs, norm2(dx))) * clip(dv, cs.v_clip);
    }

    Vec operator()(MorseGradient const& m) const
    {
        double const r = norm(dx);
        if (r == 0.0)
            return {};
        double const du = m.c_a * std::exp(-r / m.l_a)
                          - m.c_r * std::exp(-r / m.l_r);
        return (-du / r) * dx;
    }
};

}  // namespace

void validate(KernelSpec const& kernel)
{
    if (auto const* cs = std::get_if<CuckerSmale>(&kernel))
    {
        if (!(cs->lambda >= 0 && cs->beta >= 0 && cs->v_clip > 0))
            throw ValidationError(
                "cucker_smale needs lambda >= 0, beta >= 0, v_clip > 0");
    }
    else if (auto const* m = std::get_if<MorseGradient>(&kernel))
    {
        if (!(m->c_a >= 0 && m->c_r >= 0 && m->l_a > 0 && m->l_r > 0))
            throw ValidationError(
                "morse needs non-negative strengths and positive lengths");
    }
}

Vec evaluate(KernelSpec const& kernel, Vec const& dx, Vec const& dv)
{
    return std::visit(Evaluator{dx, dv}, kernel);
}

double sup_norm(KernelSpec const& kernel)
{
    if (auto const* cs = std::get_if<CuckerSmale>(&kernel))
        return cs->lambda * cs->v_clip;
    if (auto const* m = std::get_if<MorseGradient>(&kernel))
    {
        // U'(r) = C_a e^{-r/l_a} - C_r e^{-r/l_r} lies in [-C_r, C_a]
        return std::max(m->c_a, m->c_r);
    }
    return 0.0;
}

bool is_zero(KernelSpec const& kernel)
{
    return std::holds_alternative<ZeroKernel>(kernel);
}

Vec mean_field_drift(KernelSpec const& kernel, std::span<Vec const> x,
                     std::span<Vec const> v, std::size_t i)
{
    Vec sum;
    if (is_zero(kernel))
        return sum;
    for (std::size_t j = 0; j < x.size(); ++j)
        sum += evaluate(kernel, x[i] - x[j], v[i] - v[j]);
    return (1.0 / static_cast<double>(x.size())) * sum;
}

void mean_field_drift_all(KernelSpec const& kernel, std::span<Vec const> x,
                          std::span<Vec const> v, std::span<Vec> out)
{
    std::fill(out.begin(), out.end(), Vec{});
    if (is_zero(kernel))
        return;
    std::size_t const n = x.size();
    std::visit(
        [&](auto const& k) {
            for (std::size_t i = 0; i < n; ++i)
            {
                Vec acc;
                for (std::size_t j = i + 1; j < n; ++j)
                {
                    Vec const h = Evaluator{x[i] - x[j], v[i] - v[j]}(k);
                    acc += h;
                    out[j] -= h;
                }
                out[i] += acc;
            }
        },
        kernel);
    double const inv_n = 1.0 / static_cast<double>(n);
    for (auto& f : out)
        f *= inv_n;
}

}  // namespace swarm
