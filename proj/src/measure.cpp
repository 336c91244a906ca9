#include "swarm/measure.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>

#include "swarm/errors.hpp"
#include "swarm/noise.hpp"

namespace swarm
{
double integrate(EmpiricalSnapshot const& snap, PhaseFunction const& phi)
{
    double sum = 0;
    for (std::size_t i = 0; i < snap.size(); ++i)
        sum += phi(snap.x[i], snap.v[i]);
    return sum / static_cast<double>(snap.size());
}

//---------------------------------------------------------------------------//
double lipschitz_bound(TestFunction const& psi)
{
    // g = max_u 2 sqrt(u) |b'(u)| bounds |d/dy b(|y|^2 / r^2)| * r
    static double const g = [] {
        double best = 0;
        int const n = 200000;
        for (int k = 1; k < n; ++k)
        {
            double const u = static_cast<double>(k) / n;
            best = std::max(best, 2.0 * std::sqrt(u) * std::fabs(bump_d1(u)));
        }
        return best * 1.001;
    }();
    double const a = std::fabs(psi.amplitude);
    return a * g
           * std::sqrt(1.0 / (psi.r_x * psi.r_x) + 1.0 / (psi.r_v * psi.r_v));
}

BLDictionary::BLDictionary(int dim, std::vector<TestFunction> const& family,
                           std::size_t size, std::uint64_t seed,
                           double frequency)
{
    if (size < family.size())
        throw ValidationError("dictionary smaller than the test family");
    Philox4x32::Key const key{static_cast<std::uint32_t>(mix64(seed)),
                              static_cast<std::uint32_t>(mix64(seed) >> 32)};
    std::size_t const n_cos = size - family.size();
    for (std::size_t m = 0; m < n_cos; ++m)
    {
        auto const id = static_cast<std::uint32_t>(m);
        Cosine c;
        c.wx = frequency * keyed_normal(key, id, DrawTag::dictionary, 0, dim);
        c.wv = frequency * keyed_normal(key, id, DrawTag::dictionary, 1, dim);
        c.theta = 2.0 * std::numbers::pi
                  * keyed_uniform(key, id, DrawTag::dictionary, 2, 0)[0];
        c.scale = 1.0 / std::max(1.0, std::sqrt(norm2(c.wx) + norm2(c.wv)));
        cosines_.push_back(c);
    }
    for (auto const& psi : family)
    {
        double const bound
            = std::max({1.0, std::fabs(psi.amplitude), lipschitz_bound(psi)});
        bumps_.push_back({psi, 1.0 / bound});
    }
}

double BLDictionary::evaluate(std::size_t m, Vec const& x, Vec const& v) const
{
    if (m < cosines_.size())
    {
        auto const& c = cosines_[m];
        return c.scale * std::cos(dot(c.wx, x) + dot(c.wv, v) + c.theta);
    }
    auto const& b = bumps_[m - cosines_.size()];
    return b.scale * b.psi.eval(x, v);
}

std::vector<double> BLDictionary::integrals(EmpiricalSnapshot const& snap) const
{
    std::vector<double> out(size(), 0.0);
    for (std::size_t i = 0; i < snap.size(); ++i)
        for (std::size_t m = 0; m < out.size(); ++m)
            out[m] += evaluate(m, snap.x[i], snap.v[i]);
    double const inv = 1.0 / static_cast<double>(snap.size());
    for (auto& o : out)
        o *= inv;
    return out;
}

double bl_distance(std::vector<double> const& mu, std::vector<double> const& nu)
{
    if (mu.size() != nu.size())
        throw ValidationError("dictionaries differ between arguments");
    double best = 0;
    for (std::size_t m = 0; m < mu.size(); ++m)
        best = std::max(best, std::fabs(mu[m] - nu[m]));
    return best;
}

double bl_distance(EmpiricalSnapshot const& mu, EmpiricalSnapshot const& nu,
                   BLDictionary const& dict)
{
    return bl_distance(dict.integrals(mu), dict.integrals(nu));
}

//---------------------------------------------------------------------------//
std::vector<int> PhaseHistogram::unravel(std::size_t c) const
{
    std::vector<int> idx(2 * dim);
    for (int axis = 2 * dim - 1; axis >= 0; --axis)
    {
        int const bins = axis < dim ? grid.bins_x : grid.bins_v;
        idx[axis] = static_cast<int>(c % bins);
        c /= bins;
    }
    return idx;
}

double PhaseHistogram::total() const
{
    double s = 0;
    for (double m : mass)
        s += m;
    return s;
}

PhaseHistogram phase_histogram(EmpiricalSnapshot const& snap, int dim,
                               GridSpec const& grid)
{
    if (grid.bins_x < 1 || grid.bins_v < 1 || !(grid.x_half_width > 0)
        || !(grid.v_max > 0))
        throw ValidationError("histogram grid needs positive bins and widths");
    PhaseHistogram h;
    h.dim = dim;
    h.grid = grid;
    std::size_t cells = 1;
    for (int axis = 0; axis < 2 * dim; ++axis)
        cells *= axis < dim ? grid.bins_x : grid.bins_v;
    h.mass.assign(cells, 0.0);

    auto const bin = [](double y, double half, int bins) -> int {
        if (y < -half || y > half)
            return -1;
        int const b = static_cast<int>((y + half) / (2 * half) * bins);
        return std::min(b, bins - 1);
    };

    double const w = 1.0 / static_cast<double>(snap.size());
    for (std::size_t i = 0; i < snap.size(); ++i)
    {
        std::size_t flat = 0;
        bool inside = true;
        for (int axis = 0; axis < 2 * dim && inside; ++axis)
        {
            bool const is_x = axis < dim;
            int const bins = is_x ? grid.bins_x : grid.bins_v;
            int const b = is_x ? bin(snap.x[i][axis], grid.x_half_width, bins)
                               : bin(snap.v[i][axis - dim], grid.v_max, bins);
            inside = b >= 0;
            flat = flat * bins + static_cast<std::size_t>(std::max(b, 0));
        }
        if (inside)
            h.mass[flat] += w;
    }
    return h;
}

}  // namespace swarm
