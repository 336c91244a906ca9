#include "swarm/testfns.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>

#include "swarm/errors.hpp"

namespace swarm
{
double bump(double u)
{
    if (u >= 1.0)
        return 0.0;
    return std::exp(1.0 - 1.0 / (1.0 - u));
}

double bump_d1(double u)
{
    if (u >= 1.0)
        return 0.0;
    double const s = 1.0 / (1.0 - u);
    return -bump(u) * s * s;
}

double bump_d2(double u)
{
    if (u >= 1.0)
        return 0.0;
    double const s = 1.0 / (1.0 - u);
    return bump(u) * (s * s * s * s - 2.0 * s * s * s);
}

//---------------------------------------------------------------------------//
double TestFunction::eval(Vec const& x, Vec const& v) const
{
    double const u = norm2(x - x_center) / (r_x * r_x);
    if (u >= 1.0)
        return 0.0;
    double const w = norm2(v - v_center) / (r_v * r_v);
    return amplitude * bump(u) * bump(w);
}

Vec TestFunction::grad_x(Vec const& x, Vec const& v) const
{
    return jet(x, v).grad_x;
}

Vec TestFunction::grad_v(Vec const& x, Vec const& v) const
{
    return jet(x, v).grad_v;
}

double TestFunction::laplacian_v(Vec const& x, Vec const& v) const
{
    return jet(x, v).laplacian_v;
}

TestFunctionJet TestFunction::jet(Vec const& x, Vec const& v) const
{
    TestFunctionJet out;
    Vec const dx = x - x_center;
    double const u = norm2(dx) / (r_x * r_x);
    if (u >= 1.0)
        return out;
    Vec const dv = v - v_center;
    double const w = norm2(dv) / (r_v * r_v);
    if (w >= 1.0)
        return out;

    double const bu = bump(u);
    double const bw = bump(w);
    double const bu1 = bump_d1(u);
    double const bw1 = bump_d1(w);
    double const bw2 = bump_d2(w);
    double const rx2 = r_x * r_x;
    double const rv2 = r_v * r_v;

    out.value = amplitude * bu * bw;
    out.grad_x = (amplitude * bu1 * bw * 2.0 / rx2) * dx;
    out.grad_v = (amplitude * bu * bw1 * 2.0 / rv2) * dv;
    out.laplacian_v = amplitude * bu
                      * (bw2 * 4.0 * w / rv2 + bw1 * 2.0 * dim / rv2);
    return out;
}

//---------------------------------------------------------------------------//
namespace
{
std::vector<Vec> ring(Vec const& center, double radius, int count,
                      double phase)
{
    std::vector<Vec> pts;
    for (int k = 0; k < count; ++k)
    {
        double const a = phase + 2.0 * std::numbers::pi * k / count;
        pts.push_back(center + Vec{radius * std::cos(a), radius * std::sin(a)});
    }
    return pts;
}

// Greedy farthest-point selection from admissible grid points.
std::vector<Vec> custom_centers(Domain const& domain, Custom const& c,
                                int count, double min_level)
{
    std::vector<Vec> candidates;
    int const per_axis = 21;
    double const r = domain.bounding_radius();
    int const nz = domain.dimension() == 3 ? per_axis : 1;
    for (int i = 0; i < per_axis; ++i)
        for (int j = 0; j < per_axis; ++j)
            for (int k = 0; k < nz; ++k)
            {
                auto coord = [&](int n) {
                    return -r + 2.0 * r * n / (per_axis - 1);
                };
                Vec p{coord(i), coord(j),
                      domain.dimension() == 3 ? coord(k) : 0.0};
                if (domain.signed_distance(p) >= min_level)
                    candidates.push_back(p);
            }
    if (domain.signed_distance(c.center) >= min_level)
        candidates.insert(candidates.begin(), c.center);
    if (static_cast<int>(candidates.size()) < count)
        throw ValidationError(
            "custom domain too thin for the requested test family");

    std::vector<Vec> chosen{candidates.front()};
    std::vector<double> dist(candidates.size());
    for (std::size_t i = 0; i < candidates.size(); ++i)
        dist[i] = norm2(candidates[i] - chosen.front());
    while (static_cast<int>(chosen.size()) < count)
    {
        auto const best = std::distance(
            dist.begin(), std::max_element(dist.begin(), dist.end()));
        chosen.push_back(candidates[best]);
        for (std::size_t i = 0; i < candidates.size(); ++i)
            dist[i] = std::min(dist[i], norm2(candidates[i] - chosen.back()));
    }
    return chosen;
}

}  // namespace

std::vector<TestFunction>
default_family(Domain const& domain, TestFamilyConfig const& cfg)
{
    if (cfg.count < 1)
        throw ValidationError("test family needs at least one member");
    if (!(cfg.velocity_scale > 0))
        throw ValidationError("test family velocity scale must be > 0");

    double const inr = domain.inradius();
    std::vector<Vec> centers;
    if (auto const* b = std::get_if<Ball>(&domain.kind()))
    {
        centers.push_back(Vec{});
        auto more = ring(Vec{}, 0.45 * b->radius, cfg.count - 1, 0.0);
        centers.insert(centers.end(), more.begin(), more.end());
    }
    else if (auto const* a = std::get_if<Annulus>(&domain.kind()))
    {
        centers = ring(Vec{}, 0.5 * (a->r_in + a->r_out), cfg.count, 0.0);
    }
    else
    {
        centers = custom_centers(domain, std::get<Custom>(domain.kind()),
                                 cfg.count, 0.4 * inr);
    }

    std::vector<TestFunction> family;
    for (auto const& c : centers)
    {
        TestFunction psi;
        psi.x_center = c;
        psi.v_center = Vec{};
        psi.r_x = 0.3 * inr;
        psi.r_v = 2.0 * cfg.velocity_scale;
        psi.amplitude = cfg.amplitude;
        psi.dim = domain.dimension();
        family.push_back(psi);
    }
    return family;
}

}  // namespace swarm
