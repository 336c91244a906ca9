#include "swarm/geometry.hpp"

#include <algorithm>
#include <cmath>

#include "swarm/errors.hpp"

namespace swarm
{
namespace
{
constexpr double min_speed = 1e-14;
constexpr double grazing_ratio = 1e-12;

template<class... Ts>
struct Overloaded : Ts...
{
    using Ts::operator()...;
};
template<class... Ts>
Overloaded(Ts...) -> Overloaded<Ts...>;

// Exit time through the sphere |y| = r from a point with c = |x|^2 - r^2,
// b = x.v, a = |v|^2. Returns a negative value when there is no exit.
double sphere_exit_time(double a, double b, double c)
{
    if (c < 0)
    {
        double const disc = b * b - a * c;
        double const root = std::sqrt(disc);
        // Stable form of the positive root
        return b <= 0 ? (-b + root) / a : -c / (b + root);
    }
    if (b >= 0)
    {
        // On or just outside the wall and still moving out
        return 0.0;
    }
    double const disc = b * b - a * c;
    if (disc < 0)
        return -1.0;
    return (-b + std::sqrt(disc)) / a;
}

// Entry time into the ball |y| < r from outside; negative if it misses.
double sphere_entry_time(double a, double b, double c)
{
    if (c <= 0)
        return b < 0 ? 0.0 : -1.0;
    if (b >= 0)
        return -1.0;
    double const disc = b * b - a * c;
    if (disc < 0)
        return -1.0;
    return c / (-b + std::sqrt(disc));
}

Vec unit(Vec const& x)
{
    double const r = norm(x);
    return r > 0 ? (1.0 / r) * x : Vec{};
}

}  // namespace

//---------------------------------------------------------------------------//
Domain::Domain(Kind kind, int dimension, double band, double tolerance)
    : kind_(std::move(kind)), dim_(dimension)
{
    if (dim_ != 2 && dim_ != 3)
        throw ValidationError("domain dimension must be 2 or 3");

    std::visit(Overloaded{
                   [this](Ball const& b) {
                       if (!(b.radius > 0))
                           throw ValidationError("ball radius must be > 0");
                       diameter_ = 2 * b.radius;
                       inradius_ = b.radius;
                   },
                   [this](Annulus const& a) {
                       if (!(a.r_in > 0 && a.r_out > a.r_in))
                           throw ValidationError(
                               "annulus requires 0 < r_in < r_out");
                       diameter_ = 2 * a.r_out;
                       inradius_ = 0.5 * (a.r_out - a.r_in);
                   },
                   [this](Custom const& c) {
                       if (!c.distance || !c.gradient)
                           throw ValidationError(
                               "custom domain needs distance and gradient");
                       if (!(c.inradius > 0 && c.diameter > 0
                             && c.bounding_radius > 0))
                           throw ValidationError(
                               "custom domain needs positive inradius, "
                               "diameter and bounding radius");
                       diameter_ = c.diameter;
                       inradius_ = c.inradius;
                   }},
               kind_);

    band_ = band > 0 ? band : 0.5 * inradius_;
    tol_ = tolerance > 0 ? tolerance : 1e-9 * diameter_;
}

Domain Domain::ball(double radius, int dimension)
{
    return Domain(Ball{radius}, dimension);
}

Domain Domain::annulus(double r_in, double r_out, int dimension)
{
    return Domain(Annulus{r_in, r_out}, dimension);
}

double Domain::bounding_radius() const
{
    return std::visit(Overloaded{[](Ball const& b) { return b.radius; },
                                 [](Annulus const& a) { return a.r_out; },
                                 [](Custom const& c) {
                                     return c.bounding_radius;
                                 }},
                      kind_);
}

double Domain::signed_distance(Vec const& x) const
{
    return std::visit(
        Overloaded{[&x](Ball const& b) { return b.radius - norm(x); },
                   [&x](Annulus const& a) {
                       double const r = norm(x);
                       return std::min(r - a.r_in, a.r_out - r);
                   },
                   [&x](Custom const& c) { return c.distance(x); }},
        kind_);
}

Vec Domain::distance_gradient(Vec const& x) const
{
    return std::visit(Overloaded{[&x](Ball const&) { return -unit(x); },
                                 [&x](Annulus const& a) {
                                     double const r = norm(x);
                                     return (r - a.r_in < a.r_out - r)
                                                ? unit(x)
                                                : -unit(x);
                                 },
                                 [&x](Custom const& c) {
                                     return unit(c.gradient(x));
                                 }},
                      kind_);
}

Vec Domain::outward_normal(Vec const& x) const
{
    if (std::fabs(signed_distance(x)) > band_)
        throw QueryOutsideBand("normal requested at |l(x)| > band");
    return extended_normal(x);
}

Vec Domain::extended_normal(Vec const& x) const
{
    return -distance_gradient(x);
}

Vec Domain::nudge_inside(Vec const& x) const
{
    double const l = signed_distance(x);
    if (l >= 0)
        return x;
    return x + (-l) * distance_gradient(x);
}

//---------------------------------------------------------------------------//
std::optional<SurfaceHit>
Domain::first_hit(Vec const& x, Vec const& v, double dt) const
{
    double const a = norm2(v);
    double const speed = std::sqrt(a);
    if (speed < min_speed)
        return std::nullopt;

    if (auto const* c = std::get_if<Custom>(&kind_))
        return custom_hit(*c, x, v, dt);

    double const b = dot(x, v);
    double const rr = norm2(x);
    double tau = -1;
    bool inner = false;

    if (auto const* ball = std::get_if<Ball>(&kind_))
    {
        tau = sphere_exit_time(a, b, rr - ball->radius * ball->radius);
    }
    else
    {
        auto const& ann = std::get<Annulus>(kind_);
        tau = sphere_exit_time(a, b, rr - ann.r_out * ann.r_out);
        double const t_in
            = sphere_entry_time(a, b, rr - ann.r_in * ann.r_in);
        if (t_in >= 0 && (tau < 0 || t_in < tau))
        {
            tau = t_in;
            inner = true;
        }
    }

    if (tau < 0 || tau > dt)
        return std::nullopt;

    SurfaceHit hit;
    hit.tau = tau;
    hit.x_hit = x + tau * v;
    hit.n = inner ? -unit(hit.x_hit) : unit(hit.x_hit);
    if (dot(v, hit.n) < grazing_ratio * speed)
        return std::nullopt;
    return hit;
}

std::optional<SurfaceHit> Domain::custom_hit(Custom const& c, Vec const& x,
                                             Vec const& v, double dt) const
{
    double const speed = norm(v);
    auto const level = [&](double t) { return c.distance(x + t * v); };
    auto const make_hit = [&](double t) -> std::optional<SurfaceHit> {
        // Newton polish from within the tolerance band
        for (int iter = 0; iter < 4; ++iter)
        {
            double const lt = level(t);
            double const slope = dot(c.gradient(x + t * v), v);
            if (lt == 0.0 || std::abs(slope) < grazing_ratio * speed)
                break;
            double const next = t - lt / slope;
            if (!(next >= 0 && next <= dt)
                || std::abs(level(next)) >= std::abs(lt))
                break;
            t = next;
        }
        SurfaceHit hit;
        hit.tau = t;
        hit.x_hit = x + t * v;
        hit.n = -unit(c.gradient(hit.x_hit));
        if (dot(v, hit.n) < grazing_ratio * speed)
            return std::nullopt;
        return hit;
    };

    double const h_min = dt * 1e-4;
    double tau = 0;
    double l = level(0);
    if (l <= tol_ && dot(c.gradient(x), v) < 0)
        return make_hit(0.0);

    double prev = 0;
    while (true)
    {
        double const step = std::max(l / speed, h_min);
        prev = tau;
        tau = std::min(tau + step, dt);
        l = level(tau);
        if (l < -tol_)
            break;
        if (l <= tol_ && dot(c.gradient(x + tau * v), v) < 0)
            return make_hit(tau);
        if (tau >= dt)
            return std::nullopt;
    }

    // Bisection on [prev, tau]: l(prev) >= -tol, l(tau) < -tol
    double lo = prev;
    double hi = tau;
    if (level(lo) < -tol_)
        throw RootNotBracketed("custom domain flight lost its bracket");
    for (int iter = 0; iter < 200; ++iter)
    {
        double const mid = 0.5 * (lo + hi);
        double const lm = level(mid);
        if (lm < -tol_)
            hi = mid;
        else if (lm > tol_)
            lo = mid;
        else
            return make_hit(mid);
    }
    throw RootNotBracketed("bisection failed to reach the boundary tolerance");
}

}  // namespace swarm
