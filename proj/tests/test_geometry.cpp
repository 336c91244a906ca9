#include <cmath>
#include <random>

#include <doctest.h>

#include "helpers.hpp"
#include "swarm/errors.hpp"
#include "swarm/geometry.hpp"

using namespace swarm;
using doctest::Approx;

namespace
{
//! Distance to a polygonal approximation of a circle of radius r
double polygon_distance(Vec const& x, double r, int segments = 20000)
{
    double best = 1e300;
    for (int k = 0; k < segments; ++k)
    {
        double const a = 2 * M_PI * k / segments;
        Vec const p{r * std::cos(a), r * std::sin(a), 0};
        best = std::min(best, norm(x - p));
    }
    return best;
}

//! Smallest s in [0, dt] with |x + s v| >= R, by scanning then bisecting
double scanned_exit(Vec const& x, Vec const& v, double dt, double radius)
{
    int const n = 100000;
    for (int k = 1; k <= n; ++k)
    {
        double const s = dt * k / n;
        if (norm(x + s * v) >= radius)
        {
            double lo = dt * (k - 1) / n, hi = s;
            for (int it = 0; it < 80; ++it)
            {
                double const mid = 0.5 * (lo + hi);
                (norm(x + mid * v) >= radius ? hi : lo) = mid;
            }
            return 0.5 * (lo + hi);
        }
    }
    return -1;
}

Domain custom_ball(double radius)
{
    Custom c;
    c.distance = [radius](Vec const& x) { return radius - norm(x); };
    c.gradient = [](Vec const& x) {
        double const r = norm(x);
        return r > 0 ? -1.0 * x / r : Vec{};
    };
    c.inradius = radius;
    c.diameter = 2 * radius;
    c.bounding_radius = radius;
    return Domain(c, 2);
}

}  // namespace

TEST_CASE("signed distance examples")
{
    auto const ball = Domain::ball(1.0);
    CHECK(ball.signed_distance({0.5, 0, 0}) == Approx(0.5));
    CHECK(ball.signed_distance({1, 0, 0}) == 0.0);
    CHECK(ball.signed_distance({1.5, 0, 0}) < 0);

    auto const ann = Domain::annulus(0.5, 1.0);
    Vec const x{0.7, 0, 0};
    CHECK(ann.signed_distance(x) == Approx(0.2).epsilon(1e-12));
    double const oracle = std::min(polygon_distance(x, 0.5),
                                   polygon_distance(x, 1.0));
    CHECK(ann.signed_distance(x) == Approx(oracle).epsilon(1e-6));
}

TEST_CASE("outward normals")
{
    auto const ball = Domain::ball(1.0);
    Vec n = ball.outward_normal({1, 0, 0});
    CHECK(n[0] == Approx(1.0));
    CHECK(n[1] == Approx(0.0));
    n = ball.outward_normal({0, -1, 0});
    CHECK(n[0] == Approx(0.0));
    CHECK(n[1] == Approx(-1.0));

    auto const ann = Domain::annulus(0.5, 1.0);
    Vec const x{0.5, 0, 0};
    n = ann.outward_normal(x);
    CHECK(n[0] == Approx(-1.0));
    CHECK(n[1] == Approx(0.0));

    // n = -grad l by one-sided finite differences on the interior side
    double const h = 1e-7;
    double const dl = (ann.signed_distance({0.5 + h, 0, 0})
                       - ann.signed_distance(x))
                      / h;
    CHECK(-dl == Approx(n[0]).epsilon(1e-6));

    CHECK_THROWS_AS(ball.outward_normal({0, 0, 0}), QueryOutsideBand);
}

TEST_CASE("reflect examples and invariants")
{
    Vec r = reflect({1, 0, 0}, {1, 0, 0});
    CHECK(r[0] == -1.0);
    double const s = 1 / std::sqrt(2.0);
    r = reflect({s, s, 0}, {1, 0, 0});
    CHECK(r[0] == Approx(-s));
    CHECK(r[1] == Approx(s));
    r = reflect({0.3, -0.4, 0}, {0, -1, 0});
    CHECK(r[0] == Approx(0.3));
    CHECK(r[1] == Approx(0.4));

    std::mt19937_64 rng(3);
    for (int k = 0; k < 1000; ++k)
    {
        Vec const v = test::random_vec(rng, 2.0, 3);
        Vec n = test::random_vec(rng, 1.0, 3);
        n = n / norm(n);
        Vec const once = reflect(v, n);
        CHECK(norm(reflect(once, n) - v) <= 1e-12 * (1 + norm(v)));
        CHECK(std::abs(norm(once) - norm(v)) <= 1e-12 * (1 + norm(v)));
    }
}

TEST_CASE("first_hit examples")
{
    auto const ball = Domain::ball(1.0);
    auto hit = ball.first_hit({0, 0, 0}, {2, 0, 0}, 1.0);
    REQUIRE(hit);
    CHECK(hit->tau == Approx(0.5));
    CHECK(hit->x_hit[0] == Approx(1.0));
    CHECK(hit->n[0] == Approx(1.0));

    CHECK_FALSE(ball.first_hit({0, 0, 0}, {0.5, 0, 0}, 1.0));

    Vec const x{0.6, 0, 0}, v{1, 1, 0};
    hit = ball.first_hit(x, v, 1.0);
    REQUIRE(hit);
    // Positive root of 2 tau^2 + 1.2 tau - 0.64 = 0
    CHECK(hit->tau == Approx((-1.2 + std::sqrt(6.56)) / 4).epsilon(1e-12));
    CHECK(hit->tau == Approx(scanned_exit(x, v, 1.0, 1.0)).epsilon(1e-10));
    CHECK(dot(v, hit->n) >= 0);
    CHECK(norm(hit->x_hit - (x + hit->tau * v)) <= 1e-12);
}

TEST_CASE("ball hitting time matches the quadratic root")
{
    auto const ball = Domain::ball(1.3);
    std::mt19937_64 rng(11);
    for (int k = 0; k < 2000; ++k)
    {
        Vec const x = test::random_in_disk(rng, 1.2);
        Vec const v = test::random_vec(rng, 3.0);
        auto const hit = ball.first_hit(x, v, 1.0);
        long double const a = norm2(v), b = 2 * (long double)dot(x, v),
                          c = (long double)norm2(x) - 1.69L;
        long double const root = (-b + std::sqrt(b * b - 4 * a * c)) / (2 * a);
        if (root <= 1.0L)
        {
            REQUIRE(hit);
            CHECK(std::abs(hit->tau - (double)root) <= 1e-12);
        }
        else
        {
            CHECK_FALSE(hit);
        }
    }
}

TEST_CASE("annulus hits the inner wall first when aimed at it")
{
    auto const ann = Domain::annulus(0.5, 1.0);
    auto const hit = ann.first_hit({0.8, 0, 0}, {-1, 0, 0}, 1.0);
    REQUIRE(hit);
    CHECK(hit->tau == Approx(0.3));
    CHECK(hit->n[0] == Approx(-1.0));

    // Aimed past the hole: reaches the outer wall
    auto const miss = ann.first_hit({0.75, 0.6, 0}, {-1, 0, 0}, 5.0);
    REQUIRE(miss);
    CHECK(norm(miss->x_hit) == Approx(1.0));
}

TEST_CASE("no hit means the segment stays inside")
{
    std::mt19937_64 rng(5);
    for (auto const& dom : {Domain::ball(1.0), Domain::annulus(0.4, 1.0)})
    {
        for (int k = 0; k < 500; ++k)
        {
            Vec x = test::random_in_disk(rng, 1.0);
            if (dom.signed_distance(x) <= 0.01)
                continue;
            Vec const v = test::random_vec(rng, 1.0);
            double const dt = 0.3;
            if (dom.first_hit(x, v, dt))
                continue;
            for (int s = 0; s <= 100; ++s)
                CHECK(dom.signed_distance(x + (dt * s / 100) * v)
                      > -dom.tolerance());
        }
    }
}

TEST_CASE("grazing contact is not a reflection")
{
    auto const ball = Domain::ball(1.0);
    CHECK_FALSE(ball.first_hit({1, 0, 0}, {0, 1, 0}, 0.1));
}

TEST_CASE("custom domain agrees with the analytic ball")
{
    auto const custom = custom_ball(1.0);
    auto const ball = Domain::ball(1.0);
    std::mt19937_64 rng(17);
    int compared = 0;
    for (int k = 0; k < 300; ++k)
    {
        Vec const x = test::random_in_disk(rng, 0.9);
        Vec const v = test::random_vec(rng, 2.0);
        auto const a = ball.first_hit(x, v, 0.5);
        auto const b = custom.first_hit(x, v, 0.5);
        REQUIRE(bool(a) == bool(b));
        if (a)
        {
            ++compared;
            CHECK(std::abs(a->tau - b->tau) <= 1e-9);
            CHECK(norm(a->n - b->n) <= 1e-8);
        }
    }
    CHECK(compared > 20);

    // Unit gradient near the wall
    double const h = 1e-6;
    Vec const p{0.6, 0.7, 0};
    double const gx = (custom.signed_distance(p + Vec{h, 0, 0})
                       - custom.signed_distance(p - Vec{h, 0, 0}))
                      / (2 * h);
    double const gy = (custom.signed_distance(p + Vec{0, h, 0})
                       - custom.signed_distance(p - Vec{0, h, 0}))
                      / (2 * h);
    CHECK(std::hypot(gx, gy) == Approx(1.0).epsilon(1e-6));
}

TEST_CASE("nudge_inside restores containment")
{
    auto const ball = Domain::ball(1.0);
    Vec const out{1.0 + 1e-12, 0, 0};
    Vec const in = ball.nudge_inside(out);
    CHECK(ball.signed_distance(in) >= -ball.tolerance());
    CHECK(norm(in - out) < 1e-11);
}

TEST_CASE("domain validation")
{
    CHECK_THROWS_AS(Domain::ball(-1.0), ValidationError);
    CHECK_THROWS_AS(Domain::annulus(1.0, 0.5), ValidationError);
    CHECK_THROWS_AS(Domain::ball(1.0, 4), ValidationError);
}
