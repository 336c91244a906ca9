#include <cmath>
#include <random>

#include <doctest.h>

#include "helpers.hpp"
#include "swarm/testfns.hpp"

using namespace swarm;
using doctest::Approx;

namespace
{
TestFunction sample_psi(int d = 2)
{
    TestFunction psi;
    psi.x_center = {0.1, -0.2, d == 3 ? 0.05 : 0.0};
    psi.v_center = {0.3, 0.1, d == 3 ? -0.2 : 0.0};
    psi.r_x = 0.4;
    psi.r_v = 1.5;
    psi.amplitude = 1.7;
    psi.dim = d;
    return psi;
}

bool close(double fd, double exact, double tol)
{
    return std::abs(fd - exact) <= tol * std::max(1.0, std::abs(exact));
}

}  // namespace

TEST_CASE("bump values")
{
    auto const psi = sample_psi();
    CHECK(psi.eval(psi.x_center, psi.v_center) == Approx(psi.amplitude));
    Vec const edge = psi.x_center + Vec{psi.r_x, 0, 0};
    CHECK(psi.eval(edge, psi.v_center) == 0.0);
    CHECK(norm(psi.grad_x(edge, psi.v_center)) == 0.0);
    CHECK(bump(1.0) == 0.0);
    CHECK(bump(0.0) == 1.0);
}

TEST_CASE("derivatives against central differences")
{
    double const h = 1e-5;
    for (int d : {2, 3})
    {
        auto const psi = sample_psi(d);
        std::mt19937_64 rng(100 + d);
        std::uniform_real_distribution<double> u(-1, 1);
        int checked = 0;
        while (checked < 1000)
        {
            Vec x = psi.x_center, v = psi.v_center;
            for (int k = 0; k < d; ++k)
            {
                x[k] += 0.95 * psi.r_x * u(rng) / std::sqrt(double(d));
                v[k] += 0.95 * psi.r_v * u(rng) / std::sqrt(double(d));
            }
            if (norm2(x - psi.x_center) > 0.9 * psi.r_x * psi.r_x
                || norm2(v - psi.v_center) > 0.9 * psi.r_v * psi.r_v)
                continue;
            ++checked;
            auto const jet = psi.jet(x, v);
            CHECK(jet.value == Approx(psi.eval(x, v)));
            double lap = 0;
            for (int k = 0; k < d; ++k)
            {
                Vec e;
                e[k] = h;
                double const gx = (psi.eval(x + e, v) - psi.eval(x - e, v))
                                  / (2 * h);
                double const gv = (psi.eval(x, v + e) - psi.eval(x, v - e))
                                  / (2 * h);
                REQUIRE(close(gx, jet.grad_x[k], 1e-5));
                REQUIRE(close(gv, jet.grad_v[k], 1e-5));
                REQUIRE(close(gx, psi.grad_x(x, v)[k], 1e-5));
                REQUIRE(close(gv, psi.grad_v(x, v)[k], 1e-5));
                // Second differences of the analytic gradient
                lap += (psi.grad_v(x, v + e)[k] - psi.grad_v(x, v - e)[k])
                       / (2 * h);
            }
            REQUIRE(close(lap, jet.laplacian_v, 1e-5));
            REQUIRE(close(lap, psi.laplacian_v(x, v), 1e-5));
        }
    }
}

TEST_CASE("smooth at the support edge")
{
    auto const psi = sample_psi();
    double const h = 1e-4;
    for (double s : {-2.0, -1.0, 0.0, 1.0, 2.0})
    {
        Vec const x = psi.x_center + Vec{psi.r_x + s * h, 0, 0};
        CHECK(norm(psi.grad_x(x, psi.v_center)) <= 1e-6);
        CHECK(norm(psi.grad_x(x + Vec{h, 0, 0}, psi.v_center)
                   - psi.grad_x(x, psi.v_center))
              <= 1e-6);
    }
}

TEST_CASE("default family in the unit ball")
{
    auto const dom = Domain::ball(1.0);
    auto const fam = default_family(dom);
    REQUIRE(fam.size() == 8);
    for (std::size_t a = 0; a < fam.size(); ++a)
    {
        // Worst point of the support
        double const margin = dom.signed_distance(fam[a].x_center)
                              - fam[a].r_x;
        CHECK(margin >= 0.1);
        for (std::size_t b = a + 1; b < fam.size(); ++b)
            CHECK(norm(fam[a].x_center - fam[b].x_center) > 1e-6);
    }

    std::mt19937_64 rng(7);
    int inside = 0, total = 0;
    for (int k = 0; k < 100000; ++k)
    {
        Vec const p = test::random_in_disk(rng, 0.6);
        ++total;
        for (auto const& psi : fam)
            if (psi.in_spatial_support(p))
            {
                ++inside;
                break;
            }
    }
    CHECK(double(inside) / total >= 0.5);
}

TEST_CASE("default families keep a margin in other domains")
{
    auto const ann = Domain::annulus(0.4, 1.0);
    auto const fam = default_family(ann, {8, 2.0, 0.5});
    REQUIRE(fam.size() == 8);
    std::mt19937_64 rng(9);
    for (auto const& psi : fam)
    {
        CHECK(psi.amplitude == 0.5);
        CHECK(psi.r_v == Approx(4.0));
        for (int k = 0; k < 2000; ++k)
        {
            Vec const p = psi.x_center + test::random_in_disk(rng, psi.r_x);
            REQUIRE(ann.signed_distance(p) >= 0.1 * ann.inradius());
        }
    }

    auto const ball3 = Domain::ball(2.0, 3);
    for (auto const& psi : default_family(ball3))
    {
        CHECK(psi.dim == 3);
        CHECK(ball3.signed_distance(psi.x_center) - psi.r_x
              >= 0.1 * ball3.inradius());
    }
}
