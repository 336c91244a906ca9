#include <cmath>
#include <random>

#include <doctest.h>

#include "helpers.hpp"
#include "swarm/errors.hpp"
#include "swarm/kernels.hpp"

using namespace swarm;
using doctest::Approx;

namespace
{
MorseGradient const morse{1.0, 2.0, 2.0, 0.5};  // C_a, C_r, l_a, l_r

double morse_potential(double r)
{
    return 2.0 * 0.5 * std::exp(-r / 0.5) - 1.0 * 2.0 * std::exp(-r / 2.0);
}

//! Independent pair sum in long double
Vec naive_drift(KernelSpec const& k, std::vector<Vec> const& x,
                std::vector<Vec> const& v, std::size_t i)
{
    long double acc[3] = {0, 0, 0};
    for (std::size_t j = 0; j < x.size(); ++j)
    {
        Vec const h = evaluate(k, x[i] - x[j], v[i] - v[j]);
        for (int c = 0; c < 3; ++c)
            acc[c] += h[c];
    }
    Vec out;
    for (int c = 0; c < 3; ++c)
        out[c] = static_cast<double>(acc[c] / x.size());
    return out;
}

}  // namespace

TEST_CASE("kernel examples")
{
    Vec const dx{0.3, -0.2, 0}, dv{1, 2, 0};
    CHECK(norm(evaluate(ZeroKernel{}, dx, dv)) == 0.0);

    Vec const cs = evaluate(CuckerSmale{1.0, 0.5, 10.0}, {}, {0.1, 0, 0});
    CHECK(cs[0] == Approx(-0.1));
    CHECK(cs[1] == 0.0);

    Vec const f = evaluate(morse, {1, 0, 0}, {});
    double const h = 1e-5;
    double const dU = (morse_potential(1 + h) - morse_potential(1 - h))
                      / (2 * h);
    CHECK(f[1] == 0.0);
    CHECK(f[0] < 0);
    CHECK(std::abs(std::abs(f[0]) - std::abs(dU)) <= 1e-6);
    CHECK(std::abs(f[0])
          == Approx(std::abs(-2 * std::exp(-2.0) + std::exp(-0.5))));
}

TEST_CASE("sup norms")
{
    CHECK(sup_norm(ZeroKernel{}) == 0.0);
    CHECK(sup_norm(CuckerSmale{2.0, 1.0, 5.0}) == 10.0);

    double grid_max = 0;
    for (int k = 1; k <= 200000; ++k)
    {
        double const r = 20.0 * k / 200000;
        double const dU = (morse_potential(r + 1e-6)
                           - morse_potential(r - 1e-6))
                          / 2e-6;
        grid_max = std::max(grid_max, std::abs(dU));
    }
    CHECK(sup_norm(morse) >= grid_max - 1e-6);
}

TEST_CASE("forces are bounded by the sup norm")
{
    std::mt19937_64 rng(23);
    std::vector<KernelSpec> const kernels{
        ZeroKernel{}, CuckerSmale{1.0, 0.5, 10.0}, CuckerSmale{2.0, 1.0, 0.5},
        morse};
    for (auto const& k : kernels)
    {
        double const bound = sup_norm(k);
        for (int i = 0; i < 100000; ++i)
        {
            Vec const dx = test::random_vec(rng, 2.0, 3);
            Vec const dv = test::random_vec(rng, 20.0, 3);
            REQUIRE(norm(evaluate(k, dx, dv)) <= bound * (1 + 1e-12));
        }
    }
}

TEST_CASE("antisymmetry")
{
    std::mt19937_64 rng(29);
    CuckerSmale const cs{1.0, 0.5, 10.0};
    for (int i = 0; i < 1000; ++i)
    {
        Vec const dx = test::random_vec(rng, 1.0);
        Vec const dv = test::random_vec(rng, 5.0);
        CHECK(norm(evaluate(cs, dx, -dv) + evaluate(cs, dx, dv)) <= 1e-15);
        CHECK(norm(evaluate(morse, -dx, dv) + evaluate(morse, dx, dv))
              <= 1e-15);
    }
}

TEST_CASE("mean-field drift matches the naive double loop")
{
    std::mt19937_64 rng(31);
    std::vector<KernelSpec> const kernels{CuckerSmale{1.0, 0.5, 10.0},
                                          CuckerSmale{0.7, 1.3, 2.0}, morse};
    for (auto const& k : kernels)
    {
        for (int n : {1, 2, 3, 17, 64})
        {
            std::vector<Vec> x(n), v(n);
            for (int i = 0; i < n; ++i)
            {
                x[i] = test::random_in_disk(rng, 1.0);
                v[i] = test::random_vec(rng, 3.0);
            }
            std::vector<Vec> all(n);
            mean_field_drift_all(k, x, v, all);
            for (int i = 0; i < n; ++i)
            {
                Vec const ref = naive_drift(k, x, v, i);
                CHECK(norm(mean_field_drift(k, x, v, i) - ref) <= 1e-12);
                CHECK(norm(all[i] - ref) <= 1e-12);
            }
        }
    }
}

TEST_CASE("drift trivial cases")
{
    std::vector<Vec> x{{0.2, 0.1, 0}}, v{{1, 1, 0}};
    CHECK(norm(mean_field_drift(CuckerSmale{}, x, v, 0)) == 0.0);
    CHECK(norm(mean_field_drift(morse, x, v, 0)) == 0.0);

    std::vector<Vec> x2{{0.2, 0.1, 0}, {-0.3, 0, 0}}, v2{{1, 0, 0}, {0, 1, 0}};
    CHECK(norm(mean_field_drift(ZeroKernel{}, x2, v2, 1)) == 0.0);

    // Three hand-placed particles, Cucker-Smale with beta = 1
    CuckerSmale const cs{2.0, 1.0, 10.0};
    std::vector<Vec> x3{{0, 0, 0}, {1, 0, 0}, {0, 1, 0}};
    std::vector<Vec> v3{{0, 0, 0}, {1, 0, 0}, {0, -2, 0}};
    // H(dx, dv) = -2 dv / (1 + |dx|^2); particle 0 sees dv = -v_j, |dx| = 1
    Vec const expected{(2.0 / 2.0 * 1.0) / 3.0, (2.0 / 2.0 * -2.0) / 3.0, 0};
    Vec const got = mean_field_drift(cs, x3, v3, 0);
    CHECK(got[0] == Approx(expected[0]).epsilon(1e-14));
    CHECK(got[1] == Approx(expected[1]).epsilon(1e-14));
}

TEST_CASE("velocity clipping")
{
    CuckerSmale const cs{1.0, 0.5, 2.0};
    Vec const f = evaluate(cs, {}, {30, 40, 0});
    CHECK(norm(f) == Approx(2.0));
    CHECK(f[0] == Approx(-1.2));
}

TEST_CASE("kernel validation")
{
    CHECK_THROWS_AS(validate(CuckerSmale{-1.0, 0.5, 10.0}), ValidationError);
    CHECK_THROWS_AS(validate(CuckerSmale{1.0, 0.5, 0.0}), ValidationError);
    CHECK_THROWS_AS(validate(MorseGradient{1.0, 1.0, 0.0, 1.0}),
                    ValidationError);
    CHECK_NOTHROW(validate(morse));
}
