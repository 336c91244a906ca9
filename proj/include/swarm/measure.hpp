#pragma once

#include <cstdint>
#include <functional>
#include <vector>

#include "geometry.hpp"
#include "simulator.hpp"
#include "testfns.hpp"

namespace swarm
{
//! Atoms (x_i, v_i) with weight 1/N each.
using EmpiricalSnapshot = SystemState;

using PhaseFunction = std::function<double(Vec const&, Vec const&)>;

//! <phi, f^N> = (1/N) sum_i phi(x_i, v_i)
double integrate(EmpiricalSnapshot const& snap, PhaseFunction const& phi);

//---------------------------------------------------------------------------//
/*!
 * Finite family of 1-bounded, 1-Lipschitz functions on R^{2d}.
 *
 * Members are random cosine features cos(w.(x, v) + theta) / max(1, |w|)
 * followed by a rescaled copy of a test-function family. The maximum
 * discrepancy over members lower-bounds the bounded-Lipschitz distance.
 */
class BLDictionary
{
  public:
    struct Cosine
    {
        Vec wx;
        Vec wv;
        double theta{0};
        double scale{1};
    };

    struct Bump
    {
        TestFunction psi;
        double scale{1};
    };

    BLDictionary(int dim, std::vector<TestFunction> const& family,
                 std::size_t size = 256, std::uint64_t seed = 0xB1D1C7ull,
                 double frequency = 2.0);

    std::size_t size() const { return cosines_.size() + bumps_.size(); }
    double evaluate(std::size_t member, Vec const& x, Vec const& v) const;

    //! <phi_m, snap> for every member m
    std::vector<double> integrals(EmpiricalSnapshot const& snap) const;

    std::vector<Cosine> const& cosines() const { return cosines_; }
    std::vector<Bump> const& bumps() const { return bumps_; }

  private:
    std::vector<Cosine> cosines_;
    std::vector<Bump> bumps_;
};

//! Upper bound on the Lipschitz constant of a product-bump test function.
double lipschitz_bound(TestFunction const& psi);

double bl_distance(EmpiricalSnapshot const& mu, EmpiricalSnapshot const& nu,
                   BLDictionary const& dict);

//! Distance from precomputed member integrals
double bl_distance(std::vector<double> const& mu,
                   std::vector<double> const& nu);

//---------------------------------------------------------------------------//
struct GridSpec
{
    int bins_x{8};
    int bins_v{8};
    double x_half_width{1.0};  //!< Position box [-a, a]^d
    double v_max{3.0};         //!< Velocity box [-v_max, v_max]^d
};

/*!
 * Phase-space histogram: counts / N per cell of a regular 2d-dimensional
 * grid. Atoms outside the box are dropped.
 */
struct PhaseHistogram
{
    int dim{2};
    GridSpec grid;
    std::vector<double> mass;  //!< Flattened, first axis slowest

    //! Per-axis cell indices of flat index c (positions then velocities)
    std::vector<int> unravel(std::size_t c) const;
    double total() const;
};

PhaseHistogram phase_histogram(EmpiricalSnapshot const& snap, int dim,
                               GridSpec const& grid);

}  // namespace swarm
