#pragma once

#include <functional>
#include <optional>
#include <variant>

#include "vec.hpp"

namespace swarm
{
//---------------------------------------------------------------------------//
// DOMAIN KINDS
//---------------------------------------------------------------------------//
//! Disk/ball of given radius centered at the origin; l(x) = R - |x|.
struct Ball
{
    double radius{1.0};
};

//! Region r_in <= |x| <= r_out; l(x) = min(|x| - r_in, r_out - |x|).
struct Annulus
{
    double r_in{0.5};
    double r_out{1.0};
};

/*!
 * User-supplied level-set domain.
 *
 * The signed distance must be positive inside and satisfy |grad l| = 1 in the
 * declared band. Regularity is not checked. Inradius, diameter and a bounding
 * radius are supplied by the caller since they cannot be derived from l alone.
 */
struct Custom
{
    std::function<double(Vec const&)> distance;
    std::function<Vec(Vec const&)> gradient;
    double inradius{0};
    double diameter{0};
    double bounding_radius{0};
    //! Point with maximal l, used to place default test functions
    Vec center{};
};

//---------------------------------------------------------------------------//
//! First boundary contact along straight-line flight.
struct SurfaceHit
{
    double tau{0};  //!< Flight time to the hit
    Vec x_hit;      //!< Boundary point (|l| <= containment tolerance)
    Vec n;          //!< Unit outward normal at x_hit
};

//---------------------------------------------------------------------------//
/*!
 * Level-set domain D in R^d with signed distance l.
 *
 * Normal queries are contractual only for |l(x)| <= band. The containment
 * tolerance defaults to 1e-9 times the diameter.
 */
class Domain
{
  public:
    using Kind = std::variant<Ball, Annulus, Custom>;

    Domain(Kind kind, int dimension, double band = 0.0,
           double containment_tolerance = 0.0);

    static Domain ball(double radius, int dimension = 2);
    static Domain annulus(double r_in, double r_out, int dimension = 2);

    Kind const& kind() const { return kind_; }
    int dimension() const { return dim_; }
    double diameter() const { return diameter_; }
    double inradius() const { return inradius_; }
    double band() const { return band_; }
    double tolerance() const { return tol_; }
    //! Radius of an origin-centered ball containing D
    double bounding_radius() const;

    //! Signed distance: positive inside, zero on the boundary
    double signed_distance(Vec const& x) const;
    //! Gradient of l (the inward unit normal on the boundary)
    Vec distance_gradient(Vec const& x) const;
    //! Unit outward normal n = -grad l; throws QueryOutsideBand off-band
    Vec outward_normal(Vec const& x) const;
    //! Outward normal without the band check (for observables in layers)
    Vec extended_normal(Vec const& x) const;

    bool contains(Vec const& x) const
    {
        return signed_distance(x) >= -tol_;
    }

    /*!
     * Smallest tau in [0, dt] with l(x + tau v) = 0 and outgoing velocity.
     *
     * Returns nothing if the segment stays inside, if |v| < 1e-14, or if the
     * contact is grazing (|v.n| < 1e-12 |v|).
     */
    std::optional<SurfaceHit>
    first_hit(Vec const& x, Vec const& v, double dt) const;

    //! Move a point that roundoff left outside back onto the boundary
    Vec nudge_inside(Vec const& x) const;

  private:
    Kind kind_;
    int dim_;
    double diameter_{0};
    double inradius_{0};
    double band_{0};
    double tol_{0};

    std::optional<SurfaceHit>
    custom_hit(Custom const& c, Vec const& x, Vec const& v, double dt) const;
};

//! Specular reflection v - 2 (v.n) n.
inline Vec reflect(Vec const& v, Vec const& n)
{
    return v - (2.0 * dot(v, n)) * n;
}

}  // namespace swarm
