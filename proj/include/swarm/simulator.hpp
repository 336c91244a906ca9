#pragma once

#include <cstdint>
#include <string>
#include <variant>
#include <vector>

#include "geometry.hpp"
#include "kernels.hpp"
#include "noise.hpp"
#include "vec.hpp"

namespace swarm
{
//---------------------------------------------------------------------------//
// INITIAL LAW
//---------------------------------------------------------------------------//
//! Uniform distribution on a ball (disk for d = 2).
struct UniformBallLaw
{
    Vec center;
    double radius{0.5};
};

struct FixedPoints
{
    std::vector<Vec> points;
};

struct GaussianVelocity
{
    Vec mean;
    double std{1.0};
};

struct FixedVelocities
{
    std::vector<Vec> velocities;
};

/*!
 * Product law f0(x, v) for i.i.d. initial data.
 *
 * The spatial support must satisfy l >= margin > 0.
 */
struct InitialLaw
{
    std::variant<UniformBallLaw, FixedPoints> spatial{UniformBallLaw{}};
    std::variant<GaussianVelocity, FixedVelocities> velocity{
        GaussianVelocity{}};
    double margin{0.1};
};

//---------------------------------------------------------------------------//
// STATE AND RECORDS
//---------------------------------------------------------------------------//
struct SystemState
{
    double t{0};
    std::vector<Vec> x;
    std::vector<Vec> v;

    std::size_t size() const { return x.size(); }
};

struct ReflectionEvent
{
    double t_hit{0};
    std::size_t particle{0};
    Vec x;  //!< Boundary point
    Vec n;  //!< Unit outward normal
    Vec v_pre;
    Vec v_post;
    std::uint64_t step{0};  //!< Index k of the step (t_k, t_{k+1}]
};

struct SimConfig
{
    int n{256};
    int d{2};
    double t_final{1.0};
    double dt{1e-3};
    Domain domain{Domain::ball(1.0, 2)};
    KernelSpec kernel{ZeroKernel{}};
    NoiseConfig noise;
    InitialLaw init;
    int max_reflections_per_step{64};
    int record_every{1};
    bool record_idiosyncratic_noise{false};
    //! Particle -> idiosyncratic stream index; empty means identity
    std::vector<std::uint32_t> stream_ids;

    std::int64_t num_steps() const;
};

/*!
 * Check a configuration; throws ValidationError.
 *
 * Returns advisory warnings (e.g. a step that is coarse relative to the
 * domain size).
 */
std::vector<std::string> validate(SimConfig const& cfg);

struct Trajectory
{
    std::vector<SystemState> snapshots;
    std::vector<std::int64_t> snapshot_steps;
    std::vector<ReflectionEvent> events;
    //! Cumulative common Wiener path at every step time t_k (k = 0..K)
    std::vector<Vec> common_path;
    //! Cumulative idiosyncratic paths at every step time, if requested
    std::vector<std::vector<Vec>> idiosyncratic_paths;
    SimConfig config;

    bool records_every_step() const { return config.record_every == 1; }
};

//---------------------------------------------------------------------------//
// OPERATIONS
//---------------------------------------------------------------------------//
struct FlightHit
{
    double t_offset{0};
    Vec x;
    Vec n;
    Vec v_pre;
    Vec v_post;
};

struct Flight
{
    Vec x;
    Vec v;
    std::vector<FlightHit> hits;
};

/*!
 * Billiard flight of duration dt with specular reflections.
 *
 * Appends each contact to hits (if non-null) in time order. Throws
 * MaxReflectionsExceeded once more than max_reflections contacts occur.
 */
void advance_with_reflections(Vec& x, Vec& v, double dt, Domain const& domain,
                              int max_reflections,
                              std::vector<FlightHit>* hits);

Flight advance_with_reflections(Vec x, Vec v, double dt, Domain const& domain,
                                int max_reflections = 64);

SystemState sample_initial(InitialLaw const& law, int n, int d,
                           Domain const& domain, NoiseStreams const& streams,
                           std::span<std::uint32_t const> stream_ids = {});

//! Increments for one step (raw Wiener increments, each N(0, dt))
struct StepIncrements
{
    std::vector<Vec> idiosyncratic;
    Vec common;
};

/*!
 * One splitting step: Jacobi drift from the pre-step snapshot, velocity
 * Euler-Maruyama update, then billiard transport. Events are appended.
 */
void step(SystemState& state, SimConfig const& cfg, StepIncrements const& inc,
          std::uint64_t step_index, std::vector<ReflectionEvent>& events);

Trajectory simulate(SimConfig const& cfg);
Trajectory simulate(SimConfig const& cfg, NoiseStreams const& streams);

//! E[|X0|^2 + |V0|^2] under the initial law
double initial_second_moment(InitialLaw const& law, int d);

//! Moment constant C1 from the Gronwall argument
double gronwall_bound(SimConfig const& cfg);

struct MomentSeries
{
    std::vector<double> t;
    std::vector<double> moment;       //!< (1/N) sum |X|^2 + |V|^2
    std::vector<double> running_sup;
};

MomentSeries moment_monitor(Trajectory const& traj);

//! Mean over particles and snapshot pairs of |V(t + delta) - V(t)|.
double increment_diagnostic(Trajectory const& traj, double delta);

}  // namespace swarm
