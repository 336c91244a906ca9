#pragma once

#include <functional>
#include <string>
#include <vector>

#include "measure.hpp"
#include "simulator.hpp"
#include "testfns.hpp"

namespace swarm
{
//---------------------------------------------------------------------------//
// WEAK-FORM RESIDUAL
//---------------------------------------------------------------------------//
/*!
 * F_psi(f^N) at the final time, from its definition.
 *
 * Time integrals use left-endpoint quadrature at step times and the common
 * noise integral uses Ito (left-point) sums. Requires record_every = 1 and
 * the common path. Throws StepTooCoarse if a particle reflects during a step
 * that starts or ends inside a spatial support.
 */
std::vector<double> weak_residuals(Trajectory const& traj,
                                   std::vector<TestFunction> const& family);
double weak_residual(Trajectory const& traj, TestFunction const& psi);

//! sqrt(2 sigma) int (1/N) sum_i grad_v psi . dB^i (Ito sums)
std::vector<double> martingale_forms(Trajectory const& traj,
                                     std::vector<TestFunction> const& family);
double martingale_form(Trajectory const& traj, TestFunction const& psi);

struct ResidualEntry
{
    double f_def{0};
    double f_mart{0};
    double discrepancy{0};
};

struct ResidualReport
{
    std::vector<ResidualEntry> entries;
    double dt{0};
};

ResidualReport residual_report(Trajectory const& traj,
                               std::vector<TestFunction> const& family);

//---------------------------------------------------------------------------//
// EXPERIMENTS
//---------------------------------------------------------------------------//
struct SamplePoint
{
    int n{0};
    double mean{0};
    double se{0};
};

struct SlopeFit
{
    double slope{0};
    double intercept{0};
};

/*!
 * Least-squares fit of log(mean) against log(n), each point weighted by the
 * inverse squared standard error of log(mean). Returns NaN if a mean is not
 * positive.
 */
SlopeFit fit_log_log(std::vector<SamplePoint> const& points);

struct ScalingReport
{
    std::vector<SamplePoint> points;
    SlopeFit fit;
    int replicas{0};
};

struct ExperimentOptions
{
    std::vector<int> n_list;
    int replicas{16};
    std::uint64_t base_seed{0};
    int threads{1};
    TestFamilyConfig family;
};

/*!
 * Replica-averaged |F_psi|^2 over the family, per N, with a log-log fit.
 *
 * Requires at least three increasing N values and 16 replicas.
 */
ScalingReport scaling_experiment(SimConfig const& base,
                                 ExperimentOptions const& opts);

struct RefinementReport
{
    std::vector<double> dts;
    std::vector<double> mean_discrepancy;  //!< Per dt, over replicas and psi
    std::vector<double> ratios;            //!< Successive reductions
};

/*!
 * Mean |F_def - F_mart| per time step. Replica seeds are shared across dts.
 */
RefinementReport discrepancy_refinement(SimConfig const& base,
                                        std::vector<double> const& dts,
                                        ExperimentOptions const& opts);

//---------------------------------------------------------------------------//
// BOUNDARY IDENTITIES
//---------------------------------------------------------------------------//
/*!
 * Bounded observable phi(s, x, v) on the boundary set; n is the outward
 * normal at x (extended off the wall by -grad l).
 */
struct BoundaryObservable
{
    std::string name;
    std::function<double(double s, Vec const& x, Vec const& v, Vec const& n)>
        fn;
};

//! (1/N) sum over events of phi(s, x, v_post) - phi(s, x, v_pre)
double event_jump_sum(Trajectory const& traj, BoundaryObservable const& phi);

/*!
 * Thin-layer flux (1/delta) int (1/N) sum_i grad l(X_i).V_i phi 1{0 < l <= delta}
 * by left-endpoint quadrature. Converges to the jump sum as delta -> 0.
 */
double layer_flux(Trajectory const& traj, double delta,
                  BoundaryObservable const& phi);

//! Layer flux split into contiguous time blocks (sums to layer_flux).
std::vector<double> layer_flux_blocks(Trajectory const& traj, double delta,
                                      BoundaryObservable const& phi,
                                      int blocks);

struct TraceEntry
{
    std::string name;
    double jump_sum{0};
    std::vector<double> layer;           //!< Per delta in the ladder
    std::vector<double> relative_error;  //!< |layer - jump| / |jump|
    std::vector<double> ladder_steps;    //!< |est(d_i) - est(d_{i+1})|
    bool ladder_monotone{false};
};

struct SymmetryEntry
{
    std::string name;
    double jump_sum{0};
    double layer{0};
    double bootstrap_se{0};
};

struct BoundaryReport
{
    std::vector<double> deltas;
    std::vector<TraceEntry> trace;
    double symmetry_delta{0};
    std::vector<SymmetryEntry> symmetry;
};

std::vector<TraceEntry>
trace_identity_check(Trajectory const& traj,
                     std::vector<BoundaryObservable> const& family,
                     std::vector<double> const& deltas);

//! phi(s, x, v) = phi0(s, x, v) + phi0(s, x, v - 2 (v.n) n)
BoundaryObservable symmetrize(BoundaryObservable const& phi0);

std::vector<SymmetryEntry>
specular_symmetry_check(Trajectory const& traj,
                        std::vector<BoundaryObservable> const& phi0_family,
                        double delta, int blocks = 16, int resamples = 2000);

//! Four observables with non-vanishing jump sums
std::vector<BoundaryObservable> default_trace_observables(Domain const& domain,
                                                          double t_final);
//! Four generic phi0 for the symmetry check
std::vector<BoundaryObservable> default_symmetry_observables(double t_final);

//---------------------------------------------------------------------------//
// COUPLING
//---------------------------------------------------------------------------//
struct CouplingReport
{
    std::vector<SamplePoint> points;
    SlopeFit fit;
    int replicas{0};
};

/*!
 * Time-averaged BL distance between paired systems that share the common
 * noise but have independent idiosyncratic noise and initial data.
 */
double paired_distance(SimConfig const& cfg, std::uint64_t seed,
                       BLDictionary const& dict);

CouplingReport coupling_experiment(SimConfig const& base,
                                   ExperimentOptions const& opts);

}  // namespace swarm
