#pragma once

#include <filesystem>
#include <optional>
#include <vector>

#include <json.hpp>

#include "config.hpp"
#include "measure.hpp"
#include "simulator.hpp"
#include "validator.hpp"

namespace swarm
{
//---------------------------------------------------------------------------//
struct PhasePoint
{
    Vec x;
    Vec v;
};

/*!
 * Closed-form specular billiard in the centered ball of the given radius.
 *
 * The motion stays in the plane spanned by x0 and v0. Successive wall hits
 * are rotations of the first by the central angle of one chord.
 */
PhasePoint ball_billiard(double radius, Vec const& x0, Vec const& v0,
                         double t, int d);

//---------------------------------------------------------------------------//
struct InvariantAudit
{
    double max_speed_change{0};     //!< Max ||v_post| - |v_pre|| / (1 + |v_pre|)
    double min_pre_normal{0};       //!< Min v_pre . n over events
    double max_post_normal{0};      //!< Max v_post . n over events
    double max_reflect_error{0};    //!< Max |v_post - reflect(v_pre, n)|
    double min_signed_distance{0};  //!< Over every recorded snapshot
    std::size_t events{0};
};

InvariantAudit audit_invariants(Trajectory const& traj);

//---------------------------------------------------------------------------//
//! Everything an experiment produced; the CLI turns this into files.
struct RunArtifacts
{
    nlohmann::json report;
    std::optional<Trajectory> trajectory;
    std::vector<SamplePoint> points;
    std::optional<PhaseHistogram> histogram;
};

RunArtifacts run_experiment(RunConfig const& cfg);

/*!
 * Write the artifacts into a fresh directory under cfg.output_dir named
 * `<experiment>-<UTC timestamp>-<seed>`; an existing name gets a counter
 * suffix. Returns the directory.
 */
std::filesystem::path write_run(RunConfig const& cfg,
                                RunArtifacts const& artifacts);

}  // namespace swarm
