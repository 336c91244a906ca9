#pragma once

#include <string>
#include <vector>

#include <json.hpp>

#include "measure.hpp"
#include "simulator.hpp"
#include "testfns.hpp"

namespace swarm
{
//---------------------------------------------------------------------------//
/*!
 * Fully resolved run configuration.
 *
 * Parsed from a single JSON document; unknown keys are rejected at every
 * level and missing keys take the defaults below.
 */
struct RunConfig
{
    std::string experiment{"simulate"};
    SimConfig sim;

    std::vector<int> n_list{64, 128, 256, 512};
    int replicas{16};
    std::vector<double> dt_list;  //!< Optional residual refinement (converge)
    std::vector<double> delta_ladder{0.08, 0.04, 0.02};
    double symmetry_delta{0.02};
    int bootstrap_blocks{16};
    TestFamilyConfig psi;
    GridSpec histogram;

    std::string output_dir{"runs"};
    std::vector<std::string> emit{"csv", "jsonl", "json"};
    int threads{1};
    int snapshot_stride{0};  //!< 0 picks a stride giving about 100 frames

    bool emits(std::string const& format) const;
};

//! Parse and validate; throws ConfigError with the offending path.
RunConfig parse_run_config(nlohmann::json const& doc);

//! Canonical JSON with every default filled in (the config echo).
nlohmann::json to_json(RunConfig const& cfg);

/*!
 * Apply a dotted override such as "sim.N=512" to a raw document. The value
 * is read as JSON when it parses, otherwise as a string.
 */
void apply_override(nlohmann::json& doc, std::string const& assignment);

}  // namespace swarm
