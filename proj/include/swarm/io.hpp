#pragma once

#include <filesystem>
#include <vector>

#include <json.hpp>

#include "measure.hpp"
#include "simulator.hpp"
#include "validator.hpp"

namespace swarm
{
namespace fs = std::filesystem;

inline constexpr int schema_version = 1;

//! `t,particle,x0..x{d-1},v0..v{d-1}`, every stride-th snapshot
void write_snapshots_csv(fs::path const& path, Trajectory const& traj,
                         int stride = 1);

//! One JSON object per event: t_hit, particle, x, n, v_pre, v_post, step
void write_events_jsonl(fs::path const& path, Trajectory const& traj);

//! `t,w0..w{d-1}`, cumulative common noise at every step time
void write_common_path_csv(fs::path const& path, Trajectory const& traj);

//! `N,mean,se`
void write_points_csv(fs::path const& path,
                      std::vector<SamplePoint> const& points);

//! `ix0..ix{d-1},iv0..iv{d-1},mass`
void write_histogram_csv(fs::path const& path, PhaseHistogram const& hist);

//! Pretty-printed with a trailing newline
void write_json(fs::path const& path, nlohmann::json const& doc);

nlohmann::json read_json(fs::path const& path);

}  // namespace swarm
