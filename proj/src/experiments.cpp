#include "swarm/experiments.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <ctime>
#include <limits>
#include <numbers>

#include "swarm/errors.hpp"
#include "swarm/io.hpp"

namespace swarm
{
using nlohmann::json;

namespace
{
constexpr double scaling_band[] = {-1.3, -0.7};
constexpr double refinement_band[] = {1.4, 2.8};
constexpr double trace_tolerance = 0.15;
constexpr double symmetry_jump_tolerance = 1e-12;
constexpr double symmetry_se_multiple = 3.0;
constexpr double coupling_slope_max = -0.3;
constexpr double billiard_tolerance = 1e-9;
constexpr double reflection_rate_tolerance = 0.2;

//! Rotate the first two components by angle a
Vec rotate(Vec const& v, double a)
{
    double const c = std::cos(a), s = std::sin(a);
    return Vec{c * v[0] - s * v[1], s * v[0] + c * v[1], 0.0};
}

json points_json(std::vector<SamplePoint> const& pts)
{
    json out = json::array();
    for (auto const& p : pts)
        out.push_back({{"N", p.n}, {"mean", p.mean}, {"se", p.se}});
    return out;
}

json base_report(RunConfig const& cfg)
{
    return {{"schema_version", schema_version},
            {"experiment", cfg.experiment},
            {"seed", cfg.sim.noise.master_seed}};
}

ExperimentOptions options(RunConfig const& cfg)
{
    ExperimentOptions o;
    o.n_list = cfg.n_list;
    o.replicas = cfg.replicas;
    o.base_seed = cfg.sim.noise.master_seed;
    o.threads = cfg.threads;
    o.family = cfg.psi;
    return o;
}

double rate_per_particle(Trajectory const& traj)
{
    double const denom = traj.config.n * traj.config.t_final;
    return denom > 0 ? traj.events.size() / denom : 0.0;
}

//---------------------------------------------------------------------------//
RunArtifacts run_simulate(RunConfig const& cfg)
{
    RunArtifacts art;
    auto warnings = validate(cfg.sim);
    Trajectory traj = simulate(cfg.sim);

    auto const audit = audit_invariants(traj);
    auto const moments = moment_monitor(traj);
    double const bound = gronwall_bound(cfg.sim);
    double const sup = moments.running_sup.back();

    json r = base_report(cfg);
    r["N"] = cfg.sim.n;
    r["d"] = cfg.sim.d;
    r["steps"] = cfg.sim.num_steps();
    r["events"] = audit.events;
    r["reflections_per_particle_per_time"] = rate_per_particle(traj);
    r["invariants"] = {
        {"max_relative_speed_change", audit.max_speed_change},
        {"min_pre_normal_velocity", audit.min_pre_normal},
        {"max_post_normal_velocity", audit.max_post_normal},
        {"max_reflection_error", audit.max_reflect_error},
        {"min_signed_distance", audit.min_signed_distance},
        {"pass",
         audit.max_speed_change <= 1e-12 && audit.min_pre_normal >= -1e-12
             && audit.max_post_normal <= 1e-12
             && audit.min_signed_distance >= -cfg.sim.domain.tolerance()},
    };
    r["moment"] = {{"sup", sup},
                   {"gronwall_bound", bound},
                   {"within_bound", sup <= bound}};
    r["warnings"] = warnings;

    art.histogram = phase_histogram(traj.snapshots.back(), cfg.sim.d,
                                    cfg.histogram);
    art.report = std::move(r);
    art.trajectory = std::move(traj);
    return art;
}

//---------------------------------------------------------------------------//
RunArtifacts run_converge(RunConfig const& cfg)
{
    RunArtifacts art;
    auto const opts = options(cfg);
    auto const scaling = scaling_experiment(cfg.sim, opts);

    json r = base_report(cfg);
    r["scaling"] = {
        {"replicas", scaling.replicas},
        {"points", points_json(scaling.points)},
        {"slope", scaling.fit.slope},
        {"intercept", scaling.fit.intercept},
        {"slope_band", scaling_band},
        {"pass",
         scaling.fit.slope >= scaling_band[0]
             && scaling.fit.slope <= scaling_band[1]},
    };

    if (!cfg.dt_list.empty())
    {
        auto const ref = discrepancy_refinement(cfg.sim, cfg.dt_list, opts);
        bool pass = true;
        for (double q : ref.ratios)
            pass = pass && q >= refinement_band[0] && q <= refinement_band[1];
        r["refinement"] = {{"dts", ref.dts},
                           {"mean_discrepancy", ref.mean_discrepancy},
                           {"ratios", ref.ratios},
                           {"ratio_band", refinement_band},
                           {"pass", pass}};
    }

    // Representative replica for the trajectory artifacts
    SimConfig sim = cfg.sim;
    sim.record_every = 1;
    sim.record_idiosyncratic_noise = sim.noise.sigma > 0;
    Trajectory traj = simulate(sim);
    auto const family = default_family(sim.domain, cfg.psi);
    json residuals = json::array();
    if (sim.record_idiosyncratic_noise)
    {
        auto const rep = residual_report(traj, family);
        for (auto const& e : rep.entries)
            residuals.push_back({{"f_def", e.f_def},
                                 {"f_mart", e.f_mart},
                                 {"discrepancy", e.discrepancy}});
    }
    else
    {
        for (double f : weak_residuals(traj, family))
            residuals.push_back({{"f_def", f}});
    }
    r["representative"] = {{"N", sim.n}, {"residuals", residuals}};

    art.points = scaling.points;
    art.report = std::move(r);
    traj.idiosyncratic_paths.clear();
    art.trajectory = std::move(traj);
    return art;
}

//---------------------------------------------------------------------------//
RunArtifacts run_boundary(RunConfig const& cfg)
{
    RunArtifacts art;
    SimConfig sim = cfg.sim;
    sim.record_every = 1;
    Trajectory traj = simulate(sim);

    auto const trace = trace_identity_check(
        traj, default_trace_observables(sim.domain, sim.t_final),
        cfg.delta_ladder);
    auto const sym = specular_symmetry_check(
        traj, default_symmetry_observables(sim.t_final), cfg.symmetry_delta,
        cfg.bootstrap_blocks);

    json r = base_report(cfg);
    r["N"] = sim.n;
    r["events"] = traj.events.size();
    r["deltas"] = cfg.delta_ladder;

    bool trace_pass = true;
    json tr = json::array();
    for (auto const& e : trace)
    {
        bool const ok = e.relative_error.back() <= trace_tolerance
                        && e.ladder_monotone;
        trace_pass = trace_pass && ok;
        tr.push_back({{"name", e.name},
                      {"jump_sum", e.jump_sum},
                      {"layer_flux", e.layer},
                      {"relative_error", e.relative_error},
                      {"ladder_steps", e.ladder_steps},
                      {"ladder_monotone", e.ladder_monotone},
                      {"pass", ok}});
    }
    r["trace"] = {{"observables", tr},
                  {"relative_tolerance", trace_tolerance},
                  {"pass", trace_pass}};

    bool sym_pass = true;
    json sy = json::array();
    for (auto const& e : sym)
    {
        bool const ok = std::abs(e.jump_sum) <= symmetry_jump_tolerance
                        && std::abs(e.layer)
                               <= symmetry_se_multiple * e.bootstrap_se;
        sym_pass = sym_pass && ok;
        sy.push_back({{"name", e.name},
                      {"jump_sum", e.jump_sum},
                      {"layer_flux", e.layer},
                      {"bootstrap_se", e.bootstrap_se},
                      {"pass", ok}});
    }
    r["symmetry"] = {{"delta", cfg.symmetry_delta},
                     {"observables", sy},
                     {"jump_tolerance", symmetry_jump_tolerance},
                     {"se_multiple", symmetry_se_multiple},
                     {"pass", sym_pass}};

    art.report = std::move(r);
    art.trajectory = std::move(traj);
    return art;
}

//---------------------------------------------------------------------------//
RunArtifacts run_couple(RunConfig const& cfg)
{
    RunArtifacts art;
    auto const rep = coupling_experiment(cfg.sim, options(cfg));

    bool decreasing = true;
    for (std::size_t a = 0; a + 1 < rep.points.size(); ++a)
        decreasing = decreasing && rep.points[a + 1].mean < rep.points[a].mean;

    json r = base_report(cfg);
    r["coupling"] = {
        {"replicas", rep.replicas},
        {"points", points_json(rep.points)},
        {"slope", rep.fit.slope},
        {"intercept", rep.fit.intercept},
        {"strictly_decreasing", decreasing},
        {"slope_max", coupling_slope_max},
        {"pass", decreasing && rep.fit.slope <= coupling_slope_max},
    };

    art.points = rep.points;
    art.report = std::move(r);
    art.trajectory = simulate(cfg.sim);
    return art;
}

//---------------------------------------------------------------------------//
RunArtifacts run_oracle(RunConfig const& cfg)
{
    if (!is_zero(cfg.sim.kernel))
        throw ConfigError("oracle experiment needs the zero kernel");
    RunArtifacts art;
    json r = base_report(cfg);
    auto const& noise = cfg.sim.noise;

    if (noise.sigma == 0 && noise.sigma_bar == 0)
    {
        auto const* ball = std::get_if<Ball>(&cfg.sim.domain.kind());
        if (!ball)
            throw ConfigError("noiseless oracle needs a ball domain");
        Trajectory traj = simulate(cfg.sim);
        auto const& x0 = traj.snapshots.front();
        double pos_err = 0, vel_err = 0;
        for (auto const& snap : traj.snapshots)
        {
            for (std::size_t i = 0; i < snap.size(); ++i)
            {
                auto const exact = ball_billiard(ball->radius, x0.x[i],
                                                 x0.v[i], snap.t, cfg.sim.d);
                pos_err = std::max(pos_err, norm(snap.x[i] - exact.x));
                vel_err = std::max(vel_err, norm(snap.v[i] - exact.v));
            }
        }
        r["mode"] = "billiard";
        r["events"] = traj.events.size();
        r["max_position_error"] = pos_err;
        r["max_velocity_error"] = vel_err;
        r["tolerance"] = billiard_tolerance;
        r["pass"] = pos_err <= billiard_tolerance;
        art.trajectory = std::move(traj);
    }
    else
    {
        SimConfig fine = cfg.sim;
        fine.dt = cfg.sim.dt / 2;
        fine.record_every = cfg.sim.record_every * 2;
        Trajectory coarse_traj = simulate(cfg.sim);
        Trajectory const fine_traj = simulate(fine);

        double const coarse = rate_per_particle(coarse_traj);
        double const refined = rate_per_particle(fine_traj);
        double const rel = coarse > 0 ? std::abs(refined - coarse) / coarse
                                      : (refined > 0 ? 1.0 : 0.0);
        auto speed_stats = [](SystemState const& s) {
            double m = 0, m2 = 0;
            for (auto const& v : s.v)
            {
                double const sp = norm(v);
                m += sp;
                m2 += sp * sp;
            }
            m /= s.size();
            return json{{"mean", m}, {"second_moment", m2 / s.size()}};
        };
        r["mode"] = "reflection_rate";
        r["dt"] = {cfg.sim.dt, fine.dt};
        r["reflections_per_particle_per_time"] = {coarse, refined};
        r["relative_difference"] = rel;
        r["tolerance"] = reflection_rate_tolerance;
        r["final_speed"] = {speed_stats(coarse_traj.snapshots.back()),
                            speed_stats(fine_traj.snapshots.back())};
        r["pass"] = std::isfinite(coarse) && std::isfinite(refined)
                    && rel < reflection_rate_tolerance;
        art.trajectory = std::move(coarse_traj);
    }
    art.report = std::move(r);
    return art;
}

std::string utc_stamp()
{
    auto const now = std::chrono::system_clock::to_time_t(
        std::chrono::system_clock::now());
    std::tm tm{};
    gmtime_r(&now, &tm);
    char buf[32];
    std::strftime(buf, sizeof buf, "%Y%m%dT%H%M%SZ", &tm);
    return buf;
}

}  // namespace

//---------------------------------------------------------------------------//
PhasePoint ball_billiard(double radius, Vec const& x0, Vec const& v0,
                         double t, int d)
{
    double const speed = norm(v0);
    if (speed == 0 || t <= 0)
        return {x0 + t * v0, v0};

    // Orthonormal frame (e1, e2) of the plane of motion, e1 along v0
    Vec const e1 = v0 / speed;
    Vec e2 = x0 - dot(x0, e1) * e1;
    if (norm(e2) < 1e-14 * radius)
    {
        // Motion along a diameter: any plane containing v0 works
        e2 = std::abs(e1[0]) < 0.9 ? Vec{1, 0, 0} : Vec{0, 1, 0};
        if (d == 2)
            e2 = Vec{-e1[1], e1[0], 0};
        e2 = e2 - dot(e2, e1) * e1;
    }
    e2 = e2 / norm(e2);

    // Planar coordinates: the particle starts at (a, b) moving along +e1
    double const a = dot(x0, e1);
    double const b = dot(x0, e2);
    double const tau0 = (-a + std::sqrt(radius * radius - b * b)) / speed;

    auto lift = [&](double p, double q) { return p * e1 + q * e2; };
    // Right-continuous: at a hit instant the velocity is already reflected
    if (t < tau0)
        return {x0 + t * v0, v0};

    // First hit, then a chord of length 2 sqrt(R^2 - b^2) per bounce
    double const chord_angle = 2.0 * std::acos(std::abs(b) / radius);
    double const chord_time = 2.0 * std::sqrt(radius * radius - b * b) / speed;
    double const turn = b <= 0 ? chord_angle : -chord_angle;

    Vec const p0{a + tau0 * speed, b, 0};
    Vec const n0 = p0 / radius;
    Vec const u0{speed, 0, 0};
    Vec const u1 = u0 - 2.0 * dot(u0, n0) * n0;

    double const since = t - tau0;
    double const m = std::floor(since / chord_time);
    double const rest = since - m * chord_time;
    Vec const pm = rotate(p0, m * turn);
    Vec const um = rotate(u1, m * turn);
    Vec const xp = pm + rest * um;
    return {lift(xp[0], xp[1]), lift(um[0], um[1])};
}

InvariantAudit audit_invariants(Trajectory const& traj)
{
    InvariantAudit a;
    a.events = traj.events.size();
    a.min_pre_normal = std::numeric_limits<double>::infinity();
    a.max_post_normal = -std::numeric_limits<double>::infinity();
    for (auto const& e : traj.events)
    {
        double const pre = norm(e.v_pre);
        a.max_speed_change = std::max(
            a.max_speed_change, std::abs(norm(e.v_post) - pre) / (1 + pre));
        a.min_pre_normal = std::min(a.min_pre_normal, dot(e.v_pre, e.n));
        a.max_post_normal = std::max(a.max_post_normal, dot(e.v_post, e.n));
        a.max_reflect_error = std::max(
            a.max_reflect_error, norm(e.v_post - reflect(e.v_pre, e.n)));
    }
    if (traj.events.empty())
        a.min_pre_normal = a.max_post_normal = 0;

    a.min_signed_distance = std::numeric_limits<double>::infinity();
    for (auto const& snap : traj.snapshots)
        for (auto const& x : snap.x)
            a.min_signed_distance = std::min(
                a.min_signed_distance, traj.config.domain.signed_distance(x));
    return a;
}

RunArtifacts run_experiment(RunConfig const& cfg)
{
    if (cfg.experiment == "simulate")
        return run_simulate(cfg);
    if (cfg.experiment == "converge")
        return run_converge(cfg);
    if (cfg.experiment == "boundary")
        return run_boundary(cfg);
    if (cfg.experiment == "couple")
        return run_couple(cfg);
    if (cfg.experiment == "oracle")
        return run_oracle(cfg);
    throw ConfigError("unknown experiment " + cfg.experiment);
}

std::filesystem::path write_run(RunConfig const& cfg,
                                RunArtifacts const& art)
{
    namespace fs = std::filesystem;
    std::string const stem = cfg.experiment + "-" + utc_stamp() + "-"
                             + std::to_string(cfg.sim.noise.master_seed);
    fs::create_directories(cfg.output_dir);
    fs::path dir = fs::path(cfg.output_dir) / stem;
    for (int k = 1; !fs::create_directory(dir); ++k)
        dir = fs::path(cfg.output_dir) / (stem + "-" + std::to_string(k));

    write_json(dir / "config_echo.json", to_json(cfg));
    write_json(dir / "report.json", art.report);

    if (art.trajectory)
    {
        auto const& traj = *art.trajectory;
        if (cfg.emits("csv"))
        {
            int stride = cfg.snapshot_stride;
            if (stride == 0)
                stride = std::max<int>(
                    1, static_cast<int>(traj.snapshots.size() / 100));
            write_snapshots_csv(dir / "snapshots.csv", traj, stride);
            write_common_path_csv(dir / "common_path.csv", traj);
        }
        if (cfg.emits("jsonl"))
            write_events_jsonl(dir / "events.jsonl", traj);
    }
    if (cfg.emits("csv") && !art.points.empty())
        write_points_csv(dir / "points.csv", art.points);
    if (cfg.emits("csv") && art.histogram)
        write_histogram_csv(dir / "histogram.csv", *art.histogram);
    return dir;
}

}  // namespace swarm
