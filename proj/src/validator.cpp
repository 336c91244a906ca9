#include "swarm/validator.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

#include "swarm/errors.hpp"
#include "swarm/noise.hpp"
#include "swarm/parallel.hpp"

namespace swarm
{
namespace
{
std::size_t check_every_step(Trajectory const& traj)
{
    auto const steps = static_cast<std::size_t>(traj.config.num_steps());
    if (!traj.records_every_step() || traj.snapshots.size() != steps + 1)
        throw MissingSnapshots("estimator needs a snapshot at every step");
    return steps;
}

void check_common_path(Trajectory const& traj, std::size_t steps)
{
    if (traj.common_path.size() != steps + 1)
        throw MissingCommonPath("trajectory lacks the common noise path");
}

void check_supports(Trajectory const& traj,
                    std::vector<TestFunction> const& family)
{
    for (auto const& e : traj.events)
    {
        auto const& before = traj.snapshots[e.step].x[e.particle];
        auto const& after = traj.snapshots[e.step + 1].x[e.particle];
        for (auto const& psi : family)
            if (psi.in_spatial_support(before)
                || psi.in_spatial_support(after))
                throw StepTooCoarse(
                    "particle " + std::to_string(e.particle)
                    + " reflected during a step touching a test-function "
                      "support; reduce dt");
    }
}

struct MeanSe
{
    double mean{0};
    double se{0};
};

MeanSe mean_se(std::vector<double> const& xs)
{
    MeanSe out;
    auto const n = static_cast<double>(xs.size());
    for (double x : xs)
        out.mean += x;
    out.mean /= n;
    if (xs.size() > 1)
    {
        double ss = 0;
        for (double x : xs)
            ss += (x - out.mean) * (x - out.mean);
        out.se = std::sqrt(ss / (n - 1) / n);
    }
    return out;
}

void check_n_list(std::vector<int> const& ns)
{
    if (ns.size() < 3)
        throw ValidationError("experiment needs at least three N values");
    for (std::size_t i = 0; i < ns.size(); ++i)
    {
        if (ns[i] < 1)
            throw ValidationError("N values must be positive");
        if (i > 0 && ns[i] <= ns[i - 1])
            throw ValidationError("N values must be strictly increasing");
    }
}

}  // namespace

//---------------------------------------------------------------------------//
std::vector<double> weak_residuals(Trajectory const& traj,
                                   std::vector<TestFunction> const& family)
{
    std::size_t const steps = check_every_step(traj);
    check_common_path(traj, steps);
    check_supports(traj, family);

    auto const& cfg = traj.config;
    double const dt = cfg.dt;
    double const diffusion = cfg.noise.sigma + cfg.noise.sigma_bar;
    double const common_scale = std::sqrt(2.0 * cfg.noise.sigma_bar);
    bool const interacting = !is_zero(cfg.kernel);
    std::size_t const n = static_cast<std::size_t>(cfg.n);
    double const inv_n = 1.0 / static_cast<double>(n);

    std::vector<double> result(family.size(), 0.0);
    std::vector<double> drift_sum(family.size());
    std::vector<Vec> grad_sum(family.size());

    for (std::size_t k = 0; k < steps; ++k)
    {
        auto const& s = traj.snapshots[k];
        std::fill(drift_sum.begin(), drift_sum.end(), 0.0);
        std::fill(grad_sum.begin(), grad_sum.end(), Vec{});
        for (std::size_t i = 0; i < n; ++i)
        {
            bool computed = false;
            Vec h;
            for (std::size_t p = 0; p < family.size(); ++p)
            {
                auto const& psi = family[p];
                if (!psi.in_spatial_support(s.x[i]))
                    continue;
                auto const jet = psi.jet(s.x[i], s.v[i]);
                if (jet.grad_v == Vec{} && jet.grad_x == Vec{}
                    && jet.laplacian_v == 0.0)
                    continue;
                if (interacting && !computed)
                {
                    h = mean_field_drift(cfg.kernel, s.x, s.v, i);
                    computed = true;
                }
                drift_sum[p] += dot(jet.grad_x, s.v[i]) + dot(jet.grad_v, h)
                                + diffusion * jet.laplacian_v;
                grad_sum[p] += jet.grad_v;
            }
        }
        Vec const dw = traj.common_path[k + 1] - traj.common_path[k];
        for (std::size_t p = 0; p < family.size(); ++p)
            result[p] -= dt * drift_sum[p] * inv_n
                         + common_scale * dot(grad_sum[p], dw) * inv_n;
    }

    auto const& first = traj.snapshots.front();
    auto const& last = traj.snapshots.back();
    for (std::size_t p = 0; p < family.size(); ++p)
    {
        double diff = 0;
        for (std::size_t i = 0; i < n; ++i)
            diff += family[p].eval(last.x[i], last.v[i])
                    - family[p].eval(first.x[i], first.v[i]);
        result[p] += diff * inv_n;
    }
    return result;
}

double weak_residual(Trajectory const& traj, TestFunction const& psi)
{
    return weak_residuals(traj, {psi}).front();
}

std::vector<double> martingale_forms(Trajectory const& traj,
                                     std::vector<TestFunction> const& family)
{
    std::size_t const steps = check_every_step(traj);
    std::vector<double> result(family.size(), 0.0);
    auto const& cfg = traj.config;
    if (cfg.noise.sigma == 0.0)
        return result;
    if (traj.idiosyncratic_paths.size() != steps + 1)
        throw MissingIdiosyncraticPaths(
            "trajectory was recorded without idiosyncratic noise paths");

    std::size_t const n = static_cast<std::size_t>(cfg.n);
    for (std::size_t k = 0; k < steps; ++k)
    {
        auto const& s = traj.snapshots[k];
        auto const& b0 = traj.idiosyncratic_paths[k];
        auto const& b1 = traj.idiosyncratic_paths[k + 1];
        for (std::size_t i = 0; i < n; ++i)
        {
            Vec const db = b1[i] - b0[i];
            for (std::size_t p = 0; p < family.size(); ++p)
            {
                if (!family[p].in_spatial_support(s.x[i]))
                    continue;
                result[p] += dot(family[p].grad_v(s.x[i], s.v[i]), db);
            }
        }
    }
    double const scale = std::sqrt(2.0 * cfg.noise.sigma)
                         / static_cast<double>(n);
    for (auto& r : result)
        r *= scale;
    return result;
}

double martingale_form(Trajectory const& traj, TestFunction const& psi)
{
    return martingale_forms(traj, {psi}).front();
}

ResidualReport residual_report(Trajectory const& traj,
                               std::vector<TestFunction> const& family)
{
    auto const def = weak_residuals(traj, family);
    auto const mart = martingale_forms(traj, family);
    ResidualReport report;
    report.dt = traj.config.dt;
    for (std::size_t p = 0; p < family.size(); ++p)
        report.entries.push_back(
            {def[p], mart[p], std::fabs(def[p] - mart[p])});
    return report;
}

//---------------------------------------------------------------------------//
SlopeFit fit_log_log(std::vector<SamplePoint> const& points)
{
    if (points.size() < 2)
        throw ValidationError("slope fit needs at least two points");
    constexpr double nan = std::numeric_limits<double>::quiet_NaN();
    bool weighted = true;
    for (auto const& p : points)
    {
        if (!(p.mean > 0))
            return {nan, nan};
        if (!(p.se > 0))
            weighted = false;
    }

    double sw = 0, sx = 0, sy = 0;
    for (auto const& p : points)
    {
        double const rel = p.se / p.mean;
        double const w = weighted ? 1.0 / (rel * rel) : 1.0;
        sw += w;
        sx += w * std::log(p.n);
        sy += w * std::log(p.mean);
    }
    double const mx = sx / sw;
    double const my = sy / sw;
    double sxx = 0, sxy = 0;
    for (auto const& p : points)
    {
        double const rel = p.se / p.mean;
        double const w = weighted ? 1.0 / (rel * rel) : 1.0;
        double const dx = std::log(p.n) - mx;
        sxx += w * dx * dx;
        sxy += w * dx * (std::log(p.mean) - my);
    }
    SlopeFit fit;
    fit.slope = sxy / sxx;
    fit.intercept = my - fit.slope * mx;
    return fit;
}

ScalingReport scaling_experiment(SimConfig const& base,
                                 ExperimentOptions const& opts)
{
    check_n_list(opts.n_list);
    if (opts.replicas < 16)
        throw ValidationError("scaling experiment needs at least 16 replicas");

    auto const family = default_family(base.domain, opts.family);
    std::size_t const m = static_cast<std::size_t>(opts.replicas);
    std::vector<double> values(opts.n_list.size() * m);

    parallel_for(values.size(), opts.threads, [&](std::size_t job) {
        SimConfig cfg = base;
        cfg.n = opts.n_list[job / m];
        cfg.record_every = 1;
        cfg.record_idiosyncratic_noise = false;
        cfg.stream_ids.clear();
        cfg.noise.master_seed = replica_seed(opts.base_seed, cfg.n, job % m);
        auto const traj = simulate(cfg);
        auto const f = weak_residuals(traj, family);
        double sq = 0;
        for (double v : f)
            sq += v * v;
        values[job] = sq / static_cast<double>(f.size());
    });

    ScalingReport report;
    report.replicas = opts.replicas;
    for (std::size_t a = 0; a < opts.n_list.size(); ++a)
    {
        std::vector<double> slice(values.begin() + a * m,
                                  values.begin() + (a + 1) * m);
        auto const ms = mean_se(slice);
        report.points.push_back({opts.n_list[a], ms.mean, ms.se});
    }
    report.fit = fit_log_log(report.points);
    return report;
}

RefinementReport discrepancy_refinement(SimConfig const& base,
                                        std::vector<double> const& dts,
                                        ExperimentOptions const& opts)
{
    if (dts.size() < 2)
        throw ValidationError("refinement needs at least two time steps");
    auto const family = default_family(base.domain, opts.family);
    std::size_t const m = static_cast<std::size_t>(opts.replicas);
    std::vector<double> values(dts.size() * m);

    parallel_for(values.size(), opts.threads, [&](std::size_t job) {
        SimConfig cfg = base;
        cfg.dt = dts[job / m];
        cfg.record_every = 1;
        cfg.record_idiosyncratic_noise = true;
        cfg.noise.master_seed = replica_seed(opts.base_seed, cfg.n, job % m);
        auto const traj = simulate(cfg);
        auto const rep = residual_report(traj, family);
        double sum = 0;
        for (auto const& e : rep.entries)
            sum += e.discrepancy;
        values[job] = sum / static_cast<double>(rep.entries.size());
    });

    RefinementReport report;
    report.dts = dts;
    for (std::size_t a = 0; a < dts.size(); ++a)
    {
        double sum = 0;
        for (std::size_t r = 0; r < m; ++r)
            sum += values[a * m + r];
        report.mean_discrepancy.push_back(sum / static_cast<double>(m));
    }
    for (std::size_t a = 0; a + 1 < dts.size(); ++a)
        report.ratios.push_back(report.mean_discrepancy[a]
                                / report.mean_discrepancy[a + 1]);
    return report;
}

//---------------------------------------------------------------------------//
double event_jump_sum(Trajectory const& traj, BoundaryObservable const& phi)
{
    double sum = 0;
    for (auto const& e : traj.events)
        sum += phi.fn(e.t_hit, e.x, e.v_post, e.n)
               - phi.fn(e.t_hit, e.x, e.v_pre, e.n);
    return sum / static_cast<double>(traj.config.n);
}

std::vector<double> layer_flux_blocks(Trajectory const& traj, double delta,
                                      BoundaryObservable const& phi,
                                      int blocks)
{
    auto const& domain = traj.config.domain;
    if (!(delta > 0))
        throw ValidationError("layer width must be > 0");
    if (delta >= domain.band())
        throw LayerExceedsBand("layer width must be below the normal band");
    if (blocks < 1)
        throw ValidationError("need at least one block");
    std::size_t const steps = check_every_step(traj);

    std::vector<double> out(static_cast<std::size_t>(blocks), 0.0);
    if (steps == 0)
        return out;
    double const scale = traj.config.dt
                         / (delta * static_cast<double>(traj.config.n));
    for (std::size_t k = 0; k < steps; ++k)
    {
        auto const& s = traj.snapshots[k];
        double acc = 0;
        for (std::size_t i = 0; i < s.size(); ++i)
        {
            double const l = domain.signed_distance(s.x[i]);
            if (!(l > 0 && l <= delta))
                continue;
            Vec const g = domain.distance_gradient(s.x[i]);
            acc += dot(g, s.v[i]) * phi.fn(s.t, s.x[i], s.v[i], -g);
        }
        out[k * static_cast<std::size_t>(blocks) / steps] += acc * scale;
    }
    return out;
}

double layer_flux(Trajectory const& traj, double delta,
                  BoundaryObservable const& phi)
{
    return layer_flux_blocks(traj, delta, phi, 1).front();
}

std::vector<TraceEntry>
trace_identity_check(Trajectory const& traj,
                     std::vector<BoundaryObservable> const& family,
                     std::vector<double> const& deltas)
{
    if (deltas.empty())
        throw ValidationError("delta ladder is empty");
    for (std::size_t i = 0; i < deltas.size(); ++i)
        if (!(deltas[i] > 0) || (i > 0 && deltas[i] >= deltas[i - 1]))
            throw ValidationError(
                "delta ladder must be positive and decreasing");

    std::vector<TraceEntry> out;
    for (auto const& phi : family)
    {
        TraceEntry e;
        e.name = phi.name;
        e.jump_sum = event_jump_sum(traj, phi);
        for (double d : deltas)
        {
            double const est = layer_flux(traj, d, phi);
            e.layer.push_back(est);
            e.relative_error.push_back(
                e.jump_sum != 0.0
                    ? std::fabs(est - e.jump_sum) / std::fabs(e.jump_sum)
                    : (est == 0.0 ? 0.0
                                  : std::numeric_limits<double>::infinity()));
        }
        for (std::size_t i = 0; i + 1 < e.layer.size(); ++i)
            e.ladder_steps.push_back(std::fabs(e.layer[i] - e.layer[i + 1]));
        e.ladder_monotone = true;
        for (std::size_t i = 0; i + 1 < e.ladder_steps.size(); ++i)
            if (!(e.ladder_steps[i + 1] < e.ladder_steps[i]))
                e.ladder_monotone = false;
        out.push_back(std::move(e));
    }
    return out;
}

BoundaryObservable symmetrize(BoundaryObservable const& phi0)
{
    BoundaryObservable out;
    out.name = phi0.name;
    out.fn = [f = phi0.fn](double s, Vec const& x, Vec const& v,
                           Vec const& n) {
        return f(s, x, v, n) + f(s, x, reflect(v, n), n);
    };
    return out;
}

std::vector<SymmetryEntry>
specular_symmetry_check(Trajectory const& traj,
                        std::vector<BoundaryObservable> const& phi0_family,
                        double delta, int blocks, int resamples)
{
    if (blocks < 2 || resamples < 2)
        throw ValidationError("bootstrap needs >= 2 blocks and resamples");
    Philox4x32::Key const key{0x5EC7A11Du, 0xB0075712u};
    auto const nb = static_cast<std::uint32_t>(blocks);

    std::vector<SymmetryEntry> out;
    for (auto const& phi0 : phi0_family)
    {
        auto const phi = symmetrize(phi0);
        SymmetryEntry e;
        e.name = phi0.name;
        e.jump_sum = event_jump_sum(traj, phi);
        auto const parts = layer_flux_blocks(traj, delta, phi, blocks);
        for (double p : parts)
            e.layer += p;

        std::vector<double> totals(static_cast<std::size_t>(resamples));
        for (int r = 0; r < resamples; ++r)
        {
            double total = 0;
            for (std::uint32_t j = 0; j < nb; ++j)
            {
                double const u = keyed_uniform(key, static_cast<std::uint32_t>(r),
                                               DrawTag::custom, j, 0)[0];
                auto const pick = std::min<std::uint32_t>(
                    static_cast<std::uint32_t>(u * nb), nb - 1);
                total += parts[pick];
            }
            totals[r] = total;
        }
        double mean = 0;
        for (double t : totals)
            mean += t;
        mean /= resamples;
        double ss = 0;
        for (double t : totals)
            ss += (t - mean) * (t - mean);
        e.bootstrap_se = std::sqrt(ss / (resamples - 1));
        out.push_back(std::move(e));
    }
    return out;
}

std::vector<BoundaryObservable> default_trace_observables(Domain const& domain,
                                                          double t_final)
{
    double const half = 0.5 * t_final;
    double const r = domain.bounding_radius();
    return {
        {"tanh_normal_speed",
         [](double, Vec const&, Vec const& v, Vec const& n) {
             return std::tanh(dot(v, n));
         }},
        {"tanh_normal_speed_late",
         [half](double s, Vec const&, Vec const& v, Vec const& n) {
             return s >= half ? std::tanh(dot(v, n)) : 0.0;
         }},
        {"outgoing_bump",
         [](double, Vec const&, Vec const& v, Vec const& n) {
             double const u = dot(v, n) - 1.0;
             return bump(u * u);
         }},
        {"tanh_normal_speed_weighted",
         [r](double, Vec const& x, Vec const& v, Vec const& n) {
             return std::tanh(dot(v, n)) * (1.0 + 0.5 * x[0] / r);
         }},
    };
}

std::vector<BoundaryObservable> default_symmetry_observables(double t_final)
{
    double const lo = 0.25 * t_final;
    double const hi = 0.75 * t_final;
    return {
        {"outgoing_bump",
         [](double, Vec const&, Vec const& v, Vec const& n) {
             double const u = dot(v, n) - 1.0;
             return bump(u * u);
         }},
        {"speed_fraction_window",
         [lo, hi](double s, Vec const&, Vec const& v, Vec const&) {
             double const q = norm2(v);
             return (s >= lo && s < hi) ? q / (1.0 + q) : 0.0;
         }},
        {"shifted_velocity_gaussian",
         [](double, Vec const&, Vec const& v, Vec const&) {
             return std::exp(-norm2(v - Vec{1.0, 0.0, 0.0}));
         }},
        {"mixed_tanh",
         [](double, Vec const&, Vec const& v, Vec const& n) {
             return std::tanh(dot(v, n) + 0.5 * v[0]);
         }},
    };
}

//---------------------------------------------------------------------------//
double paired_distance(SimConfig const& cfg, std::uint64_t seed,
                       BLDictionary const& dict)
{
    NoiseStreams const streams(seed);
    auto const a = simulate(cfg, streams);
    auto const b = simulate(cfg, streams.fork_idiosyncratic(1));
    double sum = 0;
    for (std::size_t k = 0; k < a.snapshots.size(); ++k)
        sum += bl_distance(a.snapshots[k], b.snapshots[k], dict);
    return sum / static_cast<double>(a.snapshots.size());
}

CouplingReport coupling_experiment(SimConfig const& base,
                                   ExperimentOptions const& opts)
{
    check_n_list(opts.n_list);
    if (opts.replicas < 2)
        throw ValidationError("coupling experiment needs at least 2 replicas");
    auto const family = default_family(base.domain, opts.family);
    BLDictionary const dict(base.d, family);
    std::size_t const m = static_cast<std::size_t>(opts.replicas);
    std::vector<double> values(opts.n_list.size() * m);

    parallel_for(values.size(), opts.threads, [&](std::size_t job) {
        SimConfig cfg = base;
        cfg.n = opts.n_list[job / m];
        cfg.record_idiosyncratic_noise = false;
        cfg.stream_ids.clear();
        values[job] = paired_distance(
            cfg, replica_seed(opts.base_seed, cfg.n, job % m), dict);
    });

    CouplingReport report;
    report.replicas = opts.replicas;
    for (std::size_t a = 0; a < opts.n_list.size(); ++a)
    {
        std::vector<double> slice(values.begin() + a * m,
                                  values.begin() + (a + 1) * m);
        auto const ms = mean_se(slice);
        report.points.push_back({opts.n_list[a], ms.mean, ms.se});
    }
    report.fit = fit_log_log(report.points);
    return report;
}

}  // namespace swarm
