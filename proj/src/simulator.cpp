#include "swarm/simulator.hpp"

#include <algorithm>
#include <cmath>

#include "swarm/errors.hpp"

namespace swarm
{
namespace
{
Vec truncate(Vec v, int d)
{
    for (int k = d; k < 3; ++k)
        v[k] = 0.0;
    return v;
}

std::uint32_t stream_of(std::span<std::uint32_t const> ids, std::size_t i)
{
    return ids.empty() ? static_cast<std::uint32_t>(i) : ids[i];
}

void check_support(InitialLaw const& law, Domain const& domain)
{
    if (!(law.margin > 0))
        throw ValidationError("initial support margin must be > 0");
    if (law.margin >= domain.inradius())
        throw UnsatisfiableSupport("margin is not below the domain inradius");

    auto const* ball = std::get_if<UniformBallLaw>(&law.spatial);
    if (!ball)
        return;
    if (!(ball->radius > 0))
        throw ValidationError("uniform ball radius must be > 0");
    double const c = norm(ball->center);
    if (auto const* b = std::get_if<Ball>(&domain.kind()))
    {
        if (b->radius - (c + ball->radius) < law.margin)
            throw UnsatisfiableSupport(
                "uniform ball does not keep the margin from the wall");
    }
    else if (auto const* a = std::get_if<Annulus>(&domain.kind()))
    {
        if (c - ball->radius - a->r_in < law.margin
            || a->r_out - (c + ball->radius) < law.margin)
            throw UnsatisfiableSupport(
                "uniform ball does not keep the margin from the walls");
    }
}

}  // namespace

//---------------------------------------------------------------------------//
std::int64_t SimConfig::num_steps() const
{
    return static_cast<std::int64_t>(std::llround(t_final / dt));
}

std::vector<std::string> validate(SimConfig const& cfg)
{
    std::vector<std::string> warnings;
    if (cfg.n < 1)
        throw ValidationError("N must be >= 1");
    if (cfg.d != cfg.domain.dimension())
        throw ValidationError("d does not match the domain dimension");
    if (!(cfg.dt > 0))
        throw ValidationError("dt must be > 0");
    if (!(cfg.t_final >= 0))
        throw ValidationError("T must be >= 0");
    if (cfg.t_final > 0 && cfg.t_final < cfg.dt)
        throw ValidationError("T must be 0 or at least dt");
    double const k = cfg.t_final / cfg.dt;
    if (std::fabs(k - std::round(k)) > 1e-9 * std::max(1.0, k))
        throw ValidationError("T must be an integer multiple of dt");
    if (cfg.record_every < 1)
        throw ValidationError("record_every must be >= 1");
    if (cfg.max_reflections_per_step < 1)
        throw ValidationError("max_reflections_per_step must be >= 1");
    if (!cfg.stream_ids.empty()
        && cfg.stream_ids.size() != static_cast<std::size_t>(cfg.n))
        throw ValidationError("stream_ids must list one index per particle");
    validate(cfg.kernel);
    validate(cfg.noise);
    check_support(cfg.init, cfg.domain);

    double speed = 0;
    if (auto const* g = std::get_if<GaussianVelocity>(&cfg.init.velocity))
        speed = norm(g->mean) + g->std * std::sqrt(cfg.d);
    else
        for (auto const& v : std::get<FixedVelocities>(cfg.init.velocity)
                                 .velocities)
            speed = std::max(speed, norm(v));
    if (cfg.dt * (sup_norm(cfg.kernel) + speed) > 0.05 * cfg.domain.diameter())
        warnings.push_back("dt * (|H|_inf + speed) exceeds 5% of the domain "
                           "diameter; expect chattering near the wall");
    return warnings;
}

//---------------------------------------------------------------------------//
void advance_with_reflections(Vec& x, Vec& v, double dt, Domain const& domain,
                              int max_reflections,
                              std::vector<FlightHit>* hits)
{
    double remaining = dt;
    int count = 0;
    while (remaining > 0)
    {
        auto const hit = domain.first_hit(x, v, remaining);
        if (!hit)
        {
            x += remaining * v;
            return;
        }
        if (++count > max_reflections)
            throw MaxReflectionsExceeded(
                "more than " + std::to_string(max_reflections)
                + " reflections in one step; reduce dt");
        Vec const v_pre = v;
        x = domain.nudge_inside(hit->x_hit);
        v = reflect(v, hit->n);
        if (hits)
            hits->push_back({dt - remaining + hit->tau, x, hit->n, v_pre, v});
        remaining -= hit->tau;
    }
}

Flight advance_with_reflections(Vec x, Vec v, double dt, Domain const& domain,
                                int max_reflections)
{
    Flight f;
    advance_with_reflections(x, v, dt, domain, max_reflections, &f.hits);
    f.x = x;
    f.v = v;
    return f;
}

//---------------------------------------------------------------------------//
SystemState sample_initial(InitialLaw const& law, int n, int d,
                           Domain const& domain, NoiseStreams const& streams,
                           std::span<std::uint32_t const> stream_ids)
{
    check_support(law, domain);
    SystemState s;
    s.x.resize(n);
    s.v.resize(n);

    if (auto const* fixed = std::get_if<FixedPoints>(&law.spatial))
    {
        if (fixed->points.size() != static_cast<std::size_t>(n))
            throw ValidationError("fixed points must list N positions");
        for (int i = 0; i < n; ++i)
            s.x[i] = truncate(fixed->points[i], d);
    }
    else
    {
        auto const& ball = std::get<UniformBallLaw>(law.spatial);
        for (int i = 0; i < n; ++i)
        {
            auto const id = stream_of(stream_ids, i);
            Vec dir;
            do
            {
                dir = streams.idiosyncratic_normal(
                    id, DrawTag::initial_position, 0, d);
            } while (norm2(dir) == 0.0);
            double const u = streams.idiosyncratic_uniform(
                id, DrawTag::initial_position, 1, 0)[0];
            double const r = ball.radius * std::pow(u, 1.0 / d);
            s.x[i] = truncate(ball.center, d) + (r / norm(dir)) * dir;
        }
    }

    if (auto const* fixed = std::get_if<FixedVelocities>(&law.velocity))
    {
        if (fixed->velocities.size() != static_cast<std::size_t>(n))
            throw ValidationError("fixed velocities must list N vectors");
        for (int i = 0; i < n; ++i)
            s.v[i] = truncate(fixed->velocities[i], d);
    }
    else
    {
        auto const& g = std::get<GaussianVelocity>(law.velocity);
        if (!(g.std >= 0))
            throw ValidationError("velocity std must be >= 0");
        for (int i = 0; i < n; ++i)
        {
            auto const id = stream_of(stream_ids, i);
            s.v[i] = truncate(g.mean, d)
                     + g.std
                           * streams.idiosyncratic_normal(
                               id, DrawTag::initial_velocity, 0, d);
        }
    }

    for (int i = 0; i < n; ++i)
        if (domain.signed_distance(s.x[i]) < law.margin)
            throw UnsatisfiableSupport("initial position " + std::to_string(i)
                                       + " violates the support margin");
    return s;
}

//---------------------------------------------------------------------------//
void step(SystemState& state, SimConfig const& cfg, StepIncrements const& inc,
          std::uint64_t step_index, std::vector<ReflectionEvent>& events)
{
    std::size_t const n = state.size();
    std::vector<Vec> drift(n);
    mean_field_drift_all(cfg.kernel, state.x, state.v, drift);

    double const a = std::sqrt(2.0 * cfg.noise.sigma);
    double const b = std::sqrt(2.0 * cfg.noise.sigma_bar);
    Vec const common = b * inc.common;
    for (std::size_t i = 0; i < n; ++i)
        state.v[i] += cfg.dt * drift[i] + a * inc.idiosyncratic[i] + common;

    std::vector<FlightHit> hits;
    auto const first_new = static_cast<std::ptrdiff_t>(events.size());
    for (std::size_t i = 0; i < n; ++i)
    {
        hits.clear();
        advance_with_reflections(state.x[i], state.v[i], cfg.dt, cfg.domain,
                                 cfg.max_reflections_per_step, &hits);
        for (auto const& h : hits)
            events.push_back({state.t + h.t_offset, i, h.x, h.n, h.v_pre,
                              h.v_post, step_index});
    }
    // Hits of one step all lie in (t_k, t_k+1]; ties keep particle order.
    std::stable_sort(events.begin() + first_new, events.end(),
                     [](ReflectionEvent const& a, ReflectionEvent const& b) {
                         return a.t_hit < b.t_hit;
                     });
    state.t = static_cast<double>(step_index + 1) * cfg.dt;
}

Trajectory simulate(SimConfig const& cfg)
{
    return simulate(cfg, NoiseStreams(cfg.noise.master_seed));
}

Trajectory simulate(SimConfig const& cfg, NoiseStreams const& streams)
{
    validate(cfg);
    Trajectory traj;
    traj.config = cfg;

    SystemState state = sample_initial(cfg.init, cfg.n, cfg.d, cfg.domain,
                                       streams, cfg.stream_ids);
    std::int64_t const steps = cfg.num_steps();

    traj.snapshots.push_back(state);
    traj.snapshot_steps.push_back(0);
    traj.common_path.reserve(steps + 1);
    traj.common_path.push_back(Vec{});
    if (cfg.record_idiosyncratic_noise)
        traj.idiosyncratic_paths.emplace_back(cfg.n, Vec{});

    StepIncrements inc;
    inc.idiosyncratic.resize(cfg.n);
    for (std::int64_t k = 0; k < steps; ++k)
    {
        streams.sample_increments(static_cast<std::uint64_t>(k), cfg.dt,
                                  cfg.d, inc.idiosyncratic, inc.common,
                                  cfg.stream_ids);
        step(state, cfg, inc, static_cast<std::uint64_t>(k), traj.events);

        traj.common_path.push_back(traj.common_path.back() + inc.common);
        if (cfg.record_idiosyncratic_noise)
        {
            auto next = traj.idiosyncratic_paths.back();
            for (int i = 0; i < cfg.n; ++i)
                next[i] += inc.idiosyncratic[i];
            traj.idiosyncratic_paths.push_back(std::move(next));
        }
        if ((k + 1) % cfg.record_every == 0 || k + 1 == steps)
        {
            traj.snapshots.push_back(state);
            traj.snapshot_steps.push_back(k + 1);
        }
    }
    return traj;
}

//---------------------------------------------------------------------------//
double initial_second_moment(InitialLaw const& law, int d)
{
    double m = 0;
    if (auto const* b = std::get_if<UniformBallLaw>(&law.spatial))
    {
        m += norm2(truncate(b->center, d))
             + b->radius * b->radius * d / (d + 2.0);
    }
    else
    {
        auto const& pts = std::get<FixedPoints>(law.spatial).points;
        double s = 0;
        for (auto const& p : pts)
            s += norm2(truncate(p, d));
        m += pts.empty() ? 0.0 : s / static_cast<double>(pts.size());
    }
    if (auto const* g = std::get_if<GaussianVelocity>(&law.velocity))
    {
        m += norm2(truncate(g->mean, d)) + d * g->std * g->std;
    }
    else
    {
        auto const& vs = std::get<FixedVelocities>(law.velocity).velocities;
        double s = 0;
        for (auto const& v : vs)
            s += norm2(truncate(v, d));
        m += vs.empty() ? 0.0 : s / static_cast<double>(vs.size());
    }
    return m;
}

double gronwall_bound(SimConfig const& cfg)
{
    double const sig = cfg.noise.sigma;
    double const sigb = cfg.noise.sigma_bar;
    double const h = sup_norm(cfg.kernel);
    double const t = cfg.t_final;
    return std::exp((2.0 + 16.0 * sig + 16.0 * sigb) * t)
           * (initial_second_moment(cfg.init, cfg.d)
              + (h * h + 2.0 * cfg.d * (sig + sigb)) * t);
}

MomentSeries moment_monitor(Trajectory const& traj)
{
    if (traj.snapshots.empty())
        throw MissingSnapshots("trajectory has no snapshots");
    MomentSeries out;
    double sup = 0;
    for (auto const& s : traj.snapshots)
    {
        double sum = 0;
        for (std::size_t i = 0; i < s.size(); ++i)
            sum += norm2(s.x[i]) + norm2(s.v[i]);
        double const m = sum / static_cast<double>(s.size());
        sup = std::max(sup, m);
        out.t.push_back(s.t);
        out.moment.push_back(m);
        out.running_sup.push_back(sup);
    }
    return out;
}

double increment_diagnostic(Trajectory const& traj, double delta)
{
    auto const& cfg = traj.config;
    double const spacing = cfg.dt * cfg.record_every;
    if (delta < cfg.dt * (1 - 1e-12))
        throw ValidationError("increment lag must be >= dt");
    auto const lag = static_cast<std::size_t>(std::llround(delta / spacing));
    if (lag < 1 || std::fabs(lag * spacing - delta) > 1e-9 * delta)
        throw ValidationError(
            "increment lag must be a multiple of the snapshot spacing");
    // Only uniformly spaced snapshots are used
    std::size_t usable = traj.snapshots.size();
    while (usable > 1
           && traj.snapshot_steps[usable - 1] % cfg.record_every != 0)
        --usable;
    if (usable <= lag)
        throw ValidationError("trajectory shorter than the increment lag");

    double sum = 0;
    std::size_t count = 0;
    for (std::size_t k = 0; k + lag < usable; ++k)
    {
        auto const& a = traj.snapshots[k];
        auto const& b = traj.snapshots[k + lag];
        for (std::size_t i = 0; i < a.size(); ++i)
            sum += norm(b.v[i] - a.v[i]);
        count += a.size();
    }
    return sum / static_cast<double>(count);
}

}  // namespace swarm
