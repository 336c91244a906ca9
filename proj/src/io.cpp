#include "swarm/io.hpp"

#include <algorithm>
#include <cstdio>
#include <cstdlib>
#include <fstream>

#include "swarm/errors.hpp"

namespace swarm
{
namespace
{
std::ofstream open_out(fs::path const& path)
{
    std::ofstream out(path, std::ios::binary);
    if (!out)
        throw Error("cannot open " + path.string() + " for writing");
    return out;
}

//! Shortest text that reads back to the same double
std::string num(double x)
{
    char buf[32];
    for (int prec = 15; prec <= 17; ++prec)
    {
        std::snprintf(buf, sizeof buf, "%.*g", prec, x);
        if (std::strtod(buf, nullptr) == x)
            break;
    }
    return buf;
}

void header(std::ostream& out, char const* prefix, int d)
{
    for (int k = 0; k < d; ++k)
        out << ',' << prefix << k;
}

nlohmann::json vec_json(Vec const& v, int d)
{
    auto out = nlohmann::json::array();
    for (int k = 0; k < d; ++k)
        out.push_back(v[k]);
    return out;
}

}  // namespace

void write_snapshots_csv(fs::path const& path, Trajectory const& traj,
                         int stride)
{
    if (stride < 1)
        throw ValidationError("snapshot stride must be >= 1");
    int const d = traj.config.d;
    auto out = open_out(path);
    out << "t,particle";
    header(out, "x", d);
    header(out, "v", d);
    out << '\n';

    auto const last = traj.snapshots.size();
    for (std::size_t s = 0; s < last; ++s)
    {
        // The final state is always written.
        if (s % static_cast<std::size_t>(stride) != 0 && s + 1 != last)
            continue;
        auto const& snap = traj.snapshots[s];
        std::string const t = num(snap.t);
        for (std::size_t i = 0; i < snap.size(); ++i)
        {
            out << t << ',' << i;
            for (int k = 0; k < d; ++k)
                out << ',' << num(snap.x[i][k]);
            for (int k = 0; k < d; ++k)
                out << ',' << num(snap.v[i][k]);
            out << '\n';
        }
    }
}

void write_events_jsonl(fs::path const& path, Trajectory const& traj)
{
    int const d = traj.config.d;
    auto out = open_out(path);
    for (auto const& e : traj.events)
    {
        nlohmann::json j = {{"t_hit", e.t_hit},
                            {"particle", e.particle},
                            {"x", vec_json(e.x, d)},
                            {"n", vec_json(e.n, d)},
                            {"v_pre", vec_json(e.v_pre, d)},
                            {"v_post", vec_json(e.v_post, d)},
                            {"step", e.step}};
        out << j.dump() << '\n';
    }
}

void write_common_path_csv(fs::path const& path, Trajectory const& traj)
{
    int const d = traj.config.d;
    double const dt = traj.config.dt;
    auto out = open_out(path);
    out << 't';
    header(out, "w", d);
    out << '\n';
    for (std::size_t k = 0; k < traj.common_path.size(); ++k)
    {
        double const t = std::min(static_cast<double>(k) * dt,
                                  traj.config.t_final);
        out << num(t);
        for (int c = 0; c < d; ++c)
            out << ',' << num(traj.common_path[k][c]);
        out << '\n';
    }
}

void write_points_csv(fs::path const& path,
                      std::vector<SamplePoint> const& points)
{
    auto out = open_out(path);
    out << "N,mean,se\n";
    for (auto const& p : points)
        out << p.n << ',' << num(p.mean) << ',' << num(p.se) << '\n';
}

void write_histogram_csv(fs::path const& path, PhaseHistogram const& hist)
{
    auto out = open_out(path);
    for (int k = 0; k < hist.dim; ++k)
        out << "ix" << k << ',';
    for (int k = 0; k < hist.dim; ++k)
        out << "iv" << k << ',';
    out << "mass\n";
    for (std::size_t c = 0; c < hist.mass.size(); ++c)
    {
        for (int idx : hist.unravel(c))
            out << idx << ',';
        out << num(hist.mass[c]) << '\n';
    }
}

void write_json(fs::path const& path, nlohmann::json const& doc)
{
    auto out = open_out(path);
    out << doc.dump(2) << '\n';
}

nlohmann::json read_json(fs::path const& path)
{
    std::ifstream in(path);
    if (!in)
        throw ConfigError("cannot read " + path.string());
    try
    {
        return nlohmann::json::parse(in);
    }
    catch (nlohmann::json::parse_error const& e)
    {
        throw ConfigError(path.string() + ": " + e.what());
    }
}

}  // namespace swarm
