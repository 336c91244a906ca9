#include "swarm/config.hpp"

#include <algorithm>
#include <set>

#include "swarm/errors.hpp"

namespace swarm
{
using nlohmann::json;

namespace
{
//! Reads fields from one JSON object and remembers which keys were used.
class Reader
{
  public:
    Reader(json const& obj, std::string path) : obj_(obj), path_(std::move(path))
    {
        if (!obj_.is_object())
            throw ConfigError(path_ + " must be an object");
    }

    template<class T>
    void get(char const* key, T& out)
    {
        seen_.insert(key);
        auto it = obj_.find(key);
        if (it == obj_.end())
            return;
        try
        {
            out = it->get<T>();
        }
        catch (json::exception const& e)
        {
            throw ConfigError(where(key) + ": " + e.what());
        }
    }

    json const* child(char const* key)
    {
        seen_.insert(key);
        auto it = obj_.find(key);
        return it == obj_.end() ? nullptr : &*it;
    }

    std::string where(char const* key) const
    {
        return path_.empty() ? key : path_ + "." + key;
    }

    void finish() const
    {
        for (auto const& [key, value] : obj_.items())
            if (!seen_.count(key))
                throw ConfigError("unknown field " + where(key.c_str()));
    }

  private:
    json const& obj_;
    std::string path_;
    std::set<std::string> seen_;
};

Vec to_vec(std::vector<double> const& xs, std::string const& where)
{
    if (xs.size() > 3)
        throw ConfigError(where + " has more than 3 components");
    Vec v;
    for (std::size_t i = 0; i < xs.size(); ++i)
        v[i] = xs[i];
    return v;
}

json from_vec(Vec const& v, int d)
{
    json out = json::array();
    for (int i = 0; i < d; ++i)
        out.push_back(v[i]);
    return out;
}

std::string kind_of(json const& obj, std::string const& where)
{
    if (!obj.is_object() || !obj.contains("kind") || !obj["kind"].is_string())
        throw ConfigError(where + ".kind must be a string");
    return obj["kind"].get<std::string>();
}

Domain parse_domain(json const& obj, int d)
{
    std::string const kind = kind_of(obj, "sim.domain");
    Reader r(obj, "sim.domain");
    std::string ignored;
    r.get("kind", ignored);
    double band = 0, tol = 0;
    r.get("band", band);
    r.get("containment_tolerance", tol);
    if (kind == "ball")
    {
        Ball b;
        r.get("radius", b.radius);
        r.finish();
        return Domain(b, d, band, tol);
    }
    if (kind == "annulus")
    {
        Annulus a;
        r.get("r_in", a.r_in);
        r.get("r_out", a.r_out);
        r.finish();
        return Domain(a, d, band, tol);
    }
    throw ConfigError("sim.domain.kind must be ball or annulus");
}

KernelSpec parse_kernel(json const& obj)
{
    std::string const kind = kind_of(obj, "sim.kernel");
    Reader r(obj, "sim.kernel");
    std::string ignored;
    r.get("kind", ignored);
    KernelSpec out;
    if (kind == "zero")
    {
        out = ZeroKernel{};
    }
    else if (kind == "cucker_smale")
    {
        CuckerSmale cs;
        r.get("lambda", cs.lambda);
        r.get("beta", cs.beta);
        r.get("v_clip", cs.v_clip);
        out = cs;
    }
    else if (kind == "morse")
    {
        MorseGradient m;
        r.get("C_a", m.c_a);
        r.get("C_r", m.c_r);
        r.get("l_a", m.l_a);
        r.get("l_r", m.l_r);
        out = m;
    }
    else
    {
        throw ConfigError(
            "sim.kernel.kind must be zero, cucker_smale or morse");
    }
    r.finish();
    return out;
}

std::vector<Vec> parse_points(json const* arr, std::string const& where)
{
    std::vector<Vec> out;
    if (!arr)
        return out;
    if (!arr->is_array())
        throw ConfigError(where + " must be an array");
    for (auto const& p : *arr)
    {
        try
        {
            out.push_back(to_vec(p.get<std::vector<double>>(), where));
        }
        catch (json::exception const& e)
        {
            throw ConfigError(where + ": " + e.what());
        }
    }
    return out;
}

InitialLaw parse_init(json const& obj)
{
    InitialLaw law;
    Reader r(obj, "sim.init");
    r.get("margin", law.margin);
    if (auto const* sp = r.child("spatial"))
    {
        std::string const kind = kind_of(*sp, "sim.init.spatial");
        Reader rs(*sp, "sim.init.spatial");
        std::string ignored;
        rs.get("kind", ignored);
        if (kind == "uniform_ball")
        {
            UniformBallLaw b;
            std::vector<double> c;
            rs.get("radius", b.radius);
            rs.get("center", c);
            b.center = to_vec(c, "sim.init.spatial.center");
            law.spatial = b;
        }
        else if (kind == "fixed")
        {
            law.spatial
                = FixedPoints{parse_points(rs.child("points"),
                                           "sim.init.spatial.points")};
        }
        else
        {
            throw ConfigError(
                "sim.init.spatial.kind must be uniform_ball or fixed");
        }
        rs.finish();
    }
    if (auto const* vel = r.child("velocity"))
    {
        std::string const kind = kind_of(*vel, "sim.init.velocity");
        Reader rv(*vel, "sim.init.velocity");
        std::string ignored;
        rv.get("kind", ignored);
        if (kind == "gaussian")
        {
            GaussianVelocity g;
            std::vector<double> m;
            rv.get("std", g.std);
            rv.get("mean", m);
            g.mean = to_vec(m, "sim.init.velocity.mean");
            law.velocity = g;
        }
        else if (kind == "fixed")
        {
            law.velocity = FixedVelocities{
                parse_points(rv.child("vectors"), "sim.init.velocity.vectors")};
        }
        else
        {
            throw ConfigError("sim.init.velocity.kind must be gaussian or fixed");
        }
        rv.finish();
    }
    r.finish();
    return law;
}

SimConfig parse_sim(json const& obj)
{
    SimConfig sim;
    Reader r(obj, "sim");
    r.get("N", sim.n);
    r.get("d", sim.d);
    r.get("T", sim.t_final);
    r.get("dt", sim.dt);
    r.get("record_every", sim.record_every);
    r.get("record_idiosyncratic_noise", sim.record_idiosyncratic_noise);
    r.get("max_reflections_per_step", sim.max_reflections_per_step);

    json const* dom = r.child("domain");
    sim.domain = dom ? parse_domain(*dom, sim.d) : Domain::ball(1.0, sim.d);
    if (auto const* k = r.child("kernel"))
        sim.kernel = parse_kernel(*k);
    if (auto const* nz = r.child("noise"))
    {
        Reader rn(*nz, "sim.noise");
        rn.get("sigma", sim.noise.sigma);
        rn.get("sigma_bar", sim.noise.sigma_bar);
        rn.get("master_seed", sim.noise.master_seed);
        rn.finish();
    }
    if (auto const* init = r.child("init"))
        sim.init = parse_init(*init);
    r.finish();
    return sim;
}

json domain_json(Domain const& d)
{
    json out;
    if (auto const* b = std::get_if<Ball>(&d.kind()))
        out = {{"kind", "ball"}, {"radius", b->radius}};
    else if (auto const* a = std::get_if<Annulus>(&d.kind()))
        out = {{"kind", "annulus"}, {"r_in", a->r_in}, {"r_out", a->r_out}};
    else
        throw ConfigError("custom domains cannot be serialized");
    out["band"] = d.band();
    out["containment_tolerance"] = d.tolerance();
    return out;
}

json kernel_json(KernelSpec const& k)
{
    if (auto const* cs = std::get_if<CuckerSmale>(&k))
        return {{"kind", "cucker_smale"},
                {"lambda", cs->lambda},
                {"beta", cs->beta},
                {"v_clip", cs->v_clip}};
    if (auto const* m = std::get_if<MorseGradient>(&k))
        return {{"kind", "morse"},
                {"C_a", m->c_a},
                {"C_r", m->c_r},
                {"l_a", m->l_a},
                {"l_r", m->l_r}};
    return {{"kind", "zero"}};
}

json init_json(InitialLaw const& law, int d)
{
    json out;
    out["margin"] = law.margin;
    if (auto const* b = std::get_if<UniformBallLaw>(&law.spatial))
        out["spatial"] = {{"kind", "uniform_ball"},
                          {"radius", b->radius},
                          {"center", from_vec(b->center, d)}};
    else
    {
        json pts = json::array();
        for (auto const& p : std::get<FixedPoints>(law.spatial).points)
            pts.push_back(from_vec(p, d));
        out["spatial"] = {{"kind", "fixed"}, {"points", pts}};
    }
    if (auto const* g = std::get_if<GaussianVelocity>(&law.velocity))
        out["velocity"] = {{"kind", "gaussian"},
                           {"std", g->std},
                           {"mean", from_vec(g->mean, d)}};
    else
    {
        json vs = json::array();
        for (auto const& v : std::get<FixedVelocities>(law.velocity).velocities)
            vs.push_back(from_vec(v, d));
        out["velocity"] = {{"kind", "fixed"}, {"vectors", vs}};
    }
    return out;
}

}  // namespace

//---------------------------------------------------------------------------//
bool RunConfig::emits(std::string const& format) const
{
    return std::find(emit.begin(), emit.end(), format) != emit.end();
}

RunConfig parse_run_config(json const& doc)
{
    RunConfig cfg;
    Reader r(doc, "");
    r.get("experiment", cfg.experiment);
    static std::set<std::string> const experiments{
        "simulate", "converge", "boundary", "couple", "oracle"};
    if (!experiments.count(cfg.experiment))
        throw ConfigError("experiment must be one of simulate, converge, "
                          "boundary, couple, oracle");

    if (auto const* sim = r.child("sim"))
        cfg.sim = parse_sim(*sim);
    r.get("N_list", cfg.n_list);
    r.get("replicas", cfg.replicas);
    r.get("dt_list", cfg.dt_list);
    r.get("delta_ladder", cfg.delta_ladder);
    r.get("symmetry_delta", cfg.symmetry_delta);
    r.get("bootstrap_blocks", cfg.bootstrap_blocks);
    if (auto const* psi = r.child("psi"))
    {
        Reader rp(*psi, "psi");
        rp.get("count", cfg.psi.count);
        rp.get("velocity_scale", cfg.psi.velocity_scale);
        rp.get("amplitude", cfg.psi.amplitude);
        rp.finish();
    }
    cfg.histogram.x_half_width = cfg.sim.domain.bounding_radius();
    if (auto const* h = r.child("histogram"))
    {
        Reader rh(*h, "histogram");
        rh.get("bins_x", cfg.histogram.bins_x);
        rh.get("bins_v", cfg.histogram.bins_v);
        rh.get("v_max", cfg.histogram.v_max);
        rh.get("x_half_width", cfg.histogram.x_half_width);
        rh.finish();
    }
    r.get("output_dir", cfg.output_dir);
    r.get("emit", cfg.emit);
    r.get("threads", cfg.threads);
    r.get("snapshot_stride", cfg.snapshot_stride);
    r.finish();

    for (auto const& e : cfg.emit)
        if (e != "csv" && e != "jsonl" && e != "json")
            throw ConfigError("emit entries must be csv, jsonl or json");
    if (cfg.threads < 1)
        throw ConfigError("threads must be >= 1");
    if (cfg.snapshot_stride < 0)
        throw ConfigError("snapshot_stride must be >= 0");
    try
    {
        validate(cfg.sim);
        validate(cfg.sim.kernel);
    }
    catch (ConfigError const&)
    {
        throw;
    }
    catch (Error const& e)
    {
        throw ConfigError(e.what());
    }
    return cfg;
}

json to_json(RunConfig const& cfg)
{
    auto const& s = cfg.sim;
    json sim = {
        {"N", s.n},
        {"d", s.d},
        {"T", s.t_final},
        {"dt", s.dt},
        {"record_every", s.record_every},
        {"record_idiosyncratic_noise", s.record_idiosyncratic_noise},
        {"max_reflections_per_step", s.max_reflections_per_step},
        {"domain", domain_json(s.domain)},
        {"kernel", kernel_json(s.kernel)},
        {"noise",
         {{"sigma", s.noise.sigma},
          {"sigma_bar", s.noise.sigma_bar},
          {"master_seed", s.noise.master_seed}}},
        {"init", init_json(s.init, s.d)},
    };
    return {
        {"experiment", cfg.experiment},
        {"sim", sim},
        {"N_list", cfg.n_list},
        {"replicas", cfg.replicas},
        {"dt_list", cfg.dt_list},
        {"delta_ladder", cfg.delta_ladder},
        {"symmetry_delta", cfg.symmetry_delta},
        {"bootstrap_blocks", cfg.bootstrap_blocks},
        {"psi",
         {{"count", cfg.psi.count},
          {"velocity_scale", cfg.psi.velocity_scale},
          {"amplitude", cfg.psi.amplitude}}},
        {"histogram",
         {{"bins_x", cfg.histogram.bins_x},
          {"bins_v", cfg.histogram.bins_v},
          {"v_max", cfg.histogram.v_max},
          {"x_half_width", cfg.histogram.x_half_width}}},
        {"output_dir", cfg.output_dir},
        {"emit", cfg.emit},
        {"threads", cfg.threads},
        {"snapshot_stride", cfg.snapshot_stride},
    };
}

void apply_override(json& doc, std::string const& assignment)
{
    auto const eq = assignment.find('=');
    if (eq == std::string::npos || eq == 0)
        throw ConfigError("override must look like path.to.key=value: "
                          + assignment);
    std::string const path = assignment.substr(0, eq);
    std::string const raw = assignment.substr(eq + 1);

    json value = json::parse(raw, nullptr, false);
    if (value.is_discarded())
        value = raw;

    json* node = &doc;
    std::size_t start = 0;
    while (true)
    {
        auto const dot = path.find('.', start);
        std::string const key = path.substr(start, dot - start);
        if (key.empty())
            throw ConfigError("empty key in override " + path);
        if (!node->is_object())
            throw ConfigError("override path " + path
                              + " crosses a non-object");
        if (dot == std::string::npos)
        {
            (*node)[key] = value;
            return;
        }
        node = &(*node)[key];
        if (node->is_null())
            *node = json::object();
        start = dot + 1;
    }
}

}  // namespace swarm
