#include <array>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <sstream>
#include <string>

#include <doctest.h>

#include "swarm/config.hpp"
#include "swarm/errors.hpp"
#include "swarm/experiments.hpp"
#include "swarm/io.hpp"

using namespace swarm;
using nlohmann::json;
namespace fs = std::filesystem;

namespace
{
struct CliResult
{
    int status{0};
    std::string out;
};

fs::path scratch_dir(std::string const& name)
{
    fs::path const dir = fs::path(SWARM_TEST_TMP) / name;
    fs::remove_all(dir);
    fs::create_directories(dir);
    return dir;
}

fs::path write_config(fs::path const& dir, json const& doc)
{
    fs::path const p = dir / "config.json";
    std::ofstream(p) << doc.dump(2);
    return p;
}

CliResult run_cli(std::string const& args)
{
    std::string const cmd = std::string(SWARMSIM_EXE) + " " + args
                            + " 2>/dev/null";
    CliResult r;
    FILE* pipe = popen(cmd.c_str(), "r");
    REQUIRE(pipe);
    std::array<char, 512> buf;
    while (fgets(buf.data(), buf.size(), pipe))
        r.out += buf.data();
    int const status = pclose(pipe);
    r.status = WIFEXITED(status) ? WEXITSTATUS(status) : -1;
    while (!r.out.empty() && r.out.back() == '\n')
        r.out.pop_back();
    return r;
}

std::string slurp(fs::path const& p)
{
    std::ifstream in(p, std::ios::binary);
    std::stringstream ss;
    ss << in.rdbuf();
    return ss.str();
}

std::size_t count_lines(fs::path const& p)
{
    std::ifstream in(p);
    std::size_t n = 0;
    for (std::string line; std::getline(in, line);)
        ++n;
    return n;
}

json small_simulate(fs::path const& out)
{
    return {{"experiment", "simulate"},
            {"output_dir", out.string()},
            {"sim",
             {{"N", 16},
              {"T", 0.2},
              {"dt", 0.001},
              {"kernel",
               {{"kind", "cucker_smale"},
                {"lambda", 1.0},
                {"beta", 0.5},
                {"v_clip", 10.0}}},
              {"noise", {{"sigma", 0.25}, {"sigma_bar", 0.25}}}}}};
}

}  // namespace

TEST_CASE("config parsing")
{
    json doc = {{"experiment", "boundary"},
                {"sim",
                 {{"N", 12},
                  {"d", 3},
                  {"domain", {{"kind", "annulus"}, {"r_in", 0.3}, {"r_out", 1.2}}},
                  {"kernel",
                   {{"kind", "morse"},
                    {"C_a", 1.0},
                    {"C_r", 2.0},
                    {"l_a", 2.0},
                    {"l_r", 0.5}}},
                  {"init",
                   {{"spatial",
                     {{"kind", "uniform_ball"},
                      {"radius", 0.1},
                      {"center", {0.75, 0.0, 0.0}}}}}}}},
                {"delta_ladder", {0.1, 0.05}}};
    auto const cfg = parse_run_config(doc);
    CHECK(cfg.experiment == "boundary");
    CHECK(cfg.sim.n == 12);
    CHECK(cfg.sim.domain.dimension() == 3);
    CHECK(std::holds_alternative<MorseGradient>(cfg.sim.kernel));
    CHECK(cfg.delta_ladder.size() == 2);

    // Echo round trip
    auto const again = parse_run_config(to_json(cfg));
    CHECK(to_json(again) == to_json(cfg));

    json bad = doc;
    bad["sim"]["speed"] = 3;
    CHECK_THROWS_AS(parse_run_config(bad), ConfigError);
    bad = doc;
    bad["sim"]["kernel"]["gamma"] = 1;
    CHECK_THROWS_AS(parse_run_config(bad), ConfigError);
    bad = doc;
    bad["experiment"] = "explode";
    CHECK_THROWS_AS(parse_run_config(bad), ConfigError);
    bad = doc;
    bad["sim"]["N"] = "many";
    CHECK_THROWS_AS(parse_run_config(bad), ConfigError);
    bad = doc;
    bad["sim"]["dt"] = -1;
    CHECK_THROWS_AS(parse_run_config(bad), ValidationError);
}

TEST_CASE("dotted overrides")
{
    json doc = {{"sim", {{"N", 4}}}};
    apply_override(doc, "sim.N=512");
    apply_override(doc, "sim.noise.sigma=0.5");
    apply_override(doc, "experiment=couple");
    CHECK(doc["sim"]["N"] == 512);
    CHECK(doc["sim"]["noise"]["sigma"] == 0.5);
    CHECK(doc["experiment"] == "couple");
    CHECK_THROWS_AS(apply_override(doc, "sim.N"), ConfigError);
    CHECK_THROWS_AS(apply_override(doc, "sim..N=3"), ConfigError);
}

TEST_CASE("simulate with T = 0 writes N snapshot rows")
{
    auto const dir = scratch_dir("t0");
    json doc = small_simulate(dir / "runs");
    doc["sim"]["T"] = 0.0;
    auto const r = run_cli("--config " + write_config(dir, doc).string());
    REQUIRE(r.status == 0);
    fs::path const run = r.out;
    CHECK(count_lines(run / "snapshots.csv") == 16 + 1);
    CHECK(slurp(run / "snapshots.csv").rfind("t,particle,x0,x1,v0,v1\n", 0)
          == 0);
    for (char const* f : {"config_echo.json", "report.json", "events.jsonl",
                          "common_path.csv", "histogram.csv"})
        CHECK(fs::exists(run / f));
}

TEST_CASE("artifacts follow their schemas")
{
    auto const dir = scratch_dir("schema");
    json doc = small_simulate(dir / "runs");
    doc["sim"]["T"] = 1.0;
    doc["sim"]["N"] = 64;
    auto const r = run_cli("--config " + write_config(dir, doc).string());
    REQUIRE(r.status == 0);
    fs::path const run = r.out;

    auto const report = read_json(run / "report.json");
    CHECK(report["schema_version"] == schema_version);
    CHECK(report["invariants"]["pass"] == true);

    std::ifstream events(run / "events.jsonl");
    std::size_t n_events = 0;
    for (std::string line; std::getline(events, line); ++n_events)
    {
        auto const e = json::parse(line);
        for (char const* key : {"t_hit", "particle", "x", "n", "v_pre", "v_post"})
            REQUIRE(e.contains(key));
        REQUIRE(e["x"].size() == 2);
    }
    CHECK(n_events == report["events"].get<std::size_t>());
    CHECK(n_events > 0);
    CHECK(count_lines(run / "common_path.csv") == 1000 + 2);
    CHECK(slurp(run / "common_path.csv").rfind("t,w0,w1\n", 0) == 0);
}

TEST_CASE("runs are deterministic and never overwrite")
{
    auto const dir = scratch_dir("determinism");
    auto const cfg = write_config(dir, small_simulate(dir / "runs"));
    auto const a = run_cli("--config " + cfg.string() + " --seed 7");
    auto const b = run_cli("--config " + cfg.string() + " --seed 7");
    REQUIRE(a.status == 0);
    REQUIRE(b.status == 0);
    CHECK(a.out != b.out);
    CHECK(fs::path(a.out).filename().string().rfind("simulate-", 0) == 0);
    CHECK(slurp(fs::path(a.out) / "report.json")
          == slurp(fs::path(b.out) / "report.json"));
    CHECK(slurp(fs::path(a.out) / "snapshots.csv")
          == slurp(fs::path(b.out) / "snapshots.csv"));

    // Re-running from the echo reproduces the report
    auto const c = run_cli("--config "
                           + (fs::path(a.out) / "config_echo.json").string());
    REQUIRE(c.status == 0);
    CHECK(slurp(fs::path(a.out) / "report.json")
          == slurp(fs::path(c.out) / "report.json"));

    auto const d = run_cli("--config " + cfg.string() + " --seed 8");
    REQUIRE(d.status == 0);
    CHECK(slurp(fs::path(a.out) / "report.json")
          != slurp(fs::path(d.out) / "report.json"));
}

TEST_CASE("overrides and exit codes")
{
    auto const dir = scratch_dir("codes");
    auto const cfg = write_config(dir, small_simulate(dir / "runs"));

    auto const over = run_cli("--config " + cfg.string()
                              + " --sim.N=5 --sim.T=0 --threads 2");
    REQUIRE(over.status == 0);
    auto const echo = read_json(fs::path(over.out) / "config_echo.json");
    CHECK(echo["sim"]["N"] == 5);
    CHECK(echo["threads"] == 2);

    CHECK(run_cli("--config " + cfg.string() + " --sim.bogus=1").status == 2);
    CHECK(run_cli("--config " + cfg.string() + " --sim.dt=-1").status == 2);
    CHECK(run_cli("--config " + (dir / "missing.json").string()).status == 2);
    CHECK(run_cli("").status == 2);

    json fast = small_simulate(dir / "runs");
    fast["sim"]["dt"] = 0.1;
    fast["sim"]["T"] = 0.2;
    fast["sim"]["max_reflections_per_step"] = 1;
    fast["sim"]["init"] = {
        {"velocity", {{"kind", "gaussian"}, {"std", 40.0}}}};
    auto const fast_cfg = dir / "fast.json";
    std::ofstream(fast_cfg) << fast.dump();
    CHECK(run_cli("--config " + fast_cfg.string()).status == 3);
}

TEST_CASE("oracle experiment")
{
    auto const dir = scratch_dir("oracle");
    json doc = {{"experiment", "oracle"},
                {"output_dir", (dir / "runs").string()},
                {"sim",
                 {{"N", 1},
                  {"T", 2.5},
                  {"dt", 0.01},
                  {"init",
                   {{"spatial", {{"kind", "fixed"}, {"points", {{0.0, 0.0}}}}},
                    {"velocity",
                     {{"kind", "fixed"}, {"vectors", {{1.0, 0.0}}}}}}}}}};
    auto const r = run_cli("--config " + write_config(dir, doc).string());
    REQUIRE(r.status == 0);
    auto const rep = read_json(fs::path(r.out) / "report.json");
    CHECK(rep["mode"] == "billiard");
    CHECK(rep["max_position_error"].get<double>() <= 1e-9);
    CHECK(rep["pass"] == true);

    doc["sim"] = {{"N", 2000},
                  {"T", 1.0},
                  {"dt", 0.002},
                  {"noise", {{"sigma", 0.25}, {"sigma_bar", 0.0}}},
                  {"init", {{"velocity", {{"kind", "gaussian"}, {"std", 1.5}}}}}};
    auto const noisy = run_cli("--config " + write_config(dir, doc).string());
    REQUIRE(noisy.status == 0);
    auto const rep2 = read_json(fs::path(noisy.out) / "report.json");
    CHECK(rep2["mode"] == "reflection_rate");
    CHECK(rep2["relative_difference"].get<double>() < 0.2);
    CHECK(rep2["reflections_per_particle_per_time"][0].get<double>() > 0);

    doc["sim"]["kernel"] = {{"kind", "cucker_smale"}};
    CHECK(run_cli("--config " + write_config(dir, doc).string()).status == 2);
}

TEST_CASE("non-interacting particles do not depend on N")
{
    // Mean final speed: 200 single-particle runs vs one 200-particle run
    RunConfig cfg;
    cfg.experiment = "simulate";
    cfg.sim.t_final = 0.5;
    cfg.sim.dt = 0.005;
    cfg.sim.noise = {0.25, 0.0, 0};
    double single = 0, single2 = 0;
    cfg.sim.n = 1;
    for (int r = 0; r < 200; ++r)
    {
        cfg.sim.noise.master_seed = 1000 + r;
        double const s = norm(simulate(cfg.sim).snapshots.back().v[0]);
        single += s;
        single2 += s * s;
    }
    cfg.sim.n = 200;
    cfg.sim.noise.master_seed = 1;
    auto const many = simulate(cfg.sim).snapshots.back();
    double joint = 0, joint2 = 0;
    for (auto const& v : many.v)
    {
        joint += norm(v);
        joint2 += norm2(v);
    }
    double const m1 = single / 200, m2 = joint / 200;
    double const var = (single2 / 200 - m1 * m1 + joint2 / 200 - m2 * m2) / 200;
    CHECK(std::abs(m1 - m2) <= 4 * std::sqrt(var));
}

TEST_CASE("converge and couple runs emit points.csv")
{
    auto const dir = scratch_dir("points");
    json doc = {{"experiment", "couple"},
                {"output_dir", (dir / "runs").string()},
                {"N_list", {8, 16, 32}},
                {"replicas", 2},
                {"sim",
                 {{"N", 8},
                  {"T", 0.1},
                  {"dt", 0.01},
                  {"noise", {{"sigma", 0.25}, {"sigma_bar", 0.25}}}}}};
    auto const r = run_cli("--config " + write_config(dir, doc).string());
    REQUIRE(r.status == 0);
    CHECK(count_lines(fs::path(r.out) / "points.csv") == 4);
    CHECK(slurp(fs::path(r.out) / "points.csv").rfind("N,mean,se\n", 0) == 0);

    doc["experiment"] = "converge";
    doc["replicas"] = 16;
    doc["dt_list"] = {0.01, 0.005};
    auto const c = run_cli("--config " + write_config(dir, doc).string());
    REQUIRE(c.status == 0);
    auto const rep = read_json(fs::path(c.out) / "report.json");
    CHECK(rep["scaling"]["points"].size() == 3);
    CHECK(rep["refinement"]["ratios"].size() == 1);
    CHECK(rep["representative"]["residuals"].size() == 8);
    CHECK(count_lines(fs::path(c.out) / "points.csv") == 4);
}
