// Batch driver: swarmsim --config run.json [--out DIR] [--seed S]
//                        [--threads K] [--sim.N=512 ...]

#include <iostream>
#include <string>
#include <vector>

#include <CLI11.hpp>

#include "swarm/config.hpp"
#include "swarm/errors.hpp"
#include "swarm/experiments.hpp"
#include "swarm/io.hpp"

namespace
{
enum Exit
{
    ok = 0,
    failure = 1,
    invalid = 2,
    numerical = 3
};

int run(int argc, char** argv)
{
    CLI::App app{"Confined stochastic swarm simulator and validator"};
    std::string config_path;
    std::string out_dir;
    std::uint64_t seed = 0;
    int threads = 0;
    app.add_option("--config", config_path, "Experiment config (JSON)")
        ->required();
    auto* out_opt = app.add_option("--out", out_dir, "Output root directory");
    auto* seed_opt = app.add_option("--seed", seed, "Master seed");
    auto* threads_opt
        = app.add_option("--threads", threads, "Worker thread cap")
              ->check(CLI::PositiveNumber);
    app.allow_extras();

    try
    {
        app.parse(argc, argv);
    }
    catch (CLI::ParseError const& e)
    {
        int const code = app.exit(e);
        return code == 0 ? ok : invalid;
    }

    try
    {
        nlohmann::json doc = swarm::read_json(config_path);
        for (auto const& extra : app.remaining())
        {
            if (extra.rfind("--", 0) != 0)
                throw swarm::ConfigError("unexpected argument " + extra);
            swarm::apply_override(doc, extra.substr(2));
        }
        if (*out_opt)
            doc["output_dir"] = out_dir;
        if (*seed_opt)
            swarm::apply_override(doc, "sim.noise.master_seed="
                                           + std::to_string(seed));
        if (*threads_opt)
            doc["threads"] = threads;

        auto const cfg = swarm::parse_run_config(doc);
        auto const artifacts = swarm::run_experiment(cfg);
        auto const dir = swarm::write_run(cfg, artifacts);
        std::cout << dir.string() << '\n';
        return ok;
    }
    catch (swarm::ValidationError const& e)
    {
        std::cerr << "validation error: " << e.what() << '\n';
        return invalid;
    }
    catch (swarm::NumericalError const& e)
    {
        std::cerr << "numerical error: " << e.what() << '\n';
        return numerical;
    }
    catch (std::exception const& e)
    {
        std::cerr << "error: " << e.what() << '\n';
        return failure;
    }
}

}  // namespace

int main(int argc, char** argv)
{
    return run(argc, argv);
}
