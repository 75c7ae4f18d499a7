// guild: run trials, benchmarks, environment export and heatmaps.

#include <iostream>
#include <optional>
#include <string>
#include <vector>

#include "CLI11.hpp"

#include "guild/guild.hpp"

namespace {

struct Overrides
{
    std::string config_path;
    std::optional<std::string> env_name;
    std::optional<std::uint64_t> env_seed;
    std::optional<std::string> env_file;
    std::optional<std::string> selector;
    std::optional<double> gamma;
    std::optional<std::size_t> beacons;
    std::optional<std::size_t> batch;
    std::optional<std::size_t> budget;
    std::optional<double> time_budget;
    std::optional<std::uint64_t> seed;
    std::optional<std::string> out_dir;
    std::optional<std::size_t> heatmap_every;
};

void add_common(CLI::App *cmd, Overrides &o)
{
    cmd->add_option("-c,--config", o.config_path, "JSON run configuration");
    cmd->add_option("--env", o.env_name, "builtin environment (Forest, TwoWall, Trap, SE2Maze, ClutterR<n>)");
    cmd->add_option("--env-seed", o.env_seed, "environment seed");
    cmd->add_option("--env-file", o.env_file, "environment JSON file");
    cmd->add_option("--selector", o.selector, "InformedSet, Uniform, Greedy or Bandit");
    cmd->add_option("--gamma", o.gamma, "bandit exploration rate");
    cmd->add_option("--beacons", o.beacons, "beacon count");
    cmd->add_option("--batch", o.batch, "samples per iteration");
    cmd->add_option("--budget", o.budget, "sample budget");
    cmd->add_option("--time-budget", o.time_budget, "wall-clock budget in seconds");
    cmd->add_option("--seed", o.seed, "planner seed");
    cmd->add_option("-o,--out", o.out_dir, "output directory");
    cmd->add_option("--heatmap-every", o.heatmap_every, "samples between heatmap snapshots");
}

// Precedence: flags, then GUILD_OUTPUT_DIR, then the config file.
guild::RunConfig resolve(const Overrides &o)
{
    guild::RunConfig c = o.config_path.empty() ? guild::RunConfig{} : guild::load_config(o.config_path);
    guild::apply_environment_overrides(c);
    if (o.env_file)
        c.environment = {std::nullopt, 0, *o.env_file};
    if (o.env_name)
        c.environment = {*o.env_name, c.environment.seed, std::nullopt};
    if (o.env_seed)
        c.environment.seed = *o.env_seed;
    if (o.selector)
    {
        try
        {
            c.selector = guild::parse_selector(*o.selector);
        }
        catch (const std::invalid_argument &e)
        {
            throw guild::ConfigError("selector.kind", e.what());
        }
    }
    if (o.gamma)
        c.gamma = *o.gamma;
    if (o.beacons)
        c.beacon_count = *o.beacons;
    if (o.batch)
        c.batch = *o.batch;
    if (o.budget)
        c.sample_budget = *o.budget;
    if (o.time_budget)
        c.time_budget = *o.time_budget;
    if (o.seed)
        c.planner_seed = *o.seed;
    if (o.out_dir)
        c.output_dir = *o.out_dir;
    if (o.heatmap_every)
        c.heatmap_every = *o.heatmap_every;
    return c;
}

}  // namespace

int main(int argc, char **argv)
{
    CLI::App app{"Guided incremental local densification planner"};
    app.require_subcommand(1);

    Overrides run_o, bench_o, heat_o;
    bool run_heatmap = false;
    auto *run = app.add_subcommand("run", "run one planning trial");
    add_common(run, run_o);
    run->add_flag("--heatmap", run_heatmap, "write heatmap snapshots");

    auto *bench = app.add_subcommand("bench", "run a trials x selectors benchmark");
    add_common(bench, bench_o);
    guild::BenchOptions bench_opts;
    std::vector<std::string> selector_names;
    bench->add_option("--trials", bench_opts.trials, "trials per selector");
    bench->add_option("--selectors", selector_names, "selectors to compare")->delimiter(',');
    bench->add_option("--workers", bench_opts.workers, "worker threads (0 = all cores)");
    bench->add_option("--grid-step", bench_opts.grid_step, "sample spacing of the curve grid");
    bench->add_option("--reference-seconds", bench_opts.reference_seconds, "reference budget per seed");
    bench->add_option("--cache", bench_opts.cache_dir, "reference cache directory");

    auto *env = app.add_subcommand("env", "write a builtin environment to a file");
    std::string env_name, env_out;
    std::uint64_t env_seed = 0;
    env->add_option("name", env_name, "builtin environment")->required();
    env->add_option("--seed", env_seed, "environment seed");
    env->add_option("-o,--out", env_out, "output file")->required();

    auto *heat = app.add_subcommand("heatmap", "run one trial and write sample heatmaps");
    add_common(heat, heat_o);

    try
    {
        app.parse(argc, argv);
    }
    catch (const CLI::ParseError &e)
    {
        const int code = app.exit(e);
        return code == 0 ? guild::exit_ok : guild::exit_bad_input;
    }

    try
    {
        if (run->parsed())
        {
            auto config = resolve(run_o);
            config.heatmap = config.heatmap || run_heatmap;
            return guild::cmd_run(config, std::cout, std::cerr);
        }
        if (bench->parsed())
        {
            auto config = resolve(bench_o);
            if (!selector_names.empty())
            {
                bench_opts.selectors.clear();
                for (const auto &name : selector_names)
                {
                    try
                    {
                        bench_opts.selectors.push_back(guild::parse_selector(name));
                    }
                    catch (const std::invalid_argument &e)
                    {
                        throw guild::ConfigError("selectors", e.what());
                    }
                }
            }
            return guild::cmd_bench(config, bench_opts, std::cout, std::cerr);
        }
        if (env->parsed())
            return guild::cmd_env(env_name, env_seed, env_out, std::cerr);
        if (heat->parsed())
            return guild::cmd_heatmap(resolve(heat_o), std::cout, std::cerr);
    }
    catch (const guild::ConfigError &e)
    {
        std::cerr << "config error: " << e.what() << '\n';
        return guild::exit_bad_input;
    }
    catch (const std::exception &e)
    {
        std::cerr << "error: " << e.what() << '\n';
        return guild::exit_bad_input;
    }
    return guild::exit_bad_input;
}
