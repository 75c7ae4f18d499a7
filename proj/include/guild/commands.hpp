#pragma once

#include <algorithm>
#include <cstdlib>
#include <filesystem>
#include <iomanip>
#include <ostream>
#include <sstream>
#include <string>
#include <vector>

#include "guild/bench.hpp"
#include "guild/config.hpp"
#include "guild/environment_io.hpp"

namespace guild {

enum ExitCode : int
{
    exit_ok = 0,
    exit_bad_input = 1,
    exit_no_solution = 2,
};

inline constexpr const char *output_dir_variable = "GUILD_OUTPUT_DIR";

/// Applies the output-directory environment override, if set.
inline void apply_environment_overrides(RunConfig &config)
{
    if (const char *dir = std::getenv(output_dir_variable); dir && *dir)
        config.output_dir = dir;
}

inline TrialConfig trial_config(const RunConfig &c)
{
    TrialConfig t;
    t.selector = SelectorConfig{c.selector, c.gamma};
    t.beacon_count = c.beacon_count;
    t.batch = c.batch;
    t.sample_budget = c.sample_budget;
    t.time_budget = c.time_budget;
    return t;
}

/// Accumulates sample locations and writes a snapshot every `every` samples.
class HeatmapRecorder
{
public:
    HeatmapRecorder(const Environment &env, std::size_t resolution, std::size_t every, std::filesystem::path dir)
        : grid_(resolution, env.space()), every_(every), next_(every), dir_(std::move(dir))
    {
    }

    void operator()(const PlannerState &ps, const IterationReport &report)
    {
        for (auto v = report.first_added; v < ps.graph.size(); ++v)
        {
            const auto x = ps.graph.coords(v);
            grid_.add(x[0], x[1]);
        }
        while (report.samples_drawn >= next_)
        {
            std::ostringstream name;
            name << "heatmap_" << std::setw(6) << std::setfill('0') << next_ << ".ppm";
            render_heatmap(grid_, (dir_ / name.str()).string());
            written_.push_back(dir_ / name.str());
            next_ += every_;
        }
    }

    const std::vector<std::filesystem::path> &written() const noexcept { return written_; }
    const HeatmapGrid &grid() const noexcept { return grid_; }

private:
    HeatmapGrid grid_;
    std::size_t every_;
    std::size_t next_;
    std::filesystem::path dir_;
    std::vector<std::filesystem::path> written_;
};

/// Runs one trial, streaming improvements to `out`. Writes results.csv,
/// timing.csv and optional heatmap snapshots into the output directory.
inline int cmd_run(const RunConfig &config, std::ostream &out, std::ostream &err)
{
    try
    {
        validate(config);
        const Environment env = resolve_environment(config.environment);
        const std::filesystem::path dir(config.output_dir);
        std::filesystem::create_directories(dir);

        std::optional<HeatmapRecorder> heatmap;
        if (config.heatmap)
        {
            if (env.space().translational_dimension() != 2)
                throw ConfigError("heatmap.enabled", "heatmaps need a planar environment");
            heatmap.emplace(env, config.heatmap_resolution, config.heatmap_every, dir);
        }
        const auto observer = [&](const PlannerState &ps, const IterationReport &report) {
            if (report.improved)
                out << "improved iteration=" << report.iteration << " samples=" << report.samples_drawn
                    << " cost=" << format_double(report.best_cost) << '\n';
            if (heatmap)
                (*heatmap)(ps, report);
        };
        const TrialRecord record = run_trial(env, trial_config(config), config.planner_seed, infinity, observer);
        write_results((dir / "results.csv").string(), {record});
        write_timing((dir / "timing.csv").string(), {record});
        if (!(record.final_cost() < infinity))
        {
            out << "no solution within budget\n";
            return exit_no_solution;
        }
        out << "final cost=" << format_double(record.final_cost()) << '\n';
        return exit_ok;
    }
    catch (const ConfigError &e)
    {
        err << "config error: " << e.what() << '\n';
        return exit_bad_input;
    }
    catch (const std::invalid_argument &e)
    {
        err << "invalid input: " << e.what() << '\n';
        return exit_bad_input;
    }
    catch (const std::runtime_error &e)
    {
        err << "error: " << e.what() << '\n';
        return exit_bad_input;
    }
}

struct BenchOptions
{
    std::size_t trials = 100;
    std::vector<SelectorKind> selectors{SelectorKind::InformedSet, SelectorKind::Uniform, SelectorKind::Greedy,
                                        SelectorKind::Bandit};
    std::size_t workers = 0;
    std::size_t grid_step = 100;
    std::optional<double> reference_seconds;
    std::string cache_dir = "guild_cache";
};

struct BenchOutcome
{
    double reference = infinity;
    std::vector<TrialRecord> trials;
    std::vector<SelectorSummary> summaries;
    std::vector<std::size_t> grid;
};

/// The benchmark grid behind `cmd_bench`, returned for programmatic use.
inline BenchOutcome run_bench(const RunConfig &config, const BenchOptions &options, std::ostream &log)
{
    validate(config);
    if (options.trials == 0)
        throw ConfigError("trials", "must be at least 1");
    if (options.selectors.empty())
        throw ConfigError("selectors", "must name at least one selector");
    if (options.grid_step == 0)
        throw ConfigError("grid_step", "must be positive");
    const Environment env = resolve_environment(config.environment);

    BenchOutcome outcome;
    const double seconds = options.reference_seconds.value_or(default_reference_seconds(env));
    log << "reference: " << env.name() << " (" << seconds << " s per seed, cached in " << options.cache_dir
        << ")\n";
    outcome.reference = optimal_cost_reference(env, seconds, options.cache_dir);
    log << "reference cost " << format_double(outcome.reference) << '\n';

    std::vector<SelectorConfig> selectors;
    for (auto kind : options.selectors)
        selectors.push_back({kind, config.gamma});
    outcome.trials =
        run_benchmark(env, selectors, options.trials, trial_config(config), outcome.reference, options.workers);
    outcome.grid = sample_grid(config.sample_budget, options.grid_step);

    if (options.trials < 6)
        log << "warning: " << options.trials << " trials per selector; confidence intervals need at least 6\n";
    for (std::size_t k = 0; k < selectors.size(); ++k)
    {
        const std::vector<TrialRecord> group(outcome.trials.begin() + static_cast<std::ptrdiff_t>(k * options.trials),
                                             outcome.trials.begin() +
                                                 static_cast<std::ptrdiff_t>((k + 1) * options.trials));
        outcome.summaries.push_back(summarize(to_string(selectors[k].kind), group, outcome.grid));
    }
    return outcome;
}

inline void print_summary(std::ostream &out, const BenchOutcome &outcome)
{
    out << std::left << std::setw(14) << "selector" << std::setw(12) << "converged" << std::setw(10) << "median"
        << "95% CI\n";
    for (const auto &s : outcome.summaries)
    {
        out << std::setw(14) << s.selector << std::setw(12)
            << (std::to_string(s.converged) + "/" + std::to_string(s.trials)) << std::setw(10)
            << format_double(s.median_samples);
        if (s.ci)
            out << '(' << format_double(s.ci->first) << ", " << format_double(s.ci->second) << ')';
        else
            out << "n/a";
        out << '\n';
    }
}

inline int cmd_bench(const RunConfig &config, const BenchOptions &options, std::ostream &out, std::ostream &err)
{
    try
    {
        const BenchOutcome outcome = run_bench(config, options, err);
        const std::filesystem::path dir(config.output_dir);
        std::filesystem::create_directories(dir);
        write_results((dir / "results.csv").string(), outcome.trials);
        write_timing((dir / "timing.csv").string(), outcome.trials);
        write_summary((dir / "summary.csv").string(), outcome.summaries);
        write_curves((dir / "curves.csv").string(), outcome.summaries, outcome.grid);
        print_summary(out, outcome);
        return exit_ok;
    }
    catch (const ConfigError &e)
    {
        err << "config error: " << e.what() << '\n';
        return exit_bad_input;
    }
    catch (const std::invalid_argument &e)
    {
        err << "invalid input: " << e.what() << '\n';
        return exit_bad_input;
    }
    catch (const ReferenceUnavailableError &e)
    {
        err << "reference unavailable: " << e.what() << '\n';
        return exit_no_solution;
    }
    catch (const std::runtime_error &e)
    {
        err << "error: " << e.what() << '\n';
        return exit_bad_input;
    }
}

/// A run that always records heatmap snapshots; prints the files written.
inline int cmd_heatmap(RunConfig config, std::ostream &out, std::ostream &err)
{
    config.heatmap = true;
    std::ostringstream events;
    const int code = cmd_run(config, events, err);
    if (code == exit_bad_input)
        return code;
    std::vector<std::string> files;
    for (const auto &entry : std::filesystem::directory_iterator(config.output_dir))
        if (entry.path().extension() == ".ppm")
            files.push_back(entry.path().string());
    std::sort(files.begin(), files.end());
    for (const auto &f : files)
        out << f << '\n';
    return code;
}

inline int cmd_env(const std::string &name, std::uint64_t seed, const std::string &out_path, std::ostream &err)
{
    try
    {
        save_environment(make_environment(name, seed), out_path);
        return exit_ok;
    }
    catch (const std::exception &e)
    {
        err << "env: " << e.what() << '\n';
        return exit_bad_input;
    }
}

}  // namespace guild
