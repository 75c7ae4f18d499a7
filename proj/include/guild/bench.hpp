#pragma once

#include <algorithm>
#include <atomic>
#include <chrono>
#include <cmath>
#include <cstdint>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <functional>
#include <optional>
#include <sstream>
#include <stdexcept>
#include <string>
#include <thread>
#include <utility>
#include <vector>

#include "guild/environment.hpp"
#include "guild/environment_io.hpp"
#include "guild/errors.hpp"
#include "guild/local_densification.hpp"
#include "guild/planner.hpp"

namespace guild {

/// Relative tolerance for "converged to the optimal cost".
inline constexpr double convergence_tolerance = 0.02;

struct TrialPoint
{
    std::size_t iteration = 0;
    std::size_t samples = 0;
    double best_cost = infinity;
    double wall_time = 0.0;  // seconds since trial start
};

struct TrialRecord
{
    std::string env_name;
    std::string selector;
    std::uint64_t seed = 0;
    std::vector<TrialPoint> points;
    std::optional<std::size_t> converged_at;
    double reference = infinity;

    /// Last recorded cost with samples <= s (infinity before any solution).
    double cost_at(std::size_t s) const
    {
        double cost = infinity;
        for (const auto &p : points)
        {
            if (p.samples > s)
                break;
            cost = p.best_cost;
        }
        return cost;
    }

    double final_cost() const { return points.empty() ? infinity : points.back().best_cost; }
};

/// First sample count whose best cost is within the convergence tolerance of
/// `reference` (closed threshold), or nullopt.
inline std::optional<std::size_t> first_converged(const std::vector<TrialPoint> &points, double reference,
                                                  double tolerance = convergence_tolerance)
{
    const double threshold = reference * (1.0 + tolerance);
    for (const auto &p : points)
        if (p.best_cost <= threshold)
            return p.samples;
    return std::nullopt;
}

inline std::optional<std::size_t> sample_efficiency(const TrialRecord &trial)
{
    if (!(trial.reference < infinity))
        throw std::invalid_argument("trial has no optimal cost reference");
    return first_converged(trial.points, trial.reference);
}

/// Sample efficiency with "never converged" mapped to +inf, for order statistics.
inline double sample_efficiency_value(const TrialRecord &trial)
{
    const auto se = sample_efficiency(trial);
    return se ? static_cast<double>(*se) : infinity;
}

/// Fraction of trials converged by each grid point.
inline std::vector<double> convergence_percentage(const std::vector<TrialRecord> &trials,
                                                  const std::vector<std::size_t> &grid)
{
    if (trials.empty())
        throw std::invalid_argument("convergence percentage needs at least one trial");
    std::vector<double> curve;
    curve.reserve(grid.size());
    for (const auto s : grid)
    {
        std::size_t hits = 0;
        for (const auto &t : trials)
        {
            const auto se = sample_efficiency(t);
            if (se && *se <= s)
                ++hits;
        }
        curve.push_back(static_cast<double>(hits) / static_cast<double>(trials.size()));
    }
    return curve;
}

inline double median(std::vector<double> values)
{
    if (values.empty())
        throw std::invalid_argument("median of an empty set");
    std::sort(values.begin(), values.end());
    const std::size_t n = values.size();
    if (n % 2 == 1)
        return values[n / 2];
    const double lo = values[n / 2 - 1];
    const double hi = values[n / 2];
    if (std::isinf(hi))
        return hi;
    return lo + (hi - lo) / 2.0;
}

/// Median normalized cost per grid point over the trials that have a solution
/// there. Undefined (nullopt) when fewer than half the trials have one.
inline std::vector<std::optional<double>> normalized_cost_curve(const std::vector<TrialRecord> &trials,
                                                                const std::vector<std::size_t> &grid)
{
    std::vector<std::optional<double>> curve;
    curve.reserve(grid.size());
    for (const auto s : grid)
    {
        std::vector<double> values;
        for (const auto &t : trials)
        {
            const double c = t.cost_at(s);
            if (c < infinity)
                values.push_back(c / t.reference);
        }
        if (values.empty() || 2 * values.size() < trials.size())
            curve.emplace_back(std::nullopt);
        else
            curve.emplace_back(median(std::move(values)));
    }
    return curve;
}

/// 1-indexed order-statistic ranks (l, u) of the distribution-free median
/// confidence interval: the symmetric pair (k, n + 1 - k) with the largest k
/// such that P(k <= B <= n - k) >= confidence, B ~ Binomial(n, 1/2).
inline std::pair<std::size_t, std::size_t> median_ci_ranks(std::size_t n, double confidence = 0.95)
{
    if (n < 6)
        throw std::invalid_argument("median confidence interval needs at least 6 values");
    // pmf[i] = C(n, i) / 2^n, built in log space to stay finite for large n.
    std::vector<double> pmf(n + 1);
    for (std::size_t i = 0; i <= n; ++i)
        pmf[i] = std::exp(std::lgamma(static_cast<double>(n) + 1.0) - std::lgamma(static_cast<double>(i) + 1.0) -
                          std::lgamma(static_cast<double>(n - i) + 1.0) - static_cast<double>(n) * std::log(2.0));
    std::size_t best = 0;
    for (std::size_t k = 1; 2 * k <= n; ++k)
    {
        double coverage = 0.0;
        for (std::size_t i = k; i <= n - k; ++i)
            coverage += pmf[i];
        if (coverage >= confidence)
            best = k;
        else
            break;
    }
    if (best == 0)
        throw std::invalid_argument("too few values for the requested confidence");
    return {best, n + 1 - best};
}

/// Nonparametric confidence interval on the median; endpoints are elements of `values`.
inline std::pair<double, double> median_ci(std::vector<double> values, double confidence = 0.95)
{
    const auto [l, u] = median_ci_ranks(values.size(), confidence);
    std::sort(values.begin(), values.end());
    return {values[l - 1], values[u - 1]};
}

/// Sample-location histogram over the translational plane.
struct HeatmapGrid
{
    std::size_t resolution = 100;
    double min_x = 0.0, min_y = 0.0, max_x = 1.0, max_y = 1.0;
    std::vector<std::uint64_t> counts;  // row-major, row 0 = lowest y
    std::uint64_t total = 0;

    HeatmapGrid() = default;

    HeatmapGrid(std::size_t cells, const StateSpace &space)
        : resolution(cells),
          min_x(space.lower_bounds()[0]),
          min_y(space.lower_bounds()[1]),
          max_x(space.upper_bounds()[0]),
          max_y(space.upper_bounds()[1]),
          counts(cells * cells, 0)
    {
        if (cells == 0)
            throw std::invalid_argument("heatmap resolution must be positive");
        if (space.translational_dimension() != 2)
            throw std::invalid_argument("heatmaps need a planar translational space");
    }

    void add(double x, double y)
    {
        const auto cell = [&](double v, double lo, double hi) {
            const auto i = static_cast<std::int64_t>((v - lo) / (hi - lo) * static_cast<double>(resolution));
            return static_cast<std::size_t>(std::clamp<std::int64_t>(i, 0, static_cast<std::int64_t>(resolution) - 1));
        };
        ++counts[cell(y, min_y, max_y) * resolution + cell(x, min_x, max_x)];
        ++total;
    }

    std::uint64_t at(std::size_t ix, std::size_t iy) const { return counts[iy * resolution + ix]; }
};

/// Writes a binary PPM (P6). Cell intensity log(1+count)/log(1+max) maps
/// white (0) to red (1). The top image row is the highest y.
inline void render_heatmap(const HeatmapGrid &grid, const std::string &path, std::size_t pixels_per_cell = 4)
{
    const std::size_t side = grid.resolution * pixels_per_cell;
    const std::uint64_t max_count =
        grid.counts.empty() ? 0 : *std::max_element(grid.counts.begin(), grid.counts.end());
    const double norm = std::log1p(static_cast<double>(max_count));

    std::ofstream out(path, std::ios::binary);
    if (!out)
        throw std::runtime_error("cannot open " + path + " for writing");
    out << "P6\n" << side << ' ' << side << "\n255\n";
    std::vector<unsigned char> row(side * 3);
    for (std::size_t py = 0; py < side; ++py)
    {
        const std::size_t iy = grid.resolution - 1 - py / pixels_per_cell;
        for (std::size_t px = 0; px < side; ++px)
        {
            const std::uint64_t c = grid.at(px / pixels_per_cell, iy);
            const double t = max_count == 0 ? 0.0 : std::log1p(static_cast<double>(c)) / norm;
            const auto fade = static_cast<unsigned char>(std::lround(255.0 * (1.0 - t)));
            row[px * 3 + 0] = 255;
            row[px * 3 + 1] = fade;
            row[px * 3 + 2] = fade;
        }
        out.write(reinterpret_cast<const char *>(row.data()), static_cast<std::streamsize>(row.size()));
    }
    if (!out)
        throw std::runtime_error("failed writing " + path);
}

struct TrialConfig
{
    SelectorConfig selector{};
    std::size_t beacon_count = default_beacon_count;
    std::size_t batch = 50;
    std::size_t sample_budget = 5000;
    std::optional<double> time_budget;  // seconds; makes runs machine-dependent
    std::optional<double> resolution;
    double radius_scale = default_radius_scale;
};

/// Called after every iteration with the planner state and its report.
using TrialObserver = std::function<void(const PlannerState &, const IterationReport &)>;

/// Runs one anytime planning trial until the sample budget is spent.
inline TrialRecord run_trial(const Environment &env, const TrialConfig &config, std::uint64_t seed,
                             double reference = infinity, const TrialObserver &observer = {})
{
    if (config.batch == 0)
        throw std::invalid_argument("batch size must be positive");
    if (config.sample_budget < config.batch)
        throw std::invalid_argument("sample budget must be at least the batch size");

    RadiusPolicy policy;
    policy.eta = config.radius_scale;
    PlannerState ps(env, policy, config.resolution);
    BeaconSet beacons = init_beacons(env, ps.graph, config.beacon_count);
    GuildStrategy strategy(config.selector, std::move(beacons));
    Rng rng(seed);

    TrialRecord record;
    record.env_name = env.name();
    record.selector = to_string(config.selector.kind);
    record.seed = seed;
    record.reference = reference;

    const auto t0 = std::chrono::steady_clock::now();
    while (ps.samples_drawn < config.sample_budget)
    {
        const std::size_t batch = std::min(config.batch, config.sample_budget - ps.samples_drawn);
        const auto report = plan_iteration(ps, strategy, batch, rng);
        const double elapsed = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
        record.points.push_back({report.iteration, report.samples_drawn, report.best_cost, elapsed});
        if (observer)
            observer(ps, report);
        if (config.time_budget && elapsed >= *config.time_budget)
            break;
    }
    if (reference < infinity)
        record.converged_at = first_converged(record.points, reference);
    return record;
}

struct ReferenceOptions
{
    double seconds_per_seed = 60.0;
    std::size_t seeds = 3;
    std::size_t batch = 500;
    std::optional<std::size_t> sample_cap;  // stops a seed early; for tests
    std::uint64_t first_seed = 0x5eed0000ULL;
};

/// Best final cost over several long Informed Set runs.
inline double compute_reference(const Environment &env, const ReferenceOptions &options)
{
    double best = infinity;
    for (std::size_t k = 0; k < options.seeds; ++k)
    {
        PlannerState ps(env);
        InformedStrategy strategy;
        Rng rng(options.first_seed + k);
        const auto t0 = std::chrono::steady_clock::now();
        while (true)
        {
            plan_iteration(ps, strategy, options.batch, rng);
            const double elapsed = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
            if (elapsed >= options.seconds_per_seed)
                break;
            if (options.sample_cap && ps.samples_drawn >= *options.sample_cap)
                break;
        }
        best = std::min(best, ps.best_cost);
    }
    if (!(best < infinity))
        throw ReferenceUnavailableError("no solution found for " + env.name());
    return best;
}

/// Default reference budget per seed: one minute for planar worlds, five for higher dimensions.
inline double default_reference_seconds(const Environment &env)
{
    return env.space().translational_dimension() > 2 ? 300.0 : 60.0;
}

inline std::string format_double(double v)
{
    if (std::isinf(v))
        return v > 0 ? "inf" : "-inf";
    char buf[64];
    std::snprintf(buf, sizeof buf, "%.17g", v);
    return buf;
}

inline std::filesystem::path reference_cache_path(const Environment &env, const std::filesystem::path &cache_dir)
{
    return cache_dir / ("reference_" + env.name() + "_" + hex64(geometry_hash(env)) + ".txt");
}

/// Cached optimal-cost reference keyed by (name, geometry hash). A cache hit
/// returns the stored value bit-exactly.
inline double optimal_cost_reference(const Environment &env, double budget_seconds,
                                     const std::filesystem::path &cache_dir, ReferenceOptions options = {})
{
    if (!(budget_seconds >= 10.0))
        throw std::invalid_argument("reference budget must be at least 10 seconds");
    const auto path = reference_cache_path(env, cache_dir);
    if (std::ifstream in(path); in)
    {
        std::string text;
        in >> text;
        if (!text.empty())
            return std::stod(text);
    }
    options.seconds_per_seed = budget_seconds;
    const double value = compute_reference(env, options);
    std::filesystem::create_directories(cache_dir);
    std::ofstream out(path);
    out << format_double(value) << '\n';
    return value;
}

/// Runs every (selector, seed) pair, `workers` at a time. Results come back
/// ordered by selector then seed, independent of scheduling.
inline std::vector<TrialRecord> run_benchmark(const Environment &env, const std::vector<SelectorConfig> &selectors,
                                              std::size_t trials, const TrialConfig &base, double reference,
                                              std::size_t workers = 0)
{
    if (trials == 0)
        throw std::invalid_argument("need at least one trial");
    const std::size_t jobs = selectors.size() * trials;
    std::vector<TrialRecord> out(jobs);
    std::vector<std::exception_ptr> errors(jobs);
    std::atomic<std::size_t> next{0};
    auto worker = [&] {
        for (std::size_t j = next++; j < jobs; j = next++)
        {
            try
            {
                TrialConfig cfg = base;
                cfg.selector = selectors[j / trials];
                out[j] = run_trial(env, cfg, j % trials, reference);
            }
            catch (...)
            {
                errors[j] = std::current_exception();
            }
        }
    };
    if (workers == 0)
        workers = std::max(1u, std::thread::hardware_concurrency());
    workers = std::min(workers, jobs);
    std::vector<std::jthread> pool;
    for (std::size_t w = 1; w < workers; ++w)
        pool.emplace_back(worker);
    worker();
    pool.clear();
    for (const auto &e : errors)
        if (e)
            std::rethrow_exception(e);
    return out;
}

inline constexpr const char *results_header = "env,selector,seed,iteration,samples,best_cost";

/// One row per (env, selector, seed, iteration). Wall time is deliberately
/// absent so identical configurations give identical files.
inline void write_results(std::ostream &out, const std::vector<TrialRecord> &trials)
{
    out << results_header << '\n';
    for (const auto &t : trials)
        for (const auto &p : t.points)
            out << t.env_name << ',' << t.selector << ',' << t.seed << ',' << p.iteration << ',' << p.samples << ','
                << format_double(p.best_cost) << '\n';
}

inline void write_results(const std::string &path, const std::vector<TrialRecord> &trials)
{
    std::ofstream out(path);
    if (!out)
        throw std::runtime_error("cannot open " + path + " for writing");
    write_results(out, trials);
}

inline void write_timing(const std::string &path, const std::vector<TrialRecord> &trials)
{
    std::ofstream out(path);
    if (!out)
        throw std::runtime_error("cannot open " + path + " for writing");
    out << "env,selector,seed,iteration,samples,wall_time\n";
    for (const auto &t : trials)
        for (const auto &p : t.points)
            out << t.env_name << ',' << t.selector << ',' << t.seed << ',' << p.iteration << ',' << p.samples << ','
                << format_double(p.wall_time) << '\n';
}

/// Per-selector summary row (Table I analog).
struct SelectorSummary
{
    std::string selector;
    std::size_t trials = 0;
    std::size_t converged = 0;
    double median_samples = infinity;
    std::optional<std::pair<double, double>> ci;
    std::vector<double> convergence;
    std::vector<std::optional<double>> normalized_cost;
};

inline std::vector<std::size_t> sample_grid(std::size_t budget, std::size_t step)
{
    std::vector<std::size_t> grid;
    for (std::size_t s = step; s <= budget; s += step)
        grid.push_back(s);
    return grid;
}

inline SelectorSummary summarize(const std::string &selector, const std::vector<TrialRecord> &trials,
                                 const std::vector<std::size_t> &grid)
{
    SelectorSummary s;
    s.selector = selector;
    s.trials = trials.size();
    std::vector<double> efficiency;
    for (const auto &t : trials)
    {
        efficiency.push_back(sample_efficiency_value(t));
        if (std::isfinite(efficiency.back()))
            ++s.converged;
    }
    s.median_samples = median(efficiency);
    if (efficiency.size() >= 6)
        s.ci = median_ci(efficiency);
    s.convergence = convergence_percentage(trials, grid);
    s.normalized_cost = normalized_cost_curve(trials, grid);
    return s;
}

inline void write_summary(const std::string &path, const std::vector<SelectorSummary> &rows)
{
    std::ofstream out(path);
    if (!out)
        throw std::runtime_error("cannot open " + path + " for writing");
    out << "selector,trials,converged,median_samples,ci_low,ci_high\n";
    for (const auto &r : rows)
        out << r.selector << ',' << r.trials << ',' << r.converged << ',' << format_double(r.median_samples) << ','
            << (r.ci ? format_double(r.ci->first) : "NA") << ',' << (r.ci ? format_double(r.ci->second) : "NA")
            << '\n';
}

inline void write_curves(const std::string &path, const std::vector<SelectorSummary> &rows,
                         const std::vector<std::size_t> &grid)
{
    std::ofstream out(path);
    if (!out)
        throw std::runtime_error("cannot open " + path + " for writing");
    out << "selector,samples,convergence_percentage,normalized_cost\n";
    for (const auto &r : rows)
        for (std::size_t i = 0; i < grid.size(); ++i)
            out << r.selector << ',' << grid[i] << ',' << format_double(r.convergence[i]) << ','
                << (r.normalized_cost[i] ? format_double(*r.normalized_cost[i]) : "NA") << '\n';
}

}  // namespace guild
