#pragma once

// Run configuration files are JSON:
//
// {
//   "environment": { "builtin": "Trap", "seed": 0 }     // or { "file": "world.json" }
//   "selector": { "kind": "Uniform", "gamma": 0.1, "beacon_count": 100 },
//   "batch": 50,
//   "sample_budget": 5000,
//   "time_budget": null,                                // seconds, optional
//   "planner_seed": 0,
//   "output_dir": "guild_out",
//   "heatmap": { "enabled": false, "every": 500, "resolution": 100 }
// }
//
// Every key is optional; missing keys take the defaults above.

#include <cstdint>
#include <fstream>
#include <optional>
#include <string>

#include <nlohmann/json.hpp>

#include "guild/environment.hpp"
#include "guild/environment_io.hpp"
#include "guild/errors.hpp"
#include "guild/local_densification.hpp"

namespace guild {

struct EnvironmentSource
{
    std::optional<std::string> builtin;
    std::uint64_t seed = 0;
    std::optional<std::string> file;

    friend bool operator==(const EnvironmentSource &, const EnvironmentSource &) = default;
};

struct RunConfig
{
    EnvironmentSource environment{std::string("Forest"), 0, std::nullopt};
    SelectorKind selector = SelectorKind::Uniform;
    double gamma = default_bandit_gamma;
    std::size_t beacon_count = default_beacon_count;
    std::size_t batch = 50;
    std::size_t sample_budget = 5000;
    std::optional<double> time_budget;
    std::uint64_t planner_seed = 0;
    std::string output_dir = "guild_out";
    bool heatmap = false;
    std::size_t heatmap_every = 500;
    std::size_t heatmap_resolution = 100;

    friend bool operator==(const RunConfig &, const RunConfig &) = default;
};

/// Throws ConfigError naming the first offending field.
inline void validate(const RunConfig &c)
{
    if (c.environment.builtin.has_value() == c.environment.file.has_value())
        throw ConfigError("environment", "exactly one of 'builtin' or 'file' must be given");
    if (c.environment.builtin)
    {
        try
        {
            EnvironmentName::parse(*c.environment.builtin);
        }
        catch (const std::invalid_argument &e)
        {
            throw ConfigError("environment.builtin", e.what());
        }
    }
    if (!(c.gamma > 0.0 && c.gamma <= 1.0))
        throw ConfigError("selector.gamma", "must lie in (0, 1]");
    if (c.beacon_count == 0)
        throw ConfigError("selector.beacon_count", "must be positive");
    if (c.batch == 0)
        throw ConfigError("batch", "must be positive");
    if (c.sample_budget < c.batch)
        throw ConfigError("sample_budget", "must be at least the batch size");
    if (c.time_budget && !(*c.time_budget > 0.0))
        throw ConfigError("time_budget", "must be positive");
    if (c.output_dir.empty())
        throw ConfigError("output_dir", "must not be empty");
    if (c.heatmap_every == 0)
        throw ConfigError("heatmap.every", "must be positive");
    if (c.heatmap_resolution == 0)
        throw ConfigError("heatmap.resolution", "must be positive");
}

inline json config_to_json(const RunConfig &c)
{
    json js;
    if (c.environment.builtin)
        js["environment"] = {{"builtin", *c.environment.builtin}, {"seed", c.environment.seed}};
    else if (c.environment.file)
        js["environment"] = {{"file", *c.environment.file}};
    js["selector"] = {{"kind", to_string(c.selector)}, {"gamma", c.gamma}, {"beacon_count", c.beacon_count}};
    js["batch"] = c.batch;
    js["sample_budget"] = c.sample_budget;
    js["time_budget"] = c.time_budget ? json(*c.time_budget) : json(nullptr);
    js["planner_seed"] = c.planner_seed;
    js["output_dir"] = c.output_dir;
    js["heatmap"] = {{"enabled", c.heatmap}, {"every", c.heatmap_every}, {"resolution", c.heatmap_resolution}};
    return js;
}

namespace detail {

template <class T>
T field(const json &obj, const char *key, const std::string &path, T fallback)
{
    if (!obj.contains(key) || obj.at(key).is_null())
        return fallback;
    try
    {
        return obj.at(key).get<T>();
    }
    catch (const json::exception &)
    {
        throw ConfigError(path, "has the wrong type");
    }
}

inline std::size_t count_field(const json &obj, const char *key, const std::string &path, std::size_t fallback)
{
    if (!obj.contains(key) || obj.at(key).is_null())
        return fallback;
    const auto &v = obj.at(key);
    if (!v.is_number_integer() || v.get<std::int64_t>() < 0)
        throw ConfigError(path, "must be a nonnegative integer");
    return v.get<std::size_t>();
}

}  // namespace detail

inline RunConfig config_from_json(const json &js)
{
    if (!js.is_object())
        throw ConfigError("<root>", "configuration must be a JSON object");
    RunConfig c;
    if (js.contains("environment"))
    {
        const auto &e = js.at("environment");
        if (!e.is_object())
            throw ConfigError("environment", "must be an object");
        c.environment.builtin = std::nullopt;
        if (e.contains("builtin"))
            c.environment.builtin = detail::field<std::string>(e, "builtin", "environment.builtin", "");
        if (e.contains("file"))
            c.environment.file = detail::field<std::string>(e, "file", "environment.file", "");
        c.environment.seed = detail::count_field(e, "seed", "environment.seed", 0);
    }
    if (js.contains("selector"))
    {
        const auto &s = js.at("selector");
        if (!s.is_object())
            throw ConfigError("selector", "must be an object");
        const auto kind = detail::field<std::string>(s, "kind", "selector.kind", to_string(c.selector));
        try
        {
            c.selector = parse_selector(kind);
        }
        catch (const std::invalid_argument &e)
        {
            throw ConfigError("selector.kind", e.what());
        }
        c.gamma = detail::field<double>(s, "gamma", "selector.gamma", c.gamma);
        c.beacon_count = detail::count_field(s, "beacon_count", "selector.beacon_count", c.beacon_count);
    }
    c.batch = detail::count_field(js, "batch", "batch", c.batch);
    c.sample_budget = detail::count_field(js, "sample_budget", "sample_budget", c.sample_budget);
    if (js.contains("time_budget") && !js.at("time_budget").is_null())
        c.time_budget = detail::field<double>(js, "time_budget", "time_budget", 0.0);
    c.planner_seed = detail::count_field(js, "planner_seed", "planner_seed", c.planner_seed);
    c.output_dir = detail::field<std::string>(js, "output_dir", "output_dir", c.output_dir);
    if (js.contains("heatmap"))
    {
        const auto &h = js.at("heatmap");
        if (!h.is_object())
            throw ConfigError("heatmap", "must be an object");
        c.heatmap = detail::field<bool>(h, "enabled", "heatmap.enabled", c.heatmap);
        c.heatmap_every = detail::count_field(h, "every", "heatmap.every", c.heatmap_every);
        c.heatmap_resolution = detail::count_field(h, "resolution", "heatmap.resolution", c.heatmap_resolution);
    }
    validate(c);
    return c;
}

inline RunConfig load_config(const std::string &path)
{
    std::ifstream in(path);
    if (!in)
        throw ConfigError("<file>", "cannot open " + path);
    json js;
    try
    {
        in >> js;
    }
    catch (const json::exception &e)
    {
        throw ConfigError("<file>", std::string("not valid JSON: ") + e.what());
    }
    return config_from_json(js);
}

inline Environment resolve_environment(const EnvironmentSource &src)
{
    if (src.file)
        return load_environment(*src.file);
    return make_environment(*src.builtin, src.seed);
}

}  // namespace guild
