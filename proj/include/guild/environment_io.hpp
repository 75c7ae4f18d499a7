#pragma once

// Environment files are JSON documents:
//
// {
//   "name": "Forest",
//   "space": { "kind": "RealVector" | "SE2",
//              "lower": [..], "upper": [..],      // translational bounds
//              "angular_weight": 0.3 },           // SE2 only
//   "robot_radius": 0.0,
//   "start": [..], "target": [..],                // full coordinates
//   "obstacles": [ { "type": "circle", "center": [..], "radius": r },
//                  { "type": "box", "min": [..], "max": [..] } ]
// }

#include <cstdint>
#include <fstream>
#include <sstream>
#include <stdexcept>
#include <string>

#include <nlohmann/json.hpp>

#include "guild/environment.hpp"

namespace guild {

using json = nlohmann::json;

inline json environment_to_json(const Environment &env)
{
    const auto &space = env.space();
    const std::size_t n = space.translational_dimension();
    json js;
    js["name"] = env.name();
    js["space"]["kind"] = space.is_se2() ? "SE2" : "RealVector";
    js["space"]["lower"] = std::vector<double>(space.lower_bounds().begin(), space.lower_bounds().begin() + n);
    js["space"]["upper"] = std::vector<double>(space.upper_bounds().begin(), space.upper_bounds().begin() + n);
    if (space.is_se2())
        js["space"]["angular_weight"] = space.angular_weight();
    js["robot_radius"] = env.robot_radius();
    js["start"] = env.start().coords;
    js["target"] = env.target().coords;
    js["obstacles"] = json::array();
    for (const auto &o : env.obstacles())
    {
        if (const auto *c = std::get_if<Circle>(&o))
            js["obstacles"].push_back({{"type", "circle"}, {"center", c->center}, {"radius", c->radius}});
        else
        {
            const auto &b = std::get<AxisAlignedBox>(o);
            js["obstacles"].push_back({{"type", "box"}, {"min", b.min_corner}, {"max", b.max_corner}});
        }
    }
    return js;
}

inline Environment environment_from_json(const json &js)
{
    try
    {
        const auto &sp = js.at("space");
        const std::string kind = sp.at("kind").get<std::string>();
        auto lower = sp.at("lower").get<std::vector<double>>();
        auto upper = sp.at("upper").get<std::vector<double>>();
        StateSpace space = [&] {
            if (kind == "SE2")
                return StateSpace::se2(lower, upper,
                                       sp.value("angular_weight", StateSpace::default_angular_weight));
            if (kind == "RealVector")
                return StateSpace::real_vector(lower, upper);
            throw std::invalid_argument("unknown space kind: " + kind);
        }();

        std::vector<Obstacle> obstacles;
        for (const auto &o : js.value("obstacles", json::array()))
        {
            const std::string type = o.at("type").get<std::string>();
            if (type == "circle")
                obstacles.emplace_back(Circle{o.at("center").get<std::vector<double>>(), o.at("radius").get<double>()});
            else if (type == "box")
                obstacles.emplace_back(
                    AxisAlignedBox{o.at("min").get<std::vector<double>>(), o.at("max").get<std::vector<double>>()});
            else
                throw std::invalid_argument("unknown obstacle type: " + type);
        }
        return Environment(js.value("name", std::string("custom")), std::move(space), std::move(obstacles),
                           State{js.at("start").get<std::vector<double>>()},
                           State{js.at("target").get<std::vector<double>>()}, js.value("robot_radius", 0.0));
    }
    catch (const json::exception &e)
    {
        throw std::invalid_argument(std::string("malformed environment document: ") + e.what());
    }
}

inline void save_environment(const Environment &env, const std::string &path)
{
    std::ofstream out(path);
    if (!out)
        throw std::runtime_error("cannot open " + path + " for writing");
    out << environment_to_json(env).dump(2) << '\n';
    if (!out)
        throw std::runtime_error("failed writing " + path);
}

inline Environment load_environment(const std::string &path)
{
    std::ifstream in(path);
    if (!in)
        throw std::runtime_error("cannot open " + path);
    json js;
    try
    {
        in >> js;
    }
    catch (const json::exception &e)
    {
        throw std::invalid_argument("cannot parse " + path + ": " + e.what());
    }
    return environment_from_json(js);
}

/// 64-bit FNV-1a of the canonical JSON encoding; identifies a geometry.
inline std::uint64_t geometry_hash(const Environment &env)
{
    std::uint64_t h = 14695981039346656037ULL;
    for (const unsigned char ch : environment_to_json(env).dump())
    {
        h ^= ch;
        h *= 1099511628211ULL;
    }
    return h;
}

inline std::string hex64(std::uint64_t v)
{
    std::ostringstream os;
    os << std::hex;
    os.width(16);
    os.fill('0');
    os << v;
    return os.str();
}

}  // namespace guild
