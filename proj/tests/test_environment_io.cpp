#include <gtest/gtest.h>

#include <filesystem>
#include <fstream>

#include "guild/environment_io.hpp"

using namespace guild;
namespace fs = std::filesystem;

namespace {

fs::path temp_file(const std::string &name)
{
    const auto dir = fs::temp_directory_path() / "guild_io_test";
    fs::create_directories(dir);
    return dir / name;
}

}  // namespace

TEST(EnvironmentIo, RoundTripsEveryWorld)
{
    for (const std::string name : {"Forest", "TwoWall", "Trap", "SE2Maze", "ClutterR7"})
    {
        const auto env = make_environment(name, 7);
        const auto path = temp_file(name + ".json");
        save_environment(env, path.string());
        const auto back = load_environment(path.string());
        EXPECT_EQ(back.name(), env.name());
        EXPECT_EQ(back.space(), env.space());
        EXPECT_EQ(back.obstacles(), env.obstacles());
        EXPECT_EQ(back.start(), env.start());
        EXPECT_EQ(back.target(), env.target());
        EXPECT_EQ(back.robot_radius(), env.robot_radius());
        EXPECT_EQ(geometry_hash(back), geometry_hash(env));
    }
}

TEST(EnvironmentIo, Se2FileDeclaresKind)
{
    const auto js = environment_to_json(make_environment("SE2Maze", 0));
    EXPECT_EQ(js.at("space").at("kind"), "SE2");
    EXPECT_EQ(js.at("space").at("lower").size(), 2u);
    EXPECT_EQ(js.at("robot_radius"), 0.25);
}

TEST(EnvironmentIo, HandWrittenDocument)
{
    const json js = json::parse(R"({
        "space": {"kind": "RealVector", "lower": [0, 0], "upper": [4, 4]},
        "start": [0.5, 0.5], "target": [3.5, 3.5],
        "obstacles": [{"type": "box", "min": [1, 1], "max": [3, 3]},
                      {"type": "circle", "center": [3.5, 0.5], "radius": 0.2}]
    })");
    const auto env = environment_from_json(js);
    EXPECT_EQ(env.name(), "custom");
    EXPECT_EQ(env.obstacles().size(), 2u);
    EXPECT_FALSE(env.is_state_valid(State{{2.0, 2.0}}));
    EXPECT_EQ(env.robot_radius(), 0.0);
}

TEST(EnvironmentIo, MalformedDocumentsRejected)
{
    EXPECT_THROW(environment_from_json(json::parse(R"({"space": {"kind": "Torus"}})")), std::invalid_argument);
    EXPECT_THROW(environment_from_json(json::parse(R"({"start": [0, 0]})")), std::invalid_argument);
    EXPECT_THROW(environment_from_json(json::parse(R"({
        "space": {"kind": "RealVector", "lower": [0, 0], "upper": [4, 4]},
        "start": [0.5, 0.5], "target": [3.5, 3.5],
        "obstacles": [{"type": "cone"}]})")),
                 std::invalid_argument);
    // Start inside an obstacle violates the environment contract.
    EXPECT_THROW(environment_from_json(json::parse(R"({
        "space": {"kind": "RealVector", "lower": [0, 0], "upper": [4, 4]},
        "start": [2, 2], "target": [3.5, 3.5],
        "obstacles": [{"type": "circle", "center": [2, 2], "radius": 1}]})")),
                 std::invalid_argument);

    const auto bad = temp_file("bad.json");
    std::ofstream(bad) << "{ not json";
    EXPECT_THROW(load_environment(bad.string()), std::invalid_argument);
    EXPECT_THROW(load_environment(temp_file("missing.json").string() + ".nope"), std::runtime_error);
}

TEST(GeometryHash, SensitiveToGeometry)
{
    EXPECT_EQ(geometry_hash(make_environment("Forest", 1)), geometry_hash(make_environment("Forest", 1)));
    EXPECT_NE(geometry_hash(make_environment("Forest", 1)), geometry_hash(make_environment("Forest", 2)));
    EXPECT_EQ(hex64(0xabcULL), "0000000000000abc");
}
