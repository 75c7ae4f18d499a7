#include <gtest/gtest.h>

#include <filesystem>
#include <fstream>

#include "guild/config.hpp"

using namespace guild;

namespace {

std::string failing_field(const json &js)
{
    try
    {
        config_from_json(js);
    }
    catch (const ConfigError &e)
    {
        return e.field();
    }
    return "";
}

}  // namespace

TEST(Config, DefaultsAreValid)
{
    const RunConfig c;
    EXPECT_NO_THROW(validate(c));
    EXPECT_EQ(config_from_json(json::object()), c);
    EXPECT_EQ(c.heatmap_every, 500u);
    EXPECT_EQ(c.batch, 50u);
    EXPECT_EQ(c.beacon_count, 100u);
    EXPECT_DOUBLE_EQ(c.gamma, 0.1);
}

TEST(Config, RoundTrip)
{
    RunConfig c;
    c.environment = {std::nullopt, 0, std::string("world.json")};
    c.selector = SelectorKind::Bandit;
    c.gamma = 0.25;
    c.beacon_count = 12;
    c.batch = 20;
    c.sample_budget = 900;
    c.time_budget = 3.5;
    c.planner_seed = 77;
    c.output_dir = "elsewhere";
    c.heatmap = true;
    c.heatmap_every = 100;
    c.heatmap_resolution = 64;
    const RunConfig back = config_from_json(config_to_json(c));
    EXPECT_EQ(back, c);
    EXPECT_EQ(config_to_json(back), config_to_json(c));

    RunConfig d;
    d.environment = {std::string("ClutterR7"), 4, std::nullopt};
    EXPECT_EQ(config_from_json(json::parse(config_to_json(d).dump())), d);
}

TEST(Config, ErrorsNameTheField)
{
    EXPECT_EQ(failing_field(json::parse(R"({"sample_budget": 0})")), "sample_budget");
    EXPECT_EQ(failing_field(json::parse(R"({"batch": 0})")), "batch");
    EXPECT_EQ(failing_field(json::parse(R"({"batch": -3})")), "batch");
    EXPECT_EQ(failing_field(json::parse(R"({"batch": "many"})")), "batch");
    EXPECT_EQ(failing_field(json::parse(R"({"selector": {"kind": "Random"}})")), "selector.kind");
    EXPECT_EQ(failing_field(json::parse(R"({"selector": {"gamma": 0}})")), "selector.gamma");
    EXPECT_EQ(failing_field(json::parse(R"({"selector": {"beacon_count": 0}})")), "selector.beacon_count");
    EXPECT_EQ(failing_field(json::parse(R"({"environment": {"builtin": "Foo"}})")), "environment.builtin");
    EXPECT_EQ(failing_field(json::parse(R"({"environment": {}})")), "environment");
    EXPECT_EQ(failing_field(json::parse(R"({"environment": {"builtin": "Forest", "file": "x.json"}})")),
              "environment");
    EXPECT_EQ(failing_field(json::parse(R"({"time_budget": -1})")), "time_budget");
    EXPECT_EQ(failing_field(json::parse(R"({"output_dir": ""})")), "output_dir");
    EXPECT_EQ(failing_field(json::parse(R"({"heatmap": {"every": 0}})")), "heatmap.every");
    EXPECT_EQ(failing_field(json::parse(R"([1, 2])")), "<root>");
}

TEST(Config, LoadFromFile)
{
    const auto dir = std::filesystem::temp_directory_path() / "guild_config_test";
    std::filesystem::create_directories(dir);
    const auto good = dir / "good.json";
    std::ofstream(good) << R"({"environment": {"builtin": "Trap", "seed": 3}, "selector": {"kind": "Greedy"}})";
    const auto c = load_config(good.string());
    EXPECT_EQ(c.environment.builtin, "Trap");
    EXPECT_EQ(c.environment.seed, 3u);
    EXPECT_EQ(c.selector, SelectorKind::Greedy);

    const auto bad = dir / "bad.json";
    std::ofstream(bad) << "{ nope";
    EXPECT_THROW(load_config(bad.string()), ConfigError);
    EXPECT_THROW(load_config((dir / "missing.json").string()), ConfigError);
}

TEST(Config, ResolveEnvironment)
{
    EXPECT_EQ(resolve_environment({std::string("Trap"), 0, std::nullopt}).name(), "Trap");
    const auto dir = std::filesystem::temp_directory_path() / "guild_config_test";
    std::filesystem::create_directories(dir);
    const auto path = (dir / "maze.json").string();
    save_environment(make_environment("SE2Maze", 1), path);
    EXPECT_TRUE(resolve_environment({std::nullopt, 0, path}).space().is_se2());
}
