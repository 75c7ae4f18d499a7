// Plans on the Forest world with the Uniform beacon selector and prints
// every improvement.

#include <cstdio>

#include "guild/guild.hpp"

int main()
{
    using namespace guild;
    const Environment env = make_environment("Forest", 1);

    PlannerState ps(env);
    BeaconSet beacons = init_beacons(env, ps.graph, default_beacon_count);
    GuildStrategy strategy(SelectorConfig{SelectorKind::Uniform, default_bandit_gamma}, std::move(beacons));
    Rng rng(7);

    std::printf("straight line %.4f\n", distance(env.space(), env.start(), env.target()));
    while (ps.samples_drawn < 3000)
    {
        const auto report = plan_iteration(ps, strategy, 50, rng);
        if (report.improved)
            std::printf("samples %5zu  cost %.4f\n", report.samples_drawn, report.best_cost);
    }
    std::printf("path has %zu states, %zu edge checks, %zu selector fallbacks\n", ps.best_path ? ps.best_path->states.size() : 0,
                ps.graph.edge_checks(), strategy.fallbacks());
}
