#pragma once

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <optional>
#include <random>
#include <stdexcept>
#include <string>
#include <vector>

#include "guild/environment.hpp"
#include "guild/errors.hpp"
#include "guild/planner.hpp"
#include "guild/sampling.hpp"

namespace guild {

enum class SelectorKind
{
    InformedSet,
    Uniform,
    Greedy,
    Bandit
};

inline constexpr double default_bandit_gamma = 0.1;
inline constexpr std::size_t default_beacon_count = 100;

inline std::string to_string(SelectorKind kind)
{
    switch (kind)
    {
    case SelectorKind::InformedSet: return "InformedSet";
    case SelectorKind::Uniform: return "Uniform";
    case SelectorKind::Greedy: return "Greedy";
    case SelectorKind::Bandit: return "Bandit";
    }
    return "";
}

/// Accepts the canonical names plus the short "IS".
inline SelectorKind parse_selector(const std::string &text)
{
    if (text == "InformedSet" || text == "IS")
        return SelectorKind::InformedSet;
    if (text == "Uniform")
        return SelectorKind::Uniform;
    if (text == "Greedy")
        return SelectorKind::Greedy;
    if (text == "Bandit")
        return SelectorKind::Bandit;
    throw std::invalid_argument("unknown selector: " + text);
}

struct Beacon
{
    VertexId vertex = start_vertex;
    double weight = 1.0;  // EXP3 weight
};

/// Beacon 0 is always the start vertex.
struct BeaconSet
{
    std::vector<Beacon> beacons;

    std::size_t size() const noexcept { return beacons.size(); }
    const Beacon &operator[](std::size_t i) const { return beacons[i]; }
    Beacon &operator[](std::size_t i) { return beacons[i]; }
};

/// Adds `count` collision-free Halton states (index 1, 2, ...) scaled to the
/// space bounds to the graph and returns them with v_s prepended.
inline BeaconSet init_beacons(const Environment &env, Graph &graph, std::size_t count)
{
    if (count == 0)
        throw std::invalid_argument("beacon count must be positive");
    const auto &space = env.space();
    std::vector<State> states;
    for (std::uint64_t index = 1; states.size() < count; ++index)
    {
        if (index > 100 * count)
            throw EnvironmentTooClutteredError("found only " + std::to_string(states.size()) + " of " +
                                               std::to_string(count) + " collision-free beacons");
        auto unit = halton_sequence(index, space.dimension());
        for (std::size_t i = 0; i < unit.size(); ++i)
            unit[i] = space.lower_bounds()[i] + unit[i] * (space.upper_bounds()[i] - space.lower_bounds()[i]);
        State x = space.make_state(std::move(unit));
        if (env.is_state_valid(x))
            states.push_back(std::move(x));
    }
    const VertexId first = graph.add_vertices(states);
    BeaconSet set;
    set.beacons.push_back({start_vertex, 1.0});
    for (std::size_t i = 0; i < count; ++i)
        set.beacons.push_back({static_cast<VertexId>(first + i), 1.0});
    return set;
}

/// Read-only view of what a selector needs from the planner.
struct SelectionContext
{
    const Graph &graph;
    const SearchTree &tree;
    double best_cost;
};

/// Expanded in the current tree and g(b) + h(b, v_t) <= c.
inline bool is_eligible(const SelectionContext &ctx, VertexId b)
{
    if (!ctx.tree.is_expanded(b))
        return false;
    const auto &space = ctx.graph.space();
    return ctx.tree.cost_to_come(b) + heuristic(space, ctx.graph.coords(b), ctx.graph.coords(target_vertex)) <=
           ctx.best_cost;
}

inline std::vector<std::size_t> eligible_beacons(const BeaconSet &beacons, const SelectionContext &ctx)
{
    std::vector<std::size_t> out;
    for (std::size_t i = 0; i < beacons.size(); ++i)
        if (is_eligible(ctx, beacons[i].vertex))
            out.push_back(i);
    return out;
}

inline LocalSubsets local_subsets_for(const SelectionContext &ctx, VertexId b)
{
    const auto &graph = ctx.graph;
    const auto &space = graph.space();
    return LocalSubsets::make(translational(space, graph.state(start_vertex)), translational(space, graph.state(b)),
                              translational(space, graph.state(target_vertex)), ctx.tree.cost_to_come(b),
                              ctx.best_cost);
}

/// Potential improvement over set size: (c - h(v_s,b) - h(b,v_t)) / measure.
/// Zero-measure subsets score -inf.
inline double greedy_weight(double best_cost, double h_start_beacon, double h_beacon_target, double measure)
{
    if (!(measure > 0.0))
        return -infinity;
    return (best_cost - h_start_beacon - h_beacon_target) / measure;
}

struct GreedyCandidate
{
    std::size_t index;
    VertexId vertex;
    double weight;
};

/// Argmax of weight, ties to the smaller vertex id. Returns nullopt for an empty list.
inline std::optional<std::size_t> greedy_argmax(const std::vector<GreedyCandidate> &candidates)
{
    std::optional<std::size_t> best;
    for (std::size_t k = 0; k < candidates.size(); ++k)
    {
        if (!best)
        {
            best = k;
            continue;
        }
        const auto &cur = candidates[*best];
        const auto &c = candidates[k];
        if (c.weight > cur.weight || (c.weight == cur.weight && c.vertex < cur.vertex))
            best = k;
    }
    return best;
}

/// EXP3 distribution over the eligible arms only:
/// p_i = (1 - gamma) w_i / sum(w) + gamma / K.
inline std::vector<double> bandit_probabilities(const BeaconSet &beacons, const std::vector<std::size_t> &eligible,
                                                double gamma)
{
    double total = 0.0;
    for (auto i : eligible)
        total += beacons[i].weight;
    const double k = static_cast<double>(eligible.size());
    std::vector<double> p;
    p.reserve(eligible.size());
    for (auto i : eligible)
        p.push_back((1.0 - gamma) * beacons[i].weight / total + gamma / k);
    return p;
}

struct Selection
{
    std::size_t index = 0;        // into the beacon set
    double probability = 1.0;     // probability the selector assigned to this choice
    std::size_t eligible_count = 1;
};

struct SelectorConfig
{
    SelectorKind kind = SelectorKind::Uniform;
    double gamma = default_bandit_gamma;
};

template <class Urbg>
Selection select_beacon(const SelectorConfig &config, const BeaconSet &beacons, const SelectionContext &ctx,
                        Urbg &rng)
{
    if (!(ctx.best_cost < infinity))
        throw std::logic_error("beacon selection requires an existing solution");
    if (config.kind == SelectorKind::InformedSet)
        return Selection{0, 1.0, 1};

    auto eligible = eligible_beacons(beacons, ctx);
    if (eligible.empty())
        eligible.push_back(0);
    const std::size_t k = eligible.size();

    switch (config.kind)
    {
    case SelectorKind::Uniform: {
        const auto pick = std::uniform_int_distribution<std::size_t>(0, k - 1)(rng);
        return Selection{eligible[pick], 1.0 / static_cast<double>(k), k};
    }
    case SelectorKind::Greedy: {
        const auto &space = ctx.graph.space();
        const auto vs = ctx.graph.coords(start_vertex);
        const auto vt = ctx.graph.coords(target_vertex);
        std::vector<GreedyCandidate> candidates;
        for (auto i : eligible)
        {
            const VertexId b = beacons[i].vertex;
            const auto vb = ctx.graph.coords(b);
            const double m = local_subsets_for(ctx, b).measure();
            candidates.push_back(
                {i, b, greedy_weight(ctx.best_cost, heuristic(space, vs, vb), heuristic(space, vb, vt), m)});
        }
        return Selection{candidates[*greedy_argmax(candidates)].index, 1.0, k};
    }
    case SelectorKind::Bandit: {
        const auto p = bandit_probabilities(beacons, eligible, config.gamma);
        std::discrete_distribution<std::size_t> dist(p.begin(), p.end());
        const auto pick = dist(rng);
        return Selection{eligible[pick], p[pick], k};
    }
    case SelectorKind::InformedSet: break;
    }
    return Selection{0, 1.0, 1};
}

inline constexpr double min_bandit_weight = 1e-12;
inline constexpr double max_bandit_weight = 1e12;

/// Fractional improvement (prev - new) / prev, zero without improvement.
inline double bandit_reward(double previous_cost, double new_cost)
{
    if (!(previous_cost < infinity) || !(previous_cost > 0.0) || !(new_cost < previous_cost))
        return 0.0;
    return (previous_cost - new_cost) / previous_cost;
}

/// EXP3 update for the chosen arm with importance-weighted reward r / p.
inline void bandit_update(BeaconSet &beacons, const Selection &chosen, double previous_cost, double new_cost,
                          double gamma)
{
    if (!(chosen.probability > 0.0))
        throw std::logic_error("bandit update with non-positive selection probability");
    const double reward = bandit_reward(previous_cost, new_cost);
    if (reward == 0.0)
        return;
    const double estimate = reward / chosen.probability;
    auto &w = beacons[chosen.index].weight;
    w *= std::exp(gamma * estimate / static_cast<double>(chosen.eligible_count));

    double largest = 0.0;
    for (const auto &b : beacons.beacons)
        largest = std::max(largest, b.weight);
    if (largest > max_bandit_weight || !std::isfinite(largest))
    {
        for (auto &b : beacons.beacons)
            b.weight = std::isfinite(b.weight) ? b.weight / largest : 1.0;
    }
    for (auto &b : beacons.beacons)
        b.weight = std::clamp(b.weight, min_bandit_weight, max_bandit_weight);
}

/// One record per post-solution densification step.
struct SelectionRecord
{
    std::size_t iteration = 0;
    std::size_t beacon_index = 0;
    VertexId vertex = start_vertex;
    double best_cost = infinity;
    double cost_to_come = infinity;
    bool fell_back = false;
};

/// Guided Incremental Local Densification: uniform free-space sampling until
/// a solution exists, then one beacon per batch and uniform sampling of its
/// Local Subsets.
class GuildStrategy
{
public:
    GuildStrategy(SelectorConfig config, BeaconSet beacons) : config_(config), beacons_(std::move(beacons))
    {
        if (beacons_.size() == 0 || beacons_[0].vertex != start_vertex)
            throw std::invalid_argument("beacon set must start with the start vertex");
        if (!(config_.gamma > 0.0 && config_.gamma <= 1.0))
            throw std::invalid_argument("bandit gamma must lie in (0, 1]");
    }

    DrawResult draw(const PlannerState &ps, std::size_t batch, Rng &rng)
    {
        const auto &env = ps.environment();
        const auto &space = env.space();
        pending_.reset();
        if (!ps.has_solution())
            return draw_valid(env, batch, [&] { return sample_uniform(space, rng); });

        const SelectionContext ctx{ps.graph, ps.tree, ps.best_cost};
        const Selection sel = select_beacon(config_, beacons_, ctx, rng);
        const VertexId b = beacons_[sel.index].vertex;
        SelectionRecord record{ps.iteration, sel.index, b, ps.best_cost, ps.tree.cost_to_come(b), false};
        if (config_.kind == SelectorKind::Bandit)
            pending_ = sel;

        const LocalSubsets ls = local_subsets_for(ctx, b);
        if (!ls.is_degenerate())
        {
            history_.push_back(record);
            return draw_valid(env, batch, [&] { return sample_local_subsets(ls, space, rng); });
        }
        record.fell_back = true;
        history_.push_back(record);
        ++fallbacks_;
        const ProlateHyperspheroid informed(translational(space, env.start()), translational(space, env.target()),
                                            ps.best_cost);
        return draw_valid(env, batch, [&] { return sample_hyperspheroid_in_bounds(informed, space, rng); });
    }

    void after_search(const PlannerState &ps, double previous_cost)
    {
        if (pending_)
            bandit_update(beacons_, *pending_, previous_cost, ps.best_cost, config_.gamma);
        pending_.reset();
    }

    const SelectorConfig &config() const noexcept { return config_; }
    const BeaconSet &beacons() const noexcept { return beacons_; }
    const std::vector<SelectionRecord> &history() const noexcept { return history_; }
    std::size_t fallbacks() const noexcept { return fallbacks_; }

private:
    SelectorConfig config_;
    BeaconSet beacons_;
    std::optional<Selection> pending_;
    std::vector<SelectionRecord> history_;
    std::size_t fallbacks_ = 0;
};

/// Shorthand: selector-driven densification as a one-shot call.
inline DrawResult densify(const PlannerState &ps, GuildStrategy &strategy, std::size_t batch, Rng &rng)
{
    return strategy.draw(ps, batch, rng);
}

}  // namespace guild
