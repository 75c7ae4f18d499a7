#pragma once

#include <algorithm>
#include <array>
#include <chrono>
#include <cmath>
#include <concepts>
#include <cstdint>
#include <limits>
#include <optional>
#include <queue>
#include <stdexcept>
#include <unordered_map>
#include <vector>

#include "guild/environment.hpp"
#include "guild/errors.hpp"
#include "guild/sampling.hpp"
#include "guild/statespace.hpp"

namespace guild {

using VertexId = std::uint32_t;

inline constexpr double infinity = std::numeric_limits<double>::infinity();
inline constexpr VertexId start_vertex = 0;
inline constexpr VertexId target_vertex = 1;

/// Tuning constant applied on top of the asymptotic-optimality bound.
inline constexpr double default_radius_scale = 1.1;

/// r(n) = eta * gamma* * (log n / n)^(1/d), with
/// gamma* = 2 (1 + 1/d)^(1/d) (measure / zeta_d)^(1/d).
inline double connection_radius(std::size_t n, std::size_t d, double space_measure,
                                double eta = default_radius_scale)
{
    if (n < 2)
        throw std::invalid_argument("connection radius needs at least two vertices");
    const double dd = static_cast<double>(d);
    const double gamma = 2.0 * std::pow(1.0 + 1.0 / dd, 1.0 / dd) *
                         std::pow(space_measure / unit_ball_measure(d), 1.0 / dd);
    const double nn = static_cast<double>(n);
    return eta * gamma * std::pow(std::log(nn) / nn, 1.0 / dd);
}

/// Either a fixed radius or the asymptotically optimal schedule.
struct RadiusPolicy
{
    std::optional<double> fixed;
    double eta = default_radius_scale;

    double operator()(std::size_t n, std::size_t d, double space_measure) const
    {
        if (fixed)
            return *fixed;
        return connection_radius(std::max<std::size_t>(n, 2), d, space_measure, eta);
    }
};

enum class EdgeStatus : std::uint8_t
{
    Unknown,
    Valid,
    Invalid
};

/// Edge-implicit graph over sampled states.
///
/// Vertex 0 is the start and vertex 1 the target. Neighbors are the vertices
/// within radius(), found on demand through a bucket grid over up to three
/// translational coordinates. No adjacency is stored, so memory stays linear
/// in the vertex count even when the connection radius covers most of the
/// graph. Edge collision results are memoized for the lifetime of the graph.
class Graph
{
public:
    struct Adjacent
    {
        VertexId vertex;
        double length;
    };

    static constexpr std::size_t max_cells_per_axis = 128;
    /// Cells are at least radius / cell_reach wide; queries scan +-cell_reach cells.
    static constexpr std::size_t cell_reach = 2;

    Graph(const Environment &env, RadiusPolicy policy = {}, std::optional<double> resolution = std::nullopt)
        : env_(&env),
          policy_(policy),
          resolution_(resolution.value_or(env.default_resolution())),
          dim_(env.space().dimension()),
          translational_dim_(env.space().translational_dimension()),
          grid_dim_(std::min<std::size_t>(3, translational_dim_)),
          se2_(env.space().is_se2())
    {
        if (!(resolution_ > 0.0))
            throw std::invalid_argument("edge resolution must be positive");
        add_vertices({env.start(), env.target()});
    }

    const Environment &environment() const noexcept { return *env_; }
    const StateSpace &space() const noexcept { return env_->space(); }
    std::size_t size() const noexcept { return coords_.size() / dim_; }
    double resolution() const noexcept { return resolution_; }
    double radius() const noexcept { return radius_; }
    std::size_t edge_checks() const noexcept { return edge_checks_; }

    std::span<const double> coords(VertexId v) const
    {
        return std::span<const double>(coords_).subspan(static_cast<std::size_t>(v) * dim_, dim_);
    }

    State state(VertexId v) const
    {
        const auto c = coords(v);
        return State{std::vector<double>(c.begin(), c.end())};
    }

    /// Inserts states and sets the radius for the new vertex count.
    /// Returns the id of the first inserted vertex.
    VertexId add_vertices(const std::vector<State> &states)
    {
        const auto first = static_cast<VertexId>(size());
        for (const auto &s : states)
        {
            if (s.size() != dim_)
                throw std::invalid_argument("vertex dimension mismatch");
            coords_.insert(coords_.end(), s.coords.begin(), s.coords.end());
        }
        radius_ = policy_(size(), dim_, space().measure());
        if (needs_regrid())
            regrid();
        else
            for (auto v = first; v < size(); ++v)
                cells_[cell_index(v)].push_back(v);
        return first;
    }

    VertexId add_vertex(const State &s) { return add_vertices({s}); }

    /// Vertices within the current radius of `v` (excluding `v`), in a fixed
    /// order determined by the grid and insertion order.
    template <class Fn>
    void for_each_neighbor(VertexId v, Fn &&fn) const
    {
        const auto x = coords(v);
        const double r2 = radius_ * radius_;
        std::array<std::size_t, 3> lo{}, hi{};
        for (std::size_t i = 0; i < grid_dim_; ++i)
        {
            const std::size_t c = axis_cell(i, x[i]);
            lo[i] = c < cell_reach ? 0 : c - cell_reach;
            hi[i] = std::min(c + cell_reach, counts_[i] - 1);
        }
        std::array<std::size_t, 3> at = lo;
        for (;;)
        {
            std::size_t index = 0;
            for (std::size_t i = grid_dim_; i-- > 0;)
                index = index * counts_[i] + at[i];
            for (const VertexId u : cells_[index])
            {
                if (u == v)
                    continue;
                // Translational distance bounds the metric from below.
                const double *y = coords_.data() + static_cast<std::size_t>(u) * dim_;
                double sq = 0.0;
                for (std::size_t i = 0; i < translational_dim_; ++i)
                {
                    const double t = x[i] - y[i];
                    sq += t * t;
                }
                if (sq > r2)
                    continue;
                const double d = se2_ ? distance(space(), x, coords(u)) : std::sqrt(sq);
                if (d <= radius_)
                    fn(Adjacent{u, d});
            }
            std::size_t i = 0;
            for (; i < grid_dim_; ++i)
            {
                if (at[i] < hi[i])
                {
                    ++at[i];
                    break;
                }
                at[i] = lo[i];
            }
            if (i == grid_dim_)
                break;
        }
    }

    std::vector<VertexId> neighbors(VertexId v) const
    {
        std::vector<VertexId> out;
        for_each_neighbor(v, [&](const Adjacent &a) { out.push_back(a.vertex); });
        return out;
    }

    EdgeStatus edge_status(VertexId u, VertexId v) const
    {
        const auto it = memo_.find(edge_key(u, v));
        return it == memo_.end() ? EdgeStatus::Unknown : it->second;
    }

    /// Collision-checks an edge once; later queries hit the memo.
    bool edge_valid(VertexId u, VertexId v)
    {
        auto [it, inserted] = memo_.try_emplace(edge_key(u, v), EdgeStatus::Unknown);
        if (inserted)
        {
            ++edge_checks_;
            it->second = env_->is_edge_valid(state(u), state(v), resolution_) ? EdgeStatus::Valid
                                                                              : EdgeStatus::Invalid;
        }
        return it->second == EdgeStatus::Valid;
    }

private:
    static std::uint64_t edge_key(VertexId u, VertexId v)
    {
        if (u > v)
            std::swap(u, v);
        return (static_cast<std::uint64_t>(u) << 32) | v;
    }

    // Largest cell count per axis whose cells are at least radius / cell_reach wide.
    std::size_t wanted_cells(std::size_t axis) const
    {
        const double extent = space().upper_bounds()[axis] - space().lower_bounds()[axis];
        const double width = radius_ / static_cast<double>(cell_reach);
        const double fit = width > 0.0 ? std::floor(extent / width) : double(max_cells_per_axis);
        return static_cast<std::size_t>(std::clamp(fit, 1.0, double(max_cells_per_axis)));
    }

    // Regrid when cells are too narrow for the radius or at least twice too wide.
    bool needs_regrid() const
    {
        if (cells_.empty())
            return true;
        for (std::size_t i = 0; i < grid_dim_; ++i)
        {
            const std::size_t want = wanted_cells(i);
            if (want < counts_[i] || want >= 2 * counts_[i] || (want == max_cells_per_axis && counts_[i] != want))
                return true;
        }
        return false;
    }

    void regrid()
    {
        std::size_t total = 1;
        for (std::size_t i = 0; i < grid_dim_; ++i)
        {
            counts_[i] = wanted_cells(i);
            total *= counts_[i];
        }
        cells_.assign(total, {});
        for (VertexId v = 0; v < size(); ++v)
            cells_[cell_index(v)].push_back(v);
    }

    std::size_t axis_cell(std::size_t axis, double x) const
    {
        const double lo = space().lower_bounds()[axis];
        const double extent = space().upper_bounds()[axis] - lo;
        const double t = (x - lo) / extent * static_cast<double>(counts_[axis]);
        if (!(t > 0.0))
            return 0;
        return std::min(static_cast<std::size_t>(t), counts_[axis] - 1);
    }

    std::size_t cell_index(VertexId v) const
    {
        const auto x = coords(v);
        std::size_t index = 0;
        for (std::size_t i = grid_dim_; i-- > 0;)
            index = index * counts_[i] + axis_cell(i, x[i]);
        return index;
    }

    const Environment *env_;
    RadiusPolicy policy_;
    double resolution_;
    std::size_t dim_;
    std::size_t translational_dim_;
    std::size_t grid_dim_;
    bool se2_;
    std::vector<double> coords_;
    std::array<std::size_t, 3> counts_{1, 1, 1};
    std::vector<std::vector<VertexId>> cells_;
    std::unordered_map<std::uint64_t, EdgeStatus> memo_;
    double radius_ = infinity;
    std::size_t edge_checks_ = 0;
};

inline constexpr std::int64_t no_parent = -1;

/// Search tree from the most recent shortest-path computation.
struct SearchTree
{
    std::vector<double> g;
    std::vector<std::int64_t> parent;
    std::vector<std::uint8_t> expanded;

    std::size_t size() const noexcept { return g.size(); }
    bool reached(VertexId v) const { return v < g.size() && g[v] < infinity; }
    bool is_expanded(VertexId v) const { return v < expanded.size() && expanded[v] != 0; }
    double cost_to_come(VertexId v) const { return v < g.size() ? g[v] : infinity; }
};

struct SearchResult
{
    SearchTree tree;
    std::optional<Path> path;
    std::size_t expansions = 0;
};

/// A* from scratch over the implicit graph. Edges are collision-checked only
/// when they would improve a cost-to-come. Ties in f break on smaller g, then
/// smaller vertex id. Stops once the target is expanded.
inline SearchResult search(Graph &graph, VertexId source, VertexId goal)
{
    const std::size_t n = graph.size();
    if (source >= n || goal >= n)
        throw std::invalid_argument("search endpoints are not graph vertices");
    const auto &space = graph.space();
    const auto goal_coords = graph.coords(goal);

    SearchResult result;
    auto &tree = result.tree;
    tree.g.assign(n, infinity);
    tree.parent.assign(n, no_parent);
    tree.expanded.assign(n, 0);

    struct Entry
    {
        double f;
        double g;
        VertexId v;
        bool operator>(const Entry &o) const
        {
            if (f != o.f)
                return f > o.f;
            if (g != o.g)
                return g > o.g;
            return v > o.v;
        }
    };
    std::priority_queue<Entry, std::vector<Entry>, std::greater<>> open;

    tree.g[source] = 0.0;
    open.push({heuristic(space, graph.coords(source), goal_coords), 0.0, source});
    while (!open.empty())
    {
        const Entry top = open.top();
        open.pop();
        const VertexId u = top.v;
        if (tree.expanded[u] || top.g > tree.g[u])
            continue;
        tree.expanded[u] = 1;
        ++result.expansions;
        if (u == goal)
            break;
        const double gu = tree.g[u];
        graph.for_each_neighbor(u, [&](const Graph::Adjacent &a) {
            const VertexId v = a.vertex;
            if (tree.expanded[v])
                return;
            const double candidate = gu + a.length;
            if (!(candidate < tree.g[v]))
                return;
            if (!graph.edge_valid(u, v))
                return;
            tree.g[v] = candidate;
            tree.parent[v] = u;
            open.push({candidate + heuristic(space, graph.coords(v), goal_coords), candidate, v});
        });
    }

    if (tree.reached(goal))
    {
        Path path;
        path.cost = tree.g[goal];
        for (std::int64_t v = goal; v != no_parent; v = tree.parent[static_cast<std::size_t>(v)])
            path.states.push_back(graph.state(static_cast<VertexId>(v)));
        std::reverse(path.states.begin(), path.states.end());
        result.path = std::move(path);
    }
    return result;
}

/// Mutable state of one anytime planning run.
struct PlannerState
{
    explicit PlannerState(const Environment &env, RadiusPolicy policy = {},
                          std::optional<double> resolution = std::nullopt)
        : graph(env, policy, resolution)
    {
    }

    const Environment &environment() const noexcept { return graph.environment(); }
    bool has_solution() const noexcept { return best_cost < infinity; }

    Graph graph;
    SearchTree tree;
    double best_cost = infinity;
    std::optional<Path> best_path;
    std::size_t samples_drawn = 0;
    std::size_t rejected_draws = 0;
    std::size_t iteration = 0;
};

/// Output of a densification step.
struct DrawResult
{
    std::vector<State> states;
    std::size_t rejected = 0;
};

/// Densification strategies produce `batch` collision-free states for the
/// current planner state. They may also observe the search outcome.
template <class S>
concept DensificationStrategy = requires(S s, const PlannerState &ps, std::size_t batch, Rng &rng) {
    { s.draw(ps, batch, rng) } -> std::same_as<DrawResult>;
};

/// Calls `sampler()` until `batch` collision-free states are collected.
template <class Sampler>
DrawResult draw_valid(const Environment &env, std::size_t batch, Sampler &&sampler)
{
    DrawResult out;
    out.states.reserve(batch);
    const std::size_t cap = 1000 * batch + 10'000;
    while (out.states.size() < batch)
    {
        State x = sampler();
        if (env.is_state_valid(x))
            out.states.push_back(std::move(x));
        else if (++out.rejected > cap)
            throw SamplingStarvedError("too many collision-invalid draws");
    }
    return out;
}

/// Uniform densification of the free space, ignoring the current solution.
struct UniformStrategy
{
    DrawResult draw(const PlannerState &ps, std::size_t batch, Rng &rng)
    {
        const auto &env = ps.environment();
        return draw_valid(env, batch, [&] { return sample_uniform(env.space(), rng); });
    }
};

/// Uniform until a solution exists, then the Informed Set E(v_s, v_t, c).
struct InformedStrategy
{
    DrawResult draw(const PlannerState &ps, std::size_t batch, Rng &rng)
    {
        const auto &env = ps.environment();
        const auto &space = env.space();
        if (!ps.has_solution())
            return draw_valid(env, batch, [&] { return sample_uniform(space, rng); });
        const ProlateHyperspheroid informed(translational(space, env.start()), translational(space, env.target()),
                                            ps.best_cost);
        return draw_valid(env, batch, [&] { return sample_hyperspheroid_in_bounds(informed, space, rng); });
    }
};

struct IterationReport
{
    std::size_t iteration = 0;
    std::size_t samples_drawn = 0;
    std::size_t rejected_draws = 0;
    double best_cost = infinity;
    bool improved = false;
    double elapsed_seconds = 0.0;
    VertexId first_added = 0;  // new vertices are [first_added, graph.size())
};

inline constexpr double improvement_epsilon = 1e-12;

/// One densify-search-update round.
template <DensificationStrategy Strategy>
IterationReport plan_iteration(PlannerState &ps, Strategy &strategy, std::size_t batch, Rng &rng)
{
    if (batch == 0)
        throw std::invalid_argument("batch size must be positive");
    const auto t0 = std::chrono::steady_clock::now();
    const double previous = ps.best_cost;

    DrawResult drawn = strategy.draw(ps, batch, rng);
    ps.samples_drawn += drawn.states.size();
    ps.rejected_draws += drawn.rejected;
    const VertexId first = ps.graph.add_vertices(drawn.states);

    SearchResult result = search(ps.graph, start_vertex, target_vertex);
    ps.tree = std::move(result.tree);
    IterationReport report;
    if (result.path && result.path->cost < ps.best_cost - improvement_epsilon)
    {
        ps.best_cost = result.path->cost;
        ps.best_path = std::move(result.path);
        report.improved = true;
    }
    if constexpr (requires { strategy.after_search(ps, previous); })
        strategy.after_search(ps, previous);

    report.iteration = ps.iteration++;
    report.samples_drawn = ps.samples_drawn;
    report.rejected_draws = ps.rejected_draws;
    report.best_cost = ps.best_cost;
    report.first_added = first;
    report.elapsed_seconds = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
    return report;
}

}  // namespace guild
