#pragma once

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <deque>
#include <numbers>
#include <optional>
#include <random>
#include <stdexcept>
#include <string>
#include <variant>
#include <vector>

#include "guild/sampling.hpp"
#include "guild/statespace.hpp"

namespace guild {

/// Closed ball (a disc in the plane, a hypersphere in R^n).
struct Circle
{
    std::vector<double> center;
    double radius = 0.0;

    friend bool operator==(const Circle &, const Circle &) = default;
};

/// Closed axis-aligned box.
struct AxisAlignedBox
{
    std::vector<double> min_corner;
    std::vector<double> max_corner;

    friend bool operator==(const AxisAlignedBox &, const AxisAlignedBox &) = default;
};

using Obstacle = std::variant<Circle, AxisAlignedBox>;

inline void validate_obstacle(const Obstacle &obstacle, std::size_t dimension)
{
    if (const auto *c = std::get_if<Circle>(&obstacle))
    {
        if (c->center.size() != dimension)
            throw std::invalid_argument("circle center dimension mismatch");
        if (!(c->radius > 0.0))
            throw std::invalid_argument("circle radius must be positive");
    }
    else
    {
        const auto &b = std::get<AxisAlignedBox>(obstacle);
        if (b.min_corner.size() != dimension || b.max_corner.size() != dimension)
            throw std::invalid_argument("box corner dimension mismatch");
        for (std::size_t i = 0; i < dimension; ++i)
            if (!(b.min_corner[i] < b.max_corner[i]))
                throw std::invalid_argument("box min corner must be below max corner");
    }
}

namespace detail {

/// Squared distance from point `p` to obstacle (zero inside).
inline double squared_gap(const Obstacle &obstacle, std::span<const double> p, double inflate)
{
    if (const auto *c = std::get_if<Circle>(&obstacle))
    {
        double sum = 0.0;
        for (std::size_t i = 0; i < c->center.size(); ++i)
            sum += (p[i] - c->center[i]) * (p[i] - c->center[i]);
        const double reach = c->radius + inflate;
        return sum - reach * reach;
    }
    const auto &b = std::get<AxisAlignedBox>(obstacle);
    double sum = 0.0;
    for (std::size_t i = 0; i < b.min_corner.size(); ++i)
    {
        double d = 0.0;
        if (p[i] < b.min_corner[i])
            d = b.min_corner[i] - p[i];
        else if (p[i] > b.max_corner[i])
            d = p[i] - b.max_corner[i];
        sum += d * d;
    }
    return sum - inflate * inflate;
}

inline bool collides(const Obstacle &obstacle, std::span<const double> p, double inflate)
{
    return squared_gap(obstacle, p, inflate) <= 0.0;
}

/// Conservative test: can any point of segment [a,b] touch the (inflated) obstacle?
inline bool segment_may_touch(const Obstacle &obstacle, std::span<const double> a, std::span<const double> b,
                              double inflate)
{
    if (const auto *c = std::get_if<Circle>(&obstacle))
    {
        const std::size_t n = c->center.size();
        double ab2 = 0.0;
        double dot = 0.0;
        for (std::size_t i = 0; i < n; ++i)
        {
            ab2 += (b[i] - a[i]) * (b[i] - a[i]);
            dot += (c->center[i] - a[i]) * (b[i] - a[i]);
        }
        const double t = ab2 > 0.0 ? std::clamp(dot / ab2, 0.0, 1.0) : 0.0;
        double d2 = 0.0;
        for (std::size_t i = 0; i < n; ++i)
        {
            const double q = a[i] + t * (b[i] - a[i]) - c->center[i];
            d2 += q * q;
        }
        // Small relative margin absorbs rounding in the closest-point projection.
        const double reach = (c->radius + inflate) * (1.0 + 1e-9) + 1e-12;
        return d2 <= reach * reach;
    }
    const auto &box = std::get<AxisAlignedBox>(obstacle);
    for (std::size_t i = 0; i < box.min_corner.size(); ++i)
    {
        const double lo = std::min(a[i], b[i]);
        const double hi = std::max(a[i], b[i]);
        if (hi < box.min_corner[i] - inflate || lo > box.max_corner[i] + inflate)
            return false;
    }
    return true;
}

}  // namespace detail

/// A planning problem: space, obstacles, start, and target.
class Environment
{
public:
    Environment(std::string name, StateSpace space, std::vector<Obstacle> obstacles, State start, State target,
                double robot_radius = 0.0)
        : name_(std::move(name)),
          space_(std::move(space)),
          obstacles_(std::move(obstacles)),
          start_(space_.make_state(std::move(start.coords))),
          target_(space_.make_state(std::move(target.coords))),
          robot_radius_(robot_radius)
    {
        if (!(robot_radius_ >= 0.0))
            throw std::invalid_argument("robot radius must be nonnegative");
        for (const auto &o : obstacles_)
            validate_obstacle(o, space_.translational_dimension());
        if (start_ == target_)
            throw std::invalid_argument("start and target coincide");
        if (!is_state_valid(start_))
            throw std::invalid_argument("start state is in collision or out of bounds");
        if (!is_state_valid(target_))
            throw std::invalid_argument("target state is in collision or out of bounds");
    }

    const std::string &name() const noexcept { return name_; }
    const StateSpace &space() const noexcept { return space_; }
    const std::vector<Obstacle> &obstacles() const noexcept { return obstacles_; }
    const State &start() const noexcept { return start_; }
    const State &target() const noexcept { return target_; }
    double robot_radius() const noexcept { return robot_radius_; }

    /// Default edge-checking resolution: 0.001 x the translational diagonal.
    double default_resolution() const { return 0.01 * space_.diagonal() / 10.0; }

    /// True iff the footprint at `x` lies inside the bounds and touches no
    /// obstacle. Obstacles are closed; the SE(2) heading is ignored.
    bool is_state_valid(std::span<const double> x) const
    {
        if (x.size() != space_.dimension())
            return false;
        const std::size_t n = space_.translational_dimension();
        for (std::size_t i = 0; i < n; ++i)
            if (x[i] - robot_radius_ < space_.lower_bounds()[i] || x[i] + robot_radius_ > space_.upper_bounds()[i])
                return false;
        return std::none_of(obstacles_.begin(), obstacles_.end(),
                            [&](const Obstacle &o) { return detail::collides(o, x, robot_radius_); });
    }

    bool is_state_valid(const State &x) const { return is_state_valid(x.view()); }

    /// Discretized edge check. The number of segments is the smallest power of
    /// two giving spacing <= resolution along the metric, so halving the
    /// resolution only adds checkpoints. The check is symmetric in (a, b).
    bool is_edge_valid(const State &a, const State &b, double resolution) const
    {
        if (!(resolution > 0.0))
            throw std::invalid_argument("edge resolution must be positive");
        if (!is_state_valid(a) || !is_state_valid(b))
            return false;
        const bool swap = std::lexicographical_compare(b.coords.begin(), b.coords.end(), a.coords.begin(),
                                                       a.coords.end());
        const State &from = swap ? b : a;
        const State &to = swap ? a : b;

        const std::size_t n = space_.translational_dimension();
        thread_local std::vector<const Obstacle *> candidates;
        candidates.clear();
        for (const auto &o : obstacles_)
            if (detail::segment_may_touch(o, from.view(), to.view(), robot_radius_))
                candidates.push_back(&o);
        if (candidates.empty())
            return true;

        const std::uint64_t segments = segment_count(distance(space_, from, to), resolution);
        std::vector<double> p(n);
        for (std::uint64_t k = 1; k < segments; ++k)
        {
            const double t = static_cast<double>(k) / static_cast<double>(segments);
            for (std::size_t i = 0; i < n; ++i)
                p[i] = from[i] + t * (to[i] - from[i]);
            for (const auto *o : candidates)
                if (detail::collides(*o, p, robot_radius_))
                    return false;
        }
        return true;
    }

    static std::uint64_t segment_count(double length, double resolution)
    {
        std::uint64_t segments = 1;
        while (static_cast<double>(segments) * resolution < length)
            segments *= 2;
        return segments;
    }

private:
    std::string name_;
    StateSpace space_;
    std::vector<Obstacle> obstacles_;
    State start_;
    State target_;
    double robot_radius_;
};

inline bool is_state_valid(const Environment &env, const State &x) { return env.is_state_valid(x); }

inline bool is_edge_valid(const Environment &env, const State &a, const State &b, double resolution)
{
    return env.is_edge_valid(a, b, resolution);
}

/// Four-connected breadth-first search over cell centers of a translational
/// grid (2D spaces only). Used to reject infeasible generated worlds.
inline bool grid_path_exists(const Environment &env, double resolution = 0.05)
{
    const auto &space = env.space();
    if (space.translational_dimension() != 2)
        throw std::invalid_argument("grid feasibility oracle supports planar spaces only");
    const double x0 = space.lower_bounds()[0];
    const double y0 = space.lower_bounds()[1];
    const auto nx = static_cast<int>(std::ceil((space.upper_bounds()[0] - x0) / resolution));
    const auto ny = static_cast<int>(std::ceil((space.upper_bounds()[1] - y0) / resolution));
    auto cell_of = [&](const State &s) {
        const int i = std::clamp(static_cast<int>((s[0] - x0) / resolution), 0, nx - 1);
        const int j = std::clamp(static_cast<int>((s[1] - y0) / resolution), 0, ny - 1);
        return j * nx + i;
    };
    std::vector<char> free(static_cast<std::size_t>(nx * ny));
    std::vector<double> probe(space.dimension(), 0.0);
    for (int j = 0; j < ny; ++j)
        for (int i = 0; i < nx; ++i)
        {
            probe[0] = x0 + (i + 0.5) * resolution;
            probe[1] = y0 + (j + 0.5) * resolution;
            free[static_cast<std::size_t>(j * nx + i)] = env.is_state_valid(probe) ? 1 : 0;
        }
    const int source = cell_of(env.start());
    const int sink = cell_of(env.target());
    free[static_cast<std::size_t>(source)] = 1;
    free[static_cast<std::size_t>(sink)] = 1;

    std::vector<char> seen(free.size(), 0);
    std::deque<int> queue{source};
    seen[static_cast<std::size_t>(source)] = 1;
    while (!queue.empty())
    {
        const int c = queue.front();
        queue.pop_front();
        if (c == sink)
            return true;
        const int i = c % nx;
        const int j = c / nx;
        const int next[4][2] = {{i + 1, j}, {i - 1, j}, {i, j + 1}, {i, j - 1}};
        for (const auto &nb : next)
        {
            if (nb[0] < 0 || nb[0] >= nx || nb[1] < 0 || nb[1] >= ny)
                continue;
            const auto id = static_cast<std::size_t>(nb[1] * nx + nb[0]);
            if (free[id] && !seen[id])
            {
                seen[id] = 1;
                queue.push_back(static_cast<int>(id));
            }
        }
    }
    return false;
}

enum class EnvironmentKind
{
    Forest,
    TwoWall,
    Trap,
    SE2Maze,
    ClutterRn
};

struct EnvironmentName
{
    EnvironmentKind kind = EnvironmentKind::Forest;
    std::size_t dimension = 2;  // ClutterRn only

    std::string to_string() const
    {
        switch (kind)
        {
        case EnvironmentKind::Forest: return "Forest";
        case EnvironmentKind::TwoWall: return "TwoWall";
        case EnvironmentKind::Trap: return "Trap";
        case EnvironmentKind::SE2Maze: return "SE2Maze";
        case EnvironmentKind::ClutterRn: return "ClutterR" + std::to_string(dimension);
        }
        return "";
    }

    /// Parses "Forest", "TwoWall", "Trap", "SE2Maze", or "ClutterR<n>".
    static EnvironmentName parse(const std::string &text)
    {
        if (text == "Forest")
            return {EnvironmentKind::Forest, 2};
        if (text == "TwoWall")
            return {EnvironmentKind::TwoWall, 2};
        if (text == "Trap")
            return {EnvironmentKind::Trap, 2};
        if (text == "SE2Maze")
            return {EnvironmentKind::SE2Maze, 3};
        const std::string prefix = "ClutterR";
        if (text.rfind(prefix, 0) == 0 && text.size() > prefix.size())
        {
            const std::string digits = text.substr(prefix.size());
            if (std::all_of(digits.begin(), digits.end(), [](char ch) { return ch >= '0' && ch <= '9'; }) &&
                digits.size() <= 2)
            {
                const auto n = static_cast<std::size_t>(std::stoi(digits));
                if (n >= 2 && n <= 7)
                    return {EnvironmentKind::ClutterRn, n};
            }
            throw std::invalid_argument("ClutterRn dimension must be in [2, 7]: " + text);
        }
        throw std::invalid_argument("unknown environment name: " + text);
    }
};

namespace worlds {

inline constexpr double extent = 10.0;
inline constexpr double wall_thickness = 0.4;
inline constexpr double gap_width = 0.6;

// Trap: a thick back wall across the start-target line with a narrow slot
// above it, and an arm over the target. The enclosure's mouth is the gap
// between the arm's end and the right edge, away from the straight line.
inline constexpr double trap_back_wall_lo = 3.0;
inline constexpr double trap_back_wall_hi = 7.0;
inline constexpr double trap_height = 7.0;
inline constexpr double trap_arm_end = 9.0;
inline constexpr double trap_slot_lo = 2.5;

// SE2Maze: 4x4 cells, corridors of width 1.2 through cell centers.
inline constexpr int maze_cells = 4;
inline constexpr double maze_corridor = 1.2;
inline constexpr double maze_robot_radius = 0.25;

inline StateSpace unit_square() { return StateSpace::real_vector({0.0, 0.0}, {extent, extent}); }

inline double uniform(Rng &rng, double lo, double hi) { return std::uniform_real_distribution<double>(lo, hi)(rng); }

/// Random discs in [0,10]^n that avoid the start and target footprints and
/// an optional keep-out box.
inline void add_forest(std::vector<Obstacle> &out, Rng &rng, std::size_t count, std::size_t n, double r_lo,
                       double r_hi, const State &start, const State &target, double robot_radius,
                       const std::optional<AxisAlignedBox> &keep_out = std::nullopt)
{
    for (std::size_t k = 0; k < count; ++k)
    {
        while (true)
        {
            Circle c;
            c.center.resize(n);
            for (auto &v : c.center)
                v = uniform(rng, 0.0, extent);
            c.radius = uniform(rng, r_lo, r_hi);
            const Obstacle o = c;
            if (detail::collides(o, start.view(), robot_radius) || detail::collides(o, target.view(), robot_radius))
                continue;
            if (keep_out && detail::squared_gap(Obstacle{*keep_out}, c.center, c.radius) <= 0.0)
                continue;
            out.push_back(o);
            break;
        }
    }
}

inline AxisAlignedBox box(double x0, double y0, double x1, double y1) { return AxisAlignedBox{{x0, y0}, {x1, y1}}; }

inline Environment forest(Rng &rng)
{
    const State start{{0.5, 0.5}};
    const State target{{9.5, 9.5}};
    std::vector<Obstacle> obs;
    add_forest(obs, rng, 40, 2, 0.2, 0.5, start, target, 0.0);
    return Environment("Forest", unit_square(), std::move(obs), start, target);
}

inline Environment two_wall(Rng &rng)
{
    const State start{{0.5, 0.5}};
    const State target{{9.5, 9.5}};
    for (;;)
    {
        std::vector<Obstacle> obs;
        add_forest(obs, rng, 20, 2, 0.2, 0.5, start, target, 0.0);
        for (const double x : {3.3, 6.6})
        {
            const double gap_lo = uniform(rng, 0.5, extent - 0.5 - gap_width);
            const double x0 = x - wall_thickness / 2.0;
            const double x1 = x + wall_thickness / 2.0;
            obs.emplace_back(box(x0, 0.0, x1, gap_lo));
            obs.emplace_back(box(x0, gap_lo + gap_width, x1, extent));
        }
        Environment env("TwoWall", unit_square(), std::move(obs), start, target);
        if (!env.is_edge_valid(start, target, env.default_resolution()))
            return env;
    }
}

inline Environment trap(Rng &rng)
{
    const State start{{0.5, 0.5}};
    const State target{{9.5, 0.5}};
    std::vector<Obstacle> obs;
    const AxisAlignedBox keep_out = box(trap_back_wall_lo - 0.5, 0.0, extent, trap_height + 0.5);
    add_forest(obs, rng, 20, 2, 0.2, 0.5, start, target, 0.0, keep_out);
    const double slot_hi = trap_slot_lo + gap_width;
    obs.emplace_back(box(trap_back_wall_lo, 0.0, trap_back_wall_hi, trap_slot_lo));
    obs.emplace_back(box(trap_back_wall_lo, slot_hi, trap_back_wall_hi, trap_height));
    obs.emplace_back(box(trap_back_wall_hi, trap_height - wall_thickness, trap_arm_end, trap_height));
    return Environment("Trap", unit_square(), std::move(obs), start, target);
}

/// Maze walls from a randomized depth-first spanning tree over a 4x4 grid.
inline Environment se2_maze(Rng &rng)
{
    constexpr int cells = maze_cells;
    const double cell = extent / cells;
    const double margin = (cell - maze_corridor) / 2.0;

    // open[c][d]: passage from cell c in direction d (0=+x, 1=-x, 2=+y, 3=-y).
    std::vector<std::array<bool, 4>> open(cells * cells, {false, false, false, false});
    std::vector<char> visited(cells * cells, 0);
    std::vector<int> stack{0};
    visited[0] = 1;
    const int di[4] = {1, -1, 0, 0};
    const int dj[4] = {0, 0, 1, -1};
    const int opposite[4] = {1, 0, 3, 2};
    while (!stack.empty())
    {
        const int c = stack.back();
        const int ci = c % cells;
        const int cj = c / cells;
        std::vector<int> dirs;
        for (int d = 0; d < 4; ++d)
        {
            const int ni = ci + di[d];
            const int nj = cj + dj[d];
            if (ni >= 0 && ni < cells && nj >= 0 && nj < cells && !visited[nj * cells + ni])
                dirs.push_back(d);
        }
        if (dirs.empty())
        {
            stack.pop_back();
            continue;
        }
        const int d = dirs[std::uniform_int_distribution<std::size_t>(0, dirs.size() - 1)(rng)];
        const int nc = (cj + dj[d]) * cells + (ci + di[d]);
        open[c][d] = true;
        open[nc][opposite[d]] = true;
        visited[nc] = 1;
        stack.push_back(nc);
    }

    std::vector<Obstacle> obs;
    for (int j = 0; j < cells; ++j)
        for (int i = 0; i < cells; ++i)
        {
            const int c = j * cells + i;
            const double x0 = i * cell;
            const double y0 = j * cell;
            const double xa = x0 + margin;
            const double xb = x0 + margin + maze_corridor;
            const double x1 = x0 + cell;
            const double ya = y0 + margin;
            const double yb = y0 + margin + maze_corridor;
            const double y1 = y0 + cell;
            // Corners are always solid.
            obs.emplace_back(box(x0, y0, xa, ya));
            obs.emplace_back(box(xb, y0, x1, ya));
            obs.emplace_back(box(x0, yb, xa, y1));
            obs.emplace_back(box(xb, yb, x1, y1));
            // Sides are solid unless the tree opens a passage there.
            if (!open[c][0])
                obs.emplace_back(box(xb, ya, x1, yb));
            if (!open[c][1])
                obs.emplace_back(box(x0, ya, xa, yb));
            if (!open[c][2])
                obs.emplace_back(box(xa, yb, xb, y1));
            if (!open[c][3])
                obs.emplace_back(box(xa, y0, xb, ya));
        }
    const double first = cell / 2.0;
    const double last = extent - cell / 2.0;
    return Environment("SE2Maze", StateSpace::se2({0.0, 0.0}, {extent, extent}), std::move(obs),
                       State{{first, first, 0.0}}, State{{last, last, std::numbers::pi / 2.0}},
                       maze_robot_radius);
}

inline Environment clutter(Rng &rng, std::size_t n)
{
    const State start{std::vector<double>(n, 0.5)};
    const State target{std::vector<double>(n, extent - 0.5)};
    std::vector<Obstacle> obs;
    add_forest(obs, rng, 30, n, 0.5, 1.5, start, target, 0.0);
    return Environment("ClutterR" + std::to_string(n),
                       StateSpace::real_vector(std::vector<double>(n, 0.0), std::vector<double>(n, extent)),
                       std::move(obs), start, target);
}

/// Feasibility oracle. Planar worlds use the grid search; higher-dimensional
/// clutter accepts a straight line or a two-segment detour through one of the
/// first 4096 Halton points.
inline bool is_feasible(const Environment &env)
{
    if (env.space().translational_dimension() == 2)
        return grid_path_exists(env);
    const double res = env.default_resolution();
    if (env.is_edge_valid(env.start(), env.target(), res))
        return true;
    const auto &space = env.space();
    for (std::uint64_t k = 1; k <= 4096; ++k)
    {
        auto unit = halton_sequence(k, space.dimension());
        for (std::size_t i = 0; i < unit.size(); ++i)
            unit[i] = space.lower_bounds()[i] + unit[i] * (space.upper_bounds()[i] - space.lower_bounds()[i]);
        const State via{std::move(unit)};
        if (env.is_edge_valid(env.start(), via, res) && env.is_edge_valid(via, env.target(), res))
            return true;
    }
    return false;
}

}  // namespace worlds

/// Deterministic benchmark world for (name, seed). Infeasible draws are
/// rejected and regenerated from seed + k * 1000003.
inline Environment make_environment(const EnvironmentName &name, std::uint64_t seed)
{
    if (name.kind == EnvironmentKind::ClutterRn && (name.dimension < 2 || name.dimension > 7))
        throw std::invalid_argument("ClutterRn dimension must be in [2, 7]");
    for (std::uint64_t attempt = 0; attempt < 1000; ++attempt)
    {
        Rng rng(seed + attempt * 1000003ULL);
        auto env = [&] {
            switch (name.kind)
            {
            case EnvironmentKind::Forest: return worlds::forest(rng);
            case EnvironmentKind::TwoWall: return worlds::two_wall(rng);
            case EnvironmentKind::Trap: return worlds::trap(rng);
            case EnvironmentKind::SE2Maze: return worlds::se2_maze(rng);
            case EnvironmentKind::ClutterRn: return worlds::clutter(rng, name.dimension);
            }
            throw std::invalid_argument("unknown environment kind");
        }();
        if (worlds::is_feasible(env))
            return env;
    }
    throw std::runtime_error("could not generate a feasible environment for " + name.to_string());
}

inline Environment make_environment(const std::string &name, std::uint64_t seed)
{
    return make_environment(EnvironmentName::parse(name), seed);
}

}  // namespace guild
