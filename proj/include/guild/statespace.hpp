#pragma once

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <numbers>
#include <span>
#include <stdexcept>
#include <string>
#include <vector>

namespace guild {

/// Wraps an angle into [-pi, pi).
inline double wrap_angle(double angle)
{
    constexpr double two_pi = 2.0 * std::numbers::pi;
    double wrapped = std::fmod(angle + std::numbers::pi, two_pi);
    if (wrapped < 0.0)
        wrapped += two_pi;
    wrapped -= std::numbers::pi;
    if (wrapped >= std::numbers::pi)
        wrapped -= two_pi;
    return wrapped;
}

enum class SpaceKind
{
    RealVector,
    SE2
};

/// A configuration. For SE(2) the third coordinate is a heading in [-pi, pi);
/// use StateSpace::make_state to get the wrapping applied.
struct State
{
    std::vector<double> coords;

    std::size_t size() const noexcept { return coords.size(); }
    double operator[](std::size_t i) const { return coords[i]; }
    std::span<const double> view() const noexcept { return coords; }

    friend bool operator==(const State &, const State &) = default;
};

/// Configuration space: R^n with box bounds, or SE(2) = R^2 x S^1.
///
/// Distances in SE(2) are translational length plus a weighted angular arc.
/// The heuristic only looks at the translational part, which keeps it
/// admissible and lets informed sampling work on the Euclidean subspace.
class StateSpace
{
public:
    static constexpr double default_angular_weight = 0.3;

    static StateSpace real_vector(std::vector<double> lower, std::vector<double> upper)
    {
        return StateSpace(SpaceKind::RealVector, std::move(lower), std::move(upper), 0.0);
    }

    /// `lower`/`upper` bound the two translational coordinates only.
    static StateSpace se2(std::vector<double> lower, std::vector<double> upper,
                          double angular_weight = default_angular_weight)
    {
        if (lower.size() != 2 || upper.size() != 2)
            throw std::invalid_argument("SE2 bounds must have two translational coordinates");
        if (!(angular_weight >= 0.0))
            throw std::invalid_argument("angular weight must be nonnegative");
        lower.push_back(-std::numbers::pi);
        upper.push_back(std::numbers::pi);
        return StateSpace(SpaceKind::SE2, std::move(lower), std::move(upper), angular_weight);
    }

    SpaceKind kind() const noexcept { return kind_; }
    bool is_se2() const noexcept { return kind_ == SpaceKind::SE2; }

    /// Total number of coordinates (3 for SE(2)).
    std::size_t dimension() const noexcept { return lower_.size(); }

    /// Coordinates that participate in the Euclidean heuristic.
    std::size_t translational_dimension() const noexcept { return is_se2() ? 2 : dimension(); }

    const std::vector<double> &lower_bounds() const noexcept { return lower_; }
    const std::vector<double> &upper_bounds() const noexcept { return upper_; }
    double angular_weight() const noexcept { return angular_weight_; }

    /// Lebesgue measure of the bounds (SE(2) includes the 2*pi angular extent).
    double measure() const
    {
        double m = 1.0;
        for (std::size_t i = 0; i < dimension(); ++i)
            m *= upper_[i] - lower_[i];
        return m;
    }

    /// Length of the translational bounding-box diagonal.
    double diagonal() const
    {
        double sum = 0.0;
        for (std::size_t i = 0; i < translational_dimension(); ++i)
            sum += (upper_[i] - lower_[i]) * (upper_[i] - lower_[i]);
        return std::sqrt(sum);
    }

    State make_state(std::vector<double> coords) const
    {
        if (coords.size() != dimension())
            throw std::invalid_argument("state has " + std::to_string(coords.size()) +
                                        " coordinates, space has " + std::to_string(dimension()));
        if (is_se2())
            coords[2] = wrap_angle(coords[2]);
        return State{std::move(coords)};
    }

    bool contains(const State &x) const { return contains(x.view()); }

    bool contains(std::span<const double> x) const
    {
        if (x.size() != dimension())
            return false;
        for (std::size_t i = 0; i < translational_dimension(); ++i)
            if (x[i] < lower_[i] || x[i] > upper_[i])
                return false;
        return true;
    }

    friend bool operator==(const StateSpace &, const StateSpace &) = default;

private:
    StateSpace(SpaceKind kind, std::vector<double> lower, std::vector<double> upper, double w)
        : kind_(kind), lower_(std::move(lower)), upper_(std::move(upper)), angular_weight_(w)
    {
        if (lower_.size() != upper_.size())
            throw std::invalid_argument("bounds have mismatched dimensions");
        if (lower_.size() < 2)
            throw std::invalid_argument("space dimension must be at least 2");
        for (std::size_t i = 0; i < lower_.size(); ++i)
            if (!(lower_[i] < upper_[i]))
                throw std::invalid_argument("lower bound must be below upper bound on axis " +
                                            std::to_string(i));
    }

    SpaceKind kind_;
    std::vector<double> lower_;
    std::vector<double> upper_;
    double angular_weight_;
};

namespace detail {

inline void check_dims(const StateSpace &space, std::span<const double> a, std::span<const double> b)
{
    if (a.size() != space.dimension() || b.size() != space.dimension())
        throw std::invalid_argument("state dimension does not match space dimension");
}

inline double euclidean(std::span<const double> a, std::span<const double> b, std::size_t n)
{
    double sum = 0.0;
    for (std::size_t i = 0; i < n; ++i)
    {
        const double d = a[i] - b[i];
        sum += d * d;
    }
    return std::sqrt(sum);
}

}  // namespace detail

/// Metric distance: Euclidean in R^n; translational length plus weighted arc in SE(2).
namespace detail {

// Shorter-arc angle between two headings; exactly symmetric in its arguments.
inline double angular_gap(double a, double b)
{
    const double d = std::fmod(std::abs(a - b), 2.0 * std::numbers::pi);
    return std::min(d, 2.0 * std::numbers::pi - d);
}

}  // namespace detail

inline double distance(const StateSpace &space, std::span<const double> a, std::span<const double> b)
{
    detail::check_dims(space, a, b);
    if (!space.is_se2())
        return detail::euclidean(a, b, a.size());
    return detail::euclidean(a, b, 2) + space.angular_weight() * detail::angular_gap(a[2], b[2]);
}

inline double distance(const StateSpace &space, const State &a, const State &b)
{
    return distance(space, a.view(), b.view());
}

/// Admissible, consistent cost-to-go estimate: Euclidean over translational coordinates.
inline double heuristic(const StateSpace &space, std::span<const double> a, std::span<const double> b)
{
    detail::check_dims(space, a, b);
    return detail::euclidean(a, b, space.translational_dimension());
}

inline double heuristic(const StateSpace &space, const State &a, const State &b)
{
    return heuristic(space, a.view(), b.view());
}

/// Straight-line interpolation; the SE(2) heading follows the shorter arc.
/// t = 0 and t = 1 return the endpoints exactly.
inline State interpolate(const StateSpace &space, const State &a, const State &b, double t)
{
    detail::check_dims(space, a.view(), b.view());
    if (!(t >= 0.0 && t <= 1.0))
        throw std::invalid_argument("interpolation parameter must lie in [0, 1]");
    if (t == 0.0)
        return a;
    if (t == 1.0)
        return b;
    State out{std::vector<double>(a.size())};
    for (std::size_t i = 0; i < space.translational_dimension(); ++i)
        out.coords[i] = a[i] + t * (b[i] - a[i]);
    if (space.is_se2())
        out.coords[2] = wrap_angle(a[2] + t * wrap_angle(b[2] - a[2]));
    return out;
}

struct Path
{
    std::vector<State> states;
    double cost = 0.0;
};

/// Sum of metric distances between consecutive states.
inline double path_length(const StateSpace &space, const std::vector<State> &states)
{
    double total = 0.0;
    for (std::size_t i = 1; i < states.size(); ++i)
        total += distance(space, states[i - 1], states[i]);
    return total;
}

}  // namespace guild
