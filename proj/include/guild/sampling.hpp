#pragma once

#include <Eigen/Dense>

#include <array>
#include <cmath>
#include <cstdint>
#include <numbers>
#include <random>
#include <stdexcept>
#include <vector>

#include "guild/errors.hpp"
#include "guild/statespace.hpp"

namespace guild {

using Vector = Eigen::VectorXd;
using Matrix = Eigen::MatrixXd;

/// Default random source for the library.
using Rng = std::mt19937_64;

/// Measure of the unit n-ball: pi^(n/2) / Gamma(n/2 + 1).
inline double unit_ball_measure(std::size_t n)
{
    const double half = static_cast<double>(n) / 2.0;
    return std::pow(std::numbers::pi, half) / std::tgamma(half + 1.0);
}

/// Lebesgue measure of a prolate hyperspheroid in R^n with transverse
/// diameter `a` and focal distance `f`: K * a * (a^2 - f^2)^((n-1)/2),
/// K = pi^(n/2) / (2^n Gamma(n/2 + 1)).
inline double hyperspheroid_measure(std::size_t n, double transverse_diameter, double focal_distance)
{
    if (n < 2)
        throw std::invalid_argument("hyperspheroid dimension must be at least 2");
    if (transverse_diameter < focal_distance)
        throw std::invalid_argument("transverse diameter is smaller than the focal distance");
    const double k = unit_ball_measure(n) / std::pow(2.0, static_cast<double>(n));
    const double a = transverse_diameter;
    const double f = focal_distance;
    return k * a * std::pow(a * a - f * f, (static_cast<double>(n) - 1.0) / 2.0);
}

/// Orthonormal matrix whose first column is the unit vector from `focus_a`
/// to `focus_b`. The other columns come from Gram-Schmidt over the unit axes,
/// skipping the axis most aligned with that direction. Coincident foci give
/// the identity.
inline Matrix rotation_to_world(const Vector &focus_a, const Vector &focus_b)
{
    if (focus_a.size() != focus_b.size())
        throw std::invalid_argument("foci have mismatched dimensions");
    const Eigen::Index n = focus_a.size();
    const Vector diff = focus_b - focus_a;
    const double norm = diff.norm();
    if (norm == 0.0)
        return Matrix::Identity(n, n);

    Matrix rot(n, n);
    rot.col(0) = diff / norm;
    Eigen::Index skip = 0;
    rot.col(0).cwiseAbs().maxCoeff(&skip);

    Eigen::Index col = 1;
    for (Eigen::Index axis = 0; axis < n; ++axis)
    {
        if (axis == skip)
            continue;
        Vector v = Vector::Unit(n, axis);
        // Two passes keep the basis orthonormal to near machine precision.
        for (int pass = 0; pass < 2; ++pass)
            for (Eigen::Index j = 0; j < col; ++j)
                v -= rot.col(j).dot(v) * rot.col(j);
        rot.col(col++) = v.normalized();
    }
    return rot;
}

/// The set {x : |focus_a - x| + |x - focus_b| <= transverse_diameter}.
class ProlateHyperspheroid
{
public:
    /// Relative slack under which a diameter shorter than the focal distance
    /// is treated as floating-point noise (degenerate) instead of an error.
    static constexpr double degeneracy_tolerance = 1e-9;

    ProlateHyperspheroid(Vector focus_a, Vector focus_b, double transverse_diameter)
        : focus_a_(std::move(focus_a)), focus_b_(std::move(focus_b)), diameter_(transverse_diameter)
    {
        if (focus_a_.size() != focus_b_.size())
            throw std::invalid_argument("foci have mismatched dimensions");
        if (focus_a_.size() < 2)
            throw std::invalid_argument("hyperspheroid dimension must be at least 2");
        focal_distance_ = (focus_b_ - focus_a_).norm();
        const double slack = degeneracy_tolerance * std::max(1.0, focal_distance_);
        if (!(diameter_ >= focal_distance_ - slack))
            throw std::invalid_argument("transverse diameter is smaller than the focal distance");
        center_ = 0.5 * (focus_a_ + focus_b_);
        rotation_ = rotation_to_world(focus_a_, focus_b_);
        radii_ = Vector::Constant(dimension(), conjugate_diameter() / 2.0);
        radii_[0] = diameter_ / 2.0;
    }

    Eigen::Index dimension() const noexcept { return focus_a_.size(); }
    const Vector &focus_a() const noexcept { return focus_a_; }
    const Vector &focus_b() const noexcept { return focus_b_; }
    const Vector &center() const noexcept { return center_; }
    const Matrix &rotation() const noexcept { return rotation_; }
    const Vector &radii() const noexcept { return radii_; }
    double transverse_diameter() const noexcept { return diameter_; }
    double focal_distance() const noexcept { return focal_distance_; }

    /// sqrt(a^2 - f^2), zero when degenerate.
    double conjugate_diameter() const noexcept
    {
        return is_degenerate() ? 0.0 : std::sqrt(diameter_ * diameter_ - focal_distance_ * focal_distance_);
    }

    bool is_degenerate() const noexcept { return diameter_ <= focal_distance_; }

    double measure() const
    {
        if (is_degenerate())
            return 0.0;
        return hyperspheroid_measure(static_cast<std::size_t>(dimension()), diameter_, focal_distance_);
    }

    /// Sum of focal distances from `x`.
    double focal_sum(const Vector &x) const { return (focus_a_ - x).norm() + (x - focus_b_).norm(); }

    bool contains(const Vector &x, double slack = 0.0) const { return focal_sum(x) <= diameter_ + slack; }

private:
    Vector focus_a_;
    Vector focus_b_;
    double diameter_;
    double focal_distance_ = 0.0;
    Vector center_;
    Matrix rotation_;
    Vector radii_;
};

inline double hyperspheroid_measure(const ProlateHyperspheroid &phs) { return phs.measure(); }

template <class Urbg>
double uniform01(Urbg &rng)
{
    return std::uniform_real_distribution<double>(0.0, 1.0)(rng);
}

/// Uniform point in the unit n-ball: normalized Gaussian direction scaled by U^(1/n).
template <class Urbg>
Vector sample_unit_ball(Eigen::Index n, Urbg &rng)
{
    std::normal_distribution<double> normal(0.0, 1.0);
    Vector v(n);
    double norm = 0.0;
    do
    {
        for (Eigen::Index i = 0; i < n; ++i)
            v[i] = normal(rng);
        norm = v.norm();
    } while (norm == 0.0);
    const double radius = std::pow(uniform01(rng), 1.0 / static_cast<double>(n));
    return v * (radius / norm);
}

/// Analytic uniform sample of a prolate hyperspheroid. A degenerate set
/// (a = f) has no interior; a uniform point on the focal segment is returned.
template <class Urbg>
Vector sample_hyperspheroid(const ProlateHyperspheroid &phs, Urbg &rng)
{
    if (phs.is_degenerate())
        return phs.focus_a() + uniform01(rng) * (phs.focus_b() - phs.focus_a());
    const Vector ball = sample_unit_ball(phs.dimension(), rng);
    return phs.rotation() * phs.radii().cwiseProduct(ball) + phs.center();
}

/// Translational coordinates of a state as an Eigen vector.
inline Vector translational(const StateSpace &space, const State &x)
{
    const auto n = static_cast<Eigen::Index>(space.translational_dimension());
    Vector v(n);
    for (Eigen::Index i = 0; i < n; ++i)
        v[i] = x.coords[static_cast<std::size_t>(i)];
    return v;
}

/// Builds a full state from translational coordinates, drawing the SE(2)
/// heading uniformly.
template <class Urbg>
State complete_state(const StateSpace &space, const Vector &trans, Urbg &rng)
{
    std::vector<double> coords(trans.data(), trans.data() + trans.size());
    if (space.is_se2())
        coords.push_back(std::uniform_real_distribution<double>(-std::numbers::pi, std::numbers::pi)(rng));
    return space.make_state(std::move(coords));
}

namespace detail {

inline bool within_bounds(const StateSpace &space, const Vector &trans)
{
    for (Eigen::Index i = 0; i < trans.size(); ++i)
    {
        const auto k = static_cast<std::size_t>(i);
        if (trans[i] < space.lower_bounds()[k] || trans[i] > space.upper_bounds()[k])
            return false;
    }
    return true;
}

}  // namespace detail

/// Local Subsets induced by a beacon: E(v_s, b, g(b)) and E(b, v_t, c - g(b)).
/// Both live in the translational subspace.
struct LocalSubsets
{
    ProlateHyperspheroid start_beacon;
    ProlateHyperspheroid beacon_target;

    static LocalSubsets make(const Vector &start, const Vector &beacon, const Vector &target,
                             double cost_to_come, double best_cost)
    {
        return LocalSubsets{ProlateHyperspheroid(start, beacon, cost_to_come),
                            ProlateHyperspheroid(beacon, target, best_cost - cost_to_come)};
    }

    /// Sum of member measures, an upper bound on the measure of the union.
    double measure() const { return start_beacon.measure() + beacon_target.measure(); }

    bool is_degenerate() const { return start_beacon.is_degenerate() && beacon_target.is_degenerate(); }
};

/// Which member a union sample came from; reported for diagnostics and tests.
struct UnionSample
{
    State state;
    int member = 0;  // 0 = start-beacon, 1 = beacon-target
    std::size_t attempts = 0;
};

constexpr std::size_t union_retry_cap = 10'000;

/// Uniform sample over (start_beacon U beacon_target) intersected with the
/// space bounds: measure-proportional member choice, then rejection by the
/// number of members containing the draw, then bounds rejection.
template <class Urbg>
UnionSample sample_local_subsets_detailed(const LocalSubsets &ls, const StateSpace &space, Urbg &rng)
{
    const double m0 = ls.start_beacon.measure();
    const double m1 = ls.beacon_target.measure();
    if (!(m0 > 0.0) && !(m1 > 0.0))
        throw DegenerateSubsetError("both local subsets have zero measure");
    const double p0 = m0 / (m0 + m1);
    const std::array<const ProlateHyperspheroid *, 2> members{&ls.start_beacon, &ls.beacon_target};

    for (std::size_t attempt = 1; attempt <= union_retry_cap; ++attempt)
    {
        const int pick = uniform01(rng) < p0 ? 0 : 1;
        const Vector x = sample_hyperspheroid(*members[pick], rng);
        int count = 0;
        for (const auto *m : members)
            if (!m->is_degenerate() && m->contains(x, 1e-12 * std::max(1.0, m->transverse_diameter())))
                ++count;
        if (count > 1 && uniform01(rng) * count >= 1.0)
            continue;
        if (!detail::within_bounds(space, x))
            continue;
        return UnionSample{complete_state(space, x, rng), pick, attempt};
    }
    throw SamplingStarvedError("local subset sampling exceeded the retry cap");
}

template <class Urbg>
State sample_local_subsets(const LocalSubsets &ls, const StateSpace &space, Urbg &rng)
{
    return sample_local_subsets_detailed(ls, space, rng).state;
}

/// Uniform sample of a single hyperspheroid clipped to the space bounds.
template <class Urbg>
State sample_hyperspheroid_in_bounds(const ProlateHyperspheroid &phs, const StateSpace &space, Urbg &rng)
{
    for (std::size_t attempt = 0; attempt < union_retry_cap; ++attempt)
    {
        const Vector x = sample_hyperspheroid(phs, rng);
        if (detail::within_bounds(space, x))
            return complete_state(space, x, rng);
    }
    throw SamplingStarvedError("informed set sampling exceeded the retry cap");
}

/// Uniform sample of the space bounds (collision is the caller's concern).
template <class Urbg>
State sample_uniform(const StateSpace &space, Urbg &rng)
{
    const std::size_t n = space.translational_dimension();
    Vector x(static_cast<Eigen::Index>(n));
    for (std::size_t i = 0; i < n; ++i)
        x[static_cast<Eigen::Index>(i)] = std::uniform_real_distribution<double>(
            space.lower_bounds()[i], space.upper_bounds()[i])(rng);
    return complete_state(space, x, rng);
}

inline constexpr std::array<std::uint32_t, 10> halton_bases{2, 3, 5, 7, 11, 13, 17, 19, 23, 29};

/// Radical inverse of `index` in `base`.
inline double radical_inverse(std::uint64_t index, std::uint32_t base)
{
    const double inv_base = 1.0 / base;
    double scale = inv_base;
    double result = 0.0;
    while (index > 0)
    {
        result += static_cast<double>(index % base) * scale;
        index /= base;
        scale *= inv_base;
    }
    return result;
}

/// Halton point in [0,1)^dimension using the first `dimension` primes, no scrambling.
inline std::vector<double> halton_sequence(std::uint64_t index, std::size_t dimension)
{
    if (dimension > halton_bases.size())
        throw std::invalid_argument("Halton sequence supports at most 10 dimensions");
    std::vector<double> point(dimension);
    for (std::size_t d = 0; d < dimension; ++d)
        point[d] = radical_inverse(index, halton_bases[d]);
    return point;
}

}  // namespace guild
