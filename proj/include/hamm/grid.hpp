#ifndef HAMM_GRID_HPP
#define HAMM_GRID_HPP

#include <algorithm>
#include <cmath>
#include <random>
#include <string>
#include <vector>

#include <Eigen/Core>

#include "hamm/errors.hpp"

/*
 * Uniform grids on [0,1] and sampled C^1 functions.
 *
 * A GridFunction stores samples of u and of u' at the nodes t_j = j/n,
 * j = 0..n. All quadrature is the composite trapezoidal rule. Sums are
 * accumulated with Neumaier compensation and divided by n at the end, which
 * makes the rule exact to the last bit on constant and affine integrands.
 */

namespace hamm {

inline constexpr double kConeTolerance = 1e-9;

template <typename Scalar>
using VectorX = Eigen::Matrix<Scalar, Eigen::Dynamic, 1>;

template <typename Scalar>
class Grid {
public:
    using Index = Eigen::Index;

    explicit Grid(Index intervals) : n_(intervals) {
        if (n_ < 2)
            throw ParameterError("grid needs at least 2 subintervals, got " + std::to_string(n_));
    }

    Index intervals() const { return n_; }
    Index size() const { return n_ + 1; }
    Scalar step() const { return Scalar(1) / Scalar(n_); }
    Scalar node(Index j) const { return Scalar(j) / Scalar(n_); }

    VectorX<Scalar> nodes() const {
        VectorX<Scalar> t(size());
        for (Index j = 0; j <= n_; ++j)
            t(j) = node(j);
        return t;
    }

    // Index of the node closest to t (t clamped to [0,1]).
    Index nearest(Scalar t) const {
        const Scalar x = std::clamp(t, Scalar(0), Scalar(1)) * Scalar(n_);
        return std::clamp<Index>(static_cast<Index>(std::lround(static_cast<double>(x))), 0, n_);
    }

    friend bool operator==(const Grid& a, const Grid& b) { return a.n_ == b.n_; }

private:
    Index n_;
};

template <typename Scalar>
struct GridFunction {
    Grid<Scalar> grid;
    VectorX<Scalar> values;
    VectorX<Scalar> dvalues;

    GridFunction(Grid<Scalar> g, VectorX<Scalar> u, VectorX<Scalar> du)
        : grid(g), values(std::move(u)), dvalues(std::move(du)) {
        if (values.size() != grid.size() || dvalues.size() != grid.size())
            throw ShapeError("grid function needs " + std::to_string(grid.size()) + " samples, got "
                             + std::to_string(values.size()) + "/" + std::to_string(dvalues.size()));
    }

    static GridFunction zero(Grid<Scalar> g) {
        return GridFunction(g, VectorX<Scalar>::Zero(g.size()), VectorX<Scalar>::Zero(g.size()));
    }

    // Samples u and u' from callables.
    template <typename F, typename DF>
    static GridFunction sample(Grid<Scalar> g, F&& u, DF&& du) {
        VectorX<Scalar> a(g.size()), b(g.size());
        for (Eigen::Index j = 0; j < g.size(); ++j) {
            a(j) = u(g.node(j));
            b(j) = du(g.node(j));
        }
        return GridFunction(g, std::move(a), std::move(b));
    }
};

using Gridd = Grid<double>;
using GridFunctiond = GridFunction<double>;
using VectorXd = VectorX<double>;

namespace detail {

// Neumaier-compensated accumulator.
template <typename Scalar>
struct CompensatedSum {
    Scalar sum{0};
    Scalar carry{0};

    void add(Scalar x) {
        const Scalar t = sum + x;
        if (std::abs(sum) >= std::abs(x))
            carry += (sum - t) + x;
        else
            carry += (x - t) + sum;
        sum = t;
    }
    Scalar value() const { return sum + carry; }
};

template <typename Scalar, typename Derived>
void require_grid_length(const Eigen::MatrixBase<Derived>& samples, const Grid<Scalar>& grid) {
    if (samples.size() != grid.size())
        throw ShapeError("expected " + std::to_string(grid.size()) + " samples, got "
                         + std::to_string(samples.size()));
}

// Trapezoid over the node range [first, last].
template <typename Scalar, typename Derived>
Scalar trapezoid(const Eigen::MatrixBase<Derived>& f, const Grid<Scalar>& grid, Eigen::Index first,
                 Eigen::Index last) {
    if (first >= last)
        return Scalar(0);
    CompensatedSum<Scalar> acc;
    acc.add(Scalar(0.5) * f(first));
    for (Eigen::Index i = first + 1; i < last; ++i)
        acc.add(f(i));
    acc.add(Scalar(0.5) * f(last));
    return acc.value() / Scalar(grid.intervals());
}

} // namespace detail

/// Composite trapezoidal value of the integral over [0,1].
template <typename Scalar, typename Derived>
Scalar integrate(const Eigen::MatrixBase<Derived>& samples, const Grid<Scalar>& grid) {
    detail::require_grid_length(samples, grid);
    return detail::trapezoid(samples, grid, 0, grid.intervals());
}

/// Trapezoidal value of the integral over [t_j, 1].
template <typename Scalar, typename Derived>
Scalar integrate_tail(const Eigen::MatrixBase<Derived>& samples, const Grid<Scalar>& grid,
                      Eigen::Index j) {
    detail::require_grid_length(samples, grid);
    if (j < 0 || j > grid.intervals())
        throw ShapeError("node index " + std::to_string(j) + " outside 0.." + std::to_string(grid.intervals()));
    return detail::trapezoid(samples, grid, j, grid.intervals());
}

/// Trapezoidal value of the integral over [0, t_j].
template <typename Scalar, typename Derived>
Scalar integrate_head(const Eigen::MatrixBase<Derived>& samples, const Grid<Scalar>& grid,
                      Eigen::Index j) {
    detail::require_grid_length(samples, grid);
    if (j < 0 || j > grid.intervals())
        throw ShapeError("node index " + std::to_string(j) + " outside 0.." + std::to_string(grid.intervals()));
    return detail::trapezoid(samples, grid, 0, j);
}

/// Running trapezoid integral: out(j) = integral over [0, t_j].
template <typename Scalar, typename Derived>
VectorX<Scalar> cumulative_integral(const Eigen::MatrixBase<Derived>& samples, const Grid<Scalar>& grid) {
    detail::require_grid_length(samples, grid);
    VectorX<Scalar> out(grid.size());
    detail::CompensatedSum<Scalar> acc;
    out(0) = Scalar(0);
    for (Eigen::Index i = 1; i < grid.size(); ++i) {
        acc.add(Scalar(0.5) * (samples(i - 1) + samples(i)));
        out(i) = acc.value() / Scalar(grid.intervals());
    }
    return out;
}

/// Grid approximation of max{ sup|u|, sup|u'| }.
template <typename Scalar>
Scalar c1_norm(const GridFunction<Scalar>& u) {
    return std::max(u.values.cwiseAbs().maxCoeff(), u.dvalues.cwiseAbs().maxCoeff());
}

template <typename Scalar>
Scalar sup_norm(const GridFunction<Scalar>& u) {
    return u.values.cwiseAbs().maxCoeff();
}

/// c1_norm(a - b). Both functions must live on the same grid.
template <typename Scalar>
Scalar c1_distance(const GridFunction<Scalar>& a, const GridFunction<Scalar>& b) {
    if (!(a.grid == b.grid))
        throw ShapeError("c1_distance: grid functions live on different grids");
    return std::max((a.values - b.values).cwiseAbs().maxCoeff(),
                    (a.dvalues - b.dvalues).cwiseAbs().maxCoeff());
}

namespace detail {

template <typename Scalar>
Scalar interpolate(const VectorX<Scalar>& samples, const Grid<Scalar>& grid, Scalar a) {
    if (!(a >= Scalar(0) && a <= Scalar(1)))
        throw DomainError("evaluation point " + std::to_string(static_cast<double>(a))
                          + " outside [0,1]");
    const Scalar x = a * Scalar(grid.intervals());
    const Eigen::Index k = grid.nearest(a);
    if (grid.node(k) == a)
        return samples(k);
    auto j = static_cast<Eigen::Index>(std::floor(static_cast<double>(x)));
    j = std::clamp<Eigen::Index>(j, 0, grid.intervals() - 1);
    const Scalar w = x - Scalar(j);
    if (w == Scalar(0))
        return samples(j);
    if (w == Scalar(1))
        return samples(j + 1);
    return (Scalar(1) - w) * samples(j) + w * samples(j + 1);
}

} // namespace detail

/// u(a) by linear interpolation; exact at nodes.
template <typename Scalar>
Scalar eval_at(const GridFunction<Scalar>& u, Scalar a) {
    return detail::interpolate(u.values, u.grid, a);
}

/// u'(a) by linear interpolation; exact at nodes.
template <typename Scalar>
Scalar eval_deriv_at(const GridFunction<Scalar>& u, Scalar a) {
    return detail::interpolate(u.dvalues, u.grid, a);
}

/// Cone membership: u >= -eps and u' >= -eps at every node.
template <typename Scalar>
bool in_cone(const GridFunction<Scalar>& u, Scalar eps = Scalar(kConeTolerance)) {
    return u.values.minCoeff() >= -eps && u.dvalues.minCoeff() >= -eps;
}

/// Node values are non-decreasing up to eps.
template <typename Scalar>
bool is_nondecreasing(const GridFunction<Scalar>& u, Scalar eps = Scalar(kConeTolerance)) {
    for (Eigen::Index j = 0; j + 1 < u.values.size(); ++j)
        if (u.values(j + 1) < u.values(j) - eps)
            return false;
    return true;
}

/// max_j |u(t_j) - u(0) - integral_0^{t_j} u'|.
template <typename Scalar>
Scalar consistency_defect(const GridFunction<Scalar>& u) {
    const VectorX<Scalar> primitive = cumulative_integral(u.dvalues, u.grid);
    return (u.values.array() - u.values(0) - primitive.array()).abs().maxCoeff();
}

/// Trapezoid-order tolerance for consistency_defect: 10 / n^2.
template <typename Scalar>
Scalar consistency_tolerance(const Grid<Scalar>& grid) {
    const Scalar n = Scalar(grid.intervals());
    return Scalar(10) / (n * n);
}

template <typename Scalar>
bool all_finite(const GridFunction<Scalar>& u) {
    return u.values.allFinite() && u.dvalues.allFinite();
}

/// Random piecewise-linear cone member with c1_norm(u) == norm.
///
/// u' is the linear interpolant of non-negative random knot values, u(0) is
/// a random non-negative offset and u = u(0) + cumulative integral of u'.
/// The result is rescaled to the requested norm; scaling keeps it in the
/// cone and keeps the sampled u, u' consistent.
template <typename Scalar, typename Rng>
GridFunction<Scalar> random_cone_function(const Grid<Scalar>& grid, Rng& rng, Scalar norm) {
    std::uniform_int_distribution<int> knot_count(1, 8);
    std::uniform_real_distribution<double> unit(0.0, 1.0);
    const int knots = knot_count(rng);
    std::vector<double> slope(knots + 1);
    for (auto& x : slope)
        x = unit(rng) < 0.2 ? 0.0 : unit(rng);
    const double offset = unit(rng) < 0.3 ? 0.0 : unit(rng);

    VectorX<Scalar> du(grid.size());
    for (Eigen::Index j = 0; j < grid.size(); ++j) {
        const double x = static_cast<double>(grid.node(j)) * knots;
        const int k = std::min(static_cast<int>(x), knots - 1);
        const double w = x - k;
        du(j) = Scalar((1.0 - w) * slope[k] + w * slope[k + 1]);
    }
    VectorX<Scalar> u = cumulative_integral(du, grid);
    u.array() += Scalar(offset);
    GridFunction<Scalar> out(grid, std::move(u), std::move(du));
    const Scalar current = c1_norm(out);
    if (current == Scalar(0)) {
        // Degenerate draw: fall back to the constant function.
        out.values.setConstant(norm);
        return out;
    }
    out.values *= norm / current;
    out.dvalues *= norm / current;
    return out;
}

} // namespace hamm

#endif // HAMM_GRID_HPP
