#pragma once

#include <cmath>
#include <memory>
#include <span>
#include <utility>
#include <vector>

#include "tsfrac/errors.hpp"
#include "tsfrac/timescale.hpp"

namespace tsfrac {

/// Function values sampled on a grid, one value per node.
class GridFunction {
public:
    GridFunction(std::shared_ptr<const Grid> grid, std::vector<double> values)
        : grid_(std::move(grid)), values_(std::move(values)) {
        if (values_.size() != grid_->size())
            throw Error("GridFunction: one value per grid node required");
        for (double v : values_)
            if (!std::isfinite(v))
                throw NonFiniteResult("GridFunction: non-finite sample");
    }

    template <class F>
    static GridFunction sample(std::shared_ptr<const Grid> grid, F&& f) {
        std::vector<double> vals;
        vals.reserve(grid->size());
        for (double x : grid->nodes())
            vals.push_back(f(x));
        return GridFunction(std::move(grid), std::move(vals));
    }

    const Grid& grid() const { return *grid_; }
    std::shared_ptr<const Grid> grid_ptr() const { return grid_; }
    std::span<const double> values() const { return values_; }
    double operator[](std::size_t i) const { return values_[i]; }
    std::size_t size() const { return values_.size(); }

private:
    std::shared_ptr<const Grid> grid_;
    std::vector<double> values_;
};

namespace detail {
inline void require_calculus_grid(const Grid& g) {
    if (g.timescale().degenerate() || g.size() < 2)
        throw DegenerateTimeScale(
            "calculus operation on a single-point time scale");
}
} // namespace detail

/// Backward (nabla) derivative at node i. At a left-scattered node this is
/// the exact difference quotient across the gap; at a left-dense node it is
/// the backward difference over the adjacent grid node. Either way the
/// relevant predecessor is node i-1.
inline double nabla_derivative(const GridFunction& f, std::size_t i) {
    detail::require_calculus_grid(f.grid());
    if (i == 0)
        throw NoPredecessor("nabla_derivative: first node has no predecessor");
    const auto& g = f.grid();
    return (f[i] - f[i - 1]) / (g.node(i) - g.node(i - 1));
}

/// Nabla integral over [a, b]: the exact scattered contribution
/// graininess * f at each gap-crossing node, the trapezoid rule inside
/// continuous runs. Additive over adjacent ranges by construction.
inline double nabla_integral(const GridFunction& f, std::size_t a,
                             std::size_t b) {
    detail::require_calculus_grid(f.grid());
    if (a > b)
        throw NodesOutOfOrder("nabla_integral: a > b");
    const auto& g = f.grid();
    double acc = 0.0;
    for (std::size_t j = a + 1; j <= b; ++j) {
        const double dt = g.node(j) - g.node(j - 1);
        if (g.scattered(j))
            acc += dt * f[j];
        else
            acc += dt * 0.5 * (f[j - 1] + f[j]);
    }
    return acc;
}

struct ExtensionCheck {
    double lhs;   // nabla integral over the time scale
    double rhs;   // real-line integral of the piecewise extension
    bool holds;   // lhs <= rhs + tolerance
};

/// Compares the nabla integral of a non-decreasing function with the
/// real-line integral of its step extension (constant across gaps, taking
/// the value at the gap's right end). Errors with NotIncreasing when the
/// sampled values decrease.
inline ExtensionCheck extension_inequality_check(const GridFunction& f,
                                                 std::size_t a, std::size_t b,
                                                 double tol = 1e-9) {
    detail::require_calculus_grid(f.grid());
    if (a >= b)
        throw NodesOutOfOrder("extension_inequality_check: requires a < b");
    for (std::size_t j = a + 1; j <= b; ++j)
        if (f[j] < f[j - 1])
            throw NotIncreasing(
                "extension_inequality_check: values decrease between nodes");

    const auto& g = f.grid();
    const double lhs = nabla_integral(f, a, b);
    double rhs = 0.0;
    for (std::size_t j = a + 1; j <= b; ++j) {
        const double dt = g.node(j) - g.node(j - 1);
        if (g.scattered(j))
            rhs += dt * f[j];
        else
            rhs += dt * 0.5 * (f[j - 1] + f[j]);
    }
    return {lhs, rhs, lhs <= rhs + tol};
}

} // namespace tsfrac
