#pragma once

#include <cmath>
#include <cstddef>
#include <span>
#include <vector>

#include "tsfrac/errors.hpp"
#include "tsfrac/gammafn.hpp"
#include "tsfrac/nabla.hpp"
#include "tsfrac/timescale.hpp"

namespace tsfrac {

/// Fractional order restricted to (0, 1), the regime the solver theory covers.
class FracOrder {
public:
    explicit FracOrder(double w) : w_(w) {
        if (!(w > 0.0 && w < 1.0))
            throw Error("FracOrder: order must lie strictly in (0, 1)");
    }
    double value() const { return w_; }

private:
    double w_;
};

/**
 * Product-integration core shared by every fractional operator:
 *
 *   integral over (from, to] of (u - alpha(z))^(power-1) v(z), nabla sense,
 *
 * where u = nodes[base + upper] and from <= to <= upper. Scattered steps
 * contribute graininess * kernel * v exactly. On continuous sub-segments the
 * kernel is integrated in closed form against the segment's midpoint value
 * (linear interpolation of v), so the endpoint singularity at z -> u needs
 * no special casing: the kernel moment [(u-t_j)^p - (u-t_{j+1})^p]/p is
 * finite. `base` shifts node indexing so callers may pass segment-local
 * value arrays.
 */
inline double kernel_weighted_integral(const Grid& g, std::span<const double> v,
                                       double power, std::size_t from,
                                       std::size_t to, std::size_t upper,
                                       std::size_t base = 0) {
    if (from > to || to > upper)
        throw NodesOutOfOrder("kernel_weighted_integral: need from <= to <= upper");
    const double u = g.node(base + upper);
    double acc = 0.0;
    for (std::size_t j = from + 1; j <= to; ++j) {
        const std::size_t gj = base + j;
        if (g.scattered(gj)) {
            acc += g.graininess(gj) *
                   std::pow(u - g.node(gj - 1), power - 1.0) * v[j];
        } else {
            const double tj = g.node(gj - 1);
            const double tj1 = g.node(gj);
            const double vbar = 0.5 * (v[j - 1] + v[j]);
            acc += vbar *
                   (std::pow(u - tj, power) - std::pow(u - tj1, power)) / power;
        }
    }
    return acc;
}

/// Nabla fractional integral of order w from node a evaluated at node theta.
inline double frac_integral(const GridFunction& f, FracOrder w, std::size_t a,
                            std::size_t theta) {
    detail::require_calculus_grid(f.grid());
    if (a > theta)
        throw NodesOutOfOrder("frac_integral: a > theta");
    if (a == theta)
        return 0.0;
    return kernel_weighted_integral(f.grid(), f.values(), w.value(), a, theta,
                                    theta) /
           gamma_fn(w.value());
}

namespace detail {

/// Backward-difference channel used by the Caputo operator. The first node
/// copies its successor's value so continuous segments starting at `a` have
/// both endpoint samples; scattered nodes keep their exact jump quotient.
inline std::vector<double> derivative_channel(const GridFunction& f,
                                              std::size_t a,
                                              std::size_t theta) {
    std::vector<double> d(f.size(), 0.0);
    const auto& g = f.grid();
    for (std::size_t i = a + 1; i <= theta; ++i)
        d[i] = (f[i] - f[i - 1]) / (g.node(i) - g.node(i - 1));
    d[a] = d[a + 1];
    return d;
}

} // namespace detail

/// Caputo nabla derivative of order w in (0, 1): the fractional integral of
/// order 1-w applied to the nabla derivative. Annihilates constants exactly.
inline double caputo_nabla(const GridFunction& f, FracOrder w, std::size_t a,
                           std::size_t theta) {
    detail::require_calculus_grid(f.grid());
    if (a >= theta)
        throw NodesOutOfOrder("caputo_nabla: requires a < theta");
    const auto d = detail::derivative_channel(f, a, theta);
    const double p = 1.0 - w.value();
    return kernel_weighted_integral(f.grid(), d, p, a, theta, theta) /
           gamma_fn(p);
}

/// Riemann-Liouville nabla derivative of order w in (0, 1): the nabla
/// derivative of the fractional integral of order 1-w. Does not annihilate
/// constants.
inline double rl_nabla(const GridFunction& f, FracOrder w, std::size_t a,
                       std::size_t theta) {
    detail::require_calculus_grid(f.grid());
    if (a >= theta)
        throw NodesOutOfOrder("rl_nabla: requires a < theta");
    const auto& g = f.grid();
    const double p = 1.0 - w.value();
    const double gp = gamma_fn(p);
    const double g_theta =
        kernel_weighted_integral(g, f.values(), p, a, theta, theta) / gp;
    const double g_prev =
        theta - 1 == a
            ? 0.0
            : kernel_weighted_integral(g, f.values(), p, a, theta - 1,
                                       theta - 1) / gp;
    return (g_theta - g_prev) / (g.node(theta) - g.node(theta - 1));
}

/// Caputo derivative through the Riemann-Liouville route: for w in (0, 1)
/// the Taylor remainder reduces to the constant f(rho), so this is the RL
/// derivative of the shifted function f - f(rho).
inline double caputo_via_rl(const GridFunction& f, FracOrder w,
                            std::size_t rho, std::size_t theta) {
    if (rho >= theta)
        throw NodesOutOfOrder("caputo_via_rl: requires rho < theta");
    std::vector<double> shifted(f.values().begin(), f.values().end());
    const double base = f[rho];
    for (double& x : shifted)
        x -= base;
    return rl_nabla(GridFunction(f.grid_ptr(), std::move(shifted)), w, rho,
                    theta);
}

} // namespace tsfrac
