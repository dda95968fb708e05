#pragma once

#include <cmath>
#include <cstddef>
#include <memory>
#include <span>
#include <string>
#include <utility>
#include <vector>

#include "tsfrac/errors.hpp"
#include "tsfrac/expr.hpp"
#include "tsfrac/frac_ops.hpp"
#include "tsfrac/timescale.hpp"

namespace tsfrac {

/// Iterate magnitudes beyond this are treated as divergence immediately
/// instead of waiting for iteration counts to run out.
inline constexpr double kDivergenceBound = 1e12;

enum class HistoryVariant {
    /// History integrals keep their kernel frozen at the segment end where
    /// they were accumulated; the running kernel restarts at each impulse.
    Frozen,
    /// One kernel spanning the whole history (the standard memory-carrying
    /// form), shipped for side-by-side comparison.
    Memory,
};

struct Impulse {
    double time = 0.0;
    Expr map;                    // expression in (theta, p)
    std::size_t config_line = 0; // 0 when not built from a config file
};

/// Problem data: order, implicit right-hand side, impulses, and the
/// non-local initial functional phi realized through a single anchor value.
struct ImpulsiveProblem {
    TimeScale ts;
    FracOrder w;
    Expr rhs;          // expression in (theta, p, h)
    std::vector<Impulse> impulses;
    Expr phi;          // expression in (pa)
    double phi_anchor; // where the anchor value is read; defaults to T
    HistoryVariant variant = HistoryVariant::Frozen;

    ImpulsiveProblem(TimeScale ts_, FracOrder w_, Expr rhs_,
                     std::vector<Impulse> impulses_, Expr phi_, double anchor,
                     HistoryVariant variant_ = HistoryVariant::Frozen)
        : ts(std::move(ts_)), w(w_), rhs(std::move(rhs_)),
          impulses(std::move(impulses_)), phi(std::move(phi_)),
          phi_anchor(anchor), variant(variant_) {
        validate();
    }

    void validate() const {
        if (ts.degenerate())
            throw InvalidProblem(
                "time scale has a single point; nothing to solve");
        double prev = ts.min();
        for (const auto& imp : impulses) {
            if (!ts.contains(imp.time))
                throw InvalidProblem("impulse time " +
                                     std::to_string(imp.time) +
                                     " is not in the time scale");
            if (imp.time <= prev + kMembershipTol)
                throw InvalidProblem(
                    "impulse times must be strictly increasing and interior");
            if (imp.time >= ts.max() - kMembershipTol)
                throw InvalidProblem("impulse time must lie below the horizon");
            prev = imp.time;
        }
        if (!ts.contains(phi_anchor))
            throw InvalidProblem("phi anchor point is not in the time scale");
    }
};

struct SolverConfig {
    double mesh = 1e-3;
    double tol_h = 1e-12;
    double tol_picard = 1e-10;
    double tol_outer = 1e-10;
    int max_inner = 100;
    int max_picard = 200;
    int max_outer = 100;

    void validate() const {
        if (!(mesh > 0 && tol_h > 0 && tol_picard > 0 && tol_outer > 0))
            throw InvalidProblem("solver tolerances and mesh must be positive");
        if (max_inner < 1 || max_picard < 1 || max_outer < 1)
            throw InvalidProblem("iteration limits must be at least 1");
    }
};

struct Solution {
    std::shared_ptr<const Grid> grid;
    std::vector<double> p; // per node; impulse nodes carry the left limit
    std::vector<double> h; // per node; impulse nodes carry the left limit
    std::vector<std::size_t> segment_of_node; // impulse nodes -> left segment

    struct Jump {
        std::size_t node;
        double p_minus, p_plus;
        double h_minus, h_plus;
    };
    std::vector<Jump> jumps;

    int outer_iterations = 0;
    long picard_sweeps = 0;
    long inner_iterations = 0;
    std::vector<double> outer_values; // the sequence c_0, c_1, ...
    double residual = 0.0;
};

/// Solves the scalar implicit equation h = rhs(theta, p, h) by fixed-point
/// iteration from h = 0. The returned value satisfies
/// |h - rhs(theta, p, h)| <= tol_h.
inline double solve_inner_h(double theta, double p, const Expr& rhs,
                            const SolverConfig& cfg,
                            long* iteration_count = nullptr) {
    Bindings b;
    b.theta = theta;
    b.p = p;
    double h = 0.0;
    double prev_step = 0.0;
    for (int n = 0; n < cfg.max_inner; ++n) {
        b.h = h;
        const double v = rhs.eval(b);
        if (iteration_count) ++*iteration_count;
        const double step = std::abs(v - h);
        if (!std::isfinite(v) || std::abs(v) > kDivergenceBound)
            throw InnerDiverged("fixed point for the implicit right-hand side "
                                "blew up at theta = " + std::to_string(theta),
                                v, prev_step > 0 ? step / prev_step : 0.0);
        if (step <= cfg.tol_h)
            return v;
        prev_step = step;
        h = v;
    }
    throw InnerDiverged(
        "no convergence for the implicit right-hand side within " +
            std::to_string(cfg.max_inner) + " iterations at theta = " +
            std::to_string(theta) + " (contraction in h likely >= 1)",
        h, 1.0);
}

/// Evaluates the impulse jump: p_minus + I_k(theta_k, p_minus).
inline double apply_impulse(const ImpulsiveProblem& problem, std::size_t k,
                            double p_minus) {
    if (k >= problem.impulses.size())
        throw InvalidProblem("apply_impulse: impulse index out of range");
    Bindings b;
    b.theta = problem.impulses[k].time;
    b.p = p_minus;
    double jump;
    try {
        jump = problem.impulses[k].map.eval(b);
    } catch (const NonFiniteResult& e) {
        throw ExpressionEvalError(std::string("impulse map: ") + e.what());
    }
    return p_minus + jump;
}

struct SegmentResult {
    std::vector<double> p; // values on [first, last]
    std::vector<double> h;
    int sweeps = 0;
};

/// Picard iteration on one impulse-free segment [first, last] of the grid:
///
///   p(theta) = p_start + offset(theta)
///            + (1/Gamma(w)) * integral over (seg start, theta] of
///              (theta - alpha(z))^(w-1) h(z), nabla sense,
///
/// with h recomputed from the implicit right-hand side at every node each
/// sweep. `node_offset` carries theta-dependent history terms (empty means
/// none; the restarted-kernel variant folds history into p_start). Iterates
/// until the sup-norm change drops below tol_picard; the stored h is then
/// refreshed once so it matches the returned p.
inline SegmentResult picard_segment(const Grid& grid, std::size_t first,
                                    std::size_t last, double p_start,
                                    std::span<const double> node_offset,
                                    const ImpulsiveProblem& problem,
                                    const SolverConfig& cfg,
                                    long* inner_count = nullptr) {
    const std::size_t n = last - first + 1;
    const double w = problem.w.value();
    const double gw = gamma_fn(w);

    SegmentResult res;
    res.p.assign(n, p_start);
    res.h.assign(n, 0.0);
    std::vector<double> next(n);

    const auto offset_at = [&](std::size_t i) {
        return node_offset.empty() ? 0.0 : node_offset[i];
    };

    double prev_delta = 0.0;
    double delta = 0.0;
    for (int sweep = 0; sweep < cfg.max_picard; ++sweep) {
        ++res.sweeps;
        for (std::size_t i = 0; i < n; ++i)
            res.h[i] = solve_inner_h(grid.node(first + i), res.p[i],
                                     problem.rhs, cfg, inner_count);

        next[0] = p_start;
        for (std::size_t i = 1; i < n; ++i) {
            const double q =
                kernel_weighted_integral(grid, res.h, w, 0, i, i, first);
            next[i] = p_start + offset_at(i) + q / gw;
        }

        prev_delta = delta;
        delta = 0.0;
        for (std::size_t i = 0; i < n; ++i) {
            delta = std::max(delta, std::abs(next[i] - res.p[i]));
            if (!std::isfinite(next[i]) || std::abs(next[i]) > kDivergenceBound)
                throw PicardDiverged(
                    "segment iteration blew up near theta = " +
                        std::to_string(grid.node(first + i)),
                    next[i], prev_delta > 0 ? delta / prev_delta : 0.0);
        }
        res.p.swap(next);
        if (delta <= cfg.tol_picard) {
            for (std::size_t i = 0; i < n; ++i)
                res.h[i] = solve_inner_h(grid.node(first + i), res.p[i],
                                         problem.rhs, cfg, inner_count);
            return res;
        }
    }
    throw PicardDiverged(
        "segment iteration did not converge within " +
            std::to_string(cfg.max_picard) +
            " sweeps (contraction condition likely violated)",
        res.p.back(), prev_delta > 0 ? delta / prev_delta : 1.0);
}

namespace detail {

struct Trajectory {
    std::vector<double> p, h;           // per node, left limits at impulses
    std::vector<double> p_plus, h_plus; // right limits, per impulse
    std::vector<std::size_t> seg_of_node;
    long picard_sweeps = 0;
    long inner_iterations = 0;
};

inline Trajectory run_trajectory(const Grid& grid,
                                 const std::vector<std::size_t>& boundaries,
                                 double p0, const ImpulsiveProblem& problem,
                                 const SolverConfig& cfg) {
    Trajectory tr;
    const std::size_t n = grid.size();
    tr.p.assign(n, 0.0);
    tr.h.assign(n, 0.0);
    tr.seg_of_node.assign(n, 0);

    const double w = problem.w.value();
    const double gw = gamma_fn(w);
    const std::size_t m = problem.impulses.size();

    // h channel for whole-history quadratures: right limits substituted at
    // impulse nodes already passed.
    std::vector<double> h_quad(n, 0.0);

    double p_start = p0;
    double jump_sum = 0.0;
    std::vector<double> offsets;

    for (std::size_t k = 0; k + 1 < boundaries.size(); ++k) {
        const std::size_t first = boundaries[k];
        const std::size_t last = boundaries[k + 1];

        offsets.clear();
        if (problem.variant == HistoryVariant::Memory && k > 0) {
            offsets.assign(last - first + 1, 0.0);
            for (std::size_t i = first + 1; i <= last; ++i)
                offsets[i - first] =
                    kernel_weighted_integral(grid, h_quad, w, 0, first, i) /
                        gw +
                    (p0 + jump_sum) - p_start;
            // first node stays exactly p_start = p_minus + jump
        }

        auto seg = picard_segment(grid, first, last, p_start,
                                  offsets.empty()
                                      ? std::span<const double>{}
                                      : std::span<const double>(offsets),
                                  problem, cfg, &tr.inner_iterations);
        tr.picard_sweeps += seg.sweeps;

        // impulse nodes keep their left-limit values: segment k >= 1 starts
        // writing after its shared boundary node
        for (std::size_t i = (k == 0 ? first : first + 1); i <= last; ++i) {
            tr.p[i] = seg.p[i - first];
            tr.h[i] = seg.h[i - first];
            h_quad[i] = seg.h[i - first];
            tr.seg_of_node[i] = k;
        }

        if (k < m) {
            const double p_minus = seg.p.back();
            const double p_plus = apply_impulse(problem, k, p_minus);
            tr.p_plus.push_back(p_plus);
            long extra = 0;
            tr.h_plus.push_back(
                solve_inner_h(grid.node(last), p_plus, problem.rhs, cfg, &extra));
            tr.inner_iterations += extra;
            // history kernels past this impulse integrate the right limit
            h_quad[last] = tr.h_plus.back();
            jump_sum += p_plus - p_minus;
            p_start = p_plus;
        }
    }
    return tr;
}

} // namespace detail

/// Maximum defect of a solution substituted back into its piecewise integral
/// representation, evaluated with the stored h channel.
inline double residual(const Solution& sol, const ImpulsiveProblem& problem) {
    const Grid& grid = *sol.grid;
    const double w = problem.w.value();
    const double gw = gamma_fn(w);
    const double p0 = sol.p.front();

    std::vector<std::size_t> boundaries{0};
    for (const auto& j : sol.jumps)
        boundaries.push_back(j.node);
    boundaries.push_back(grid.size() - 1);

    // right limits substituted at impulse nodes as we pass them
    std::vector<double> h(sol.h.begin(), sol.h.end());

    double worst = 0.0;
    double jump_sum = 0.0;
    double frozen_history = 0.0;
    for (std::size_t k = 0; k + 1 < boundaries.size(); ++k) {
        const std::size_t first = boundaries[k];
        const std::size_t last = boundaries[k + 1];
        if (k > 0)
            h[first] = sol.jumps[k - 1].h_plus;

        for (std::size_t i = (k == 0 ? first : first + 1); i <= last; ++i) {
            double rhs_value = p0 + jump_sum;
            if (problem.variant == HistoryVariant::Frozen)
                rhs_value +=
                    frozen_history +
                    kernel_weighted_integral(grid, h, w, first, i, i) / gw;
            else
                rhs_value += kernel_weighted_integral(grid, h, w, 0, i, i) / gw;
            worst = std::max(worst, std::abs(sol.p[i] - rhs_value));
        }
        if (k < sol.jumps.size()) {
            frozen_history +=
                kernel_weighted_integral(grid, h, w, first, last, last) / gw;
            jump_sum += sol.jumps[k].p_plus - sol.jumps[k].p_minus;
        }
    }
    return worst;
}

/**
 * Full solve. Builds the grid with impulse times and the anchor forced onto
 * it, then iterates the scalar non-local initial value
 *
 *   c_{j+1} = phi(p(anchor) computed with p(0) = c_j),   c_0 = phi(0),
 *
 * with per-segment Picard iteration and impulse jumps inside, stopping when
 * |c_{j+1} - c_j| <= tol_outer.
 */
inline Solution solve(const ImpulsiveProblem& problem, const SolverConfig& cfg) {
    cfg.validate();
    problem.validate();

    std::vector<double> forced;
    for (const auto& imp : problem.impulses)
        forced.push_back(imp.time);
    forced.push_back(problem.phi_anchor);

    auto grid =
        std::make_shared<const Grid>(build_grid(problem.ts, cfg.mesh, forced));

    std::vector<std::size_t> boundaries{0};
    for (const auto& imp : problem.impulses)
        boundaries.push_back(*grid->find(imp.time));
    boundaries.push_back(grid->size() - 1);
    const std::size_t anchor_idx = *grid->find(problem.phi_anchor);

    const auto eval_phi = [&](double pa) {
        Bindings b;
        b.pa = pa;
        try {
            return problem.phi.eval(b);
        } catch (const NonFiniteResult& e) {
            throw ExpressionEvalError(std::string("phi: ") + e.what());
        }
    };

    Solution sol;
    sol.grid = grid;
    double c = eval_phi(0.0);
    sol.outer_values.push_back(c);

    double prev_delta = 0.0;
    for (int it = 0; it < cfg.max_outer; ++it) {
        auto tr = detail::run_trajectory(*grid, boundaries, c, problem, cfg);
        ++sol.outer_iterations;
        sol.picard_sweeps += tr.picard_sweeps;
        sol.inner_iterations += tr.inner_iterations;

        // anchor value under the left-limit convention at impulse nodes
        const double c_next = eval_phi(tr.p[anchor_idx]);
        sol.outer_values.push_back(c_next);
        const double delta = std::abs(c_next - c);
        if (!std::isfinite(c_next) || std::abs(c_next) > kDivergenceBound)
            throw OuterDiverged("non-local initial value iteration blew up",
                                c_next,
                                prev_delta > 0 ? delta / prev_delta : 0.0);

        if (delta <= cfg.tol_outer) {
            sol.p = std::move(tr.p);
            sol.h = std::move(tr.h);
            sol.segment_of_node = std::move(tr.seg_of_node);
            for (std::size_t k = 0; k < problem.impulses.size(); ++k) {
                const std::size_t node = boundaries[k + 1];
                sol.jumps.push_back({node, sol.p[node], tr.p_plus[k],
                                     sol.h[node], tr.h_plus[k]});
            }
            sol.residual = residual(sol, problem);
            return sol;
        }
        prev_delta = delta;
        c = c_next;
    }
    throw OuterDiverged(
        "non-local initial value iteration did not converge within " +
            std::to_string(cfg.max_outer) + " iterations",
        c, 1.0);
}

} // namespace tsfrac
