#pragma once

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <limits>
#include <optional>
#include <random>
#include <string>
#include <vector>

#include "tsfrac/errors.hpp"
#include "tsfrac/gammafn.hpp"
#include "tsfrac/solver.hpp"

namespace tsfrac {

/**
 * The quantitative constants behind the solvability hypotheses:
 *
 *   K, G   Lipschitz constants of the right-hand side in p and h (G < 1)
 *   A,F,E  affine growth bound |L| <= A + F|p| + E|h| (E < 1)
 *   M_k    bound on the k-th impulse map
 *   L_k    Lipschitz constant of the k-th impulse map in p
 *   mu     linear coefficient of the bound on phi (scalar reduction)
 *   H      Lipschitz constant of phi
 *
 * K, G of zero are accepted (no dependence on that argument); G or E at or
 * above 1 make the corresponding denominators meaningless and are reported
 * as failed conditions rather than rejected here.
 */
struct HypothesisConstants {
    double K = 0.0;
    double G = 0.0;
    double A = 0.0;
    double F = 0.0;
    double E = 0.0;
    std::vector<double> M;
    std::vector<double> L;
    double mu = 0.0;
    double H = 0.0;
    bool estimated = false; // true when produced by sampling, not supplied

    void validate(std::size_t m) const {
        if (K < 0 || G < 0 || A < 0 || F < 0 || E < 0 || mu < 0 || H < 0)
            throw InvalidProblem("hypothesis constants must be non-negative");
        if (M.size() != m || L.size() != m)
            throw InvalidProblem(
                "impulse constant lists must match the impulse count");
        for (double v : M)
            if (v < 0) throw InvalidProblem("impulse bounds must be non-negative");
        for (double v : L)
            if (v < 0) throw InvalidProblem("impulse Lipschitz constants must be non-negative");
    }
};

struct ContractionReport {
    double U = 0.0;          // sum of the three terms below
    double term_impulses = 0.0; // sum of L_k
    double term_phi = 0.0;      // H
    double term_rhs = 0.0;      // K T^w (m+1) / ((1-G) Gamma(w+1))
    bool satisfied = false;     // U < 1
    std::optional<double> sigma; // solution-norm ball radius, when defined
};

/// Uniqueness condition: U = sum L_k + H + K T^w (m+1)/((1-G) Gamma(w+1)),
/// satisfied when U < 1. The ball radius sigma is reported when its
/// denominator 1 - mu - (m+1) T^w F / (Gamma(w+1)(1-E)) is positive.
inline ContractionReport contraction_constant(const HypothesisConstants& c,
                                              FracOrder w, double T,
                                              std::size_t m) {
    c.validate(m);
    if (!(T > 0))
        throw InvalidProblem("horizon T must be positive");

    ContractionReport r;
    const double gw1 = gamma_fn(w.value() + 1.0);
    const double tw = std::pow(T, w.value());

    for (double lk : c.L)
        r.term_impulses += lk;
    r.term_phi = c.H;
    r.term_rhs = c.G < 1.0
                     ? c.K * tw * static_cast<double>(m + 1) /
                           ((1.0 - c.G) * gw1)
                     : std::numeric_limits<double>::infinity();
    r.U = r.term_impulses + r.term_phi + r.term_rhs;
    r.satisfied = r.U < 1.0;

    if (c.E < 1.0) {
        const double growth =
            static_cast<double>(m + 1) * tw / (gw1 * (1.0 - c.E));
        const double denom = 1.0 - c.mu - growth * c.F;
        if (denom > 0.0) {
            double msum = 0.0;
            for (double mk : c.M) msum += mk;
            r.sigma = (msum + growth * c.A) / denom;
        }
    }
    return r;
}

/// Existence condition: find beta > 0 with
///   mu beta + sum M_k + (m+1) T^w (A + F beta)/(Gamma(w+1)(1-E)) < beta.
/// The left side is affine, a*beta + b; a solution exists iff a < 1 and
/// b > 0, and then beta = b/(1-a) * (1 + margin) satisfies it strictly.
inline std::optional<double> existence_beta_search(const HypothesisConstants& c,
                                                   FracOrder w, double T,
                                                   std::size_t m,
                                                   double margin = 1e-6) {
    c.validate(m);
    if (c.E >= 1.0)
        return std::nullopt;
    const double gw1 = gamma_fn(w.value() + 1.0);
    const double growth =
        static_cast<double>(m + 1) * std::pow(T, w.value()) / (gw1 * (1.0 - c.E));
    const double a = c.mu + growth * c.F;
    double b = growth * c.A;
    for (double mk : c.M) b += mk;
    if (a >= 1.0 || b <= 0.0)
        return std::nullopt; // beta would not be positive
    return b / (1.0 - a) * (1.0 + margin);
}

/// Sampling region and resolution for numerical constant estimation.
struct SamplingBox {
    double theta_min = 0.0, theta_max = 1.0;
    double p_min = -1.0, p_max = 1.0;
    double h_min = -1.0, h_max = 1.0;
    int resolution = 21;     // grid points per axis
    int random_pairs = 2000; // extra random difference quotients
    unsigned seed = 0x5eed;
};

/**
 * Empirical lower bounds for the hypothesis constants by dense sampling of
 * difference quotients over the box: adjacent-grid quotients sweep each axis
 * and random pairs fill in between. Exact on affine right-hand sides. The
 * results are estimates, not certificates, and are flagged as such.
 */
inline HypothesisConstants estimate_constants(const ImpulsiveProblem& problem,
                                              const SamplingBox& box) {
    HypothesisConstants c;
    c.estimated = true;

    const int n = std::max(box.resolution, 2);
    const auto axis = [n](double lo, double hi, int i) {
        return lo + (hi - lo) * static_cast<double>(i) / (n - 1);
    };
    std::mt19937 rng(box.seed);
    std::uniform_real_distribution<double> uth(box.theta_min, box.theta_max);
    std::uniform_real_distribution<double> up(box.p_min, box.p_max);
    std::uniform_real_distribution<double> uh(box.h_min, box.h_max);

    const auto eval_rhs = [&](double th, double p, double h) {
        Bindings b;
        b.theta = th;
        b.p = p;
        b.h = h;
        try {
            return problem.rhs.eval(b);
        } catch (const NonFiniteResult& e) {
            throw ExpressionEvalError(std::string("rhs sampling: ") + e.what());
        }
    };

    // K, G, A by axis sweeps
    for (int it = 0; it < n; ++it) {
        const double th = axis(box.theta_min, box.theta_max, it);
        c.A = std::max(c.A, std::abs(eval_rhs(th, 0.0, 0.0)));
        for (int ih = 0; ih < n; ++ih) {
            const double h = axis(box.h_min, box.h_max, ih);
            double prev_p = axis(box.p_min, box.p_max, 0);
            double prev_v = eval_rhs(th, prev_p, h);
            for (int ip = 1; ip < n; ++ip) {
                const double p = axis(box.p_min, box.p_max, ip);
                const double v = eval_rhs(th, p, h);
                if (p != prev_p)
                    c.K = std::max(c.K, std::abs(v - prev_v) / (p - prev_p));
                prev_p = p;
                prev_v = v;
            }
        }
        for (int ip = 0; ip < n; ++ip) {
            const double p = axis(box.p_min, box.p_max, ip);
            double prev_h = axis(box.h_min, box.h_max, 0);
            double prev_v = eval_rhs(th, p, prev_h);
            for (int ih = 1; ih < n; ++ih) {
                const double h = axis(box.h_min, box.h_max, ih);
                const double v = eval_rhs(th, p, h);
                if (h != prev_h)
                    c.G = std::max(c.G, std::abs(v - prev_v) / (h - prev_h));
                prev_h = h;
                prev_v = v;
            }
        }
    }
    // random symmetric pairs
    for (int i = 0; i < box.random_pairs; ++i) {
        const double th = uth(rng);
        const double p1 = up(rng), p2 = up(rng);
        const double h1 = uh(rng), h2 = uh(rng);
        if (p1 != p2)
            c.K = std::max(c.K, std::abs(eval_rhs(th, p1, h1) -
                                         eval_rhs(th, p2, h1)) /
                                    std::abs(p1 - p2));
        if (h1 != h2)
            c.G = std::max(c.G, std::abs(eval_rhs(th, p1, h1) -
                                         eval_rhs(th, p1, h2)) /
                                    std::abs(h1 - h2));
    }
    // Lipschitz bounds double as growth coefficients:
    // |L(t,p,h)| <= |L(t,0,0)| + K|p| + G|h|.
    c.F = c.K;
    c.E = c.G;

    // impulse maps
    for (const auto& imp : problem.impulses) {
        double Mk = 0.0, Lk = 0.0;
        Bindings b;
        b.theta = imp.time;
        const auto eval_imp = [&](double p) {
            b.p = p;
            try {
                return imp.map.eval(b);
            } catch (const NonFiniteResult& e) {
                throw ExpressionEvalError(std::string("impulse sampling: ") +
                                          e.what());
            }
        };
        double prev_p = axis(box.p_min, box.p_max, 0);
        double prev_v = eval_imp(prev_p);
        Mk = std::abs(prev_v);
        for (int ip = 1; ip < n; ++ip) {
            const double p = axis(box.p_min, box.p_max, ip);
            const double v = eval_imp(p);
            Mk = std::max(Mk, std::abs(v));
            if (p != prev_p)
                Lk = std::max(Lk, std::abs(v - prev_v) / (p - prev_p));
            prev_p = p;
            prev_v = v;
        }
        for (int i = 0; i < box.random_pairs / 10; ++i) {
            const double p1 = up(rng), p2 = up(rng);
            if (p1 != p2)
                Lk = std::max(Lk, std::abs(eval_imp(p1) - eval_imp(p2)) /
                                      std::abs(p1 - p2));
        }
        c.M.push_back(Mk);
        c.L.push_back(Lk);
    }

    // phi: Lipschitz constant and the scalar linear coefficient of its bound
    {
        Bindings b;
        const auto eval_phi = [&](double pa) {
            b.pa = pa;
            try {
                return problem.phi.eval(b);
            } catch (const NonFiniteResult& e) {
                throw ExpressionEvalError(std::string("phi sampling: ") +
                                          e.what());
            }
        };
        double prev = axis(box.p_min, box.p_max, 0);
        double prev_v = eval_phi(prev);
        for (int i = 1; i < n; ++i) {
            const double pa = axis(box.p_min, box.p_max, i);
            const double v = eval_phi(pa);
            if (pa != prev)
                c.H = std::max(c.H, std::abs(v - prev_v) / (pa - prev));
            if (std::abs(pa) > 1e-8)
                c.mu = std::max(c.mu, std::abs(v) / std::abs(pa));
            prev = pa;
            prev_v = v;
        }
    }
    return c;
}

} // namespace tsfrac
