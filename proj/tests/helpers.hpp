#pragma once

// Shared test utilities: independent brute-force oracles for the discrete
// operators (std::tgamma throughout, deliberately not the library's gamma),
// random generators, and a tiny process runner for CLI round trips.

#include <array>
#include <cmath>
#include <cstdio>
#include <memory>
#include <random>
#include <string>
#include <vector>

#include "tsfrac/tsfrac.hpp"

namespace oracle {

/// Nabla fractional integral on the integer scale {0..N}, a = 0:
/// J^w f(theta) = (1/Gamma(w)) sum_{t=1}^{theta} (theta - t + 1)^(w-1) f(t).
inline double frac_integral_z(const std::vector<double>& f, double w,
                              int theta) {
    double s = 0.0;
    for (int t = 1; t <= theta; ++t)
        s += std::pow(static_cast<double>(theta - t + 1), w - 1.0) * f[t];
    return s / std::tgamma(w);
}

/// Caputo on the integer scale: J^(1-w) applied to backward differences.
inline double caputo_z(const std::vector<double>& f, double w, int theta) {
    double s = 0.0;
    for (int t = 1; t <= theta; ++t)
        s += std::pow(static_cast<double>(theta - t + 1), -w) *
             (f[t] - f[t - 1]);
    return s / std::tgamma(1.0 - w);
}

/// Riemann-Liouville on the integer scale: backward difference of J^(1-w).
inline double rl_z(const std::vector<double>& f, double w, int theta) {
    const double g1 = frac_integral_z(f, 1.0 - w, theta);
    const double g0 = frac_integral_z(f, 1.0 - w, theta - 1);
    return g1 - g0;
}

/// Composed fractional integral J^w (J^u f) as an explicit double sum.
inline double composed_frac_integral_z(const std::vector<double>& f, double w,
                                       double u, int theta) {
    double s = 0.0;
    for (int t = 1; t <= theta; ++t) {
        double inner = 0.0;
        for (int r = 1; r <= t; ++r)
            inner += std::pow(static_cast<double>(t - r + 1), u - 1.0) * f[r];
        s += std::pow(static_cast<double>(theta - t + 1), w - 1.0) * inner;
    }
    return s / (std::tgamma(w) * std::tgamma(u));
}

/// Truncated series sum_{k=0}^{terms-1} theta^(k w) / Gamma(k w + 1), the
/// solution of the order-w problem p' (fractional) = p, p(0) = 1.
inline double mittag_leffler_series(double theta, double w, int terms) {
    double s = 0.0;
    for (int k = 0; k < terms; ++k)
        s += std::pow(theta, w * k) / std::tgamma(w * k + 1.0);
    return s;
}

} // namespace oracle

namespace testutil {

inline std::shared_ptr<const tsfrac::Grid>
make_grid(const tsfrac::TimeScale& ts, double mesh,
          std::vector<double> extras = {}) {
    return std::make_shared<const tsfrac::Grid>(
        tsfrac::build_grid(ts, mesh, extras));
}

/// Random time scale: alternating intervals and isolated points with
/// positive gaps, spanning a couple of units.
inline tsfrac::TimeScale random_timescale(std::mt19937& rng) {
    std::uniform_real_distribution<double> len(0.1, 0.8);
    std::uniform_real_distribution<double> gap(0.05, 0.5);
    std::uniform_int_distribution<int> n_components(1, 5);
    std::bernoulli_distribution is_point(0.4);

    std::vector<tsfrac::Component> cs;
    double x = 0.0;
    const int n = n_components(rng);
    for (int i = 0; i < n; ++i) {
        if (is_point(rng)) {
            cs.push_back(tsfrac::IsolatedPoint{x});
        } else {
            const double hi = x + len(rng);
            cs.push_back(tsfrac::ClosedInterval{x, hi});
            x = hi;
        }
        x += gap(rng);
    }
    return tsfrac::TimeScale(cs);
}

struct RunResult {
    int exit_code = -1;
    std::string output; // stdout and stderr interleaved
};

/// Runs a shell command capturing combined output and the exit status.
inline RunResult run_command(const std::string& cmd) {
    RunResult res;
    FILE* pipe = popen((cmd + " 2>&1").c_str(), "r");
    if (!pipe)
        return res;
    std::array<char, 4096> buf;
    while (std::size_t n = std::fread(buf.data(), 1, buf.size(), pipe))
        res.output.append(buf.data(), n);
    const int status = pclose(pipe);
    res.exit_code = WIFEXITED(status) ? WEXITSTATUS(status) : -1;
    return res;
}

/// Extracts the first "key value" line's value from machine-readable output.
inline std::string find_value(const std::string& output,
                              const std::string& key) {
    std::size_t pos = 0;
    while (pos < output.size()) {
        std::size_t eol = output.find('\n', pos);
        if (eol == std::string::npos)
            eol = output.size();
        const std::string line = output.substr(pos, eol - pos);
        if (line.rfind(key + " ", 0) == 0)
            return line.substr(key.size() + 1);
        pos = eol + 1;
    }
    return {};
}

} // namespace testutil
