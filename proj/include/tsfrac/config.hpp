#pragma once

#include <charconv>
#include <cstdio>
#include <istream>
#include <optional>
#include <sstream>
#include <string>
#include <string_view>
#include <vector>

#include "tsfrac/conditions.hpp"
#include "tsfrac/errors.hpp"
#include "tsfrac/expr.hpp"
#include "tsfrac/solver.hpp"
#include "tsfrac/timescale.hpp"

namespace tsfrac {

/// Fixed 17-significant-digit decimal text; round-trips doubles exactly.
inline std::string format_double(double v) {
    char buf[40];
    std::snprintf(buf, sizeof buf, "%.17g", v);
    return buf;
}

/**
 * Parsed problem configuration. The file format is line oriented:
 * `[section]` headers, `key value...` entries, `#` comments, blank lines
 * ignored. Sections and keys:
 *
 *   [timescale]  interval LO HI | point X        (repeated)
 *   [problem]    w, rhs, phi, phi_anchor
 *   [impulses]   at THETA followed by map EXPR   (repeated pairs)
 *   [solver]     mesh, tol_h, tol_picard, tol_outer,
 *                max_inner, max_picard, max_outer,
 *                history_variant frozen|memory
 *   [output]     csv PATH
 *
 * Unknown sections or keys are errors carrying the line number.
 */
struct ProblemConfig {
    std::vector<Component> components;
    double w = 0.5;
    Expr rhs;
    Expr phi;
    std::optional<double> phi_anchor; // defaults to the horizon
    struct ImpulseEntry {
        double time;
        Expr map;
        std::size_t line;
    };
    std::vector<ImpulseEntry> impulses;
    SolverConfig solver;
    HistoryVariant variant = HistoryVariant::Frozen;
    std::optional<std::string> csv_path;

    TimeScale timescale() const { return TimeScale(components); }

    ImpulsiveProblem problem() const {
        TimeScale ts(components);
        // impulse placement problems point at the config line of the 'at'
        double prev = ts.min();
        for (const auto& e : impulses) {
            if (!ts.contains(e.time))
                throw ConfigError(e.line, "impulse time " +
                                              format_double(e.time) +
                                              " is not in the time scale");
            if (e.time <= prev + kMembershipTol)
                throw ConfigError(
                    e.line, "impulse times must be strictly increasing and "
                            "above the time scale minimum");
            if (e.time >= ts.max() - kMembershipTol)
                throw ConfigError(e.line,
                                  "impulse time must lie below the horizon");
            prev = e.time;
        }
        std::vector<Impulse> imps;
        for (const auto& e : impulses)
            imps.push_back({e.time, e.map, e.line});
        const double anchor = phi_anchor.value_or(ts.max());
        return ImpulsiveProblem(std::move(ts), FracOrder(w), rhs,
                                std::move(imps), phi, anchor, variant);
    }
};

namespace detail {

inline double parse_number_or_throw(std::string_view tok, std::size_t line) {
    double v = 0.0;
    const auto res = std::from_chars(tok.data(), tok.data() + tok.size(), v);
    if (res.ec != std::errc() || res.ptr != tok.data() + tok.size())
        throw ConfigError(line, "expected a number, got '" + std::string(tok) +
                                    "'");
    return v;
}

inline int parse_int_or_throw(std::string_view tok, std::size_t line) {
    int v = 0;
    const auto res = std::from_chars(tok.data(), tok.data() + tok.size(), v);
    if (res.ec != std::errc() || res.ptr != tok.data() + tok.size())
        throw ConfigError(line, "expected an integer, got '" +
                                    std::string(tok) + "'");
    return v;
}

inline std::string_view trim(std::string_view s) {
    while (!s.empty() && std::isspace(static_cast<unsigned char>(s.front())))
        s.remove_prefix(1);
    while (!s.empty() && std::isspace(static_cast<unsigned char>(s.back())))
        s.remove_suffix(1);
    return s;
}

/// Splits "key rest-of-line" at the first whitespace run.
inline std::pair<std::string_view, std::string_view>
split_key(std::string_view s) {
    std::size_t i = 0;
    while (i < s.size() && !std::isspace(static_cast<unsigned char>(s[i])))
        ++i;
    return {s.substr(0, i), trim(s.substr(i))};
}

inline Expr parse_expr_or_rethrow(std::string_view text,
                                  std::initializer_list<Var> allowed,
                                  std::string_view role, std::size_t line) {
    try {
        return Expr::parse(text, allowed, role);
    } catch (const Error& e) {
        throw ConfigError(line, std::string(role) + " expression: " + e.what());
    }
}

} // namespace detail

inline ProblemConfig parse_config(std::istream& in) {
    ProblemConfig cfg;
    std::string section;
    std::string raw;
    std::size_t lineno = 0;
    bool have_rhs = false, have_phi = false, have_w = false;
    std::optional<double> pending_impulse_time;
    std::size_t pending_impulse_line = 0;

    while (std::getline(in, raw)) {
        ++lineno;
        std::string_view line = detail::trim(raw);
        if (line.empty() || line.front() == '#')
            continue;
        if (line.front() == '[') {
            if (line.back() != ']')
                throw ConfigError(lineno, "unterminated section header");
            section = std::string(line.substr(1, line.size() - 2));
            if (section != "timescale" && section != "problem" &&
                section != "impulses" && section != "solver" &&
                section != "output")
                throw ConfigError(lineno, "unknown section [" + section + "]");
            continue;
        }
        if (section.empty())
            throw ConfigError(lineno, "entry before any [section] header");

        const auto [key, value] = detail::split_key(line);

        if (section == "timescale") {
            if (key == "interval") {
                std::istringstream ss{std::string(value)};
                std::string a, b, extra;
                ss >> a >> b;
                if (a.empty() || b.empty() || (ss >> extra))
                    throw ConfigError(lineno, "interval expects exactly two numbers");
                cfg.components.push_back(
                    ClosedInterval{detail::parse_number_or_throw(a, lineno),
                                   detail::parse_number_or_throw(b, lineno)});
            } else if (key == "point") {
                cfg.components.push_back(
                    IsolatedPoint{detail::parse_number_or_throw(value, lineno)});
            } else {
                throw ConfigError(lineno, "unknown timescale entry '" +
                                              std::string(key) + "'");
            }
        } else if (section == "problem") {
            if (key == "w") {
                cfg.w = detail::parse_number_or_throw(value, lineno);
                have_w = true;
            } else if (key == "rhs") {
                cfg.rhs = detail::parse_expr_or_rethrow(
                    value, {Var::theta, Var::p, Var::h}, "rhs", lineno);
                have_rhs = true;
            } else if (key == "phi") {
                cfg.phi = detail::parse_expr_or_rethrow(value, {Var::pa},
                                                        "phi", lineno);
                have_phi = true;
            } else if (key == "phi_anchor") {
                cfg.phi_anchor = detail::parse_number_or_throw(value, lineno);
            } else {
                throw ConfigError(lineno, "unknown problem key '" +
                                              std::string(key) + "'");
            }
        } else if (section == "impulses") {
            if (key == "at") {
                if (pending_impulse_time)
                    throw ConfigError(lineno,
                                      "'at' without a 'map' for the previous impulse");
                pending_impulse_time = detail::parse_number_or_throw(value, lineno);
                pending_impulse_line = lineno;
            } else if (key == "map") {
                if (!pending_impulse_time)
                    throw ConfigError(lineno, "'map' without a preceding 'at'");
                cfg.impulses.push_back(
                    {*pending_impulse_time,
                     detail::parse_expr_or_rethrow(
                         value, {Var::theta, Var::p}, "impulse", lineno),
                     pending_impulse_line});
                pending_impulse_time.reset();
            } else {
                throw ConfigError(lineno, "unknown impulse key '" +
                                              std::string(key) + "'");
            }
        } else if (section == "solver") {
            if (key == "mesh")
                cfg.solver.mesh = detail::parse_number_or_throw(value, lineno);
            else if (key == "tol_h")
                cfg.solver.tol_h = detail::parse_number_or_throw(value, lineno);
            else if (key == "tol_picard")
                cfg.solver.tol_picard =
                    detail::parse_number_or_throw(value, lineno);
            else if (key == "tol_outer")
                cfg.solver.tol_outer =
                    detail::parse_number_or_throw(value, lineno);
            else if (key == "max_inner")
                cfg.solver.max_inner = detail::parse_int_or_throw(value, lineno);
            else if (key == "max_picard")
                cfg.solver.max_picard = detail::parse_int_or_throw(value, lineno);
            else if (key == "max_outer")
                cfg.solver.max_outer = detail::parse_int_or_throw(value, lineno);
            else if (key == "history_variant") {
                if (value == "frozen")
                    cfg.variant = HistoryVariant::Frozen;
                else if (value == "memory")
                    cfg.variant = HistoryVariant::Memory;
                else
                    throw ConfigError(lineno,
                                      "history_variant must be frozen or memory");
            } else
                throw ConfigError(lineno, "unknown solver key '" +
                                              std::string(key) + "'");
        } else if (section == "output") {
            if (key == "csv")
                cfg.csv_path = std::string(value);
            else
                throw ConfigError(lineno, "unknown output key '" +
                                              std::string(key) + "'");
        }
    }
    if (pending_impulse_time)
        throw ConfigError(pending_impulse_line, "impulse 'at' without a 'map'");
    if (cfg.components.empty())
        throw ConfigError(lineno, "missing [timescale] section");
    if (!have_w)
        throw ConfigError(lineno, "missing problem key 'w'");
    if (!have_rhs)
        throw ConfigError(lineno, "missing problem key 'rhs'");
    if (!have_phi)
        throw ConfigError(lineno, "missing problem key 'phi'");
    return cfg;
}

inline ProblemConfig parse_config_string(const std::string& text) {
    std::istringstream ss(text);
    return parse_config(ss);
}

/// Serializes the time-scale declaration back to config text. Parsing the
/// result reproduces the component list bit for bit.
inline std::string serialize_timescale(const TimeScale& ts) {
    std::string out = "[timescale]\n";
    for (const auto& c : ts.components()) {
        if (const auto* iv = std::get_if<ClosedInterval>(&c))
            out += "interval " + format_double(iv->lo) + " " +
                   format_double(iv->hi) + "\n";
        else
            out += "point " + format_double(std::get<IsolatedPoint>(c).x) + "\n";
    }
    return out;
}

/// Constants file: a single [constants] section with keys K G A F E mu H and
/// space-separated lists M and L (one entry per impulse).
inline HypothesisConstants parse_constants(std::istream& in) {
    HypothesisConstants c;
    std::string raw, section;
    std::size_t lineno = 0;
    while (std::getline(in, raw)) {
        ++lineno;
        std::string_view line = detail::trim(raw);
        if (line.empty() || line.front() == '#')
            continue;
        if (line.front() == '[') {
            if (line.back() != ']')
                throw ConfigError(lineno, "unterminated section header");
            section = std::string(line.substr(1, line.size() - 2));
            if (section != "constants")
                throw ConfigError(lineno, "unknown section [" + section + "]");
            continue;
        }
        if (section != "constants")
            throw ConfigError(lineno, "entry before [constants]");
        const auto [key, value] = detail::split_key(line);
        if (key == "M" || key == "L") {
            std::istringstream ss{std::string(value)};
            std::string tok;
            auto& list = key == "M" ? c.M : c.L;
            list.clear();
            while (ss >> tok)
                list.push_back(detail::parse_number_or_throw(tok, lineno));
        } else if (key == "K")
            c.K = detail::parse_number_or_throw(value, lineno);
        else if (key == "G")
            c.G = detail::parse_number_or_throw(value, lineno);
        else if (key == "A")
            c.A = detail::parse_number_or_throw(value, lineno);
        else if (key == "F")
            c.F = detail::parse_number_or_throw(value, lineno);
        else if (key == "E")
            c.E = detail::parse_number_or_throw(value, lineno);
        else if (key == "mu")
            c.mu = detail::parse_number_or_throw(value, lineno);
        else if (key == "H")
            c.H = detail::parse_number_or_throw(value, lineno);
        else
            throw ConfigError(lineno,
                              "unknown constants key '" + std::string(key) + "'");
    }
    return c;
}

} // namespace tsfrac
