#pragma once

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <optional>
#include <span>
#include <string>
#include <variant>
#include <vector>

#include "tsfrac/errors.hpp"

namespace tsfrac {

/// Absolute tolerance for point membership and node deduplication.
/// Keeps interval endpoints from being misclassified by rounding.
inline constexpr double kMembershipTol = 1e-12;

struct ClosedInterval {
    double lo;
    double hi;
};

struct IsolatedPoint {
    double x;
};

using Component = std::variant<ClosedInterval, IsolatedPoint>;

enum class PointClass { LeftDense, LeftScattered };

/**
 * A bounded time scale: a finite union of closed real intervals and
 * isolated points, held in strictly increasing order.
 *
 * Immutable after construction; all queries are pure.
 */
class TimeScale {
public:
    explicit TimeScale(std::vector<Component> components)
        : components_(std::move(components)) {
        if (components_.empty())
            throw InvalidTimeScale("time scale must have at least one component");
        // Degenerate intervals collapse to points; reversed bounds are errors.
        for (auto& c : components_) {
            if (auto* iv = std::get_if<ClosedInterval>(&c)) {
                if (!(std::isfinite(iv->lo) && std::isfinite(iv->hi)))
                    throw InvalidTimeScale("interval bounds must be finite");
                if (iv->hi < iv->lo)
                    throw InvalidTimeScale("interval with hi < lo");
                if (iv->hi - iv->lo <= kMembershipTol)
                    c = IsolatedPoint{iv->lo};
            } else if (!std::isfinite(std::get<IsolatedPoint>(c).x)) {
                throw InvalidTimeScale("isolated point must be finite");
            }
        }
        for (std::size_t i = 1; i < components_.size(); ++i) {
            if (inf(components_[i]) - sup(components_[i - 1]) <= 2 * kMembershipTol)
                throw InvalidTimeScale(
                    "components must be disjoint and strictly increasing");
        }
    }

    const std::vector<Component>& components() const { return components_; }

    double min() const { return inf(components_.front()); }
    double max() const { return sup(components_.back()); }

    bool contains(double theta) const { return component_of(theta).has_value(); }

    /// True when the time scale is a single isolated point. Such a scale is
    /// constructible but rejected by every calculus operation.
    bool degenerate() const {
        return components_.size() == 1 &&
               std::holds_alternative<IsolatedPoint>(components_.front());
    }

    /// Backward jump: the supremum of time-scale points strictly below theta.
    /// Equals theta at left-dense points.
    double backward_jump(double theta) const {
        const auto idx = component_of(theta);
        if (!idx)
            throw PointNotInTimeScale("backward_jump: point " +
                                      std::to_string(theta) +
                                      " is not in the time scale");
        if (std::abs(theta - min()) <= kMembershipTol)
            throw JumpUndefinedAtMinimum(
                "backward_jump: undefined at the time scale minimum");
        if (const auto* iv = std::get_if<ClosedInterval>(&components_[*idx])) {
            if (theta - iv->lo > kMembershipTol)
                return theta; // interior or right endpoint, left dense
        }
        // At an isolated point or an interval's left endpoint the jump lands
        // on the supremum of the previous component.
        return sup(components_[*idx - 1]);
    }

    /// theta - backward_jump(theta); zero exactly at left-dense points.
    double graininess(double theta) const { return theta - backward_jump(theta); }

    PointClass classify(double theta) const {
        return backward_jump(theta) == theta ? PointClass::LeftDense
                                             : PointClass::LeftScattered;
    }

private:
    static double inf(const Component& c) {
        return std::holds_alternative<ClosedInterval>(c)
                   ? std::get<ClosedInterval>(c).lo
                   : std::get<IsolatedPoint>(c).x;
    }
    static double sup(const Component& c) {
        return std::holds_alternative<ClosedInterval>(c)
                   ? std::get<ClosedInterval>(c).hi
                   : std::get<IsolatedPoint>(c).x;
    }

    std::optional<std::size_t> component_of(double theta) const {
        for (std::size_t i = 0; i < components_.size(); ++i) {
            if (theta >= inf(components_[i]) - kMembershipTol &&
                theta <= sup(components_[i]) + kMembershipTol)
                return i;
        }
        return std::nullopt;
    }

    std::vector<Component> components_;
};

/// Convenience builders used throughout the tests.
inline TimeScale single_interval(double lo, double hi) {
    return TimeScale({ClosedInterval{lo, hi}});
}

inline TimeScale integer_scale(int lo, int hi) {
    std::vector<Component> cs;
    for (int k = lo; k <= hi; ++k)
        cs.push_back(IsolatedPoint{static_cast<double>(k)});
    return TimeScale(std::move(cs));
}

/**
 * A discretization grid over a time scale.
 *
 * Every isolated point and every interval endpoint is a node. Inside an
 * interval, nodes step by the requested mesh from the left endpoint (the
 * final step may be shorter), so refining the mesh by an integer factor
 * keeps all existing nodes. Extra nodes (impulse times, anchor points)
 * are forced in exactly.
 */
class Grid {
public:
    Grid(TimeScale ts, std::vector<double> nodes, double mesh)
        : ts_(std::move(ts)), nodes_(std::move(nodes)), mesh_(mesh) {
        scattered_.assign(nodes_.size(), 0);
        for (std::size_t i = 1; i < nodes_.size(); ++i)
            scattered_[i] =
                ts_.classify(nodes_[i]) == PointClass::LeftScattered ? 1 : 0;
    }

    const TimeScale& timescale() const { return ts_; }
    std::span<const double> nodes() const { return nodes_; }
    double node(std::size_t i) const { return nodes_[i]; }
    std::size_t size() const { return nodes_.size(); }
    double mesh() const { return mesh_; }

    /// Node i is left-scattered in the underlying time scale (the step from
    /// node i-1 crosses a gap). Node 0 reports false.
    bool scattered(std::size_t i) const { return scattered_[i] != 0; }

    /// Time-scale backward jump of node i; for a scattered node this is the
    /// previous node (gaps never contain nodes), for a dense node it is the
    /// node itself.
    double alpha(std::size_t i) const {
        return scattered_[i] ? nodes_[i - 1] : nodes_[i];
    }

    double graininess(std::size_t i) const {
        return scattered_[i] ? nodes_[i] - nodes_[i - 1] : 0.0;
    }

    std::optional<std::size_t> find(double theta) const {
        auto it = std::lower_bound(nodes_.begin(), nodes_.end(),
                                   theta - kMembershipTol);
        if (it != nodes_.end() && std::abs(*it - theta) <= kMembershipTol)
            return static_cast<std::size_t>(it - nodes_.begin());
        return std::nullopt;
    }

private:
    TimeScale ts_;
    std::vector<double> nodes_;
    std::vector<unsigned char> scattered_;
    double mesh_;
};

inline Grid build_grid(const TimeScale& ts, double mesh,
                       std::span<const double> extra_nodes = {}) {
    if (!(mesh > 0.0))
        throw InvalidTimeScale("build_grid: mesh must be positive");
    for (double e : extra_nodes)
        if (!ts.contains(e))
            throw ExtraNodeOutsideTimeScale(
                "build_grid: extra node " + std::to_string(e) +
                " is not in the time scale");

    std::vector<double> nodes;
    for (const auto& c : ts.components()) {
        if (const auto* pt = std::get_if<IsolatedPoint>(&c)) {
            nodes.push_back(pt->x);
        } else {
            const auto& iv = std::get<ClosedInterval>(c);
            nodes.push_back(iv.lo);
            for (std::size_t k = 1; iv.lo + static_cast<double>(k) * mesh <
                                    iv.hi - kMembershipTol;
                 ++k)
                nodes.push_back(iv.lo + static_cast<double>(k) * mesh);
            nodes.push_back(iv.hi);
        }
    }
    // Forced nodes win deduplication so impulse times keep their exact value.
    for (double e : extra_nodes) {
        auto it = std::lower_bound(nodes.begin(), nodes.end(),
                                   e - kMembershipTol);
        if (it != nodes.end() && std::abs(*it - e) <= kMembershipTol)
            *it = e;
        else
            nodes.insert(it, e);
    }
    return Grid(ts, std::move(nodes), mesh);
}

} // namespace tsfrac
