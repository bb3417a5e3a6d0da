#pragma once

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <cstdint>
#include <initializer_list>
#include <iterator>
#include <limits>
#include <optional>
#include <span>
#include <stdexcept>
#include <string>
#include <vector>

#include "cadlag/dyadic.hpp"
#include "cadlag/time_domain.hpp"

namespace cadlag {

using State = std::size_t;
using StateTuple = std::vector<State>;

/// Countable state space: finitely many labelled states, or the non-negative
/// integers (enumerated by themselves).
class StateSpace {
public:
    static StateSpace finite(std::vector<std::string> labels) {
        if (labels.empty()) throw std::invalid_argument("finite state space needs at least one label");
        auto sorted = labels;
        std::sort(sorted.begin(), sorted.end());
        if (std::adjacent_find(sorted.begin(), sorted.end()) != sorted.end()) {
            throw std::invalid_argument("state labels must be distinct");
        }
        return StateSpace(std::move(labels));
    }

    static StateSpace finite(std::size_t n) {
        std::vector<std::string> labels;
        labels.reserve(n);
        for (std::size_t i = 0; i < n; ++i) labels.push_back(std::to_string(i));
        return finite(std::move(labels));
    }

    static StateSpace naturals() { return StateSpace(); }

    bool is_finite() const { return !labels_.empty(); }
    /// Number of states; only meaningful for finite spaces.
    std::size_t size() const { return labels_.size(); }

    std::string label(State x) const {
        if (!is_finite()) return std::to_string(x);
        if (x >= labels_.size()) throw std::out_of_range("state index out of range");
        return labels_[x];
    }

    std::optional<State> index_of(const std::string& label) const {
        if (!is_finite()) {
            try {
                std::size_t pos = 0;
                const auto v = std::stoull(label, &pos);
                if (pos == label.size()) return static_cast<State>(v);
            } catch (const std::exception&) {
            }
            return std::nullopt;
        }
        const auto it = std::find(labels_.begin(), labels_.end(), label);
        if (it == labels_.end()) return std::nullopt;
        return static_cast<State>(it - labels_.begin());
    }

    bool contains(State x) const { return !is_finite() || x < labels_.size(); }

    friend bool operator==(const StateSpace&, const StateSpace&) = default;

private:
    StateSpace() = default;
    explicit StateSpace(std::vector<std::string> labels) : labels_(std::move(labels)) {}

    std::vector<std::string> labels_;
};

/// A strictly increasing, non-empty tuple of time instants.
class TimeGrid {
public:
    explicit TimeGrid(std::vector<DyadicTime> times) : times_(std::move(times)) {
        if (times_.empty()) throw std::invalid_argument("time grid must contain at least one instant");
        for (std::size_t i = 1; i < times_.size(); ++i) {
            if (!(times_[i - 1] < times_[i])) throw std::invalid_argument("time grid must be strictly increasing");
        }
    }

    TimeGrid(std::initializer_list<double> times) : TimeGrid(from_doubles(times)) {}

    static TimeGrid from_doubles(std::span<const double> times, int precision = kDefaultTimePrecision) {
        std::vector<DyadicTime> out;
        out.reserve(times.size());
        for (double t : times) out.push_back(DyadicTime::from_double(t, precision));
        return TimeGrid(std::move(out));
    }

    std::size_t size() const { return times_.size(); }
    const DyadicTime& operator[](std::size_t i) const { return times_[i]; }
    const DyadicTime& front() const { return times_.front(); }
    const DyadicTime& back() const { return times_.back(); }
    const std::vector<DyadicTime>& times() const { return times_; }
    auto begin() const { return times_.begin(); }
    auto end() const { return times_.end(); }

    bool contains(const DyadicTime& t) const { return std::binary_search(times_.begin(), times_.end(), t); }

    /// Largest gap between consecutive instants (0 for singletons).
    double mesh() const {
        double m = 0.0;
        for (std::size_t i = 1; i < times_.size(); ++i) m = std::max(m, span_length(times_[i - 1], times_[i]));
        return m;
    }

    /// Smallest gap between consecutive instants (+inf for singletons).
    double min_gap() const {
        double m = std::numeric_limits<double>::infinity();
        for (std::size_t i = 1; i < times_.size(); ++i) m = std::min(m, span_length(times_[i - 1], times_[i]));
        return m;
    }

    std::vector<double> as_doubles() const {
        std::vector<double> out;
        out.reserve(times_.size());
        for (const auto& t : times_) out.push_back(t.to_double());
        return out;
    }

    friend bool operator==(const TimeGrid&, const TimeGrid&) = default;
    friend auto operator<=>(const TimeGrid& a, const TimeGrid& b) { return a.times_ <=> b.times_; }

private:
    std::vector<DyadicTime> times_;
};

/// Every instant of the grid is an observation time of the domain.
inline bool grid_in_domain(const TimeDomain& domain, const TimeGrid& u) {
    return std::all_of(u.begin(), u.end(), [&](const DyadicTime& t) { return domain.times().contains(t); });
}

/// u ⊑ v: every time of u occurs in v.
inline bool is_subgrid(const TimeGrid& u, const TimeGrid& v) {
    return std::includes(v.begin(), v.end(), u.begin(), u.end());
}

/// Sorted union of the two grids.
inline TimeGrid merge_grids(const TimeGrid& u, const TimeGrid& v) {
    std::vector<DyadicTime> out;
    out.reserve(u.size() + v.size());
    std::set_union(u.begin(), u.end(), v.begin(), v.end(), std::back_inserter(out));
    return TimeGrid(std::move(out));
}

/// Positions of the instants of v inside u; requires v ⊑ u.
inline std::vector<std::size_t> subgrid_positions(const TimeGrid& u, const TimeGrid& v) {
    std::vector<std::size_t> idx;
    idx.reserve(v.size());
    std::size_t i = 0;
    for (const auto& t : v) {
        while (i < u.size() && u[i] < t) ++i;
        if (i == u.size() || !(u[i] == t)) throw std::invalid_argument("grid is not a subgrid: " + t.to_string());
        idx.push_back(i);
    }
    return idx;
}

/// The components of x_u at the instants of v, in order; requires v ⊑ u.
inline StateTuple project_tuple(std::span<const State> x_u, const TimeGrid& u, const TimeGrid& v) {
    if (x_u.size() != u.size()) throw std::invalid_argument("state tuple does not match its grid");
    StateTuple out;
    out.reserve(v.size());
    for (auto i : subgrid_positions(u, v)) out.push_back(x_u[i]);
    return out;
}

/**
 * Nested dyadic grids G_0 ⊑ ... ⊑ G_depth over the window [s, r]: G_d keeps
 * the points s + j(r-s)/2^d lying in the observation times, plus every closed
 * endpoint of the observation pieces inside the window.
 */
inline std::vector<TimeGrid> dyadic_refinement(const TimeDomain& domain, const DyadicTime& s, const DyadicTime& r,
                                               int depth) {
    if (depth < 0) throw std::invalid_argument("refinement depth must be non-negative");
    if (depth > 30) throw std::invalid_argument("refinement depth too large");
    if (r < s) throw std::invalid_argument("refinement window has r < s");
    const auto& times = domain.times();
    const auto pieces = times.clip(s, r);
    std::vector<DyadicTime> endpoints;
    for (const auto& p : pieces) {
        if (!p.lo_open) endpoints.push_back(p.lo);
        if (!p.hi_open) endpoints.push_back(p.hi);
    }
    const DyadicTime width = r - s;
    std::vector<TimeGrid> grids;
    grids.reserve(static_cast<std::size_t>(depth) + 1);
    for (int d = 0; d <= depth; ++d) {
        std::vector<DyadicTime> pts = endpoints;
        const std::int64_t cells = std::int64_t{1} << d;
        const DyadicTime step = width.halved(d);
        for (std::int64_t j = 0; j <= cells; ++j) {
            const DyadicTime t = s + step.times(j);
            if (times.contains(t)) pts.push_back(t);
        }
        std::sort(pts.begin(), pts.end());
        pts.erase(std::unique(pts.begin(), pts.end()), pts.end());
        if (pts.empty()) throw std::invalid_argument("refinement window does not meet the time domain");
        grids.emplace_back(std::move(pts));
    }
    return grids;
}

/**
 * Finite truncation of a countable set D with T ⊆ D ∪ rlims(D): every
 * closed endpoint and isolated point, plus the absolute dyadics k/2^depth
 * inside each observation piece. Unbounded tails are cut at `horizon`.
 */
inline std::vector<DyadicTime> dense_countable_subset(const TimeDomain& domain, int depth,
                                                      std::optional<DyadicTime> horizon = std::nullopt) {
    if (depth < 0) throw std::invalid_argument("depth must be non-negative");
    const auto& times = domain.times();
    if (!times.bounded() && !horizon) throw std::invalid_argument("unbounded domain needs a horizon");
    std::vector<Interval> pieces;
    if (horizon) {
        pieces = times.clip(times.infimum().value, *horizon);
    } else {
        pieces = times.pieces();
    }
    std::vector<DyadicTime> out;
    const DyadicTime step = DyadicTime::integer(1).halved(depth);
    for (const auto& p : pieces) {
        if (!p.lo_open) out.push_back(p.lo);
        if (!p.hi_open) out.push_back(p.hi);
        if (p.degenerate()) continue;
        // first multiple of step that is >= lo
        std::int64_t k = static_cast<std::int64_t>(std::floor(std::ldexp(p.lo.to_double(), depth))) - 1;
        for (;; ++k) {
            const DyadicTime t = step.times(k);
            if (t > p.hi) break;
            if (p.contains(t)) out.push_back(t);
        }
    }
    std::sort(out.begin(), out.end());
    out.erase(std::unique(out.begin(), out.end()), out.end());
    return out;
}

}  // namespace cadlag
