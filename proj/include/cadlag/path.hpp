#pragma once

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <cstdint>
#include <limits>
#include <map>
#include <optional>
#include <stdexcept>
#include <string>
#include <utility>
#include <vector>

#include "cadlag/dyadic.hpp"
#include "cadlag/grid.hpp"
#include "cadlag/time_domain.hpp"

namespace cadlag {

struct JumpRecord {
    DyadicTime time;
    State state = 0;

    friend bool operator==(const JumpRecord&, const JumpRecord&) = default;
};

namespace detail {

/// Whether some x in the set satisfies s <= x < t.
inline bool meets_half_open(const IntervalSet& set, const DyadicTime& s, const DyadicTime& t) {
    if (!(s < t)) return false;
    for (const auto& p : set.pieces()) {
        if (p.hi < s || (p.hi == s && p.hi_open)) continue;
        const DyadicTime lo = std::max(p.lo, s);
        const bool lo_open = p.lo == lo ? p.lo_open : false;
        const DyadicTime hi = std::min(p.hi, t);
        if (lo < hi) return true;
        if (lo == hi && lo < t && !lo_open && !p.hi_open) return true;
    }
    if (const auto& a = set.tail_start()) return std::max(*a, s) < t;
    return false;
}

}  // namespace detail

/**
 * CadlagPath: a piecewise-constant right-continuous path on T, stored as an
 * anchor value at the left edge of T plus time-ordered jump records. The
 * value at t is the state of the last record at or before t.
 */
class CadlagPath {
public:
    CadlagPath(IntervalSet domain, State anchor, std::vector<JumpRecord> jumps = {},
               std::optional<DyadicTime> horizon = std::nullopt)
        : domain_(std::move(domain)), anchor_(anchor), jumps_(std::move(jumps)), horizon_(horizon) {
        if (!domain_.bounded() && !horizon_) throw std::invalid_argument("path on an unbounded domain needs a horizon");
        const DyadicTime left = domain_.infimum().value;
        if (horizon_ && *horizon_ < left) throw std::invalid_argument("horizon lies before the domain");
        State previous = anchor_;
        for (std::size_t i = 0; i < jumps_.size(); ++i) {
            const auto& j = jumps_[i];
            if (i > 0 && !(jumps_[i - 1].time < j.time)) {
                throw std::invalid_argument("jump times must be strictly increasing");
            }
            if (!domain_.contains(j.time) || !(left < j.time)) {
                throw std::invalid_argument("jump time " + j.time.to_string() + " is not an interior domain time");
            }
            if (horizon_ && *horizon_ < j.time) throw std::invalid_argument("jump time beyond the horizon");
            if (j.state == previous) throw std::invalid_argument("consecutive jump states must differ");
            previous = j.state;
        }
    }

    static CadlagPath constant(IntervalSet domain, State value, std::optional<DyadicTime> horizon = std::nullopt) {
        return CadlagPath(std::move(domain), value, {}, horizon);
    }

    const IntervalSet& domain() const { return domain_; }
    State anchor() const { return anchor_; }
    const std::vector<JumpRecord>& jumps() const { return jumps_; }
    const std::optional<DyadicTime>& horizon() const { return horizon_; }

    /// Right edge of validity: horizon, else supremum of a bounded domain.
    DyadicTime right_edge() const {
        if (horizon_) return *horizon_;
        return domain_.supremum()->value;
    }

    State eval(const DyadicTime& t) const {
        if (!domain_.contains(t)) throw std::out_of_range("time " + t.to_string() + " outside the path's domain");
        if (horizon_ && *horizon_ < t) throw std::out_of_range("time " + t.to_string() + " beyond the path's horizon");
        const auto it = std::upper_bound(jumps_.begin(), jumps_.end(), t,
                                         [](const DyadicTime& x, const JumpRecord& j) { return x < j.time; });
        return it == jumps_.begin() ? anchor_ : std::prev(it)->state;
    }

    State left_limit(const DyadicTime& t) const {
        if (!domain_.is_left_limit_point(t)) {
            throw std::out_of_range("time " + t.to_string() + " is not a left-sided limit point of the domain");
        }
        if (horizon_ && *horizon_ < t) throw std::out_of_range("time " + t.to_string() + " beyond the path's horizon");
        const auto it = std::lower_bound(jumps_.begin(), jumps_.end(), t,
                                         [](const JumpRecord& j, const DyadicTime& x) { return j.time < x; });
        return it == jumps_.begin() ? anchor_ : std::prev(it)->state;
    }

    StateTuple restrict(const TimeGrid& u) const {
        StateTuple x;
        x.reserve(u.size());
        for (const auto& t : u) x.push_back(eval(t));
        return x;
    }

    /// Number of jumps within [s, r] ∩ T: records at times t in (s, r] that
    /// are preceded by some domain time in [s, t).
    std::size_t exact_jump_count(const DyadicTime& s, const DyadicTime& r) const {
        if (r < s) throw std::invalid_argument("window end precedes window start");
        std::size_t n = 0;
        for (const auto& j : jumps_) {
            if (s < j.time && j.time <= r && detail::meets_half_open(domain_, s, j.time)) ++n;
        }
        return n;
    }

    /// Smallest distance between consecutive jump times (infinite with < 2 jumps).
    double min_jump_gap() const {
        double gap = std::numeric_limits<double>::infinity();
        for (std::size_t i = 1; i < jumps_.size(); ++i) gap = std::min(gap, span_length(jumps_[i - 1].time, jumps_[i].time));
        return gap;
    }

    friend bool operator==(const CadlagPath& a, const CadlagPath& b) {
        return a.anchor_ == b.anchor_ && a.jumps_ == b.jumps_ && a.horizon_ == b.horizon_;
    }

private:
    IntervalSet domain_;
    State anchor_;
    std::vector<JumpRecord> jumps_;
    std::optional<DyadicTime> horizon_;
};

/**
 * ψ(t) for a path on S extended to the real line:
 * (i) the path value if t ∈ S; (ii) the right limit along S if t is a
 * right-sided limit point of S outside it; (iii) the value at s* = sup S_{<=t}
 * when attained; (iv) the left limit at s* otherwise; (v) `fill` when
 * S_{<=t} is empty.
 */
inline State extension_value(const CadlagPath& path, const DyadicTime& t, State fill) {
    const auto& s = path.domain();
    if (s.contains(t)) return path.eval(t);
    if (s.is_right_limit_point(t)) {
        // no record sits at t (records lie in S), so the last one before t fixes the right limit
        const auto& js = path.jumps();
        const auto it = std::upper_bound(js.begin(), js.end(), t,
                                         [](const DyadicTime& x, const JumpRecord& j) { return x < j.time; });
        return it == js.begin() ? path.anchor() : std::prev(it)->state;
    }
    const auto sup = s.sup_at_or_below(t);
    if (!sup) return fill;
    if (sup->attained) return path.eval(sup->value);
    return path.left_limit(sup->value);
}

/// The extension ψ represented as a path on the window [lo, hi].
inline CadlagPath extend_to_reals(const CadlagPath& path, State fill, const DyadicTime& lo, const DyadicTime& hi) {
    if (hi < lo) throw std::invalid_argument("extension window is empty");
    if (path.horizon() && *path.horizon() < hi) throw std::invalid_argument("extension window beyond the path's horizon");
    // ψ can only change at jump times and where a domain piece starts
    std::vector<DyadicTime> candidates;
    for (const auto& j : path.jumps()) candidates.push_back(j.time);
    for (const auto& p : path.domain().pieces()) candidates.push_back(p.lo);
    if (path.domain().tail_start()) candidates.push_back(*path.domain().tail_start());
    std::sort(candidates.begin(), candidates.end());
    candidates.erase(std::unique(candidates.begin(), candidates.end()), candidates.end());

    const State anchor = extension_value(path, lo, fill);
    State current = anchor;
    std::vector<JumpRecord> jumps;
    for (const auto& c : candidates) {
        if (!(lo < c) || hi < c) continue;
        const State v = extension_value(path, c, fill);
        if (v != current) {
            jumps.push_back({c, v});
            current = v;
        }
    }
    return CadlagPath(IntervalSet::closed(lo, hi), anchor, std::move(jumps));
}

/// Samples of a path on a finite truncation of a dense subset of T.
struct DenseSampleTable {
    IntervalSet domain;
    std::vector<std::pair<DyadicTime, State>> samples;

    void validate() const {
        if (samples.empty()) throw std::invalid_argument("dense sample table is empty");
        for (std::size_t i = 0; i < samples.size(); ++i) {
            if (!domain.contains(samples[i].first)) throw std::invalid_argument("sample time outside the domain");
            if (i > 0 && !(samples[i - 1].first < samples[i].first)) {
                throw std::invalid_argument("sample times must be strictly increasing");
            }
        }
    }

    double mesh() const {
        double m = 0.0;
        for (std::size_t i = 1; i < samples.size(); ++i) m = std::max(m, span_length(samples[i - 1].first, samples[i].first));
        return m;
    }
};

namespace detail {

/// Bisects (a, b] on the 2^-resolve lattice until the change between the
/// two ends is pinned to one lattice cell; new domain points go into `out`.
inline void resolve_change(const CadlagPath& path, const DyadicTime& a, State va, const DyadicTime& b, State vb,
                           int resolve, std::map<DyadicTime, State>& out) {
    if (va == vb) return;
    const DyadicTime d = b - a;
    if (d.shift() > resolve) return;
    const std::int64_t units = d.mantissa() << (resolve - d.shift());
    if (units <= 1) return;
    const DyadicTime m = a + DyadicTime::dyadic(units / 2, resolve);
    const State vm = extension_value(path, m, va);
    if (path.domain().contains(m)) out.emplace(m, vm);
    resolve_change(path, a, va, m, vm, resolve, out);
    resolve_change(path, m, vm, b, vb, resolve, out);
}

}  // namespace detail

/**
 * The path sampled on the dyadics of the given depth inside T (plus closed
 * piece endpoints). With resolve_depth >= 0, every interval between two
 * differing samples is additionally bisected down to 2^-resolve_depth, so
 * jumps on that lattice become the first sample of their run.
 */
inline DenseSampleTable restrict_to_dense(const CadlagPath& path, int depth, int resolve_depth = kDefaultTimePrecision) {
    const auto points = dense_countable_subset(TimeDomain(path.domain()), depth, path.horizon());
    std::map<DyadicTime, State> table;
    for (const auto& t : points) table.emplace(t, path.eval(t));
    if (resolve_depth >= 0) {
        std::map<DyadicTime, State> extra;
        for (auto it = table.begin(); std::next(it) != table.end(); ++it) {
            const auto nx = std::next(it);
            detail::resolve_change(path, it->first, it->second, nx->first, nx->second, resolve_depth, extra);
        }
        table.merge(extra);
    }
    DenseSampleTable out{path.domain(), {table.begin(), table.end()}};
    return out;
}

/// Smallest depth whose dyadic mesh 2^-depth is below the path's minimum
/// jump gap (0 with fewer than two jumps).
inline int separating_depth(const CadlagPath& path) {
    const double gap = path.min_jump_gap();
    int depth = 0;
    while (std::isfinite(gap) && std::ldexp(1.0, -depth) >= gap) ++depth;
    return depth;
}

struct Reconstruction {
    CadlagPath path;
    /// Per jump: distance to the preceding sample, the placement uncertainty.
    std::vector<double> jump_uncertainty;
};

/**
 * Rebuilds a càdlàg path from dense samples: each maximal constant run
 * starts a jump record at its first sample time. Windows of the given
 * length (aligned at multiples of it) may hold at most max_window_jumps
 * changes; exceeding the budget means the finite-jump hypothesis fails at
 * this truncation.
 */
inline Reconstruction reconstruct_from_dense(const DenseSampleTable& table, std::size_t max_window_jumps,
                                             double window_length = 1.0) {
    table.validate();
    if (!(window_length > 0.0)) throw std::invalid_argument("window length must be > 0");
    std::vector<JumpRecord> jumps;
    std::vector<double> uncertainty;
    std::map<std::int64_t, std::size_t> per_window;
    const auto& s = table.samples;
    for (std::size_t i = 1; i < s.size(); ++i) {
        if (s[i].second == s[i - 1].second) continue;
        const auto w = static_cast<std::int64_t>(std::floor(s[i].first.to_double() / window_length));
        if (++per_window[w] > max_window_jumps) {
            throw std::runtime_error("adjacent-change budget of " + std::to_string(max_window_jumps) +
                                     " exceeded in window starting at " + std::to_string(w * window_length));
        }
        jumps.push_back({s[i].first, s[i].second});
        uncertainty.push_back(span_length(s[i - 1].first, s[i].first));
    }
    std::optional<DyadicTime> horizon;
    if (!table.domain.bounded()) horizon = s.back().first;
    return {CadlagPath(table.domain, s.front().second, std::move(jumps), horizon), std::move(uncertainty)};
}

/// Whether two paths agree on the dyadics of the given depth inside their
/// common domain (up to the earlier right edge).
inline bool paths_equal_on_dense(const CadlagPath& a, const CadlagPath& b, int depth) {
    const DyadicTime edge = std::min(a.right_edge(), b.right_edge());
    for (const auto& t : dense_countable_subset(TimeDomain(a.domain()), depth, edge)) {
        if (!b.domain().contains(t)) continue;
        if (a.eval(t) != b.eval(t)) return false;
    }
    return true;
}

}  // namespace cadlag
