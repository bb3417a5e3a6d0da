#pragma once

#include <algorithm>
#include <optional>
#include <stdexcept>
#include <utility>
#include <vector>

#include "cadlag/dyadic.hpp"

namespace cadlag {

/// A bounded interval with optionally open ends. Degenerate intervals are
/// isolated points and must be closed on both sides.
struct Interval {
    DyadicTime lo;
    DyadicTime hi;
    bool lo_open = false;
    bool hi_open = false;

    static Interval closed(DyadicTime lo, DyadicTime hi) { return {lo, hi, false, false}; }
    static Interval point(DyadicTime t) { return {t, t, false, false}; }

    bool degenerate() const { return lo == hi; }

    bool contains(const DyadicTime& t) const {
        const bool above = lo_open ? t > lo : t >= lo;
        const bool below = hi_open ? t < hi : t <= hi;
        return above && below;
    }

    friend bool operator==(const Interval&, const Interval&) = default;
};

/// Ordering query result for sup(S ∩ (-inf, t]).
struct Supremum {
    DyadicTime value;
    bool attained;  // value ∈ S
};

/**
 * IntervalSet: a finite union of disjoint bounded intervals plus an optional
 * closed right tail [a, +inf). Supports exact membership and one-sided
 * limit-point queries.
 */
class IntervalSet {
public:
    IntervalSet() = default;

    IntervalSet(std::vector<Interval> pieces, std::optional<DyadicTime> tail_start = std::nullopt)
        : pieces_(std::move(pieces)), tail_(tail_start) {
        for (const auto& p : pieces_) {
            if (p.lo > p.hi) throw std::invalid_argument("interval with lo > hi");
            if (p.degenerate() && (p.lo_open || p.hi_open)) {
                throw std::invalid_argument("degenerate interval must be closed");
            }
        }
        for (std::size_t i = 1; i < pieces_.size(); ++i) {
            if (!(pieces_[i - 1].hi < pieces_[i].lo)) {
                throw std::invalid_argument("intervals must be sorted and pairwise disjoint");
            }
        }
        if (tail_ && !pieces_.empty() && !(pieces_.back().hi < *tail_)) {
            throw std::invalid_argument("unbounded tail must start after the last interval");
        }
        if (pieces_.empty() && !tail_) throw std::invalid_argument("empty time domain");
    }

    static IntervalSet closed(DyadicTime lo, DyadicTime hi) { return IntervalSet({Interval::closed(lo, hi)}); }
    static IntervalSet point(DyadicTime t) { return IntervalSet({Interval::point(t)}); }
    static IntervalSet half_line(DyadicTime start) { return IntervalSet({}, start); }

    const std::vector<Interval>& pieces() const { return pieces_; }
    const std::optional<DyadicTime>& tail_start() const { return tail_; }
    bool bounded() const { return !tail_.has_value(); }

    bool contains(const DyadicTime& t) const {
        if (tail_ && t >= *tail_) return true;
        return std::any_of(pieces_.begin(), pieces_.end(), [&](const Interval& p) { return p.contains(t); });
    }

    /// Every (t, t+δ) meets the set.
    bool is_right_limit_point(const DyadicTime& t) const {
        if (tail_ && t >= *tail_) return true;
        return std::any_of(pieces_.begin(), pieces_.end(),
                           [&](const Interval& p) { return !p.degenerate() && p.lo <= t && t < p.hi; });
    }

    /// Every (t-δ, t) meets the set.
    bool is_left_limit_point(const DyadicTime& t) const {
        if (tail_ && t > *tail_) return true;
        return std::any_of(pieces_.begin(), pieces_.end(),
                           [&](const Interval& p) { return !p.degenerate() && p.lo < t && t <= p.hi; });
    }

    /// sup of the set restricted to (-inf, t]; nullopt when that part is empty.
    std::optional<Supremum> sup_at_or_below(const DyadicTime& t) const {
        if (contains(t)) return Supremum{t, true};
        if (tail_ && t >= *tail_) return Supremum{t, true};
        std::optional<Supremum> best;
        for (const auto& p : pieces_) {
            if (p.lo > t || (p.lo == t && p.lo_open)) break;
            // t lies strictly above this piece (t is not contained)
            best = Supremum{p.hi, !p.hi_open};
        }
        return best;
    }

    /// inf of the set and whether it is attained.
    Supremum infimum() const {
        if (!pieces_.empty()) return {pieces_.front().lo, !pieces_.front().lo_open};
        return {*tail_, true};
    }

    /// sup of the set; nullopt when unbounded.
    std::optional<Supremum> supremum() const {
        if (tail_) return std::nullopt;
        return Supremum{pieces_.back().hi, !pieces_.back().hi_open};
    }

    /// Pieces of the intersection with the closed window [s, r]; the tail is
    /// clipped to a bounded interval.
    std::vector<Interval> clip(const DyadicTime& s, const DyadicTime& r) const {
        std::vector<Interval> out;
        auto add = [&](Interval p) {
            if (p.hi < s || p.lo > r) return;
            if (p.lo < s) p = {s, p.hi, false, p.hi_open};
            if (p.hi > r) p = {p.lo, r, p.lo_open, false};
            if (p.lo == p.hi && (p.lo_open || p.hi_open)) return;
            if (p.lo > p.hi) return;
            out.push_back(p);
        };
        for (const auto& p : pieces_) add(p);
        if (tail_ && *tail_ <= r) add(Interval::closed(std::max(*tail_, s), r));
        return out;
    }

    /// this ⊆ other
    bool subset_of(const IntervalSet& other) const {
        for (const auto& p : pieces_) {
            if (!piece_covered(other, p)) return false;
        }
        if (tail_) {
            if (!other.tail_ || *other.tail_ > *tail_) return false;
        }
        return true;
    }

    friend bool operator==(const IntervalSet&, const IntervalSet&) = default;

private:
    static bool piece_covered(const IntervalSet& other, const Interval& p) {
        if (other.tail_ && p.lo >= *other.tail_) return true;
        for (const auto& q : other.pieces_) {
            const bool lo_ok = q.lo < p.lo || (q.lo == p.lo && (!q.lo_open || p.lo_open));
            const bool hi_ok = q.hi > p.hi || (q.hi == p.hi && (!q.hi_open || p.hi_open));
            if (lo_ok && hi_ok) return true;
        }
        return false;
    }

    std::vector<Interval> pieces_;
    std::optional<DyadicTime> tail_;
};

/**
 * TimeDomain: the full index set on which paths live, together with an
 * optional restriction to the instants at which events are observed.
 * Without a restriction, observation times are the full domain.
 */
class TimeDomain {
public:
    explicit TimeDomain(IntervalSet full, std::optional<IntervalSet> restriction = std::nullopt)
        : full_(std::move(full)), restriction_(std::move(restriction)) {
        if (restriction_ && !restriction_->subset_of(full_)) {
            throw std::invalid_argument("time-domain restriction is not a subset of the full domain");
        }
    }

    static TimeDomain nonnegative_reals() { return TimeDomain(IntervalSet::half_line(DyadicTime::integer(0))); }

    const IntervalSet& full() const { return full_; }
    /// Observation times: the restriction if present, else the full domain.
    const IntervalSet& times() const { return restriction_ ? *restriction_ : full_; }
    bool restricted() const { return restriction_.has_value(); }

    friend bool operator==(const TimeDomain&, const TimeDomain&) = default;

private:
    IntervalSet full_;
    std::optional<IntervalSet> restriction_;
};

inline bool is_right_limit_point(const TimeDomain& domain, const DyadicTime& t) {
    return domain.times().is_right_limit_point(t);
}

inline bool is_left_limit_point(const TimeDomain& domain, const DyadicTime& t) {
    return domain.times().is_left_limit_point(t);
}

}  // namespace cadlag
