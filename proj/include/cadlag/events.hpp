#pragma once

#include <algorithm>
#include <cmath>
#include <functional>
#include <map>
#include <memory>
#include <span>
#include <stdexcept>
#include <string>
#include <utility>
#include <vector>

#include "cadlag/fdd.hpp"
#include "cadlag/grid.hpp"
#include "cadlag/jumps.hpp"
#include "cadlag/report.hpp"

namespace cadlag {

using TuplePredicate = std::function<bool(std::span<const State>)>;

/**
 * CylinderEvent [X_u ∈ A]: a grid and a decidable membership predicate on
 * X_u. Structural shapes are tagged so that charges can use closed forms;
 * everything else is enumerated lazily under a truncation.
 */
class CylinderEvent {
public:
    enum class Shape { generic, full, empty, atoms, component_equals, all_equal, jumps_at_least, change };

    static CylinderEvent full(TimeGrid u) {
        return {std::move(u), [](std::span<const State>) { return true; }, Shape::full, 0, true, "full"};
    }

    static CylinderEvent empty(TimeGrid u) {
        return {std::move(u), [](std::span<const State>) { return false; }, Shape::empty, 0, true, "empty"};
    }

    /// A finite list of atoms; the list is the exact event.
    static CylinderEvent atoms(TimeGrid u, std::vector<StateTuple> list) {
        for (const auto& x : list) {
            if (x.size() != u.size()) throw std::invalid_argument("atom is not aligned with the event grid");
        }
        std::sort(list.begin(), list.end());
        list.erase(std::unique(list.begin(), list.end()), list.end());
        auto shared = std::make_shared<const std::vector<StateTuple>>(std::move(list));
        CylinderEvent e{std::move(u),
                        [shared](std::span<const State> x) {
                            return std::binary_search(shared->begin(), shared->end(), StateTuple(x.begin(), x.end()));
                        },
                        Shape::atoms, 0, true, "atoms(" + std::to_string(shared->size()) + ")"};
        e.atoms_ = std::move(shared);
        return e;
    }

    /// [X_{t_i} = x]
    static CylinderEvent component_equals(TimeGrid u, std::size_t i, State x) {
        if (i >= u.size()) throw std::invalid_argument("component index out of range");
        return {std::move(u), [i, x](std::span<const State> y) { return y[i] == x; }, Shape::component_equals, i, false,
                "component " + std::to_string(i) + " == " + std::to_string(x)};
    }

    static CylinderEvent all_equal(TimeGrid u) {
        return {std::move(u),
                [](std::span<const State> y) { return std::adjacent_find(y.begin(), y.end(), std::not_equal_to<>()) == y.end(); },
                Shape::all_equal, 0, false, "all equal"};
    }

    /// [η̂_u >= k]
    static CylinderEvent jumps_at_least(TimeGrid u, std::size_t k) {
        return {std::move(u), [k](std::span<const State> y) { return count_jumps_tuple(y) >= k; }, Shape::jumps_at_least,
                k, false, "jumps >= " + std::to_string(k)};
    }

    /// X²_≠ on a two-instant grid.
    static CylinderEvent change(TimeGrid u) {
        if (u.size() != 2) throw std::invalid_argument("change event needs a two-instant grid");
        return {std::move(u), [](std::span<const State> y) { return y[0] != y[1]; }, Shape::change, 0, false, "change"};
    }

    static CylinderEvent custom(TimeGrid u, TuplePredicate pred, std::string description = "custom") {
        return {std::move(u), std::move(pred), Shape::generic, 0, false, std::move(description)};
    }

    const TimeGrid& grid() const { return grid_; }
    Shape shape() const { return shape_; }
    std::size_t parameter() const { return parameter_; }
    bool exact_atoms() const { return exact_atoms_; }
    const std::string& description() const { return description_; }
    const std::vector<StateTuple>* atom_list() const { return atoms_.get(); }

    bool contains(std::span<const State> x) const {
        if (x.size() != grid_.size()) throw std::invalid_argument("tuple is not aligned with the event grid");
        return pred_(x);
    }
    bool contains(const StateTuple& x) const { return contains(std::span<const State>(x)); }

    /// The same event represented on a finer grid w ⊒ u.
    CylinderEvent lift(const TimeGrid& w) const {
        if (w == grid_) return *this;
        auto pos = subgrid_positions(w, grid_);
        auto pred = pred_;
        const Shape shape = shape_ == Shape::full || shape_ == Shape::empty ? shape_ : Shape::generic;
        return {w,
                [pos = std::move(pos), pred = std::move(pred)](std::span<const State> x) {
                    StateTuple sub;
                    sub.reserve(pos.size());
                    for (auto i : pos) sub.push_back(x[i]);
                    return pred(std::span<const State>(sub));
                },
                shape, 0, false, "lift(" + description_ + ")"};
    }

    /// Predicate-level complement on the same grid.
    CylinderEvent complement() const {
        Shape shape = Shape::generic;
        if (shape_ == Shape::full) shape = Shape::empty;
        if (shape_ == Shape::empty) shape = Shape::full;
        auto pred = pred_;
        return {grid_, [pred = std::move(pred)](std::span<const State> x) { return !pred(x); }, shape, 0, false,
                "not(" + description_ + ")"};
    }

private:
    CylinderEvent(TimeGrid u, TuplePredicate pred, Shape shape, std::size_t parameter, bool exact, std::string desc)
        : grid_(std::move(u)), pred_(std::move(pred)), shape_(shape), parameter_(parameter), exact_atoms_(exact),
          description_(std::move(desc)) {}

    TimeGrid grid_;
    TuplePredicate pred_;
    Shape shape_;
    std::size_t parameter_;
    bool exact_atoms_;
    std::string description_;
    std::shared_ptr<const std::vector<StateTuple>> atoms_;
};

/// Conjunction of two cylinder events on the merged grid.
inline CylinderEvent intersect(const CylinderEvent& a, const CylinderEvent& b) {
    const TimeGrid w = merge_grids(a.grid(), b.grid());
    if (a.shape() == CylinderEvent::Shape::empty || b.shape() == CylinderEvent::Shape::empty) {
        return CylinderEvent::empty(w);
    }
    if (a.shape() == CylinderEvent::Shape::full) return b.lift(w);
    if (b.shape() == CylinderEvent::Shape::full) return a.lift(w);
    const auto la = a.lift(w);
    const auto lb = b.lift(w);
    return CylinderEvent::custom(
        w, [la, lb](std::span<const State> x) { return la.contains(x) && lb.contains(x); },
        "(" + a.description() + ") and (" + b.description() + ")");
}

/// Disjunction of two cylinder events on the merged grid.
inline CylinderEvent unite(const CylinderEvent& a, const CylinderEvent& b) {
    const TimeGrid w = merge_grids(a.grid(), b.grid());
    const auto la = a.lift(w);
    const auto lb = b.lift(w);
    return CylinderEvent::custom(
        w, [la, lb](std::span<const State> x) { return la.contains(x) || lb.contains(x); },
        "(" + a.description() + ") or (" + b.description() + ")");
}

/// Value of the cylinder charge P([X_u ∈ A]) = μ_u(A).
struct ChargeValue {
    ProbInterval value;
    bool exact = false;
};

/// Brackets μ_u(A), using closed forms where the event shape allows.
inline ChargeValue charge(const FddFamily& family, const CylinderEvent& e, const Truncation& trunc = {}) {
    using Shape = CylinderEvent::Shape;
    const auto& u = e.grid();
    if (!grid_in_domain(family.domain(), u)) throw std::invalid_argument("event grid outside the family's domain");
    switch (e.shape()) {
        case Shape::full: return {ProbInterval::exact(1.0), true};
        case Shape::empty: return {ProbInterval::exact(0.0), true};
        case Shape::atoms: {
            double total = 0.0;
            for (const auto& x : *e.atom_list()) total += family.mass(u, x);
            return {ProbInterval::exact(std::min(total, 1.0)), true};
        }
        case Shape::change: {
            const double p = change_prob(family, u[0], u[1]);
            return {ProbInterval::exact(p), true};
        }
        case Shape::all_equal:
            if (u.size() == 1) return {ProbInterval::exact(1.0), true};
            if (u.size() == 2) {
                const double p = change_prob(family, u[0], u[1]);
                return {ProbInterval::exact(1.0 - p), true};
            }
            break;
        case Shape::jumps_at_least:
            return {jump_tail_prob(family, u, e.parameter(), trunc), true};
        default: break;
    }
    const auto v = prob_event(family, u, [&e](std::span<const State> x) { return e.contains(x); }, trunc);
    return {v, family.state_space().is_finite()};
}

/**
 * Checks finite additivity of the cylinder charge across grids: every part
 * is charged on its own grid, the union on the merged grid, and the two
 * totals must agree up to the truncation slack (plus 1e-12 rounding).
 * Parts must be pairwise disjoint on the truncated atoms of the merged grid.
 */
inline CheckReport finite_additivity_check(const FddFamily& family, const std::vector<CylinderEvent>& parts,
                                           const Truncation& trunc = {}, double tol = 1e-12) {
    if (parts.empty()) throw std::invalid_argument("empty partition");
    TimeGrid w = parts.front().grid();
    for (const auto& p : parts) w = merge_grids(w, p.grid());
    std::vector<CylinderEvent> lifted;
    lifted.reserve(parts.size());
    for (const auto& p : parts) lifted.push_back(p.lift(w));

    double union_lo = 0.0;
    const double total = for_each_atom(family, w, trunc, [&](const StateTuple& x, double m) {
        std::size_t hits = 0;
        for (const auto& l : lifted) hits += l.contains(x) ? 1 : 0;
        if (hits > 1) throw std::invalid_argument("partition sets overlap");
        if (hits == 1) union_lo += m;
    });
    const double union_slack = std::max(0.0, 1.0 - total);

    CheckReport r;
    r.check = "finite_additivity";
    double sum_lo = 0.0;
    double sum_slack = 0.0;
    for (std::size_t i = 0; i < parts.size(); ++i) {
        const auto c = charge(family, parts[i], trunc);
        sum_lo += c.value.lo;
        sum_slack += c.value.width();
        r.add_estimate("part_" + std::to_string(i), c.value.lo, c.value.hi, tol);
    }
    const double gap = std::fabs(union_lo - sum_lo);
    const double slack = union_slack + sum_slack;
    r.add_estimate("union", union_lo, std::min(1.0, union_lo + union_slack), tol);
    r.add_estimate("sum_of_parts", sum_lo, sum_lo + sum_slack, tol);
    r.add_estimate("gap", gap, tol + slack);
    r.add_estimate("slack", slack, tol);
    r.tolerances.emplace_back("rounding", tol);
    if (gap > slack + tol) {
        Witness wit;
        wit.description = "union charge differs from the sum of part charges";
        wit.times = w.times();
        wit.value = gap;
        r.witnesses.push_back(std::move(wit));
        r.conclude(Verdict::fail);
    } else {
        r.conclude(Verdict::pass);
    }
    return r;
}

/// Partition of X_u into explicit atom sets on a single grid.
inline CheckReport finite_additivity_check(const FddFamily& family, const TimeGrid& u,
                                           const std::vector<std::vector<StateTuple>>& partition,
                                           const Truncation& trunc = {}, double tol = 1e-12) {
    std::vector<StateTuple> all;
    for (const auto& set : partition) all.insert(all.end(), set.begin(), set.end());
    std::sort(all.begin(), all.end());
    if (std::adjacent_find(all.begin(), all.end()) != all.end()) throw std::invalid_argument("partition sets overlap");
    std::vector<CylinderEvent> parts;
    parts.reserve(partition.size());
    for (const auto& set : partition) parts.push_back(CylinderEvent::atoms(u, set));
    return finite_additivity_check(family, parts, trunc, tol);
}

}  // namespace cadlag
