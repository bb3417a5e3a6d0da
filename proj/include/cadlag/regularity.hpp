#pragma once

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <limits>
#include <map>
#include <optional>
#include <set>
#include <stdexcept>
#include <string>
#include <utility>
#include <vector>

#include "cadlag/detail/parallel.hpp"
#include "cadlag/events.hpp"
#include "cadlag/fdd.hpp"
#include "cadlag/grid.hpp"
#include "cadlag/jumps.hpp"
#include "cadlag/rate_matrix.hpp"
#include "cadlag/report.hpp"

namespace cadlag {

/// Knobs shared by the regularity checkers.
struct RegularityParams {
    /// n: jump-count windows are [-n, n] ∩ T.
    int window = 1;
    /// Largest jump threshold k probed for the jump-count tail.
    std::size_t k_max = 10;
    /// Dyadic refinement depth.
    int depth = 10;
    /// Geometric ratio of the limit schedule r_j = t ± h ρ^j.
    double ratio = 0.5;
    int steps = 30;
    double initial_step = 1.0;
    double eps_limit = 1e-3;
    double eps_consistency = 1e-9;
    /// Optional rate certificate λ_n used by the limsup probe and the expected-jump bound.
    std::optional<double> rate_bound;
    unsigned threads = 1;

    void validate() const {
        if (window < 1) throw std::invalid_argument("window index n must be >= 1");
        if (k_max < 1) throw std::invalid_argument("k_max must be >= 1");
        if (depth < 0 || depth > 24) throw std::invalid_argument("refinement depth must lie in [0, 24]");
        if (!(ratio > 0.0 && ratio < 1.0)) throw std::invalid_argument("schedule ratio must lie in (0, 1)");
        if (steps < 2) throw std::invalid_argument("schedule needs at least two steps");
        if (!(initial_step > 0.0)) throw std::invalid_argument("initial step must be > 0");
        if (!(eps_limit > 0.0) || !(eps_consistency > 0.0)) throw std::invalid_argument("tolerances must be > 0");
        if (rate_bound && !(*rate_bound >= 0.0)) throw std::invalid_argument("rate bound must be >= 0");
    }
};

enum class Side { right, left };

inline const char* to_string(Side s) { return s == Side::right ? "right" : "left"; }

/// A bounded, non-empty set of rate matrices over one state space.
class RateMatrixSet {
public:
    explicit RateMatrixSet(std::vector<RateMatrix> members) : members_(std::move(members)) {
        if (members_.empty()) throw std::invalid_argument("rate matrix set must be non-empty");
        for (const auto& q : members_) {
            if (q.size() != members_.front().size()) throw std::invalid_argument("rate matrices differ in dimension");
        }
    }

    const std::vector<RateMatrix>& members() const { return members_; }

private:
    std::vector<RateMatrix> members_;
};

/// Operator norm convention ‖Q‖ = 2 max_x |Q_xx|.
inline double generator_norm(const RateMatrix& q) { return 2.0 * q.max_exit_rate(); }

/// ½‖𝒬‖ = sup over the set of the largest exit rate: a jump-intensity certificate.
inline double imprecise_norm_bound(const RateMatrixSet& set) {
    double sup = 0.0;
    for (const auto& q : set.members()) sup = std::max(sup, generator_norm(q));
    return 0.5 * sup;
}

namespace detail {

inline constexpr int kSchedulePrecision = 52;

/// Approach points t ± h ρ^j that lie in the observation set.
inline std::vector<DyadicTime> limit_schedule(const IntervalSet& times, const DyadicTime& t, Side side,
                                              const RegularityParams& p) {
    std::optional<DyadicTime> room;
    bool approachable = false;
    if (side == Side::right) {
        if (times.tail_start() && t >= *times.tail_start()) {
            approachable = true;
        } else {
            for (const auto& piece : times.pieces()) {
                if (!piece.degenerate() && piece.lo <= t && t < piece.hi) {
                    approachable = true;
                    room = piece.hi - t;
                }
            }
        }
    } else {
        if (times.tail_start() && t > *times.tail_start()) {
            approachable = true;
            room = t - *times.tail_start();
        } else {
            for (const auto& piece : times.pieces()) {
                if (!piece.degenerate() && piece.lo < t && t <= piece.hi) {
                    approachable = true;
                    room = t - piece.lo;
                }
            }
        }
    }
    if (!approachable) {
        throw std::invalid_argument(std::string("no approach points from the ") + to_string(side) + " of " +
                                    t.to_string());
    }
    // short mantissas keep repeated halving inside the dyadic precision
    DyadicTime h = DyadicTime::from_double(p.initial_step, 20);
    if (h.is_zero()) h = DyadicTime::integer(1).halved(20);
    if (room && h > *room) {
        h = DyadicTime::integer(1);
        while (h > *room) h = h.halved();
        while (h.times(2) <= *room) h = h.times(2);
    }
    std::vector<DyadicTime> out;
    for (int j = 0; j < p.steps; ++j) {
        const DyadicTime point = side == Side::right ? t + h : t - h;
        if (times.contains(point)) out.push_back(point);
        const DyadicTime next =
            p.ratio == 0.5 ? h.halved() : DyadicTime::from_double(h.to_double() * p.ratio, kSchedulePrecision);
        if (!(next > DyadicTime::integer(0)) || !(next < h)) break;
        h = next;
    }
    if (out.size() < 2) throw std::invalid_argument("limit schedule has fewer than two points in the domain");
    return out;
}

inline double max_of(const std::vector<double>& v, std::size_t from) {
    double m = -std::numeric_limits<double>::infinity();
    for (std::size_t i = from; i < v.size(); ++i) m = std::max(m, v[i]);
    return m;
}

struct PairOutcome {
    double max_gap = 0.0;
    double slack = 0.0;
    std::size_t events = 0;
    std::optional<Witness> violation;
};

/// Compares μ_u against the u-marginal of μ_v (u ⊑ v) over singletons and
/// structural events.
inline PairOutcome compare_marginals(const FddFamily& family, const TimeGrid& u, const TimeGrid& v,
                                     const Truncation& trunc, double eps) {
    const auto pos = subgrid_positions(v, u);
    std::map<StateTuple, double> direct;
    std::map<StateTuple, double> marginal;
    const double total_u = for_each_atom(family, u, trunc, [&](const StateTuple& x, double m) { direct[x] += m; });
    const double total_v = for_each_atom(family, v, trunc, [&](const StateTuple& x, double m) {
        StateTuple sub;
        sub.reserve(pos.size());
        for (auto i : pos) sub.push_back(x[i]);
        marginal[sub] += m;
    });
    PairOutcome out;
    out.slack = std::max({0.0, 1.0 - total_u, 1.0 - total_v});

    auto judge = [&](double a, double b, const std::string& what, const StateTuple* atom) {
        const double gap = std::fabs(a - b);
        ++out.events;
        out.max_gap = std::max(out.max_gap, gap);
        if (gap - out.slack > eps && !out.violation) {
            Witness w;
            w.description = "mu_u(A) != mu_v(lift A) for A = " + what;
            w.times = u.times();
            w.other_times = v.times();
            if (atom) w.states = *atom;
            w.value = gap;
            out.violation = std::move(w);
        }
    };

    std::set<StateTuple> keys;
    for (const auto& [x, m] : direct) keys.insert(x);
    for (const auto& [x, m] : marginal) keys.insert(x);
    for (const auto& x : keys) {
        const auto a = direct.find(x);
        const auto b = marginal.find(x);
        judge(a == direct.end() ? 0.0 : a->second, b == marginal.end() ? 0.0 : b->second, "singleton", &x);
    }
    auto sum_if = [](const std::map<StateTuple, double>& m, auto&& pred) {
        double s = 0.0;
        for (const auto& [x, p] : m) {
            if (pred(x)) s += p;
        }
        return s;
    };
    for (std::size_t k = 1; k < u.size(); ++k) {
        auto pred = [k](const StateTuple& x) { return count_jumps_tuple(x) >= k; };
        judge(sum_if(direct, pred), sum_if(marginal, pred), "jumps >= " + std::to_string(k), nullptr);
        auto changed = [k](const StateTuple& x) { return x[k - 1] != x[k]; };
        judge(sum_if(direct, changed), sum_if(marginal, changed), "change at step " + std::to_string(k), nullptr);
    }
    return out;
}

}  // namespace detail

/**
 * Consistency of μ_• over a corpus: for every corpus grid u and every merge
 * w = u ∪ g with another corpus grid (which covers every pair u ⊑ v), the
 * u-marginal of μ_w must match μ_u on all truncated singletons and on the
 * structural events η̂ >= k and X²_≠ along u. A violation is certified when
 * the gap exceeds ε plus the truncation slack.
 */
inline CheckReport check_consistency(const FddFamily& family, const std::vector<TimeGrid>& corpus,
                                     const Truncation& trunc = {}, double eps_consistency = 1e-9, unsigned threads = 1) {
    if (corpus.empty()) throw std::invalid_argument("consistency corpus is empty");
    if (!(eps_consistency > 0.0)) throw std::invalid_argument("consistency tolerance must be > 0");
    std::set<std::pair<TimeGrid, TimeGrid>> seen;
    std::vector<std::pair<TimeGrid, TimeGrid>> pairs;
    for (const auto& u : corpus) {
        for (const auto& g : corpus) {
            TimeGrid w = merge_grids(u, g);
            if (w == u) continue;
            if (seen.emplace(u, w).second) pairs.emplace_back(u, std::move(w));
        }
    }
    const auto outcomes = detail::parallel_map(pairs.size(), threads, [&](std::size_t i) {
        return detail::compare_marginals(family, pairs[i].first, pairs[i].second, trunc, eps_consistency);
    });

    CheckReport r;
    r.check = "consistency";
    r.tolerances.emplace_back("eps_consistency", eps_consistency);
    r.tolerances.emplace_back("truncation_max_state", static_cast<double>(trunc.max_state));
    double max_gap = 0.0;
    double max_slack = 0.0;
    std::size_t events = 0;
    for (const auto& o : outcomes) {
        max_gap = std::max(max_gap, o.max_gap);
        max_slack = std::max(max_slack, o.slack);
        events += o.events;
        if (o.violation && r.witnesses.empty()) r.witnesses.push_back(*o.violation);
    }
    r.add_estimate("max_gap", max_gap, eps_consistency + max_slack);
    r.add_estimate("max_slack", max_slack, eps_consistency);
    r.add_estimate("pairs_checked", static_cast<double>(pairs.size()), 0.0);
    r.add_estimate("events_checked", static_cast<double>(events), 0.0);
    if (pairs.empty()) r.notes.emplace_back("corpus has no strictly nested pairs; nothing to compare");
    if (!r.witnesses.empty()) {
        r.add_estimate("witness_gap", r.witnesses.front().value, eps_consistency + max_slack);
        r.conclude(Verdict::fail);
    } else if (max_slack > eps_consistency) {
        r.notes.emplace_back("truncation slack exceeds the consistency tolerance");
        r.conclude(Verdict::inconclusive);
    } else {
        r.conclude(Verdict::pass);
    }
    return r;
}

/**
 * Stochastic right-continuity at t: μ_(t,r)(X²_=) along r_j ↘ t must reach
 * 1 - ε_limit and be eventually non-decreasing within ε_limit. A stable
 * trace that stays below fails; an unstable one is inconclusive.
 */
inline CheckReport check_r1(const FddFamily& family, const DyadicTime& t, const RegularityParams& params) {
    params.validate();
    CheckReport r;
    r.check = "r1_right_continuity";
    r.tolerances.emplace_back("eps_limit", params.eps_limit);
    const auto& times = family.domain().times();
    if (!times.contains(t) || !times.is_right_limit_point(t)) {
        r.vacuous = true;
        r.notes.emplace_back("t is not an observation time with a right-sided limit; the condition is vacuous");
        r.conclude(Verdict::pass);
        return r;
    }
    const auto points = detail::limit_schedule(times, t, Side::right, params);
    Trace trace{"r1_trace", {"t", "r", "r_minus_t", "stay_probability"}, {}};
    std::vector<double> stay;
    for (const auto& rj : points) {
        const double s = 1.0 - change_prob(family, t, rj);
        stay.push_back(s);
        trace.rows.push_back({t.to_double(), rj.to_double(), (rj - t).to_double(), s});
    }
    r.traces.push_back(std::move(trace));
    const double final_value = stay.back();
    bool monotone = true;
    for (std::size_t j = stay.size() / 2 + 1; j < stay.size(); ++j) {
        if (stay[j] < stay[j - 1] - params.eps_limit) monotone = false;
    }
    const bool stable = std::fabs(stay.back() - stay[stay.size() - 2]) <= params.eps_limit;
    r.add_estimate("final_stay_probability", final_value, params.eps_limit);
    r.add_estimate("tail_max", detail::max_of(stay, stay.size() / 2), params.eps_limit);
    if (final_value >= 1.0 - params.eps_limit && monotone && stable) {
        r.conclude(Verdict::pass);
    } else if (stable && final_value < 1.0 - params.eps_limit) {
        Witness w;
        w.description = "stay probability does not approach 1 from the right";
        w.times = {t, points.back()};
        w.value = final_value;
        r.witnesses.push_back(std::move(w));
        r.conclude(Verdict::fail);
    } else {
        r.notes.emplace_back("limit trace not yet stable at the final schedule point");
        r.conclude(Verdict::inconclusive);
    }
    return r;
}

/**
 * Jump-count tails on [-n, n] ∩ T. The supremum over all grids is taken as
 * the limit along the nested dyadic refinement, which is exact for the
 * built-in families because η̂ is monotone under refinement. Passes when the
 * deepest-grid tail at k_max is within ε_limit and the tail is
 * non-increasing in k.
 */
inline CheckReport check_r2(const FddFamily& family, const RegularityParams& params, const Truncation& trunc = {}) {
    params.validate();
    const DyadicTime n = DyadicTime::integer(params.window);
    const auto grids = dyadic_refinement(family.domain(), -n, n, params.depth);
    CheckReport r;
    r.check = "r2_jump_tails";
    r.tolerances.emplace_back("eps_limit", params.eps_limit);
    r.notes.emplace_back(
        "supremum over all grids replaced by the limit along nested dyadic refinements (monotone in refinement)");
    const std::size_t kmax = params.k_max;

    // table[d][k-1] = tail at depth d, threshold k
    std::vector<std::vector<double>> table(grids.size(), std::vector<double>(kmax));
    const auto rows = detail::parallel_map(grids.size(), params.threads, [&](std::size_t d) {
        std::vector<double> row(kmax);
        for (std::size_t k = 1; k <= kmax; ++k) row[k - 1] = jump_tail_prob(family, grids[d], k, trunc).hi;
        return row;
    });
    for (std::size_t d = 0; d < grids.size(); ++d) table[d] = rows[d];

    Trace full{"r2_table", {"depth", "grid_points", "k", "tail_probability"}, {}};
    for (std::size_t d = 0; d < grids.size(); ++d) {
        for (std::size_t k = 1; k <= kmax; ++k) {
            full.rows.push_back({static_cast<double>(d), static_cast<double>(grids[d].size()), static_cast<double>(k),
                                 table[d][k - 1]});
        }
    }
    const auto& deepest = table.back();
    Trace ktrace{"r2_k_trace", {"k", "tail_probability", "markov_bound"}, {}};
    const double expected = expected_jumps(family, grids.back());
    bool non_increasing_k = true;
    for (std::size_t k = 1; k <= kmax; ++k) {
        ktrace.rows.push_back({static_cast<double>(k), deepest[k - 1], expected / static_cast<double>(k)});
        if (k > 1 && deepest[k - 1] > deepest[k - 2] + 1e-12) non_increasing_k = false;
    }
    bool non_decreasing_depth = true;
    for (std::size_t d = 1; d < table.size(); ++d) {
        for (std::size_t k = 0; k < kmax; ++k) {
            if (table[d][k] < table[d - 1][k] - 1e-12) non_decreasing_depth = false;
        }
    }
    Trace dtrace{"r2_depth_trace", {"depth", "tail_probability_at_k_max"}, {}};
    for (std::size_t d = 0; d < table.size(); ++d) dtrace.rows.push_back({static_cast<double>(d), table[d][kmax - 1]});
    r.traces.push_back(std::move(ktrace));
    r.traces.push_back(std::move(dtrace));
    r.traces.push_back(std::move(full));

    const double value = deepest[kmax - 1];
    const double previous = table.size() > 1 ? table[table.size() - 2][kmax - 1] : value;
    const bool stable = std::fabs(value - previous) <= params.eps_limit;
    r.add_estimate("tail_at_k_max", value, params.eps_limit);
    r.add_estimate("expected_jumps_deepest_grid", expected, 0.0);
    r.add_estimate("deepest_grid_points", static_cast<double>(grids.back().size()), 0.0);
    r.add_estimate("non_increasing_in_k", non_increasing_k ? 1.0 : 0.0, 0.0);
    r.add_estimate("non_decreasing_in_depth", non_decreasing_depth ? 1.0 : 0.0, 0.0);
    if (value <= params.eps_limit && non_increasing_k && stable) {
        r.conclude(Verdict::pass);
    } else if (value > params.eps_limit && stable) {
        Witness w;
        w.description = "jump-count tail at k_max stays above eps_limit on the deepest grid";
        w.times = {grids.back().front(), grids.back().back()};
        w.value = value;
        r.witnesses.push_back(std::move(w));
        r.conclude(Verdict::fail);
    } else {
        r.notes.emplace_back("tail estimate still moving between the two deepest refinement levels");
        r.conclude(Verdict::inconclusive);
    }
    return r;
}

namespace detail {

/// Inserts the midpoint of every gap.
inline TimeGrid bisect_grid(const TimeGrid& u) {
    std::vector<DyadicTime> out;
    out.reserve(2 * u.size());
    for (std::size_t i = 0; i < u.size(); ++i) {
        if (i > 0) out.push_back((u[i - 1] + u[i]).halved());
        out.push_back(u[i]);
    }
    return TimeGrid(std::move(out));
}

inline double jump_rate(const FddFamily& family, const TimeGrid& u) {
    return expected_jumps(family, u) / span_length(u.front(), u.back());
}

}  // namespace detail

/**
 * Expected-jump rate certificate: λ̂ = max over the corpus of
 * E(η̂_u)/(t_m - t_1). Divergence is detected by bisecting the finest corpus
 * grid until its mesh is at most 2^-depth times its length: a bounded rate
 * gives ratio growth → 1 per bisection, a non-vanishing per-step change
 * probability gives growth → 2. Fails when the last growth factor exceeds
 * 1.5, or when λ̂ exceeds a supplied rate bound.
 */
inline CheckReport check_expected_bound(const FddFamily& family, const RegularityParams& params,
                                        const std::vector<TimeGrid>& corpus) {
    params.validate();
    CheckReport r;
    r.check = "expected_jump_bound";
    r.tolerances.emplace_back("eps_limit", params.eps_limit);
    const DyadicTime n = DyadicTime::integer(params.window);
    std::vector<const TimeGrid*> usable;
    for (const auto& u : corpus) {
        if (u.front() < -n || u.back() > n) throw std::invalid_argument("corpus grid outside [-n, n]");
        if (u.size() >= 2) usable.push_back(&u);
    }
    if (usable.empty()) throw std::invalid_argument("corpus has no grid with positive length");

    Trace trace{"expected_jump_rates", {"grid_points", "t_first", "t_last", "mesh", "expected_jumps", "rate"}, {}};
    double lambda_hat = 0.0;
    const TimeGrid* finest = usable.front();
    double linear_gap = 0.0;
    const bool poisson = family.root().kind() == FddFamily::Kind::poisson;
    for (const auto* u : usable) {
        const double e = expected_jumps(family, *u);
        const double len = span_length(u->front(), u->back());
        const double rate = e / len;
        lambda_hat = std::max(lambda_hat, rate);
        if (u->mesh() < finest->mesh()) finest = u;
        trace.rows.push_back({static_cast<double>(u->size()), u->front().to_double(), u->back().to_double(), u->mesh(), e, rate});
        if (poisson) {
            linear_gap = std::max(linear_gap, family.root().params<FddFamily::Poisson>().rate * len - e);
        }
    }
    r.traces.push_back(std::move(trace));

    // refinement probe on the finest grid
    Trace probe{"refinement_probe", {"level", "mesh", "rate", "growth"}, {}};
    TimeGrid g = *finest;
    const double target = std::ldexp(span_length(g.front(), g.back()), -params.depth);
    double rate = detail::jump_rate(family, g);
    double growth = 1.0;
    probe.rows.push_back({0.0, g.mesh(), rate, 1.0});
    for (int level = 1; g.mesh() > target && level <= params.depth + 1; ++level) {
        g = detail::bisect_grid(g);
        const double next = detail::jump_rate(family, g);
        growth = rate > 0.0 ? next / rate : (next > 0.0 ? std::numeric_limits<double>::infinity() : 1.0);
        rate = next;
        probe.rows.push_back({static_cast<double>(level), g.mesh(), rate, growth});
    }
    r.traces.push_back(std::move(probe));

    r.add_estimate("lambda_hat", lambda_hat, params.eps_limit);
    r.add_estimate("refined_rate", rate, params.eps_limit);
    r.add_estimate("last_growth_factor", growth, 0.5);
    r.add_estimate("r2_decay_bound_at_k_max",
                   2.0 * params.window * lambda_hat / static_cast<double>(params.k_max), params.eps_limit);
    if (poisson) {
        r.add_estimate("linear_identity_gap", linear_gap, 0.0);
        r.add_estimate("linear_identity_holds", linear_gap <= 1e-15 ? 1.0 : 0.0, 0.0);
        r.notes.emplace_back(
            "poisson: expected jumps along a grid equal sum_k (1 - exp(-rate * gap_k)), strictly below "
            "rate * (t_m - t_1) whenever rate > 0; the identity E = rate * (t_m - t_1) is unmet and only the "
            "inequality holds");
    }
    if (family.root().kind() == FddFamily::Kind::ctmc) {
        const auto& q = family.root().params<FddFamily::Ctmc>().generator;
        const double half_norm = imprecise_norm_bound(RateMatrixSet({q}));
        r.add_estimate("half_generator_norm", half_norm, params.eps_limit);
        r.notes.emplace_back("generator norm convention ||Q|| = 2 max_x |Q_xx|, so half the norm is the largest exit rate");
    }
    const bool diverging = growth > 1.5;
    const bool over_bound = params.rate_bound && lambda_hat > *params.rate_bound + params.eps_limit;
    if (diverging || over_bound) {
        Witness w;
        w.description = diverging ? "expected jumps per unit time grow without bound under refinement"
                                  : "expected jump rate exceeds the supplied bound";
        w.times = finest->times();
        w.value = diverging ? rate : lambda_hat;
        r.witnesses.push_back(std::move(w));
        r.conclude(Verdict::fail);
    } else {
        r.conclude(Verdict::pass);
    }
    return r;
}

/**
 * One-sided limsup of μ(X²_≠)/Δ at t along the geometric schedule. The
 * estimate is the maximum over the last half of the trace; it is stable when
 * that agrees with the maximum over the last quarter within ε_limit.
 * Passes when stable and at most rate_bound + ε_limit (or merely stable and
 * finite when no bound is supplied).
 */
inline CheckReport rate_limsup_probe(const FddFamily& family, const DyadicTime& t, Side side,
                                     const RegularityParams& params) {
    params.validate();
    CheckReport r;
    r.check = std::string("rate_limsup_") + to_string(side);
    r.tolerances.emplace_back("eps_limit", params.eps_limit);
    r.notes.emplace_back("sampled probe of a limit superior; not a certificate over all approach sequences");
    const auto points = detail::limit_schedule(family.domain().times(), t, side, params);
    Trace trace{"limsup_trace", {"t", "other", "delta", "change_probability", "ratio"}, {}};
    std::vector<double> ratios;
    for (const auto& p : points) {
        const double c = side == Side::right ? change_prob(family, t, p) : change_prob(family, p, t);
        const double delta = side == Side::right ? span_length(t, p) : span_length(p, t);
        ratios.push_back(c / delta);
        trace.rows.push_back({t.to_double(), p.to_double(), delta, c, c / delta});
    }
    r.traces.push_back(std::move(trace));
    const double half = detail::max_of(ratios, ratios.size() / 2);
    const double quarter = detail::max_of(ratios, ratios.size() - std::max<std::size_t>(1, ratios.size() / 4));
    const bool stable = std::fabs(half - quarter) <= params.eps_limit;
    r.add_estimate("limsup_estimate", half, params.eps_limit);
    r.add_estimate("last_quarter_max", quarter, params.eps_limit);
    if (params.rate_bound) r.add_estimate("rate_bound", *params.rate_bound, params.eps_limit);
    if (!stable) {
        r.notes.emplace_back("tail maxima disagree; the limsup estimate has not settled");
        r.conclude(Verdict::inconclusive);
    } else if (params.rate_bound && half > *params.rate_bound + params.eps_limit) {
        Witness w;
        w.description = "one-sided change rate exceeds the supplied bound";
        w.times = {t};
        w.value = half;
        r.witnesses.push_back(std::move(w));
        r.conclude(Verdict::fail);
    } else {
        r.conclude(Verdict::pass);
    }
    return r;
}

}  // namespace cadlag
