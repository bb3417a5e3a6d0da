#pragma once

#include <Eigen/Dense>

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <functional>
#include <map>
#include <memory>
#include <mutex>
#include <numeric>
#include <optional>
#include <span>
#include <stdexcept>
#include <string>
#include <variant>
#include <vector>

#include "cadlag/grid.hpp"
#include "cadlag/rate_matrix.hpp"
#include "cadlag/time_domain.hpp"

namespace cadlag {

/// Closed bracket [lo, hi] around a probability.
struct ProbInterval {
    double lo = 0.0;
    double hi = 0.0;

    double width() const { return hi - lo; }
    double mid() const { return 0.5 * (lo + hi); }
    bool contains(double p, double slack = 0.0) const { return lo - slack <= p && p <= hi + slack; }

    static ProbInterval exact(double p) { return {p, p}; }
};

/// Finite support window used when a state space is countably infinite.
/// Finite spaces are always enumerated completely.
struct Truncation {
    /// Largest state enumerated per coordinate (states 0..max_state).
    std::size_t max_state = 49;
    /// Branches whose partial mass is at or below this are skipped; the
    /// skipped mass is accounted for in the bracket width.
    double prune_below = 1e-16;
};

namespace detail {

inline double poisson_pmf(std::size_t k, double mean) {
    if (mean == 0.0) return k == 0 ? 1.0 : 0.0;
    const double kd = static_cast<double>(k);
    return std::exp(-mean + kd * std::log(mean) - std::lgamma(kd + 1.0));
}

inline void check_probability_vector(const std::vector<double>& p, const char* what) {
    if (p.empty()) throw std::invalid_argument(std::string(what) + " must be non-empty");
    double sum = 0.0;
    for (double v : p) {
        if (!(v >= 0.0) || !std::isfinite(v)) throw std::invalid_argument(std::string(what) + " has a negative entry");
        sum += v;
    }
    if (std::fabs(sum - 1.0) > kGeneratorTolerance) {
        throw std::invalid_argument(std::string(what) + " does not sum to 1");
    }
}

/// Memoized exp(Q dt) keyed by the exact duration.
class TransitionCache {
public:
    TransitionCache(RateMatrix q, double tol) : q_(std::move(q)), tol_(tol) {}

    const Eigen::MatrixXd& get(const DyadicTime& dt) {
        std::lock_guard lock(mutex_);
        auto it = cache_.find(dt);
        if (it == cache_.end()) {
            it = cache_.emplace(dt, transition_matrix(q_, dt.to_double(), tol_).entries).first;
        }
        return it->second;
    }

    double tolerance() const { return tol_; }

private:
    RateMatrix q_;
    double tol_;
    std::mutex mutex_;
    std::map<DyadicTime, Eigen::MatrixXd> cache_;
};

}  // namespace detail

/**
 * FddFamily: a collection of finite-dimensional distributions, one per time
 * grid. All built-in kinds live on the observation domain [0, +inf) and
 * factor along the grid as an initial law times one-step kernels; the
 * perturbed kind overrides the single-instant law at one time.
 *
 * Families are immutable after construction and safe to share across
 * threads; CTMC transition matrices are memoized behind a mutex.
 */
class FddFamily {
public:
    enum class Kind { poisson, ctmc, iid, perturbed };

    struct Poisson {
        double rate;
    };
    struct Ctmc {
        Eigen::VectorXd initial;
        RateMatrix generator;
        std::shared_ptr<detail::TransitionCache> cache;
    };
    struct Iid {
        std::vector<double> marginal;
    };
    struct Perturbed {
        std::shared_ptr<const FddFamily> base;
        double defect;
        DyadicTime defect_time;
        /// ε-mass moves from `from` to `to` in the single-instant law at defect_time.
        State from;
        State to;
        double moved;
    };

    static FddFamily poisson(double rate) {
        if (!(rate >= 0.0) || !std::isfinite(rate)) throw std::invalid_argument("rate must be finite and >= 0");
        return FddFamily(Poisson{rate}, StateSpace::naturals());
    }

    static FddFamily ctmc(const std::vector<double>& initial, RateMatrix generator,
                          std::optional<std::vector<std::string>> labels = std::nullopt, double tol = 1e-14) {
        detail::check_probability_vector(initial, "initial distribution");
        if (initial.size() != generator.size()) {
            throw std::invalid_argument("initial distribution and rate matrix sizes differ");
        }
        auto space = labels ? StateSpace::finite(*labels) : StateSpace::finite(initial.size());
        if (space.size() != initial.size()) throw std::invalid_argument("state labels and rate matrix sizes differ");
        Eigen::VectorXd pi = Eigen::Map<const Eigen::VectorXd>(initial.data(), static_cast<Eigen::Index>(initial.size()));
        auto cache = std::make_shared<detail::TransitionCache>(generator, tol);
        return FddFamily(Ctmc{std::move(pi), std::move(generator), std::move(cache)}, std::move(space));
    }

    static FddFamily iid(std::vector<double> marginal) {
        detail::check_probability_vector(marginal, "marginal");
        auto space = StateSpace::finite(marginal.size());
        return FddFamily(Iid{std::move(marginal)}, std::move(space));
    }

    /// Moves min(defect, m(a)) of single-instant mass at defect_time from the
    /// most likely state a to its successor; every multi-instant law is the
    /// base law, so consistency fails exactly at the singleton grid.
    static FddFamily perturbed(const FddFamily& base, double defect, DyadicTime defect_time) {
        if (!(defect > 0.0 && defect <= 1.0)) throw std::invalid_argument("defect must lie in (0, 1]");
        if (defect_time < DyadicTime::integer(0)) throw std::invalid_argument("defect time outside the domain");
        if (base.state_space().is_finite() && base.state_space().size() < 2) {
            throw std::invalid_argument("perturbation needs at least two states");
        }
        auto shared = std::make_shared<const FddFamily>(base);
        const TimeGrid single({defect_time});
        // the mode: stop once the remaining unseen mass cannot beat it
        State mode = 0;
        double best = -1.0;
        double seen = 0.0;
        for (State x = 0;; ++x) {
            if (base.state_space().is_finite() && x >= base.state_space().size()) break;
            const double m = base.mass(single, StateTuple{x});
            if (m > best) {
                best = m;
                mode = x;
            }
            seen += m;
            if (1.0 - seen < best) break;
        }
        const State to = base.state_space().is_finite() ? (mode + 1) % base.state_space().size() : mode + 1;
        const double moved = std::min(defect, best);
        return FddFamily(Perturbed{std::move(shared), defect, defect_time, mode, to, moved}, base.state_space());
    }

    Kind kind() const { return static_cast<Kind>(params_.index()); }
    const StateSpace& state_space() const { return space_; }
    const TimeDomain& domain() const { return domain_; }

    template <class T>
    const T& params() const { return std::get<T>(params_); }

    /// The unperturbed family underneath any number of perturbations.
    const FddFamily& root() const {
        if (const auto* p = std::get_if<Perturbed>(&params_)) return p->base->root();
        return *this;
    }

    std::string name() const {
        switch (kind()) {
            case Kind::poisson: return "poisson";
            case Kind::ctmc: return "ctmc";
            case Kind::iid: return "iid";
            case Kind::perturbed: return "perturbed";
        }
        return "unknown";
    }

    /// Law of the state at a single time t (unperturbed kernel route).
    double initial_mass(const DyadicTime& t, State x) const {
        return std::visit(
            [&](const auto& p) -> double {
                using T = std::decay_t<decltype(p)>;
                if constexpr (std::is_same_v<T, Poisson>) {
                    return detail::poisson_pmf(x, p.rate * t.to_double());
                } else if constexpr (std::is_same_v<T, Ctmc>) {
                    return marginal_at(p, t)(static_cast<Eigen::Index>(x));
                } else if constexpr (std::is_same_v<T, Iid>) {
                    return p.marginal[x];
                } else {
                    return p.base->initial_mass(t, x);
                }
            },
            params_);
    }

    /// Conditional mass of moving from x at s to y at r (s < r).
    double step_mass(const DyadicTime& s, const DyadicTime& r, State x, State y) const {
        return std::visit(
            [&](const auto& p) -> double {
                using T = std::decay_t<decltype(p)>;
                if constexpr (std::is_same_v<T, Poisson>) {
                    return y >= x ? detail::poisson_pmf(y - x, p.rate * span_length(s, r)) : 0.0;
                } else if constexpr (std::is_same_v<T, Ctmc>) {
                    return p.cache->get(r - s)(static_cast<Eigen::Index>(x), static_cast<Eigen::Index>(y));
                } else if constexpr (std::is_same_v<T, Iid>) {
                    return p.marginal[y];
                } else {
                    return p.base->step_mass(s, r, x, y);
                }
            },
            params_);
    }

    /// Single-instant law including perturbations.
    double singleton_mass(const DyadicTime& t, State x) const {
        if (const auto* p = std::get_if<Perturbed>(&params_)) {
            double m = p->base->singleton_mass(t, x);
            if (t == p->defect_time) {
                if (x == p->from) m -= p->moved;
                if (x == p->to) m += p->moved;
            }
            return m;
        }
        return initial_mass(t, x);
    }

    void check_query(const TimeGrid& u, std::span<const State> x) const {
        if (x.size() != u.size()) throw std::invalid_argument("state tuple is not aligned with its grid");
        if (!grid_in_domain(domain_, u)) throw std::invalid_argument("grid time outside the family's domain");
        for (State s : x) {
            if (!space_.contains(s)) throw std::invalid_argument("state outside the state space: " + std::to_string(s));
        }
    }

    /// μ_u({x_u}).
    double mass(const TimeGrid& u, std::span<const State> x) const {
        check_query(u, x);
        if (u.size() == 1) return singleton_mass(u[0], x[0]);
        double m = initial_mass(u[0], x[0]);
        for (std::size_t k = 1; k < u.size() && m > 0.0; ++k) m *= step_mass(u[k - 1], u[k], x[k - 1], x[k]);
        return m;
    }

    double mass(const TimeGrid& u, const StateTuple& x) const { return mass(u, std::span<const State>(x)); }

    /// Number of states enumerated per coordinate under a truncation.
    std::size_t enumerated_states(const Truncation& trunc) const {
        return space_.is_finite() ? space_.size() : trunc.max_state + 1;
    }

    /// Largest exit rate of the underlying CTMC generator, if any.
    std::optional<double> max_exit_rate() const {
        if (const auto* c = std::get_if<Ctmc>(&root().params_)) return c->generator.max_exit_rate();
        if (const auto* p = std::get_if<Poisson>(&root().params_)) return p->rate;
        return std::nullopt;
    }

    /// Law of the state at time t for the CTMC kind.
    Eigen::VectorXd ctmc_marginal(const DyadicTime& t) const { return marginal_at(std::get<Ctmc>(params_), t); }

private:
    using Params = std::variant<Poisson, Ctmc, Iid, Perturbed>;

    FddFamily(Params p, StateSpace space)
        : params_(std::move(p)), space_(std::move(space)), domain_(TimeDomain::nonnegative_reals()) {}

    static Eigen::VectorXd marginal_at(const Ctmc& c, const DyadicTime& t) {
        if (t.is_zero()) return c.initial;
        return (c.initial.transpose() * c.cache->get(t)).transpose();
    }

    Params params_;
    StateSpace space_;
    TimeDomain domain_;
};

/**
 * Visits every atom x_u of the truncated box whose mass is positive and above
 * the prune threshold, calling f(x_u, mass). Returns the visited total mass.
 * Partial products are carried down the grid, so pruned subtrees remove at
 * most their prefix mass.
 */
template <class F>
double for_each_atom(const FddFamily& family, const TimeGrid& u, const Truncation& trunc, F&& f) {
    if (!grid_in_domain(family.domain(), u)) throw std::invalid_argument("grid time outside the family's domain");
    const std::size_t n_states = family.enumerated_states(trunc);
    if (n_states == 0) throw std::invalid_argument("empty truncation");
    const std::size_t m = u.size();

    // kernels[k](x, y): step k-1 -> k; kernels[0] is unused
    std::vector<Eigen::MatrixXd> kernels(m);
    const auto ns = static_cast<Eigen::Index>(n_states);
    for (std::size_t k = 1; k < m; ++k) {
        kernels[k].resize(ns, ns);
        for (Eigen::Index x = 0; x < ns; ++x) {
            for (Eigen::Index y = 0; y < ns; ++y) {
                kernels[k](x, y) = family.step_mass(u[k - 1], u[k], static_cast<State>(x), static_cast<State>(y));
            }
        }
    }
    std::vector<double> first(n_states);
    for (std::size_t x = 0; x < n_states; ++x) {
        first[x] = m == 1 ? family.singleton_mass(u[0], x) : family.initial_mass(u[0], x);
    }

    StateTuple tuple(m);
    double total = 0.0;
    std::function<void(std::size_t, double)> descend = [&](std::size_t k, double prefix) {
        if (k == m) {
            total += prefix;
            f(static_cast<const StateTuple&>(tuple), prefix);
            return;
        }
        const auto prev = static_cast<Eigen::Index>(tuple[k - 1]);
        for (std::size_t y = 0; y < n_states; ++y) {
            const double next = prefix * kernels[k](prev, static_cast<Eigen::Index>(y));
            if (next <= trunc.prune_below || next == 0.0) continue;
            tuple[k] = y;
            descend(k + 1, next);
        }
    };
    for (std::size_t x = 0; x < n_states; ++x) {
        const double p = first[x];
        if (p <= trunc.prune_below || p == 0.0) continue;
        tuple[0] = x;
        descend(1, p);
    }
    return total;
}

/// Bracket around μ_u(A) for a decidable A ⊆ X_u given as a predicate on tuples.
template <class Pred>
ProbInterval prob_event(const FddFamily& family, const TimeGrid& u, Pred&& in_event, const Truncation& trunc) {
    double lo = 0.0;
    const double total = for_each_atom(family, u, trunc, [&](const StateTuple& x, double p) {
        if (in_event(std::span<const State>(x))) lo += p;
    });
    const double slack = std::max(0.0, 1.0 - total);
    return {std::min(lo, 1.0), std::min(1.0, lo + slack)};
}

/// μ_(s,r)(X²_≠): probability that the states at s and r differ.
inline double change_prob(const FddFamily& family, const DyadicTime& s, const DyadicTime& r) {
    if (!(s < r)) throw std::invalid_argument("change probability needs s < r");
    if (!family.domain().times().contains(s) || !family.domain().times().contains(r)) {
        throw std::invalid_argument("change probability times outside the domain");
    }
    const auto& root = family.root();
    switch (root.kind()) {
        case FddFamily::Kind::poisson:
            return -std::expm1(-root.params<FddFamily::Poisson>().rate * span_length(s, r));
        case FddFamily::Kind::ctmc: {
            const Eigen::VectorXd pi = root.ctmc_marginal(s);
            double stay = 0.0;
            for (Eigen::Index x = 0; x < pi.size(); ++x) stay += pi(x) * root.step_mass(s, r, static_cast<State>(x), static_cast<State>(x));
            return std::clamp(1.0 - stay, 0.0, 1.0);
        }
        case FddFamily::Kind::iid: {
            double same = 0.0;
            for (double m : root.params<FddFamily::Iid>().marginal) same += m * m;
            return std::clamp(1.0 - same, 0.0, 1.0);
        }
        case FddFamily::Kind::perturbed: break;
    }
    throw std::logic_error("unreachable family kind");
}

inline double change_prob(const FddFamily& family, double s, double r) {
    return change_prob(family, DyadicTime::from_double(s), DyadicTime::from_double(r));
}

}  // namespace cadlag
