#pragma once

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <functional>
#include <span>
#include <stdexcept>
#include <vector>

#include "cadlag/fdd.hpp"
#include "cadlag/grid.hpp"

namespace cadlag {

/// η̂: number of adjacent unequal pairs in a state tuple.
inline std::size_t count_jumps_tuple(std::span<const State> x) {
    std::size_t n = 0;
    for (std::size_t k = 1; k < x.size(); ++k) n += x[k - 1] != x[k] ? 1 : 0;
    return n;
}

inline std::size_t count_jumps_tuple(const StateTuple& x) { return count_jumps_tuple(std::span<const State>(x)); }

/// E_{μ_u}(η̂_u) as the sum of two-point change probabilities along u.
inline double expected_jumps(const FddFamily& family, const TimeGrid& u) {
    double e = 0.0;
    for (std::size_t k = 1; k < u.size(); ++k) e += change_prob(family, u[k - 1], u[k]);
    return e;
}

enum class TailMethod {
    automatic,   // closed-form dynamic programs for the built-in kinds
    enumerate,   // truncated enumeration of X_u
};

namespace detail {

/// P(sum of independent Bernoulli(p_j) >= k)
inline double poisson_binomial_tail(std::span<const double> p, std::size_t k) {
    // dist[j] = P(count == j) for j < k; the absorbing cell k collects >= k
    std::vector<double> dist(k + 1, 0.0);
    dist[0] = 1.0;
    for (double pj : p) {
        for (std::size_t j = k + 1; j-- > 0;) {
            const double stay = (j == k) ? dist[j] : dist[j] * (1.0 - pj);
            const double from_below = j > 0 ? dist[j - 1] * pj : 0.0;
            dist[j] = stay + from_below;
        }
    }
    return dist[k];
}

/// Forward pass over (current state, jumps capped at k) for a family whose
/// multi-instant laws factor through initial_mass/step_mass on a finite space.
inline double markov_jump_tail(const FddFamily& family, const TimeGrid& u, std::size_t k) {
    const std::size_t n = family.state_space().size();
    std::vector<double> cur(n * (k + 1), 0.0);
    std::vector<double> next(cur.size());
    auto at = [k](std::size_t x, std::size_t j) { return x * (k + 1) + j; };
    for (std::size_t x = 0; x < n; ++x) cur[at(x, 0)] = family.initial_mass(u[0], x);
    for (std::size_t step = 1; step < u.size(); ++step) {
        std::fill(next.begin(), next.end(), 0.0);
        for (std::size_t x = 0; x < n; ++x) {
            for (std::size_t y = 0; y < n; ++y) {
                const double p = family.step_mass(u[step - 1], u[step], x, y);
                if (p == 0.0) continue;
                const std::size_t bump = x != y ? 1 : 0;
                for (std::size_t j = 0; j <= k; ++j) {
                    const double w = cur[at(x, j)];
                    if (w == 0.0) continue;
                    next[at(y, std::min(j + bump, k))] += w * p;
                }
            }
        }
        cur.swap(next);
    }
    double tail = 0.0;
    for (std::size_t x = 0; x < n; ++x) tail += cur[at(x, k)];
    return tail;
}

}  // namespace detail

/// Bracket around μ_u({x_u : η̂_u(x_u) >= k}).
inline ProbInterval jump_tail_prob(const FddFamily& family, const TimeGrid& u, std::size_t k,
                                   const Truncation& trunc = {}, TailMethod method = TailMethod::automatic) {
    if (!grid_in_domain(family.domain(), u)) throw std::invalid_argument("grid time outside the family's domain");
    if (k == 0) return ProbInterval::exact(1.0);
    if (k >= u.size()) return ProbInterval::exact(0.0);
    if (method == TailMethod::enumerate) {
        return prob_event(
            family, u, [k](std::span<const State> x) { return count_jumps_tuple(x) >= k; }, trunc);
    }
    // |u| >= 2 here, so perturbations (singleton-only) do not matter
    const FddFamily& root = family.root();
    if (root.kind() == FddFamily::Kind::poisson) {
        const double rate = root.params<FddFamily::Poisson>().rate;
        std::vector<double> p;
        p.reserve(u.size() - 1);
        for (std::size_t j = 1; j < u.size(); ++j) p.push_back(-std::expm1(-rate * span_length(u[j - 1], u[j])));
        return ProbInterval::exact(detail::poisson_binomial_tail(p, k));
    }
    return ProbInterval::exact(std::clamp(detail::markov_jump_tail(root, u, k), 0.0, 1.0));
}

/// Lower estimate of the number of jumps of a path over a window, with a
/// stability flag.
struct JumpCount {
    std::size_t value = 0;
    /// The last three refinement levels agree.
    bool converged = false;
    /// η̂ on G_0, ..., G_max_depth (non-decreasing).
    std::vector<std::size_t> trace;
};

using PathOracle = std::function<StateTuple(const TimeGrid&)>;

/// Evaluates η̂ along the nested dyadic grids of the window; the trace is
/// non-decreasing because refining a grid cannot remove a detected change.
inline JumpCount path_jump_count_estimate(const PathOracle& values, const DyadicTime& s, const DyadicTime& r,
                                          const TimeDomain& domain, int max_depth) {
    const auto grids = dyadic_refinement(domain, s, r, max_depth);
    JumpCount out;
    out.trace.reserve(grids.size());
    for (const auto& g : grids) {
        const StateTuple x = values(g);
        if (x.size() != g.size()) throw std::invalid_argument("path oracle returned a misaligned tuple");
        out.trace.push_back(count_jumps_tuple(x));
    }
    out.value = out.trace.back();
    const std::size_t n = out.trace.size();
    out.converged = n >= 3 && out.trace[n - 1] == out.trace[n - 2] && out.trace[n - 2] == out.trace[n - 3];
    return out;
}

}  // namespace cadlag
