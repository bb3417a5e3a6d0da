#pragma once

// Independent reference computations for the tests. Nothing here calls the
// library's numerical routines: transition matrices come from Eigen's
// matrix exponential, Poisson weights from a plain product loop, and
// event probabilities from exhaustive enumeration.

#include <Eigen/Dense>
#include <unsupported/Eigen/MatrixFunctions>

#include <cmath>
#include <cstdint>
#include <functional>
#include <random>
#include <set>
#include <vector>

#include "cadlag/cadlag.hpp"

namespace oracle {

inline Eigen::MatrixXd expm(const Eigen::MatrixXd& q, double t) { return (q * t).exp(); }

inline double poisson_pmf(std::size_t k, double mean) {
    double p = std::exp(-mean);
    for (std::size_t j = 1; j <= k; ++j) p *= mean / static_cast<double>(j);
    return p;
}

inline double poisson_tail(std::size_t k, double mean) {
    double below = 0.0;
    for (std::size_t j = 0; j < k; ++j) below += poisson_pmf(j, mean);
    return 1.0 - below;
}

/// μ_u(x) for an unperturbed family, recomputed from first principles.
inline double mass(const cadlag::FddFamily& f, const cadlag::TimeGrid& u, const cadlag::StateTuple& x) {
    using K = cadlag::FddFamily::Kind;
    switch (f.kind()) {
        case K::poisson: {
            const double rate = f.params<cadlag::FddFamily::Poisson>().rate;
            double m = poisson_pmf(x[0], rate * u[0].to_double());
            for (std::size_t k = 1; k < u.size(); ++k) {
                if (x[k] < x[k - 1]) return 0.0;
                m *= poisson_pmf(x[k] - x[k - 1], rate * (u[k].to_double() - u[k - 1].to_double()));
            }
            return m;
        }
        case K::ctmc: {
            const auto& c = f.params<cadlag::FddFamily::Ctmc>();
            const Eigen::VectorXd pi = (c.initial.transpose() * expm(c.generator.entries(), u[0].to_double())).transpose();
            double m = pi(static_cast<Eigen::Index>(x[0]));
            for (std::size_t k = 1; k < u.size(); ++k) {
                const Eigen::MatrixXd p = expm(c.generator.entries(), u[k].to_double() - u[k - 1].to_double());
                m *= p(static_cast<Eigen::Index>(x[k - 1]), static_cast<Eigen::Index>(x[k]));
            }
            return m;
        }
        case K::iid: {
            const auto& marg = f.params<cadlag::FddFamily::Iid>().marginal;
            double m = 1.0;
            for (auto s : x) m *= marg[s];
            return m;
        }
        default: break;
    }
    throw std::logic_error("oracle::mass: unsupported family");
}

/// Calls f on every tuple in {0..n-1}^m.
inline void for_each_tuple(std::size_t n, std::size_t m, const std::function<void(const cadlag::StateTuple&)>& f) {
    cadlag::StateTuple x(m, 0);
    for (;;) {
        f(x);
        std::size_t i = m;
        while (i > 0) {
            --i;
            if (++x[i] < n) break;
            x[i] = 0;
            if (i == 0) return;
        }
        if (m == 0) return;
    }
}

/// μ_u(A) by exhaustive enumeration over a finite box {0..n-1}^|u|.
inline double brute_prob(const cadlag::FddFamily& f, const cadlag::TimeGrid& u, std::size_t n,
                         const std::function<bool(const cadlag::StateTuple&)>& pred) {
    double s = 0.0;
    for_each_tuple(n, u.size(), [&](const cadlag::StateTuple& x) {
        if (pred(x)) s += mass(f, u, x);
    });
    return s;
}

inline std::size_t jumps_of(const cadlag::StateTuple& x) {
    std::size_t n = 0;
    for (std::size_t i = 1; i < x.size(); ++i) n += x[i] != x[i - 1];
    return n;
}

/// E(η̂_u) for a Poisson family as the expectation sum over pairs of
/// states, truncated to the first `states` states.
inline double poisson_expected_jumps_pairsum(double rate, const cadlag::TimeGrid& u, std::size_t states = 60) {
    double e = 0.0;
    for (std::size_t k = 1; k < u.size(); ++k) {
        const double a = u[k - 1].to_double();
        const double d = u[k].to_double() - a;
        for (std::size_t x = 0; x < states; ++x) {
            const double px = poisson_pmf(x, rate * a);
            for (std::size_t y = x + 1; y < states; ++y) e += px * poisson_pmf(y - x, rate * d);
        }
    }
    return e;
}

// ---- random generators for property tests

using Rng = std::mt19937_64;

inline double uniform(Rng& rng, double lo, double hi) { return std::uniform_real_distribution<double>(lo, hi)(rng); }

inline std::size_t uniform_int(Rng& rng, std::size_t lo, std::size_t hi) {
    return std::uniform_int_distribution<std::size_t>(lo, hi)(rng);
}

/// Strictly increasing grid of `n` dyadic times (precision 2^-bits) in [lo, hi].
inline cadlag::TimeGrid random_grid(Rng& rng, std::size_t n, double lo, double hi, int bits = 20) {
    std::set<cadlag::DyadicTime> ts;
    while (ts.size() < n) ts.insert(cadlag::DyadicTime::from_double(uniform(rng, lo, hi), bits));
    return cadlag::TimeGrid(std::vector<cadlag::DyadicTime>(ts.begin(), ts.end()));
}

/// u ⊑ v: v is random, u keeps a random non-empty subset of v.
inline std::pair<cadlag::TimeGrid, cadlag::TimeGrid> random_nested_pair(Rng& rng, std::size_t n, double lo, double hi) {
    const auto v = random_grid(rng, n, lo, hi);
    std::vector<cadlag::DyadicTime> keep;
    for (const auto& t : v) {
        if (rng() % 2 == 0) keep.push_back(t);
    }
    if (keep.empty()) keep.push_back(v[uniform_int(rng, 0, v.size() - 1)]);
    return {cadlag::TimeGrid(keep), v};
}

/// A random finite-state path on [0, horizon] with jumps on a 2^-bits lattice.
inline cadlag::CadlagPath random_path(Rng& rng, std::size_t states, std::size_t max_jumps, double horizon, int bits = 12) {
    const std::size_t n = uniform_int(rng, 0, max_jumps);
    std::set<cadlag::DyadicTime> ts;
    for (std::size_t i = 0; i < n; ++i) {
        const auto t = cadlag::DyadicTime::from_double(uniform(rng, 0.0, horizon), bits);
        if (cadlag::DyadicTime::integer(0) < t) ts.insert(t);
    }
    cadlag::State cur = uniform_int(rng, 0, states - 1);
    const cadlag::State anchor = cur;
    std::vector<cadlag::JumpRecord> jumps;
    for (const auto& t : ts) {
        cadlag::State next = uniform_int(rng, 0, states - 2);
        if (next >= cur) ++next;
        jumps.push_back({t, next});
        cur = next;
    }
    return cadlag::CadlagPath(cadlag::IntervalSet::closed(cadlag::DyadicTime::integer(0),
                                                          cadlag::DyadicTime::from_double(horizon)),
                              anchor, std::move(jumps));
}

inline cadlag::RateMatrix symmetric_two_state() { return cadlag::RateMatrix::from_rows({{-1.0, 1.0}, {1.0, -1.0}}); }

inline cadlag::RateMatrix three_state() {
    return cadlag::RateMatrix::from_rows({{-1.5, 1.0, 0.5}, {0.3, -0.8, 0.5}, {0.6, 1.4, -2.0}});
}

}  // namespace oracle
