#pragma once

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <cstdint>
#include <map>
#include <optional>
#include <random>
#include <stdexcept>
#include <vector>

#include <Eigen/Dense>

#include "cadlag/detail/parallel.hpp"
#include "cadlag/dyadic.hpp"
#include "cadlag/fdd.hpp"
#include "cadlag/grid.hpp"
#include "cadlag/path.hpp"
#include "cadlag/rate_matrix.hpp"

namespace cadlag {

/// Reproducible random stream keyed by (seed, index).
class RngStream {
public:
    RngStream(std::uint64_t seed, std::uint64_t index) : seed_(seed), index_(index) {
        std::seed_seq seq{static_cast<std::uint32_t>(seed), static_cast<std::uint32_t>(seed >> 32),
                          static_cast<std::uint32_t>(index), static_cast<std::uint32_t>(index >> 32)};
        engine_.seed(seq);
    }

    std::uint64_t seed() const { return seed_; }
    std::uint64_t index() const { return index_; }

    /// Uniform on [0, 1) with 53 random bits.
    double uniform() { return std::ldexp(static_cast<double>(engine_() >> 11), -53); }

    /// Exponential with the given rate, by inversion; infinite for rate 0.
    double exponential(double rate) {
        if (rate == 0.0) return std::numeric_limits<double>::infinity();
        return -std::log1p(-uniform()) / rate;
    }

    /// Index drawn proportionally to non-negative weights.
    std::size_t discrete(const std::vector<double>& weights) {
        double total = 0.0;
        for (double w : weights) total += w;
        if (!(total > 0.0)) throw std::invalid_argument("discrete draw needs positive total weight");
        const double target = uniform() * total;
        double acc = 0.0;
        std::size_t last = 0;
        for (std::size_t i = 0; i < weights.size(); ++i) {
            if (weights[i] <= 0.0) continue;
            acc += weights[i];
            last = i;
            if (target < acc) return i;
        }
        return last;
    }

private:
    std::uint64_t seed_;
    std::uint64_t index_;
    std::mt19937_64 engine_;
};

inline constexpr int kSampleTimePrecision = 40;

namespace detail {

/// Next jump time: a real-valued holding time added to `clock`, snapped to
/// the dyadic lattice; a draw that collides with the previous record is
/// discarded and redrawn.
inline std::optional<DyadicTime> next_jump_time(RngStream& rng, double rate, double& clock, const DyadicTime& previous,
                                                const DyadicTime& horizon) {
    for (;;) {
        const double t = clock + rng.exponential(rate);
        if (!(t <= horizon.to_double())) return std::nullopt;
        const DyadicTime snapped = DyadicTime::from_double(t, kSampleTimePrecision);
        if (horizon < snapped) return std::nullopt;
        if (previous < snapped) {
            clock = t;
            return snapped;
        }
    }
}

inline void check_horizon(const DyadicTime& horizon) {
    if (!(DyadicTime::integer(0) < horizon)) throw std::invalid_argument("horizon must be > 0");
}

}  // namespace detail

/// Poisson counting path on [0, horizon]: state 0 at time 0, +1 at each
/// arrival of exponential(rate) interarrivals.
inline CadlagPath sample_poisson_path(double rate, const DyadicTime& horizon, RngStream& rng) {
    if (!(rate >= 0.0) || !std::isfinite(rate)) throw std::invalid_argument("rate must be finite and >= 0");
    detail::check_horizon(horizon);
    std::vector<JumpRecord> jumps;
    double clock = 0.0;
    DyadicTime last = DyadicTime::integer(0);
    State state = 0;
    if (rate > 0.0) {
        while (const auto t = detail::next_jump_time(rng, rate, clock, last, horizon)) {
            jumps.push_back({*t, ++state});
            last = *t;
        }
    }
    return CadlagPath(IntervalSet::half_line(DyadicTime::integer(0)), 0, std::move(jumps), horizon);
}

/// Gillespie realization of a CTMC on [0, horizon].
inline CadlagPath sample_ctmc_path(const std::vector<double>& initial, const RateMatrix& q, const DyadicTime& horizon,
                                   RngStream& rng) {
    if (initial.size() != q.size()) throw std::invalid_argument("initial distribution and rate matrix sizes differ");
    detail::check_horizon(horizon);
    State state = rng.discrete(initial);
    const State anchor = state;
    std::vector<JumpRecord> jumps;
    std::vector<double> row(q.size());
    double clock = 0.0;
    DyadicTime last = DyadicTime::integer(0);
    for (;;) {
        const double rate = q.exit_rate(state);
        if (rate <= 0.0) break;
        const auto t = detail::next_jump_time(rng, rate, clock, last, horizon);
        if (!t) break;
        for (std::size_t y = 0; y < row.size(); ++y) row[y] = y == state ? 0.0 : q(state, y);
        state = rng.discrete(row);
        jumps.push_back({*t, state});
        last = *t;
    }
    return CadlagPath(IntervalSet::half_line(DyadicTime::integer(0)), anchor, std::move(jumps), horizon);
}

/// One path of a Poisson or CTMC family; other kinds have no path sampler.
inline CadlagPath sample_path(const FddFamily& family, const DyadicTime& horizon, RngStream& rng) {
    switch (family.kind()) {
        case FddFamily::Kind::poisson: return sample_poisson_path(family.params<FddFamily::Poisson>().rate, horizon, rng);
        case FddFamily::Kind::ctmc: {
            const auto& c = family.params<FddFamily::Ctmc>();
            const std::vector<double> pi(c.initial.data(), c.initial.data() + c.initial.size());
            return sample_ctmc_path(pi, c.generator, horizon, rng);
        }
        default: throw std::invalid_argument("no path sampler for the " + family.name() + " family");
    }
}

/// Paths for stream indices 0..n-1; the result does not depend on `threads`.
inline std::vector<CadlagPath> sample_paths(const FddFamily& family, std::size_t n, const DyadicTime& horizon,
                                            std::uint64_t seed, unsigned threads = 1) {
    return detail::parallel_map(n, threads, [&](std::size_t i) {
        RngStream rng(seed, i);
        return sample_path(family, horizon, rng);
    });
}

/// Atom counts of X_u over a sample.
struct EmpiricalDistribution {
    TimeGrid grid;
    std::map<StateTuple, std::size_t> counts;
    std::size_t n = 0;

    double frequency(const StateTuple& x) const {
        const auto it = counts.find(x);
        return it == counts.end() || n == 0 ? 0.0 : static_cast<double>(it->second) / static_cast<double>(n);
    }
};

inline EmpiricalDistribution empirical_fdd(const std::vector<CadlagPath>& paths, const TimeGrid& u) {
    EmpiricalDistribution e{u, {}, paths.size()};
    for (const auto& p : paths) ++e.counts[p.restrict(u)];
    return e;
}

/// Total variation between an empirical law and μ_u, charging the
/// truncation tail and empirical mass outside the truncation as disagreement.
inline double tv_distance(const EmpiricalDistribution& emp, const FddFamily& family, const Truncation& trunc = {}) {
    if (emp.n == 0) throw std::invalid_argument("empirical distribution is empty");
    double sum = 0.0;
    double matched = 0.0;
    const double total = for_each_atom(family, emp.grid, trunc, [&](const StateTuple& x, double m) {
        const double f = emp.frequency(x);
        matched += f;
        sum += std::fabs(f - m);
    });
    const double outside = std::max(0.0, 1.0 - matched);
    const double tail = std::max(0.0, 1.0 - total);
    return std::clamp(0.5 * (sum + outside + tail), 0.0, 1.0);
}

struct HittingEstimate {
    double estimate = 0.0;
    std::size_t hits = 0;
    std::size_t n = 0;
    double standard_error = 0.0;
    std::optional<double> exact;
};

/// Fraction of paths that are in state x at some time in [0, T]; decided
/// exactly from the anchor and the jump records.
inline HittingEstimate hitting_probability(const std::vector<CadlagPath>& paths, State x, const DyadicTime& horizon) {
    detail::check_horizon(horizon);
    HittingEstimate h;
    h.n = paths.size();
    for (const auto& p : paths) {
        if (p.right_edge() < horizon) throw std::invalid_argument("path horizon ends before the hitting horizon");
        bool hit = p.anchor() == x;
        for (const auto& j : p.jumps()) {
            if (hit || horizon < j.time) break;
            hit = j.state == x;
        }
        h.hits += hit ? 1 : 0;
    }
    if (h.n > 0) {
        h.estimate = static_cast<double>(h.hits) / static_cast<double>(h.n);
        h.standard_error = std::sqrt(h.estimate * (1.0 - h.estimate) / static_cast<double>(h.n));
    }
    return h;
}

/// Exact P(the path visits x by time T): P(N(T) >= x) for Poisson; for a
/// CTMC, mass absorbed by time T once x is made absorbing.
inline std::optional<double> hitting_probability_exact(const FddFamily& family, State x, const DyadicTime& horizon) {
    detail::check_horizon(horizon);
    if (family.kind() == FddFamily::Kind::poisson) {
        const double mean = family.params<FddFamily::Poisson>().rate * horizon.to_double();
        double below = 0.0;
        for (State k = 0; k < x; ++k) below += detail::poisson_pmf(k, mean);
        return std::clamp(1.0 - below, 0.0, 1.0);
    }
    if (family.kind() == FddFamily::Kind::ctmc) {
        const auto& c = family.params<FddFamily::Ctmc>();
        if (x >= c.generator.size()) return 0.0;
        Eigen::MatrixXd q = c.generator.entries();
        q.row(static_cast<Eigen::Index>(x)).setZero();
        const auto p = transition_matrix(RateMatrix(std::move(q)), horizon.to_double());
        const double v = c.initial.dot(p.entries.col(static_cast<Eigen::Index>(x)));
        return std::clamp(v, 0.0, 1.0);
    }
    return std::nullopt;
}

/// Monte Carlo estimate with the exact value attached where available.
inline HittingEstimate hitting_probability(const FddFamily& family, const std::vector<CadlagPath>& paths, State x,
                                           const DyadicTime& horizon) {
    auto h = hitting_probability(paths, x, horizon);
    h.exact = hitting_probability_exact(family, x, horizon);
    return h;
}

}  // namespace cadlag
