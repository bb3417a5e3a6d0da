#pragma once

#include <Eigen/Dense>

#include <cmath>
#include <cstddef>
#include <stdexcept>
#include <string>
#include <vector>

namespace cadlag {

/// Row-sum / sign tolerance for generators and probability vectors.
inline constexpr double kGeneratorTolerance = 1e-12;

/// Problems found when checking a generator; empty means valid.
inline std::vector<std::string> generator_diagnostics(const Eigen::MatrixXd& q, double tol = kGeneratorTolerance) {
    std::vector<std::string> out;
    if (q.rows() == 0 || q.rows() != q.cols()) {
        out.push_back("rate matrix must be square and non-empty");
        return out;
    }
    for (Eigen::Index i = 0; i < q.rows(); ++i) {
        double sum = 0.0;
        for (Eigen::Index j = 0; j < q.cols(); ++j) {
            const double v = q(i, j);
            if (!std::isfinite(v)) {
                out.push_back("rate matrix entry (" + std::to_string(i) + "," + std::to_string(j) + ") is not finite");
            } else if (i != j && v < 0.0) {
                out.push_back("rate matrix row " + std::to_string(i) + " has negative off-diagonal entry at column " +
                              std::to_string(j));
            }
            sum += v;
        }
        if (std::fabs(sum) > tol) {
            out.push_back("rate matrix row " + std::to_string(i) + " sums to " + std::to_string(sum) +
                          ", not zero");
        }
    }
    return out;
}

/// Generator of a finite-state continuous-time Markov chain (units 1/time).
class RateMatrix {
public:
    explicit RateMatrix(Eigen::MatrixXd entries) : q_(std::move(entries)) {
        const auto problems = generator_diagnostics(q_);
        if (!problems.empty()) throw std::invalid_argument(problems.front());
    }

    static RateMatrix from_rows(const std::vector<std::vector<double>>& rows) {
        const auto n = static_cast<Eigen::Index>(rows.size());
        Eigen::MatrixXd q(n, n);
        for (Eigen::Index i = 0; i < n; ++i) {
            if (static_cast<Eigen::Index>(rows[static_cast<std::size_t>(i)].size()) != n) {
                throw std::invalid_argument("rate matrix row " + std::to_string(i) + " has the wrong length");
            }
            for (Eigen::Index j = 0; j < n; ++j) q(i, j) = rows[static_cast<std::size_t>(i)][static_cast<std::size_t>(j)];
        }
        return RateMatrix(std::move(q));
    }

    static RateMatrix zero(std::size_t n) {
        return RateMatrix(Eigen::MatrixXd::Zero(static_cast<Eigen::Index>(n), static_cast<Eigen::Index>(n)));
    }

    std::size_t size() const { return static_cast<std::size_t>(q_.rows()); }
    const Eigen::MatrixXd& entries() const { return q_; }
    double operator()(std::size_t i, std::size_t j) const {
        return q_(static_cast<Eigen::Index>(i), static_cast<Eigen::Index>(j));
    }

    double exit_rate(std::size_t i) const { return -(*this)(i, i); }

    double max_exit_rate() const {
        double q = 0.0;
        for (Eigen::Index i = 0; i < q_.rows(); ++i) q = std::max(q, std::fabs(q_(i, i)));
        return q;
    }

    /// Generator scaled by a non-negative factor.
    RateMatrix scaled(double factor) const {
        if (factor < 0.0) throw std::invalid_argument("negative generator scale");
        return RateMatrix(q_ * factor);
    }

private:
    Eigen::MatrixXd q_;
};

/// Transition probabilities over an elapsed duration.
struct TransitionMatrix {
    Eigen::MatrixXd entries;
    double elapsed = 0.0;
    /// Upper bound on the neglected mass per row.
    double truncation_error = 0.0;
    std::size_t terms = 0;

    double operator()(std::size_t i, std::size_t j) const {
        return entries(static_cast<Eigen::Index>(i), static_cast<Eigen::Index>(j));
    }
};

/**
 * exp(Q dt) by uniformization: with q the largest exit rate and
 * P = I + Q/q, sums the Poisson(q dt) mixture of P^m until the neglected
 * tail is below tol. The tail bound used is
 *   sum_{j>M} w_j <= w_{M+1} / (1 - q dt / (M + 2)),  valid once M + 2 > q dt.
 */
inline TransitionMatrix transition_matrix(const RateMatrix& q, double dt, double tol = 1e-14) {
    if (!(dt >= 0.0) || !std::isfinite(dt)) throw std::invalid_argument("elapsed time must be finite and >= 0");
    if (!(tol > 0.0)) throw std::invalid_argument("uniformization tolerance must be > 0");
    const auto n = static_cast<Eigen::Index>(q.size());
    TransitionMatrix out;
    out.elapsed = dt;
    const double rate = q.max_exit_rate();
    if (rate == 0.0 || dt == 0.0) {
        out.entries = Eigen::MatrixXd::Identity(n, n);
        out.terms = 1;
        return out;
    }
    const Eigen::MatrixXd p = Eigen::MatrixXd::Identity(n, n) + q.entries() / rate;
    const double x = rate * dt;
    const double log_x = std::log(x);

    Eigen::MatrixXd power = Eigen::MatrixXd::Identity(n, n);
    Eigen::MatrixXd sum = Eigen::MatrixXd::Zero(n, n);
    double tail_bound = 1.0;
    std::size_t m = 0;
    for (;; ++m) {
        const double w = std::exp(-x + static_cast<double>(m) * log_x - std::lgamma(static_cast<double>(m) + 1.0));
        sum += w * power;
        const double md = static_cast<double>(m);
        if (md + 2.0 > x) {
            const double next = w * x / (md + 1.0);
            tail_bound = next / (1.0 - x / (md + 2.0));
            if (tail_bound < tol) break;
        }
        if (m > 10'000'000) throw std::runtime_error("uniformization did not converge");
        power = power * p;
    }
    out.entries = std::move(sum);
    out.truncation_error = tail_bound;
    out.terms = m + 1;
    return out;
}

}  // namespace cadlag
