#pragma once

#include <algorithm>
#include <optional>
#include <stdexcept>
#include <string>
#include <utility>
#include <vector>

#include "cadlag/dyadic.hpp"
#include "cadlag/grid.hpp"

namespace cadlag {

enum class Verdict { pass, fail, inconclusive };

inline const char* to_string(Verdict v) {
    switch (v) {
        case Verdict::pass: return "pass";
        case Verdict::fail: return "fail";
        case Verdict::inconclusive: return "inconclusive";
    }
    return "unknown";
}

/// A named estimate [lo, hi] with the tolerance it was judged against.
struct Estimate {
    std::string name;
    double lo = 0.0;
    double hi = 0.0;
    double tolerance = 0.0;

    double value() const { return 0.5 * (lo + hi); }
};

/// What triggered (or characterizes) a verdict: grids, instants, tuples.
struct Witness {
    std::string description;
    std::vector<DyadicTime> times;
    std::vector<DyadicTime> other_times;
    StateTuple states;
    double value = 0.0;
};

/// Tabular trace, e.g. a limit schedule; serialized as CSV by the CLI.
struct Trace {
    std::string name;
    std::vector<std::string> columns;
    std::vector<std::vector<double>> rows;
};

/**
 * CheckReport: outcome of a consistency or regularity check.
 * Invariant: a failing report carries at least one witness.
 */
struct CheckReport {
    std::string check;
    Verdict verdict = Verdict::inconclusive;
    /// The condition holds trivially at the probed point (e.g. no right-limit).
    bool vacuous = false;
    std::vector<Estimate> estimates;
    std::vector<Witness> witnesses;
    std::vector<std::pair<std::string, double>> tolerances;
    std::vector<std::string> notes;
    std::vector<Trace> traces;

    bool passed() const { return verdict == Verdict::pass; }
    bool failed() const { return verdict == Verdict::fail; }

    const Estimate* find_estimate(const std::string& name) const {
        const auto it = std::find_if(estimates.begin(), estimates.end(), [&](const Estimate& e) { return e.name == name; });
        return it == estimates.end() ? nullptr : &*it;
    }

    double estimate(const std::string& name) const {
        const auto* e = find_estimate(name);
        if (e == nullptr) throw std::out_of_range("no estimate named " + name);
        return e->value();
    }

    const Trace* find_trace(const std::string& name) const {
        const auto it = std::find_if(traces.begin(), traces.end(), [&](const Trace& t) { return t.name == name; });
        return it == traces.end() ? nullptr : &*it;
    }

    bool has_note_containing(const std::string& needle) const {
        return std::any_of(notes.begin(), notes.end(),
                           [&](const std::string& n) { return n.find(needle) != std::string::npos; });
    }

    void add_estimate(std::string name, double value, double tolerance) {
        estimates.push_back({std::move(name), value, value, tolerance});
    }

    void add_estimate(std::string name, double lo, double hi, double tolerance) {
        estimates.push_back({std::move(name), lo, hi, tolerance});
    }

    /// Sets the verdict, enforcing the witness invariant.
    void conclude(Verdict v) {
        if (v == Verdict::fail && witnesses.empty()) throw std::logic_error(check + ": failing report without witness");
        verdict = v;
    }
};

/// Combines verdicts: any fail fails, else any inconclusive is inconclusive.
inline Verdict combine(Verdict a, Verdict b) {
    if (a == Verdict::fail || b == Verdict::fail) return Verdict::fail;
    if (a == Verdict::inconclusive || b == Verdict::inconclusive) return Verdict::inconclusive;
    return Verdict::pass;
}

}  // namespace cadlag
