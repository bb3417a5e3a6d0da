#pragma once

#include <cmath>
#include <cstdint>
#include <filesystem>
#include <optional>
#include <string>
#include <vector>

#include "kit/serialize.hpp"

namespace kit {

struct SimulateSpec {
    std::size_t paths = 100;
    cadlag::DyadicTime horizon = cadlag::DyadicTime::integer(1);
};

struct VerifySpec {
    cadlag::TimeGrid grid{0.0, 0.5, 1.0};
    std::size_t paths = 200000;
    double tv_tolerance = 0.01;
};

struct ReconstructSpec {
    /// JSONL path file; empty means "sample with the simulate settings".
    std::string input;
    int depth = 8;
    int resolve_depth = cadlag::kDefaultTimePrecision;
    std::optional<std::size_t> max_window_jumps;
    double window_length = 1.0;
    /// Deepen per path until the mesh separates its jumps (capped at max_depth).
    bool separate_jumps = true;
    int max_depth = 20;
};

struct HittingSpec {
    cadlag::State state = 1;
    cadlag::DyadicTime time = cadlag::DyadicTime::integer(1);
    std::size_t paths = 100000;
    double tolerance = 0.005;
};

struct RunConfig {
    std::optional<cadlag::FddFamily> family;
    cadlag::RegularityParams regularity;
    std::vector<cadlag::DyadicTime> r1_times;
    std::vector<cadlag::DyadicTime> limsup_times;
    std::vector<cadlag::TimeGrid> corpus;
    cadlag::Truncation truncation;
    SimulateSpec simulate;
    VerifySpec verify;
    ReconstructSpec reconstruct;
    HittingSpec hitting;
    std::uint64_t seed = 0;
    std::string out_dir = ".";
    std::string base_dir = ".";
};

/// Collects every problem found while reading a config.
struct Diagnostics {
    std::vector<std::string> items;

    void add(const std::string& field, const std::string& message) { items.push_back(field + ": " + message); }
    bool empty() const { return items.empty(); }
};

namespace detail {

/// Runs `f`, recording a failure against `field` instead of propagating it.
template <class F>
auto guarded(Diagnostics& d, const std::string& field, F&& f) -> std::optional<decltype(f())> {
    try {
        return f();
    } catch (const InputError& e) {
        d.items.push_back(e.what());
    } catch (const std::exception& e) {
        d.add(field, e.what());
    }
    return std::nullopt;
}

inline std::vector<double> number_array(const json& j, const std::string& field) {
    if (!j.is_array()) throw InputError(field, "expected an array of numbers");
    std::vector<double> out;
    for (const auto& v : j) {
        if (!v.is_number()) throw InputError(field, "expected an array of numbers");
        out.push_back(v.get<double>());
    }
    return out;
}

inline double number(const json& j, const std::string& field) {
    if (!j.is_number()) throw InputError(field, "expected a number");
    return j.get<double>();
}

inline std::size_t count(const json& j, const std::string& field) {
    if (!j.is_number_integer() || j.get<std::int64_t>() < 0) throw InputError(field, "expected a non-negative integer");
    return j.get<std::size_t>();
}

inline std::vector<double> probability_vector(const json& j, const std::string& field, Diagnostics& d) {
    std::vector<double> p;
    try {
        p = number_array(j, field);
    } catch (const InputError& e) {
        d.items.push_back(e.what());
        return {};
    }
    if (p.empty()) d.add(field, "must be non-empty");
    double sum = 0.0;
    for (std::size_t i = 0; i < p.size(); ++i) {
        if (!(p[i] >= 0.0) || !std::isfinite(p[i])) d.add(field, "entry " + std::to_string(i) + " is negative or not finite");
        sum += p[i];
    }
    if (!p.empty() && std::fabs(sum - 1.0) > cadlag::kGeneratorTolerance) {
        d.add(field, "entries sum to " + json(sum).dump() + ", not 1");
    }
    return p;
}

}  // namespace detail

inline std::optional<cadlag::FddFamily> parse_family(const json& j, const std::string& field, Diagnostics& d) {
    if (!j.is_object()) {
        d.add(field, "expected an object");
        return std::nullopt;
    }
    if (!j.contains("kind") || !j.at("kind").is_string()) {
        d.add(field + ".kind", "expected one of poisson, ctmc, iid, perturbed");
        return std::nullopt;
    }
    const std::string kind = j.at("kind").get<std::string>();
    const std::size_t before = d.items.size();
    if (kind == "poisson") {
        if (!j.contains("rate")) {
            d.add(field + ".rate", "missing");
            return std::nullopt;
        }
        const auto rate = detail::guarded(d, field + ".rate", [&] { return detail::number(j.at("rate"), field + ".rate"); });
        if (!rate) return std::nullopt;
        if (!(*rate >= 0.0) || !std::isfinite(*rate)) {
            d.add(field + ".rate", "must be finite and >= 0");
            return std::nullopt;
        }
        return cadlag::FddFamily::poisson(*rate);
    }
    if (kind == "ctmc") {
        std::vector<double> initial;
        if (j.contains("initial")) {
            initial = detail::probability_vector(j.at("initial"), field + ".initial", d);
        } else {
            d.add(field + ".initial", "missing");
        }
        std::optional<Eigen::MatrixXd> q;
        if (!j.contains("rate_matrix") || !j.at("rate_matrix").is_array()) {
            d.add(field + ".rate_matrix", "expected an array of rows");
        } else {
            const auto& rows = j.at("rate_matrix");
            const auto n = static_cast<Eigen::Index>(rows.size());
            Eigen::MatrixXd m(n, n);
            bool shaped = n > 0;
            for (Eigen::Index i = 0; i < n && shaped; ++i) {
                const std::string rf = field + ".rate_matrix[" + std::to_string(i) + "]";
                const auto row = detail::guarded(d, rf, [&] { return detail::number_array(rows[static_cast<std::size_t>(i)], rf); });
                if (!row || static_cast<Eigen::Index>(row->size()) != n) {
                    if (row) d.add(rf, "row has " + std::to_string(row->size()) + " entries, expected " + std::to_string(n));
                    shaped = false;
                    break;
                }
                for (Eigen::Index k = 0; k < n; ++k) m(i, k) = (*row)[static_cast<std::size_t>(k)];
            }
            if (n == 0) d.add(field + ".rate_matrix", "must be non-empty");
            if (shaped) {
                for (const auto& msg : cadlag::generator_diagnostics(m)) d.add(field + ".rate_matrix", msg);
                q = m;
            }
        }
        std::optional<std::vector<std::string>> labels;
        if (j.contains("states")) {
            labels = detail::guarded(d, field + ".states", [&] { return j.at("states").get<std::vector<std::string>>(); });
        }
        if (q && !initial.empty() && static_cast<Eigen::Index>(initial.size()) != q->rows()) {
            d.add(field + ".initial", "has " + std::to_string(initial.size()) + " entries but rate_matrix has " +
                                          std::to_string(q->rows()) + " rows");
        }
        if (labels && q && static_cast<Eigen::Index>(labels->size()) != q->rows()) {
            d.add(field + ".states", "label count differs from the rate matrix size");
        }
        if (d.items.size() != before || !q) return std::nullopt;
        return detail::guarded(d, field, [&] {
            return cadlag::FddFamily::ctmc(initial, cadlag::RateMatrix(*q), labels);
        });
    }
    if (kind == "iid") {
        if (!j.contains("marginal")) {
            d.add(field + ".marginal", "missing");
            return std::nullopt;
        }
        auto m = detail::probability_vector(j.at("marginal"), field + ".marginal", d);
        if (d.items.size() != before) return std::nullopt;
        return cadlag::FddFamily::iid(std::move(m));
    }
    if (kind == "perturbed") {
        std::optional<cadlag::FddFamily> base;
        if (j.contains("base")) {
            base = parse_family(j.at("base"), field + ".base", d);
        } else {
            d.add(field + ".base", "missing");
        }
        std::optional<double> defect;
        if (j.contains("defect")) {
            defect = detail::guarded(d, field + ".defect", [&] { return detail::number(j.at("defect"), field + ".defect"); });
            if (defect && !(*defect > 0.0 && *defect <= 1.0)) d.add(field + ".defect", "must lie in (0, 1]");
        } else {
            d.add(field + ".defect", "missing");
        }
        std::optional<cadlag::DyadicTime> at;
        if (j.contains("defect_time")) {
            at = detail::guarded(d, field + ".defect_time",
                                 [&] { return time_from_json(j.at("defect_time"), field + ".defect_time"); });
            if (at && *at < cadlag::DyadicTime::integer(0)) d.add(field + ".defect_time", "must be >= 0");
        } else {
            d.add(field + ".defect_time", "missing");
        }
        if (d.items.size() != before || !base || !defect || !at) return std::nullopt;
        return detail::guarded(d, field, [&] { return cadlag::FddFamily::perturbed(*base, *defect, *at); });
    }
    d.add(field + ".kind", "unknown family kind '" + kind + "'");
    return std::nullopt;
}

inline void parse_regularity(const json& j, RunConfig& c, Diagnostics& d) {
    if (!j.is_object()) {
        d.add("regularity", "expected an object");
        return;
    }
    auto& p = c.regularity;
    auto num = [&](const char* key, auto& target) {
        if (!j.contains(key)) return;
        const std::string f = std::string("regularity.") + key;
        using T = std::decay_t<decltype(target)>;
        if constexpr (std::is_floating_point_v<T>) {
            if (auto v = detail::guarded(d, f, [&] { return detail::number(j.at(key), f); })) target = *v;
        } else {
            if (auto v = detail::guarded(d, f, [&] { return detail::count(j.at(key), f); })) target = static_cast<T>(*v);
        }
    };
    num("window", p.window);
    num("k_max", p.k_max);
    num("depth", p.depth);
    num("ratio", p.ratio);
    num("steps", p.steps);
    num("initial_step", p.initial_step);
    num("eps_limit", p.eps_limit);
    num("eps_consistency", p.eps_consistency);
    if (j.contains("rate_bound") && !j.at("rate_bound").is_null()) {
        if (auto v = detail::guarded(d, "regularity.rate_bound",
                                     [&] { return detail::number(j.at("rate_bound"), "regularity.rate_bound"); })) {
            p.rate_bound = *v;
        }
    }
    auto times = [&](const char* key, std::vector<cadlag::DyadicTime>& target) {
        if (!j.contains(key)) return;
        const std::string f = std::string("regularity.") + key;
        if (!j.at(key).is_array()) {
            d.add(f, "expected an array of times");
            return;
        }
        target.clear();
        for (std::size_t i = 0; i < j.at(key).size(); ++i) {
            const std::string fi = f + "[" + std::to_string(i) + "]";
            if (auto t = detail::guarded(d, fi, [&] { return time_from_json(j.at(key)[i], fi); })) target.push_back(*t);
        }
    };
    times("r1_times", c.r1_times);
    times("limsup_times", c.limsup_times);
    // report each violated knob separately
    cadlag::RegularityParams probe;
    auto check = [&](const char* key, auto&& mutate) {
        probe = cadlag::RegularityParams{};
        mutate(probe);
        try {
            probe.validate();
        } catch (const std::exception& e) {
            d.add(std::string("regularity.") + key, e.what());
        }
    };
    check("window", [&](auto& q) { q.window = p.window; });
    check("k_max", [&](auto& q) { q.k_max = p.k_max; });
    check("depth", [&](auto& q) { q.depth = p.depth; });
    check("ratio", [&](auto& q) { q.ratio = p.ratio; });
    check("steps", [&](auto& q) { q.steps = p.steps; });
    check("initial_step", [&](auto& q) { q.initial_step = p.initial_step; });
    check("eps_limit", [&](auto& q) { q.eps_limit = p.eps_limit; });
    check("eps_consistency", [&](auto& q) { q.eps_consistency = p.eps_consistency; });
    check("rate_bound", [&](auto& q) { q.rate_bound = p.rate_bound; });
}

inline void parse_corpus(const json& j, RunConfig& c, Diagnostics& d) {
    if (!j.is_object()) {
        d.add("corpus", "expected an object");
        return;
    }
    c.corpus.clear();
    if (j.contains("grids")) {
        if (!j.at("grids").is_array()) {
            d.add("corpus.grids", "expected an array of grids");
            return;
        }
        for (std::size_t i = 0; i < j.at("grids").size(); ++i) {
            const std::string f = "corpus.grids[" + std::to_string(i) + "]";
            auto g = detail::guarded(d, f, [&] {
                std::vector<cadlag::DyadicTime> ts;
                const auto& arr = j.at("grids")[i];
                if (!arr.is_array()) throw InputError(f, "expected an array of times");
                for (std::size_t k = 0; k < arr.size(); ++k) ts.push_back(time_from_json(arr[k], f));
                return cadlag::TimeGrid(std::move(ts));
            });
            if (g) c.corpus.push_back(std::move(*g));
        }
    }
    if (j.contains("windows")) {
        std::vector<int> depths{0, 1, 2, 3};
        if (j.contains("depths")) {
            auto ds = detail::guarded(d, "corpus.depths", [&] { return j.at("depths").get<std::vector<int>>(); });
            if (ds) depths = *ds;
            for (int dd : depths) {
                if (dd < 0 || dd > 12) d.add("corpus.depths", "depth " + std::to_string(dd) + " outside [0, 12]");
            }
        }
        if (!j.at("windows").is_array()) {
            d.add("corpus.windows", "expected an array of [start, end] pairs");
            return;
        }
        const auto domain = cadlag::TimeDomain::nonnegative_reals();
        for (std::size_t i = 0; i < j.at("windows").size(); ++i) {
            const std::string f = "corpus.windows[" + std::to_string(i) + "]";
            auto grids = detail::guarded(d, f, [&] {
                const auto& w = j.at("windows")[i];
                if (!w.is_array() || w.size() != 2) throw InputError(f, "expected [start, end]");
                const auto s = time_from_json(w[0], f);
                const auto r = time_from_json(w[1], f);
                int deepest = 0;
                for (int dd : depths) deepest = std::max(deepest, dd);
                const auto all = cadlag::dyadic_refinement(domain, s, r, std::clamp(deepest, 0, 12));
                std::vector<cadlag::TimeGrid> chosen;
                for (int dd : depths) {
                    if (dd >= 0 && dd <= 12) chosen.push_back(all[static_cast<std::size_t>(dd)]);
                }
                return chosen;
            });
            if (grids) c.corpus.insert(c.corpus.end(), grids->begin(), grids->end());
        }
    }
    std::sort(c.corpus.begin(), c.corpus.end());
    c.corpus.erase(std::unique(c.corpus.begin(), c.corpus.end()), c.corpus.end());
}

/**
 * Reads a run config. Relative file references resolve against base_dir.
 * Every problem found is recorded in `d`; the returned config is only
 * meaningful when `d` stays empty.
 */
inline RunConfig parse_config(const json& j, const std::string& base_dir, Diagnostics& d) {
    RunConfig c;
    c.base_dir = base_dir;
    c.r1_times = {cadlag::DyadicTime::integer(0), cadlag::DyadicTime::dyadic(1, 1), cadlag::DyadicTime::integer(1)};
    c.limsup_times = {cadlag::DyadicTime::dyadic(1, 1), cadlag::DyadicTime::integer(1)};
    c.corpus = cadlag::dyadic_refinement(cadlag::TimeDomain::nonnegative_reals(), cadlag::DyadicTime::integer(0),
                                         cadlag::DyadicTime::integer(1), 2);
    if (!j.is_object()) {
        d.add("config", "expected a JSON object");
        return c;
    }
    static const std::vector<std::string> known{"family",  "family_file", "regularity", "corpus", "truncation", "simulate",
                                                "verify",  "reconstruct", "hitting",    "seed",   "output",     "operation"};
    for (const auto& [key, value] : j.items()) {
        if (std::find(known.begin(), known.end(), key) == known.end()) d.add(key, "unknown field");
    }
    if (j.contains("family")) {
        c.family = parse_family(j.at("family"), "family", d);
    } else if (j.contains("family_file")) {
        const std::string rel = j.at("family_file").is_string() ? j.at("family_file").get<std::string>() : "";
        const auto path = (std::filesystem::path(base_dir) / rel).string();
        auto fam_json = detail::guarded(d, "family_file", [&] { return json::parse(read_file(path, "family_file")); });
        if (fam_json) c.family = parse_family(*fam_json, "family_file", d);
    } else {
        d.add("family", "missing (give family or family_file)");
    }
    if (j.contains("regularity")) parse_regularity(j.at("regularity"), c, d);
    if (j.contains("corpus")) parse_corpus(j.at("corpus"), c, d);
    if (j.contains("truncation")) {
        const auto& t = j.at("truncation");
        if (t.contains("max_state")) {
            if (auto v = detail::guarded(d, "truncation.max_state",
                                         [&] { return detail::count(t.at("max_state"), "truncation.max_state"); })) {
                c.truncation.max_state = *v;
            }
        }
        if (t.contains("prune_below")) {
            if (auto v = detail::guarded(d, "truncation.prune_below",
                                         [&] { return detail::number(t.at("prune_below"), "truncation.prune_below"); })) {
                if (*v < 0.0 || *v >= 1.0) d.add("truncation.prune_below", "must lie in [0, 1)");
                c.truncation.prune_below = *v;
            }
        }
    }
    if (j.contains("simulate")) {
        const auto& s = j.at("simulate");
        if (s.contains("paths")) {
            if (auto v = detail::guarded(d, "simulate.paths", [&] { return detail::count(s.at("paths"), "simulate.paths"); })) {
                c.simulate.paths = *v;
            }
        }
        if (s.contains("horizon")) {
            if (auto v = detail::guarded(d, "simulate.horizon", [&] { return time_from_json(s.at("horizon"), "simulate.horizon"); })) {
                if (!(cadlag::DyadicTime::integer(0) < *v)) d.add("simulate.horizon", "must be > 0");
                c.simulate.horizon = *v;
            }
        }
    }
    if (j.contains("verify")) {
        const auto& s = j.at("verify");
        if (s.contains("grid")) {
            auto g = detail::guarded(d, "verify.grid", [&] {
                std::vector<cadlag::DyadicTime> ts;
                if (!s.at("grid").is_array()) throw InputError("verify.grid", "expected an array of times");
                for (const auto& t : s.at("grid")) ts.push_back(time_from_json(t, "verify.grid"));
                return cadlag::TimeGrid(std::move(ts));
            });
            if (g) {
                if (!(cadlag::DyadicTime::integer(0) < g->back()) || g->front() < cadlag::DyadicTime::integer(0)) {
                    d.add("verify.grid", "times must be >= 0 with a positive last time");
                }
                c.verify.grid = *g;
            }
        }
        if (s.contains("paths")) {
            if (auto v = detail::guarded(d, "verify.paths", [&] { return detail::count(s.at("paths"), "verify.paths"); })) {
                if (*v == 0) d.add("verify.paths", "must be > 0");
                c.verify.paths = *v;
            }
        }
        if (s.contains("tv_tolerance")) {
            if (auto v = detail::guarded(d, "verify.tv_tolerance",
                                         [&] { return detail::number(s.at("tv_tolerance"), "verify.tv_tolerance"); })) {
                if (!(*v > 0.0)) d.add("verify.tv_tolerance", "must be > 0");
                c.verify.tv_tolerance = *v;
            }
        }
    }
    if (j.contains("reconstruct")) {
        const auto& s = j.at("reconstruct");
        if (s.contains("input")) {
            if (s.at("input").is_string()) {
                c.reconstruct.input = (std::filesystem::path(base_dir) / s.at("input").get<std::string>()).string();
            } else {
                d.add("reconstruct.input", "expected a file name");
            }
        }
        if (s.contains("depth")) {
            if (auto v = detail::guarded(d, "reconstruct.depth", [&] { return detail::count(s.at("depth"), "reconstruct.depth"); })) {
                if (*v > 20) d.add("reconstruct.depth", "must be <= 20");
                c.reconstruct.depth = static_cast<int>(*v);
            }
        }
        if (s.contains("resolve_depth")) {
            if (auto v = detail::guarded(d, "reconstruct.resolve_depth",
                                         [&] { return detail::count(s.at("resolve_depth"), "reconstruct.resolve_depth"); })) {
                if (*v > 60) d.add("reconstruct.resolve_depth", "must be <= 60");
                c.reconstruct.resolve_depth = static_cast<int>(*v);
            }
        }
        if (s.contains("max_window_jumps")) {
            if (auto v = detail::guarded(d, "reconstruct.max_window_jumps",
                                         [&] { return detail::count(s.at("max_window_jumps"), "reconstruct.max_window_jumps"); })) {
                c.reconstruct.max_window_jumps = *v;
            }
        }
        if (s.contains("separate_jumps")) {
            if (s.at("separate_jumps").is_boolean()) {
                c.reconstruct.separate_jumps = s.at("separate_jumps").get<bool>();
            } else {
                d.add("reconstruct.separate_jumps", "expected true or false");
            }
        }
        if (s.contains("max_depth")) {
            if (auto v = detail::guarded(d, "reconstruct.max_depth",
                                         [&] { return detail::count(s.at("max_depth"), "reconstruct.max_depth"); })) {
                if (*v > 24) d.add("reconstruct.max_depth", "must be <= 24");
                c.reconstruct.max_depth = static_cast<int>(*v);
            }
        }
        if (s.contains("window_length")) {
            if (auto v = detail::guarded(d, "reconstruct.window_length",
                                         [&] { return detail::number(s.at("window_length"), "reconstruct.window_length"); })) {
                if (!(*v > 0.0)) d.add("reconstruct.window_length", "must be > 0");
                c.reconstruct.window_length = *v;
            }
        }
    }
    if (j.contains("hitting")) {
        const auto& s = j.at("hitting");
        if (s.contains("state")) {
            if (auto v = detail::guarded(d, "hitting.state", [&] { return detail::count(s.at("state"), "hitting.state"); })) {
                c.hitting.state = *v;
            }
        }
        if (s.contains("time")) {
            if (auto v = detail::guarded(d, "hitting.time", [&] { return time_from_json(s.at("time"), "hitting.time"); })) {
                if (!(cadlag::DyadicTime::integer(0) < *v)) d.add("hitting.time", "must be > 0");
                c.hitting.time = *v;
            }
        }
        if (s.contains("paths")) {
            if (auto v = detail::guarded(d, "hitting.paths", [&] { return detail::count(s.at("paths"), "hitting.paths"); })) {
                if (*v == 0) d.add("hitting.paths", "must be > 0");
                c.hitting.paths = *v;
            }
        }
        if (s.contains("tolerance")) {
            if (auto v = detail::guarded(d, "hitting.tolerance",
                                         [&] { return detail::number(s.at("tolerance"), "hitting.tolerance"); })) {
                if (!(*v > 0.0)) d.add("hitting.tolerance", "must be > 0");
                c.hitting.tolerance = *v;
            }
        }
    }
    if (j.contains("seed")) {
        if (j.at("seed").is_number_unsigned()) {
            c.seed = j.at("seed").get<std::uint64_t>();
        } else {
            d.add("seed", "expected an unsigned 64-bit integer");
        }
    }
    if (j.contains("output")) {
        const auto& o = j.at("output");
        if (o.is_object() && o.contains("dir") && o.at("dir").is_string()) {
            c.out_dir = (std::filesystem::path(base_dir) / o.at("dir").get<std::string>()).string();
        } else {
            d.add("output", "expected {\"dir\": \"...\"}");
        }
    }
    return c;
}

}  // namespace kit
