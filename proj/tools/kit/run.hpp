#pragma once

#include <cstdlib>
#include <filesystem>
#include <iostream>
#include <string>
#include <vector>

#include <CLI11.hpp>

#include "kit/config.hpp"
#include "kit/serialize.hpp"

namespace kit {

enum class Exit : int { pass = 0, fail = 1, inconclusive = 2, input_error = 3 };

inline int exit_code(cadlag::Verdict v) {
    switch (v) {
        case cadlag::Verdict::pass: return static_cast<int>(Exit::pass);
        case cadlag::Verdict::fail: return static_cast<int>(Exit::fail);
        case cadlag::Verdict::inconclusive: return static_cast<int>(Exit::inconclusive);
    }
    return static_cast<int>(Exit::input_error);
}

/// Verbosity from CADLAG_KIT_LOG: quiet, error (default), info, debug, or 0-3.
inline int log_level() {
    const char* v = std::getenv("CADLAG_KIT_LOG");
    if (v == nullptr) return 1;
    const std::string s(v);
    if (s == "quiet" || s == "0") return 0;
    if (s == "error" || s == "1") return 1;
    if (s == "info" || s == "2") return 2;
    if (s == "debug" || s == "3") return 3;
    return 1;
}

class Logger {
public:
    explicit Logger(std::ostream& err) : err_(err), level_(log_level()) {}
    void error(const std::string& m) const { emit(1, "error", m); }
    void info(const std::string& m) const { emit(2, "info", m); }
    void debug(const std::string& m) const { emit(3, "debug", m); }

private:
    void emit(int level, const char* tag, const std::string& m) const {
        if (level_ >= level) err_ << "[" << tag << "] " << m << '\n';
    }
    std::ostream& err_;
    int level_;
};

struct Outcome {
    cadlag::Verdict verdict = cadlag::Verdict::pass;
    std::vector<cadlag::CheckReport> reports;
    json summary = json::object();
};

struct Options {
    std::string operation;
    std::string config;
    std::optional<std::string> out;
    std::optional<std::uint64_t> seed;
    unsigned threads = 1;
    double tolerance_scale = 1.0;
};

namespace detail {

inline const cadlag::FddFamily& family_of(const RunConfig& c) {
    if (!c.family) throw InputError("family", "missing");
    return *c.family;
}

inline Outcome run_consistency(const RunConfig& c, unsigned threads) {
    Outcome o;
    auto r = cadlag::check_consistency(family_of(c), c.corpus, c.truncation, c.regularity.eps_consistency, threads);
    o.verdict = r.verdict;
    o.summary["corpus_grids"] = c.corpus.size();
    o.reports.push_back(std::move(r));
    return o;
}

inline Outcome run_regularity(const RunConfig& c, unsigned threads, const Logger& log) {
    const auto& fam = family_of(c);
    auto params = c.regularity;
    params.threads = threads;
    Outcome o;
    for (const auto& t : c.r1_times) {
        log.debug("r1 at " + t.to_string());
        o.reports.push_back(cadlag::check_r1(fam, t, params));
    }
    json skipped = json::array();
    for (const auto& t : c.limsup_times) {
        for (auto side : {cadlag::Side::right, cadlag::Side::left}) {
            try {
                o.reports.push_back(cadlag::rate_limsup_probe(fam, t, side, params));
            } catch (const std::invalid_argument& e) {
                skipped.push_back({{"time", to_json(t)}, {"side", cadlag::to_string(side)}, {"reason", e.what()}});
            }
        }
    }
    log.debug("r2 over window " + std::to_string(params.window));
    o.reports.push_back(cadlag::check_r2(fam, params, c.truncation));
    std::vector<cadlag::TimeGrid> inside;
    const auto n = cadlag::DyadicTime::integer(params.window);
    for (const auto& g : c.corpus) {
        if (!(g.front() < -n) && !(n < g.back())) inside.push_back(g);
    }
    if (inside.empty()) throw InputError("corpus", "no corpus grid lies inside [-n, n]");
    o.reports.push_back(cadlag::check_expected_bound(fam, params, inside));
    o.verdict = cadlag::Verdict::pass;
    for (const auto& r : o.reports) o.verdict = cadlag::combine(o.verdict, r.verdict);
    o.summary["skipped_probes"] = skipped;
    return o;
}

inline std::vector<cadlag::CadlagPath> sample(const RunConfig& c, std::size_t n, const cadlag::DyadicTime& horizon,
                                              unsigned threads) {
    try {
        return cadlag::sample_paths(family_of(c), n, horizon, c.seed, threads);
    } catch (const std::invalid_argument& e) {
        throw InputError("family", e.what());
    }
}

inline Outcome run_simulate(const RunConfig& c, unsigned threads, const std::filesystem::path& out) {
    const auto paths = sample(c, c.simulate.paths, c.simulate.horizon, threads);
    write_file((out / "paths.jsonl").string(), paths_to_jsonl(paths));
    double jumps = 0.0;
    for (const auto& p : paths) jumps += static_cast<double>(p.jumps().size());
    Outcome o;
    o.summary["paths"] = paths.size();
    o.summary["horizon"] = to_json(c.simulate.horizon);
    o.summary["mean_jumps"] = paths.empty() ? 0.0 : jumps / static_cast<double>(paths.size());
    o.summary["paths_file"] = "paths.jsonl";
    return o;
}

inline Outcome run_verify(const RunConfig& c, unsigned threads) {
    const auto& fam = family_of(c);
    const auto& u = c.verify.grid;
    const auto paths = sample(c, c.verify.paths, u.back(), threads);
    const auto emp = cadlag::empirical_fdd(paths, u);
    const double tv = cadlag::tv_distance(emp, fam, c.truncation);

    cadlag::CheckReport r;
    r.check = "fdd_agreement";
    r.tolerances.emplace_back("tv_tolerance", c.verify.tv_tolerance);
    r.add_estimate("tv_distance", tv, c.verify.tv_tolerance);
    r.add_estimate("sample_size", static_cast<double>(emp.n), 0.0);
    cadlag::Trace atoms{"atoms", {}, {}};
    for (std::size_t i = 0; i < u.size(); ++i) atoms.columns.push_back("x" + std::to_string(i));
    atoms.columns.push_back("empirical");
    atoms.columns.push_back("analytic");
    for (const auto& [x, n] : emp.counts) {
        std::vector<double> row(x.begin(), x.end());
        row.push_back(static_cast<double>(n) / static_cast<double>(emp.n));
        row.push_back(fam.mass(u, x));
        atoms.rows.push_back(std::move(row));
    }
    r.traces.push_back(std::move(atoms));
    if (tv <= c.verify.tv_tolerance) {
        r.conclude(cadlag::Verdict::pass);
    } else {
        cadlag::Witness w;
        w.description = "empirical law of X_u differs from the family's law";
        w.times = u.times();
        w.value = tv;
        r.witnesses.push_back(std::move(w));
        r.conclude(cadlag::Verdict::fail);
    }
    Outcome o;
    o.verdict = r.verdict;
    o.summary["seed"] = c.seed;
    o.reports.push_back(std::move(r));
    return o;
}

inline Outcome run_reconstruct(const RunConfig& c, unsigned threads, const std::filesystem::path& out) {
    std::vector<cadlag::CadlagPath> paths = c.reconstruct.input.empty()
                                                ? sample(c, c.simulate.paths, c.simulate.horizon, threads)
                                                : read_paths_jsonl(c.reconstruct.input, "reconstruct.input");
    std::size_t budget = 0;
    if (c.reconstruct.max_window_jumps) {
        budget = *c.reconstruct.max_window_jumps;
    } else {
        const auto rate = c.family ? c.family->max_exit_rate() : std::nullopt;
        if (!rate) throw InputError("reconstruct.max_window_jumps", "required when the family has no rate bound");
        budget = std::max<std::size_t>(1, static_cast<std::size_t>(std::ceil(10.0 * c.reconstruct.window_length * *rate)));
    }
    cadlag::CheckReport r;
    r.check = "reconstruction_round_trip";
    r.tolerances.emplace_back("max_window_jumps", static_cast<double>(budget));
    std::vector<cadlag::CadlagPath> rebuilt;
    std::size_t exact = 0;
    double worst_uncertainty = 0.0;
    int deepest = 0;
    for (std::size_t i = 0; i < paths.size(); ++i) {
        int depth = c.reconstruct.depth;
        if (c.reconstruct.separate_jumps) {
            depth = std::max(depth, std::min(cadlag::separating_depth(paths[i]), c.reconstruct.max_depth));
        }
        deepest = std::max(deepest, depth);
        const auto table = cadlag::restrict_to_dense(paths[i], depth, c.reconstruct.resolve_depth);
        try {
            auto rec = cadlag::reconstruct_from_dense(table, budget, c.reconstruct.window_length);
            for (double u : rec.jump_uncertainty) worst_uncertainty = std::max(worst_uncertainty, u);
            if (rec.path == paths[i]) {
                ++exact;
            } else if (r.witnesses.empty()) {
                r.witnesses.push_back({"reconstructed jump records differ from the input path", {}, {}, {}, static_cast<double>(i)});
            }
            rebuilt.push_back(std::move(rec.path));
        } catch (const std::runtime_error& e) {
            if (r.witnesses.empty()) r.witnesses.push_back({e.what(), {}, {}, {}, static_cast<double>(i)});
        }
    }
    write_file((out / "reconstructed.jsonl").string(), paths_to_jsonl(rebuilt));
    r.add_estimate("paths", static_cast<double>(paths.size()), 0.0);
    r.add_estimate("exact_round_trips", static_cast<double>(exact), 0.0);
    r.add_estimate("max_jump_uncertainty", worst_uncertainty, 0.0);
    r.add_estimate("deepest_sample_depth", static_cast<double>(deepest), 0.0);
    r.conclude(exact == paths.size() ? cadlag::Verdict::pass : cadlag::Verdict::fail);
    Outcome o;
    o.verdict = r.verdict;
    o.summary["reconstructed_file"] = "reconstructed.jsonl";
    o.reports.push_back(std::move(r));
    return o;
}

inline Outcome run_hitting(const RunConfig& c, unsigned threads) {
    const auto& fam = family_of(c);
    const auto paths = sample(c, c.hitting.paths, c.hitting.time, threads);
    const auto h = cadlag::hitting_probability(fam, paths, c.hitting.state, c.hitting.time);
    cadlag::CheckReport r;
    r.check = "hitting_probability";
    r.tolerances.emplace_back("tolerance", c.hitting.tolerance);
    r.add_estimate("monte_carlo", h.estimate, c.hitting.tolerance);
    r.add_estimate("standard_error", h.standard_error, 0.0);
    if (h.exact) {
        r.add_estimate("exact", *h.exact, 0.0);
        const double gap = std::fabs(h.estimate - *h.exact);
        r.add_estimate("gap", gap, c.hitting.tolerance);
        if (gap > c.hitting.tolerance) {
            r.witnesses.push_back({"Monte Carlo hitting frequency is off the exact value", {c.hitting.time}, {}, {c.hitting.state}, gap});
            r.conclude(cadlag::Verdict::fail);
        } else {
            r.conclude(cadlag::Verdict::pass);
        }
    } else {
        r.notes.emplace_back("no closed form for this family; only the estimate is reported");
        r.conclude(cadlag::Verdict::pass);
    }
    Outcome o;
    o.verdict = r.verdict;
    o.summary["seed"] = c.seed;
    o.reports.push_back(std::move(r));
    return o;
}

inline std::string safe_name(std::string s) {
    for (auto& ch : s) {
        if (!std::isalnum(static_cast<unsigned char>(ch))) ch = '_';
    }
    return s;
}

}  // namespace detail

/// Loads and cross-checks a config file without running anything.
inline Diagnostics validate_file(const std::string& path) {
    Diagnostics d;
    json j;
    try {
        j = json::parse(read_file(path, "config"));
    } catch (const InputError& e) {
        throw;
    } catch (const std::exception& e) {
        d.add("config", std::string("not valid JSON: ") + e.what());
        return d;
    }
    const auto base = std::filesystem::path(path).parent_path().string();
    const auto c = parse_config(j, base.empty() ? "." : base, d);
    if (!c.reconstruct.input.empty() && !std::filesystem::exists(c.reconstruct.input)) {
        d.add("reconstruct.input", "file " + c.reconstruct.input + " does not exist");
    }
    return d;
}

/// Executes one verb; writes report.json (and CSV traces) under the output
/// directory and returns the exit status.
inline int run(const Options& opt, std::ostream& out, std::ostream& err) {
    const Logger log(err);
    try {
        if (opt.operation == "validate") {
            const auto d = validate_file(opt.config);
            for (const auto& item : d.items) out << item << '\n';
            if (d.empty()) out << "ok\n";
            return d.empty() ? 0 : static_cast<int>(Exit::input_error);
        }
        const auto d0 = validate_file(opt.config);
        if (!d0.empty()) {
            for (const auto& item : d0.items) err << "error: " << item << '\n';
            return static_cast<int>(Exit::input_error);
        }
        Diagnostics d;
        const auto base = std::filesystem::path(opt.config).parent_path().string();
        auto cfg = parse_config(json::parse(read_file(opt.config, "config")), base.empty() ? "." : base, d);
        if (opt.seed) cfg.seed = *opt.seed;
        if (opt.out) cfg.out_dir = *opt.out;
        if (!(opt.tolerance_scale > 0.0)) throw InputError("--tolerance-scale", "must be > 0");
        cfg.regularity.eps_limit *= opt.tolerance_scale;
        cfg.regularity.eps_consistency *= opt.tolerance_scale;
        cfg.verify.tv_tolerance *= opt.tolerance_scale;
        cfg.hitting.tolerance *= opt.tolerance_scale;
        const unsigned threads = std::max(1u, opt.threads);

        const std::filesystem::path dir(cfg.out_dir);
        std::filesystem::create_directories(dir);
        log.info(opt.operation + " with family " + detail::family_of(cfg).name() + ", output in " + dir.string());

        Outcome o;
        try {
            if (opt.operation == "check-consistency") {
                o = detail::run_consistency(cfg, threads);
            } else if (opt.operation == "check-regularity") {
                o = detail::run_regularity(cfg, threads, log);
            } else if (opt.operation == "simulate") {
                o = detail::run_simulate(cfg, threads, dir);
            } else if (opt.operation == "verify-fdd") {
                o = detail::run_verify(cfg, threads);
            } else if (opt.operation == "reconstruct") {
                o = detail::run_reconstruct(cfg, threads, dir);
            } else if (opt.operation == "hitting") {
                o = detail::run_hitting(cfg, threads);
            } else {
                throw InputError("operation", "unknown verb '" + opt.operation + "'");
            }
        } catch (const InputError&) {
            throw;
        } catch (const std::invalid_argument& e) {
            throw InputError(opt.operation, e.what());
        }

        json reports = json::array();
        for (std::size_t i = 0; i < o.reports.size(); ++i) {
            const auto& r = o.reports[i];
            reports.push_back(to_json(r));
            for (const auto& t : r.traces) {
                char prefix[8];
                std::snprintf(prefix, sizeof prefix, "%02zu", i);
                write_file((dir / (std::string(prefix) + "_" + detail::safe_name(r.check) + "_" + t.name + ".csv")).string(),
                           to_csv(t));
            }
        }
        json conventions = json::array();
        if (detail::family_of(cfg).root().kind() == cadlag::FddFamily::Kind::poisson) {
            conventions.push_back("poisson: the process starts in state 0 at time 0, so the first grid point carries "
                                  "the factor exp(-rate t_1) (rate t_1)^x / x!");
        }
        if (detail::family_of(cfg).root().kind() == cadlag::FddFamily::Kind::ctmc) {
            conventions.push_back("ctmc: ||Q|| = 2 max_x |Q_xx|; half the norm is the largest exit rate");
        }
        json report{{"operation", opt.operation},
                    {"conventions", conventions},
                    {"family", detail::family_of(cfg).name()},
                    {"seed", cfg.seed},
                    {"verdict", cadlag::to_string(o.verdict)},
                    {"summary", o.summary},
                    {"reports", reports}};
        write_file((dir / "report.json").string(), report.dump(2) + "\n");
        out << opt.operation << ": " << cadlag::to_string(o.verdict) << '\n';
        for (const auto& r : o.reports) {
            log.info(r.check + " -> " + cadlag::to_string(r.verdict));
            for (const auto& w : r.witnesses) log.info("  witness: " + w.description + " (" + json(w.value).dump() + ")");
        }
        return exit_code(o.verdict);
    } catch (const InputError& e) {
        err << "error: " << e.what() << '\n';
        return static_cast<int>(Exit::input_error);
    } catch (const std::exception& e) {
        err << "error: " << e.what() << '\n';
        return static_cast<int>(Exit::input_error);
    }
}

/// Command-line entry point shared by the binary and the tests.
inline int run_cli(int argc, const char* const* argv, std::ostream& out = std::cout, std::ostream& err = std::cerr) {
    CLI::App app{"cadlag_kit: consistency and regularity checks, path simulation and reconstruction"};
    app.require_subcommand(1);
    Options opt;
    const std::vector<std::pair<std::string, std::string>> verbs{
        {"check-consistency", "check marginal consistency over a grid corpus"},
        {"check-regularity", "run right-continuity, jump-tail, rate and expected-jump checks"},
        {"simulate", "sample paths and write them as JSONL"},
        {"verify-fdd", "compare sampled paths with the family's finite-dimensional law"},
        {"reconstruct", "restrict paths to dense dyadics and rebuild them"},
        {"hitting", "estimate the probability of visiting a state by a time"},
        {"validate", "parse and cross-check a config without running it"}};
    for (const auto& [name, help] : verbs) {
        auto* sub = app.add_subcommand(name, help);
        sub->add_option("--config", opt.config, "run config (JSON)")->required();
        sub->add_option("--out", opt.out, "output directory");
        sub->add_option("--seed", opt.seed, "seed override");
        sub->add_option("--threads", opt.threads, "worker threads")->check(CLI::PositiveNumber);
        sub->add_option("--tolerance-scale", opt.tolerance_scale, "multiplies every tolerance");
        sub->callback([&opt, n = name] { opt.operation = n; });
    }
    try {
        app.parse(argc, argv);
    } catch (const CLI::CallForHelp& e) {
        out << app.help();
        return 0;
    } catch (const CLI::ParseError& e) {
        err << "error: " << e.what() << '\n';
        return static_cast<int>(Exit::input_error);
    }
    return run(opt, out, err);
}

}  // namespace kit
