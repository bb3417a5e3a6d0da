#include <catch_amalgamated.hpp>

#include <sys/wait.h>

#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <sstream>

#include "kit/run.hpp"

namespace fs = std::filesystem;

namespace {

const fs::path kExamples{CADLAG_EXAMPLES_DIR};

struct Run {
    int code;
    std::string out;
    std::string err;
};

Run kit_run(std::vector<std::string> args) {
    std::vector<const char*> argv{"cadlag_kit"};
    for (const auto& a : args) argv.push_back(a.c_str());
    std::ostringstream out;
    std::ostringstream err;
    const int code = kit::run_cli(static_cast<int>(argv.size()), argv.data(), out, err);
    return {code, out.str(), err.str()};
}

fs::path scratch(const std::string& name) {
    const auto dir = fs::temp_directory_path() / ("cadlag_kit_test_" + name);
    fs::remove_all(dir);
    fs::create_directories(dir);
    return dir;
}

fs::path write_config(const fs::path& dir, const std::string& body) {
    const auto p = dir / "config.json";
    std::ofstream(p) << body;
    return p;
}

std::string slurp(const fs::path& p) {
    std::ifstream in(p, std::ios::binary);
    std::stringstream ss;
    ss << in.rdbuf();
    return ss.str();
}

std::string example(const std::string& name) { return (kExamples / (name + ".json")).string(); }

}  // namespace

TEST_CASE("validate reports ok for valid configs", "[cli]") {
    for (const auto* name : {"ctmc_consistency", "poisson_regularity", "perturbed_consistency", "ctmc_verify"}) {
        const auto r = kit_run({"validate", "--config", example(name)});
        CHECK(r.code == 0);
        CHECK(r.out == "ok\n");
    }
}

TEST_CASE("validate names the offending field", "[cli]") {
    const auto neg = kit_run({"validate", "--config", example("negative_rate")});
    CHECK(neg.code == 3);
    CHECK(neg.out.find("rate") != std::string::npos);
    CHECK(std::count(neg.out.begin(), neg.out.end(), '\n') == 1);

    // row sums are recomputed: row 1 sums to 1e-6
    const auto bad = kit_run({"validate", "--config", example("bad_family")});
    CHECK(bad.code == 3);
    CHECK(bad.out.find("row 1") != std::string::npos);

    const auto dir = scratch("diagnostics");
    const auto cfg = write_config(dir, R"({"family": {"kind": "iid", "marginal": [0.5, 0.6]},
                                          "regularity": {"ratio": 2, "k_max": 0}, "bogus": 1})");
    const auto many = kit_run({"validate", "--config", cfg.string()});
    CHECK(many.code == 3);
    for (const auto* field : {"family.marginal", "regularity.ratio", "regularity.k_max", "bogus"}) {
        CHECK(many.out.find(field) != std::string::npos);
    }
}

TEST_CASE("input errors exit with status 3", "[cli]") {
    CHECK(kit_run({"check-consistency", "--config", "/nonexistent/config.json"}).code == 3);
    CHECK(kit_run({"check-consistency"}).code == 3);
    CHECK(kit_run({"no-such-verb", "--config", example("ctmc_consistency")}).code == 3);
    const auto dir = scratch("malformed");
    const auto cfg = write_config(dir, "{ not json");
    const auto r = kit_run({"check-consistency", "--config", cfg.string()});
    CHECK(r.code == 3);
    CHECK(r.err.find("error:") != std::string::npos);
    CHECK(kit_run({"check-consistency", "--config", example("negative_rate")}).code == 3);
    CHECK(kit_run({"check-consistency", "--config", example("ctmc_consistency"), "--tolerance-scale", "0",
                   "--out", (dir / "o").string()})
              .code == 3);
}

TEST_CASE("check-regularity on poisson passes with traces", "[cli]") {
    const auto dir = scratch("regularity");
    const auto r = kit_run({"check-regularity", "--config", example("poisson_regularity"), "--out", dir.string()});
    REQUIRE(r.code == 0);
    CHECK(r.out == "check-regularity: pass\n");
    const auto report = kit::json::parse(slurp(dir / "report.json"));
    CHECK(report["verdict"] == "pass");
    bool saw_r1 = false;
    bool saw_r2 = false;
    bool saw_note = false;
    for (const auto& rep : report["reports"]) {
        for (const auto* key : {"check", "verdict", "vacuous", "estimates", "witnesses", "tolerances", "notes", "traces"}) {
            CHECK(rep.contains(key));
        }
        saw_r1 |= rep["check"] == "r1_right_continuity" && rep["verdict"] == "pass";
        saw_r2 |= rep["check"] == "r2_jump_tails" && rep["verdict"] == "pass";
        for (const auto& n : rep["notes"]) saw_note |= n.get<std::string>().find("unmet") != std::string::npos;
    }
    CHECK(saw_r1);
    CHECK(saw_r2);
    CHECK(saw_note);

    std::size_t csv = 0;
    for (const auto& e : fs::directory_iterator(dir)) {
        if (e.path().extension() != ".csv") continue;
        ++csv;
        const auto text = slurp(e.path());
        CHECK(text.find('\r') == std::string::npos);
        CHECK(text.back() == '\n');
        CHECK(text.find(';') == std::string::npos);
    }
    CHECK(csv > 0);
    const auto r1 = slurp(dir / "00_r1_right_continuity_r1_trace.csv");
    CHECK(r1.rfind("t,r,r_minus_t,stay_probability\n", 0) == 0);
}

TEST_CASE("check-regularity on the iid family fails", "[cli]") {
    const auto dir = scratch("iid");
    const auto r = kit_run({"check-regularity", "--config", example("iid_regularity"), "--out", dir.string()});
    CHECK(r.code == 1);
    const auto report = kit::json::parse(slurp(dir / "report.json"));
    for (const auto& rep : report["reports"]) {
        if (rep["verdict"] == "fail") CHECK_FALSE(rep["witnesses"].empty());
    }
}

TEST_CASE("check-consistency distinguishes consistent and perturbed families", "[cli]") {
    const auto good = scratch("consistent");
    CHECK(kit_run({"check-consistency", "--config", example("ctmc_consistency"), "--out", good.string()}).code == 0);

    const auto bad = scratch("perturbed");
    const auto r = kit_run({"check-consistency", "--config", example("perturbed_consistency"), "--out", bad.string()});
    REQUIRE(r.code == 1);
    const auto report = kit::json::parse(slurp(bad / "report.json"));
    const auto& w = report["reports"][0]["witnesses"][0];
    CHECK(w["times"][0]["decimal"] == 0.5);
    CHECK(std::fabs(w["value"].get<double>() - 0.1) < 1e-9);
}

TEST_CASE("simulate is byte-identical across reruns and thread counts", "[cli]") {
    const auto a = scratch("sim_a");
    const auto b = scratch("sim_b");
    const auto c = scratch("sim_c");
    REQUIRE(kit_run({"simulate", "--config", example("ctmc_simulate"), "--out", a.string()}).code == 0);
    REQUIRE(kit_run({"simulate", "--config", example("ctmc_simulate"), "--out", b.string(), "--threads", "6"}).code == 0);
    CHECK(slurp(a / "paths.jsonl") == slurp(b / "paths.jsonl"));
    CHECK(slurp(a / "report.json") == slurp(b / "report.json"));
    REQUIRE(kit_run({"simulate", "--config", example("ctmc_simulate"), "--out", c.string(), "--seed", "99"}).code == 0);
    CHECK(slurp(a / "paths.jsonl") != slurp(c / "paths.jsonl"));

    // records carry exact dyadic times
    std::istringstream lines(slurp(a / "paths.jsonl"));
    std::string line;
    std::size_t n = 0;
    while (std::getline(lines, line)) {
        const auto j = kit::json::parse(line);
        CHECK(j.contains("anchor"));
        CHECK(j.contains("horizon"));
        for (const auto& rec : j["jumps"]) CHECK(rec[0]["dyadic"].size() == 2);
        ++n;
    }
    CHECK(n == 1000);
}

TEST_CASE("consistency reports are identical across thread counts", "[cli]") {
    const auto a = scratch("cons_a");
    const auto b = scratch("cons_b");
    kit_run({"check-consistency", "--config", example("perturbed_consistency"), "--out", a.string()});
    kit_run({"check-consistency", "--config", example("perturbed_consistency"), "--out", b.string(), "--threads", "4"});
    CHECK(slurp(a / "report.json") == slurp(b / "report.json"));
}

TEST_CASE("reconstruct round-trips a simulated path file", "[cli]") {
    const auto sim = scratch("rec_sim");
    REQUIRE(kit_run({"simulate", "--config", example("ctmc_simulate"), "--out", sim.string()}).code == 0);
    const auto dir = scratch("rec");
    fs::copy_file(sim / "paths.jsonl", dir / "paths.jsonl");
    const auto cfg = write_config(dir, R"({"family_file": ")" + (kExamples / "ctmc_family.json").string() +
                                           R"(", "reconstruct": {"input": "paths.jsonl", "depth": 4}})");
    const auto r = kit_run({"reconstruct", "--config", cfg.string(), "--out", (dir / "out").string()});
    CHECK(r.code == 0);
    CHECK(slurp(dir / "out" / "reconstructed.jsonl") == slurp(dir / "paths.jsonl"));

    // without per-path deepening a coarse table can miss close jump pairs
    const auto cfg2 = write_config(dir, R"({"family_file": ")" + (kExamples / "ctmc_family.json").string() +
                                            R"(", "reconstruct": {"input": "paths.jsonl", "depth": 1, "resolve_depth": 1,
                                                 "separate_jumps": false}})");
    CHECK(kit_run({"reconstruct", "--config", cfg2.string(), "--out", (dir / "out2").string()}).code == 1);
}

TEST_CASE("hitting and verify-fdd pass with small samples", "[cli]") {
    const auto dir = scratch("hit");
    const auto cfg = write_config(dir, R"({"family": {"kind": "poisson", "rate": 1.0},
                                          "hitting": {"state": 2, "time": 1, "paths": 20000, "tolerance": 0.02},
                                          "verify": {"grid": [0, 0.5, 1], "paths": 20000, "tv_tolerance": 0.03},
                                          "seed": 5})");
    CHECK(kit_run({"hitting", "--config", cfg.string(), "--out", (dir / "h").string()}).code == 0);
    CHECK(kit_run({"verify-fdd", "--config", cfg.string(), "--out", (dir / "v").string()}).code == 0);
    const auto report = kit::json::parse(slurp(dir / "h" / "report.json"));
    CHECK(report["seed"] == 5);
}

TEST_CASE("the installed binary reports exit statuses", "[cli]") {
    const auto dir = scratch("binary");
    auto status = [&](const std::string& args) {
        const std::string cmd = std::string(CADLAG_KIT_BINARY) + " " + args + " > " + (dir / "log.txt").string() + " 2>&1";
        const int raw = std::system(cmd.c_str());
        return WIFEXITED(raw) ? WEXITSTATUS(raw) : -1;
    };
    CHECK(status("validate --config " + example("ctmc_consistency")) == 0);
    CHECK(status("check-consistency --config " + example("perturbed_consistency") + " --out " + (dir / "p").string()) == 1);
    CHECK(status("validate --config " + example("negative_rate")) == 3);
    CHECK(status("--help") == 0);
}
