#pragma once

#include <fstream>
#include <iomanip>
#include <limits>
#include <sstream>
#include <stdexcept>
#include <string>
#include <vector>

#include <json.hpp>

#include "cadlag/cadlag.hpp"

namespace kit {

using json = nlohmann::ordered_json;

/// Field-scoped input error; the CLI maps it to exit status 3.
class InputError : public std::runtime_error {
public:
    InputError(std::string field, const std::string& message)
        : std::runtime_error(field + ": " + message), field_(std::move(field)) {}
    const std::string& field() const { return field_; }

private:
    std::string field_;
};

inline json to_json(const cadlag::DyadicTime& t) {
    return json{{"dyadic", {t.mantissa(), t.exponent()}}, {"decimal", t.to_double()}};
}

/// Accepts a number, [mantissa, exponent], or {"dyadic": [mantissa, exponent]}.
inline cadlag::DyadicTime time_from_json(const json& j, const std::string& field) {
    try {
        if (j.is_number()) {
            const double x = j.get<double>();
            if (!std::isfinite(x)) throw InputError(field, "time must be finite");
            return cadlag::DyadicTime::from_double(x);
        }
        const json& pair = j.is_object() ? j.at("dyadic") : j;
        if (pair.is_array() && pair.size() == 2) {
            return cadlag::DyadicTime::from_pair(pair[0].get<std::int64_t>(), pair[1].get<int>());
        }
    } catch (const InputError&) {
        throw;
    } catch (const std::exception& e) {
        throw InputError(field, e.what());
    }
    throw InputError(field, "expected a time (number or dyadic pair)");
}

inline json to_json(const cadlag::IntervalSet& s) {
    json pieces = json::array();
    for (const auto& p : s.pieces()) {
        pieces.push_back({{"lo", to_json(p.lo)}, {"hi", to_json(p.hi)}, {"lo_open", p.lo_open}, {"hi_open", p.hi_open}});
    }
    return json{{"pieces", pieces}, {"tail", s.tail_start() ? to_json(*s.tail_start()) : json(nullptr)}};
}

inline cadlag::IntervalSet interval_set_from_json(const json& j, const std::string& field) {
    std::vector<cadlag::Interval> pieces;
    std::optional<cadlag::DyadicTime> tail;
    try {
        for (std::size_t i = 0; i < j.at("pieces").size(); ++i) {
            const auto& p = j.at("pieces")[i];
            const std::string f = field + ".pieces[" + std::to_string(i) + "]";
            pieces.push_back({time_from_json(p.at("lo"), f + ".lo"), time_from_json(p.at("hi"), f + ".hi"),
                              p.value("lo_open", false), p.value("hi_open", false)});
        }
        if (j.contains("tail") && !j.at("tail").is_null()) tail = time_from_json(j.at("tail"), field + ".tail");
        return cadlag::IntervalSet(std::move(pieces), tail);
    } catch (const InputError&) {
        throw;
    } catch (const std::exception& e) {
        throw InputError(field, e.what());
    }
}

inline json to_json(const cadlag::CadlagPath& p) {
    json jumps = json::array();
    for (const auto& j : p.jumps()) jumps.push_back({to_json(j.time), j.state});
    json out{{"anchor", p.anchor()},
             {"horizon", p.horizon() ? to_json(*p.horizon()) : json(nullptr)},
             {"jumps", jumps}};
    out["domain"] = to_json(p.domain());
    return out;
}

inline cadlag::CadlagPath path_from_json(const json& j, const std::string& field) {
    try {
        cadlag::IntervalSet domain = j.contains("domain")
                                         ? interval_set_from_json(j.at("domain"), field + ".domain")
                                         : cadlag::IntervalSet::half_line(cadlag::DyadicTime::integer(0));
        std::optional<cadlag::DyadicTime> horizon;
        if (j.contains("horizon") && !j.at("horizon").is_null()) horizon = time_from_json(j.at("horizon"), field + ".horizon");
        std::vector<cadlag::JumpRecord> jumps;
        for (std::size_t i = 0; i < j.at("jumps").size(); ++i) {
            const auto& r = j.at("jumps")[i];
            if (!r.is_array() || r.size() != 2) throw InputError(field + ".jumps", "records must be [time, state]");
            jumps.push_back({time_from_json(r[0], field + ".jumps[" + std::to_string(i) + "]"), r[1].get<cadlag::State>()});
        }
        return cadlag::CadlagPath(std::move(domain), j.at("anchor").get<cadlag::State>(), std::move(jumps), horizon);
    } catch (const InputError&) {
        throw;
    } catch (const std::exception& e) {
        throw InputError(field, e.what());
    }
}

inline json to_json(const cadlag::CheckReport& r) {
    json estimates = json::array();
    for (const auto& e : r.estimates) {
        estimates.push_back({{"name", e.name}, {"lo", e.lo}, {"hi", e.hi}, {"value", e.value()}, {"tolerance", e.tolerance}});
    }
    json witnesses = json::array();
    for (const auto& w : r.witnesses) {
        json times = json::array();
        for (const auto& t : w.times) times.push_back(to_json(t));
        json other = json::array();
        for (const auto& t : w.other_times) other.push_back(to_json(t));
        witnesses.push_back(
            {{"description", w.description}, {"times", times}, {"other_times", other}, {"states", w.states}, {"value", w.value}});
    }
    json tolerances = json::array();
    for (const auto& [name, v] : r.tolerances) tolerances.push_back({{"name", name}, {"value", v}});
    json traces = json::array();
    for (const auto& t : r.traces) traces.push_back({{"name", t.name}, {"columns", t.columns}, {"rows", t.rows}});
    return json{{"check", r.check},           {"verdict", cadlag::to_string(r.verdict)},
                {"vacuous", r.vacuous},       {"estimates", estimates},
                {"witnesses", witnesses},     {"tolerances", tolerances},
                {"notes", r.notes},           {"traces", traces}};
}

/// Fixed-format CSV: header row, comma separator, LF endings, shortest
/// round-trip decimal representation.
inline std::string to_csv(const cadlag::Trace& t) {
    std::ostringstream os;
    os.imbue(std::locale::classic());
    for (std::size_t i = 0; i < t.columns.size(); ++i) os << (i ? "," : "") << t.columns[i];
    os << '\n';
    for (const auto& row : t.rows) {
        for (std::size_t i = 0; i < row.size(); ++i) os << (i ? "," : "") << json(row[i]).dump();
        os << '\n';
    }
    return os.str();
}

inline void write_file(const std::string& path, const std::string& content) {
    std::ofstream out(path, std::ios::binary);
    if (!out) throw std::runtime_error("cannot write " + path);
    out << content;
}

inline std::string read_file(const std::string& path, const std::string& field) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw InputError(field, "cannot read " + path);
    std::ostringstream ss;
    ss << in.rdbuf();
    return ss.str();
}

inline std::vector<cadlag::CadlagPath> read_paths_jsonl(const std::string& path, const std::string& field) {
    std::istringstream in(read_file(path, field));
    std::vector<cadlag::CadlagPath> out;
    std::string line;
    std::size_t n = 0;
    while (std::getline(in, line)) {
        ++n;
        if (line.find_first_not_of(" \t\r") == std::string::npos) continue;
        json j;
        try {
            j = json::parse(line);
        } catch (const std::exception& e) {
            throw InputError(field, "line " + std::to_string(n) + ": " + e.what());
        }
        out.push_back(path_from_json(j, field + ":" + std::to_string(n)));
    }
    return out;
}

inline std::string paths_to_jsonl(const std::vector<cadlag::CadlagPath>& paths) {
    std::string out;
    for (const auto& p : paths) {
        out += to_json(p).dump();
        out += '\n';
    }
    return out;
}

}  // namespace kit
