#pragma once

#include <json.hpp>

#include <cstdint>
#include <filesystem>
#include <fstream>
#include <sstream>
#include <string>
#include <vector>

#include "covertime/errors.hpp"
#include "covertime/network.hpp"
#include "covertime/stats.hpp"

namespace covertime {

using nlohmann::json;

/// One line of a verification report. A vacuous check (bound >= 1 or an
/// out-of-regime note) auto-passes and is flagged so it cannot green-wash
/// the summary.
struct Check {
    std::string name;
    double statistic = 0.0;
    double threshold = 0.0;
    bool pass = false;
    bool vacuous = false;
    std::string note;
    std::int64_t n1 = 0;
    std::int64_t n2 = 0;
    double alpha = 0.0;

    json to_json() const {
        json j{{"name", name},       {"statistic", statistic}, {"threshold", threshold},
               {"pass", pass},       {"vacuous", vacuous},     {"n1", n1},
               {"n2", n2},           {"alpha", alpha}};
        if (!note.empty()) j["note"] = note;
        return j;
    }
};

inline Check check_from(const TestOutcome& out) {
    Check c;
    c.name = out.name;
    c.statistic = out.statistic;
    c.threshold = out.threshold;
    c.pass = out.pass;
    c.vacuous = out.vacuous;
    c.note = out.note;
    c.n1 = out.n1;
    c.n2 = out.n2;
    c.alpha = out.alpha;
    return c;
}

inline Check check_le(const std::string& name, double statistic, double threshold,
                      const std::string& note = "") {
    Check c;
    c.name = name;
    c.statistic = statistic;
    c.threshold = threshold;
    c.pass = statistic <= threshold;
    c.note = note;
    return c;
}

/// Empirical frequency against a closed-form tail bound, one-sided with
/// binomial slack; vacuous bounds auto-pass and are flagged.
inline Check check_bound(const std::string& name, double frequency, std::int64_t n,
                         const TailBound& bound, const std::string& note = "") {
    Check c;
    c.name = name;
    c.statistic = frequency;
    c.threshold = bound.clamped;
    c.n1 = n;
    if (bound.vacuous()) {
        c.pass = true;
        c.vacuous = true;
        c.note = note.empty() ? "bound is vacuous (raw " + std::to_string(bound.raw) + ")"
                              : note;
    } else {
        c.pass = frequency <= bound.clamped + 3.0 * binomial_se(frequency, n);
        c.note = note;
    }
    return c;
}

inline Check check_note(const std::string& name, double value, const std::string& note) {
    Check c;
    c.name = name;
    c.statistic = value;
    c.pass = true;
    c.vacuous = true;
    c.note = note;
    return c;
}

struct VerificationReport {
    std::string experiment;
    std::string network_name;
    json network_info;  // vertex/edge counts, base vertex, id mapping
    json params;        // every knob needed to rerun, seed included
    std::vector<Check> checks;
    std::uint64_t seed = 0;
    int workers = 1;
    std::int64_t duration_ms = 0;
    std::string invocation;

    bool pass() const {
        for (const auto& c : checks)
            if (!c.pass) return false;
        return !checks.empty();
    }

    void add(Check c) { checks.push_back(std::move(c)); }
    void add(const TestOutcome& out) { checks.push_back(check_from(out)); }

    json to_json() const {
        json arr = json::array();
        for (const auto& c : checks) arr.push_back(c.to_json());
        json j{{"schema", "covertime-report-v1"},
               {"experiment", experiment},
               {"network", network_info},
               {"params", params},
               {"checks", arr},
               {"pass", pass()},
               {"seed", seed},
               {"workers", workers},
               {"duration_ms", duration_ms},
               {"rng", {{"scheme", "splitmix64-derived mt19937_64 per trial"}}}};
        if (!network_name.empty()) j["network"]["name"] = network_name;
        if (!invocation.empty()) j["invocation"] = invocation;
        return j;
    }

    std::string to_csv() const {
        std::ostringstream out;
        out << "check,statistic,threshold,pass,vacuous,n1,n2,alpha,note\n";
        for (const auto& c : checks) {
            std::string note = c.note;
            for (char& ch : note)
                if (ch == ',' || ch == '\n') ch = ';';
            out << c.name << ',' << c.statistic << ',' << c.threshold << ','
                << (c.pass ? 1 : 0) << ',' << (c.vacuous ? 1 : 0) << ',' << c.n1 << ','
                << c.n2 << ',' << c.alpha << ',' << note << '\n';
        }
        return out.str();
    }
};

inline json describe_network(const ElectricalNetwork& net) {
    return json{{"vertices", net.vertex_count()},
                {"edges", net.edge_count()},
                {"v0", net.id_of(net.base_vertex())},
                {"c_tot", net.total_conductance()},
                {"vertex_ids", net.vertex_ids()}};
}

/// Writes text to `path` atomically (temp file + rename).
inline void write_file_atomic(const std::string& path, const std::string& text) {
    namespace fs = std::filesystem;
    fs::path target(path);
    fs::path tmp = target;
    tmp += ".tmp";
    {
        std::ofstream out(tmp, std::ios::binary | std::ios::trunc);
        if (!out) throw Error("cannot open '" + tmp.string() + "' for writing");
        out << text;
        if (!out.flush()) throw Error("failed writing '" + tmp.string() + "'");
    }
    fs::rename(tmp, target);
}

}  // namespace covertime
