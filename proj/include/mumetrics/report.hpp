#pragma once

#include <cstdio>
#include <fstream>
#include <map>
#include <stdexcept>
#include <string>
#include <vector>

namespace mumetrics {

struct ScenarioConfig {
    std::string name;
    int dimension = 4;
    std::map<std::string, double> parameters;
    unsigned long long seed = 1;
    std::string output_path;
};

struct SweepRow {
    double t = 0.0;
    double delta_a = 0.0;
    double delta_b = 0.0;
    double sum_sq = 0.0;
    double ozawa_sum = 0.0;
    double bound = 0.0;
    bool saturated = false;
};

// Scenario outcome: paired metric families plus named pass/fail verdicts.
// The sweep table is only populated by sweep scenarios and feeds the CSV format.
struct Report {
    std::string scenario;
    ScenarioConfig config;
    std::map<std::string, double> metrics;
    std::map<std::string, bool> verdicts;
    std::map<std::string, std::string> provenance;
    std::vector<SweepRow> sweep;

    bool all_verdicts_pass() const {
        for (const auto& [key, ok] : verdicts)
            if (!ok) return false;
        return true;
    }
};

namespace detail {

// 17 significant digits round-trips every double, keeping reports byte-stable.
inline std::string number_repr(double v) {
    char buf[64];
    std::snprintf(buf, sizeof(buf), "%.17g", v);
    return buf;
}

inline std::string json_escape(const std::string& s) {
    std::string out;
    for (char ch : s) {
        if (ch == '"' || ch == '\\') {
            out += '\\';
            out += ch;
        } else if (static_cast<unsigned char>(ch) < 0x20) {
            char buf[8];
            std::snprintf(buf, sizeof(buf), "\\u%04x", ch);
            out += buf;
        } else {
            out += ch;
        }
    }
    return out;
}

}  // namespace detail

// Canonical JSON: fixed section order, map keys already sorted, numbers at
// full precision. Two runs of the same config produce identical bytes.
inline std::string report_json(const Report& r) {
    std::string out = "{\n";
    out += "  \"scenario\": \"" + detail::json_escape(r.scenario) + "\",\n";
    out += "  \"config\": {\n";
    out += "    \"name\": \"" + detail::json_escape(r.config.name) + "\",\n";
    out += "    \"dimension\": " + std::to_string(r.config.dimension) + ",\n";
    out += "    \"seed\": " + std::to_string(r.config.seed) + ",\n";
    out += "    \"parameters\": {";
    bool first = true;
    for (const auto& [key, value] : r.config.parameters) {
        out += first ? "" : ", ";
        out += "\"" + detail::json_escape(key) + "\": " + detail::number_repr(value);
        first = false;
    }
    out += "}\n  },\n";
    out += "  \"metrics\": {\n";
    first = true;
    for (const auto& [key, value] : r.metrics) {
        if (!first) out += ",\n";
        out += "    \"" + detail::json_escape(key) + "\": " + detail::number_repr(value);
        first = false;
    }
    out += "\n  },\n  \"verdicts\": {\n";
    first = true;
    for (const auto& [key, value] : r.verdicts) {
        if (!first) out += ",\n";
        out += "    \"" + detail::json_escape(key) + "\": " + (value ? "true" : "false");
        first = false;
    }
    out += "\n  },\n  \"provenance\": {\n";
    first = true;
    for (const auto& [key, value] : r.provenance) {
        if (!first) out += ",\n";
        out += "    \"" + detail::json_escape(key) + "\": \"" + detail::json_escape(value) + "\"";
        first = false;
    }
    out += "\n  }\n}\n";
    return out;
}

// Sweep scenarios emit their table; everything else degrades to key,value rows.
inline std::string report_csv(const Report& r) {
    std::string out;
    if (!r.sweep.empty()) {
        out = "t,delta_a,delta_b,sum_sq,ozawa_sum,bound,saturated\n";
        for (const SweepRow& row : r.sweep) {
            out += detail::number_repr(row.t) + "," + detail::number_repr(row.delta_a) + "," +
                   detail::number_repr(row.delta_b) + "," + detail::number_repr(row.sum_sq) + "," +
                   detail::number_repr(row.ozawa_sum) + "," + detail::number_repr(row.bound) + "," +
                   (row.saturated ? "1" : "0") + "\n";
        }
        return out;
    }
    out = "key,value\n";
    for (const auto& [key, value] : r.metrics) out += key + "," + detail::number_repr(value) + "\n";
    for (const auto& [key, value] : r.verdicts) out += key + std::string(",") + (value ? "1" : "0") + "\n";
    return out;
}

inline void emit_report(const Report& r, const std::string& format, const std::string& path) {
    std::string payload;
    if (format == "json") {
        payload = report_json(r);
    } else if (format == "csv") {
        payload = report_csv(r);
    } else {
        throw std::invalid_argument("emit_report: unknown format '" + format + "'");
    }
    std::ofstream out(path, std::ios::binary);
    if (!out) throw std::runtime_error("emit_report: cannot open '" + path + "'");
    out.write(payload.data(), std::streamsize(payload.size()));
    if (!out) throw std::runtime_error("emit_report: write failed for '" + path + "'");
}

}  // namespace mumetrics
