#include <cstdio>
#include <exception>
#include <fstream>
#include <string>
#include <vector>

#include <CLI11.hpp>
#include <json.hpp>

#include "mumetrics/scenarios.hpp"

namespace {

using mumetrics::Report;
using mumetrics::ScenarioConfig;
using mumetrics::ScenarioEntry;

struct RunOptions {
    std::string config_path;
    std::string scenario;
    int dimension = -1;
    long long seed = -1;
    std::vector<std::string> params;
    std::string out_path;
    std::string format;
};

// Layering: built-in defaults, then the flat JSON config file, then CLI flags.
ScenarioConfig resolve_config(const RunOptions& opt, std::string& format) {
    ScenarioConfig cfg;
    cfg.dimension = 0;
    format = "";

    if (!opt.config_path.empty()) {
        std::ifstream in(opt.config_path);
        if (!in) throw std::runtime_error("cannot open config file '" + opt.config_path + "'");
        nlohmann::json doc = nlohmann::json::parse(in);
        if (!doc.is_object()) throw std::runtime_error("config file must hold a flat JSON object");
        for (const auto& [key, value] : doc.items()) {
            if (key == "scenario") {
                cfg.name = value.get<std::string>();
            } else if (key == "dimension") {
                cfg.dimension = value.get<int>();
            } else if (key == "seed") {
                cfg.seed = value.get<unsigned long long>();
            } else if (key == "out") {
                cfg.output_path = value.get<std::string>();
            } else if (key == "format") {
                format = value.get<std::string>();
            } else if (value.is_number()) {
                cfg.parameters[key] = value.get<double>();
            } else {
                throw std::runtime_error("config key '" + key + "' must be a number");
            }
        }
    }

    if (!opt.scenario.empty()) cfg.name = opt.scenario;
    if (opt.dimension >= 0) cfg.dimension = opt.dimension;
    if (opt.seed >= 0) cfg.seed = static_cast<unsigned long long>(opt.seed);
    if (!opt.out_path.empty()) cfg.output_path = opt.out_path;
    if (!opt.format.empty()) format = opt.format;
    for (const std::string& kv : opt.params) {
        const size_t eq = kv.find('=');
        if (eq == std::string::npos || eq == 0)
            throw std::runtime_error("--param expects key=value, got '" + kv + "'");
        cfg.parameters[kv.substr(0, eq)] = std::stod(kv.substr(eq + 1));
    }

    if (cfg.name.empty()) throw std::runtime_error("no scenario given (--scenario or config file)");
    if (cfg.output_path.empty()) throw std::runtime_error("no output path given (--out or config file)");
    if (format.empty()) format = "json";
    if (cfg.dimension == 0) {
        for (const ScenarioEntry& entry : mumetrics::scenario_registry())
            if (cfg.name == entry.name) cfg.dimension = entry.default_dimension;
        if (cfg.dimension == 0) cfg.dimension = 4;
    }
    return cfg;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"side-by-side measurement error and disturbance metrics"};
    app.require_subcommand(1);

    RunOptions opt;
    CLI::App* run = app.add_subcommand("run", "run one scenario and write its report");
    run->add_option("--config", opt.config_path, "flat JSON config file; flags override its values");
    run->add_option("--scenario", opt.scenario, "registered scenario name");
    run->add_option("--dimension", opt.dimension, "system dimension in [2, 64]");
    run->add_option("--seed", opt.seed, "random seed for seeded scenarios");
    run->add_option("--param", opt.params, "extra scenario parameter key=value (repeatable)");
    run->add_option("--out", opt.out_path, "output file path");
    run->add_option("--format", opt.format, "json or csv");

    CLI::App* list = app.add_subcommand("list", "print registered scenarios");

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        const int code = app.exit(e);
        return code == 0 ? 0 : 1;
    }

    if (list->parsed()) {
        for (const ScenarioEntry& entry : mumetrics::scenario_registry())
            std::printf("%-24s %s\n", entry.name, entry.description);
        return 0;
    }

    try {
        std::string format;
        const ScenarioConfig cfg = resolve_config(opt, format);
        const Report report = mumetrics::run_scenario(cfg);
        mumetrics::emit_report(report, format, cfg.output_path);
        if (!report.all_verdicts_pass()) {
            for (const auto& [key, ok] : report.verdicts)
                if (!ok) std::fprintf(stderr, "verdict failed: %s\n", key.c_str());
            return 2;
        }
        return 0;
    } catch (const std::exception& e) {
        std::fprintf(stderr, "mu-metrics: %s\n", e.what());
        return 1;
    }
}
