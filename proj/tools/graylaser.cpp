#include <cstdio>
#include <iostream>
#include <string>
#include <vector>

#include <CLI11.hpp>

#include "graylaser/config.hpp"
#include "graylaser/runner.hpp"

using namespace graylaser;

namespace {

constexpr int exit_ok = 0;
constexpr int exit_config = 1;
constexpr int exit_numerical = 2;

void print_report(const RunReport& r)
{
    std::printf("%s -> %s (%.2f s)\n", r.experiment.c_str(), r.directory.c_str(), r.wall_seconds);
    for (const auto& c : r.checks) std::printf("  %s %s: %s\n", c.pass ? "PASS" : "FAIL", c.name.c_str(), c.detail.c_str());
    if (!r.ok) std::printf("  numerical failure: %s\n", r.error.c_str());
}

int cmd_run(const std::string& path)
{
    const auto r = run_experiment(load_config(path));
    print_report(r);
    return r.ok ? exit_ok : exit_numerical;
}

int cmd_sweep(const std::string& path, const std::string& key, const std::vector<std::string>& values, unsigned workers)
{
    const auto rep = run_sweep(load_config(path), key, values, workers);
    bool ok = true;
    for (const auto& r : rep.runs) {
        print_report(r);
        ok = ok && r.ok;
    }
    std::printf("summary: %s\n", rep.summary_path.c_str());
    return ok ? exit_ok : exit_numerical;
}

int cmd_validate(const std::string& path)
{
    const auto diags = validate_experiment(load_config(path));
    bool violation = false;
    for (const auto& d : diags) {
        const char* tag = d.severity == Severity::ok ? "ok" : d.severity == Severity::warning ? "warning" : "violation";
        std::printf("%-9s %s: %s\n", tag, d.name.c_str(), d.message.c_str());
        violation = violation || d.severity == Severity::violation;
    }
    return violation ? exit_config : exit_ok;
}

}  // namespace

int main(int argc, char** argv)
{
    CLI::App app{"Light-to-matter-wave transfer and gray-soliton simulations"};
    app.set_version_flag("--version", build_identifier());
    app.require_subcommand(1);

    std::string config_path, key, preset;
    std::vector<std::string> values;
    unsigned workers = 0;

    auto* run = app.add_subcommand("run", "Run one experiment from a config file");
    run->add_option("config", config_path, "Config file")->required();

    auto* sweep = app.add_subcommand("sweep", "Run one experiment per value of a numeric key");
    sweep->add_option("config", config_path, "Config file")->required();
    sweep->add_option("--key", key, "Numeric config key to vary")->required();
    sweep->add_option("--values", values, "Comma-separated values")->required()->delimiter(',');
    sweep->add_option("--workers", workers, "Parallel runs (0 = hardware threads)");

    auto* validate = app.add_subcommand("validate", "Static checks without running a simulation");
    validate->add_option("config", config_path, "Config file")->required();

    auto* pre = app.add_subcommand("preset", "Print a preset config to standard output");
    pre->add_option("name", preset, "Preset name")->required();

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        const int code = app.exit(e);
        return code == 0 ? exit_ok : exit_config;
    }

    try {
        if (*run) return cmd_run(config_path);
        if (*sweep) return cmd_sweep(config_path, key, values, workers);
        if (*validate) return cmd_validate(config_path);
        if (*pre) {
            std::cout << preset_text(preset);
            return exit_ok;
        }
    } catch (const ConfigError& e) {
        std::fprintf(stderr, "config error: %s\n", e.what());
        return exit_config;
    } catch (const NumericalError& e) {
        std::fprintf(stderr, "numerical failure: %s\n", e.what());
        return exit_numerical;
    } catch (const std::exception& e) {
        std::fprintf(stderr, "error: %s\n", e.what());
        return exit_numerical;
    }
    return exit_config;
}
