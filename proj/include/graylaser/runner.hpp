#pragma once

#include <string>
#include <utility>
#include <vector>

#include "graylaser/config.hpp"

namespace graylaser {

struct Check {
    std::string name;
    bool pass = false;
    std::string detail;
};

struct RunReport {
    std::string experiment;
    std::string directory;
    bool ok = true;             ///< false after a numerical failure
    std::string error;
    std::vector<std::pair<std::string, double>> scalars;
    std::vector<Check> checks;
    std::vector<std::string> files;
    double wall_seconds = 0.0;

    /// NaN if the scalar was not recorded.
    double scalar(const std::string& name) const;
    bool checks_pass() const;
};

/// Runs one experiment, writing CSV files, optional SVG plots and
/// manifest.txt into output.directory. Numerical failures are recorded in
/// the report and the manifest (files written so far are kept); ConfigError
/// propagates.
RunReport run_experiment(const ExperimentConfig& config);

enum class Severity { ok, warning, violation };

struct Diagnostic {
    Severity severity = Severity::ok;
    std::string name;
    std::string message;
};

/// Static checks without running a simulation: CFL and step-size bounds,
/// boundary mixing angles, the neglected-term ratio, parameter ranges and
/// rough memory and work estimates.
std::vector<Diagnostic> validate_experiment(const ExperimentConfig& config);

struct SweepReport {
    std::vector<RunReport> runs;
    std::string summary_path;
};

/// One run per value in output.directory/<key>=<value>, dispatched to up to
/// `workers` threads (0 = hardware concurrency), plus sweep_summary.csv.
/// Throws ConfigError unless `key` is a numeric key of the experiment.
SweepReport run_sweep(const ExperimentConfig& base, const std::string& key, const std::vector<std::string>& values,
                      unsigned workers = 0);

std::string build_identifier();

}  // namespace graylaser
