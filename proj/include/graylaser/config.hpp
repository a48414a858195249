#pragma once

#include <map>
#include <string>
#include <string_view>
#include <vector>

#include "graylaser/errors.hpp"

namespace graylaser {

enum class ValueType { number, integer, boolean, choice, text };

struct KeySpec {
    std::string key;
    ValueType type;
    std::string default_value;
    std::string help;
    std::vector<std::string> choices;  ///< for ValueType::choice
};

/// Keys accepted for an experiment, in output order. Throws ConfigError for
/// an unknown experiment.
const std::vector<KeySpec>& experiment_schema(const std::string& experiment);
const std::vector<std::string>& experiment_names();

// Fully resolved configuration: every schema key has a value.
class ExperimentConfig {
public:
    const std::string& experiment() const { return experiment_; }
    const std::vector<std::pair<std::string, std::string>>& entries() const { return entries_; }

    const std::string& text(const std::string& key) const;
    double number(const std::string& key) const;
    std::size_t count(const std::string& key) const;
    long integer(const std::string& key) const;
    bool flag(const std::string& key) const;

    /// Replaces one value after type-checking it against the schema.
    void set(const std::string& key, const std::string& value);
    const KeySpec& spec(const std::string& key) const;

    /// key = value lines, parseable by parse_config.
    std::string render() const;

private:
    friend ExperimentConfig resolve(const std::string&, const std::map<std::string, std::pair<std::string, int>>&);
    std::string experiment_;
    std::vector<std::pair<std::string, std::string>> entries_;
};

/// Parses `key = value` lines with '#' comments. Unknown keys, duplicates,
/// malformed lines, bad values and a missing `experiment` are ConfigErrors
/// that name the line.
ExperimentConfig parse_config(std::string_view text, const std::string& source = "<config>");
ExperimentConfig load_config(const std::string& path);

const std::vector<std::string>& preset_names();
/// Commented config text for a preset; throws ConfigError for unknown names.
std::string preset_text(const std::string& name);

/// Strict numeric parse (whole string); throws ConfigError naming `what`.
double parse_number(const std::string& s, const std::string& what);

}  // namespace graylaser
