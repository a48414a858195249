#include "graylaser/config.hpp"

#include <algorithm>
#include <cctype>
#include <charconv>
#include <cmath>
#include <fstream>
#include <sstream>

namespace graylaser {

namespace {

using V = ValueType;

KeySpec num(std::string k, std::string d, std::string h) { return {std::move(k), V::number, std::move(d), std::move(h), {}}; }
KeySpec whole(std::string k, std::string d, std::string h) { return {std::move(k), V::integer, std::move(d), std::move(h), {}}; }
KeySpec flag(std::string k, std::string d, std::string h) { return {std::move(k), V::boolean, std::move(d), std::move(h), {}}; }
KeySpec pick(std::string k, std::string d, std::string h, std::vector<std::string> c)
{
    return {std::move(k), V::choice, std::move(d), std::move(h), std::move(c)};
}

std::vector<KeySpec> output_keys(const std::string& dir)
{
    return {{"output.directory", V::text, dir, "directory for CSV, SVG and manifest files", {}},
            flag("output.emit_svg", "true", "write SVG line plots next to the CSV files")};
}

std::vector<KeySpec> transfer_keys(const std::string& g2n, const std::string& c)
{
    return {num("transfer.g2n", g2n, "probe coupling g^2 n"),
            num("transfer.c", c, "light speed"),
            num("transfer.v0", "1", "atom velocity from the photon recoil"),
            num("transfer.vr", "0", "extra recoil velocity of the atoms"),
            num("transfer.k0", "100", "probe wavenumber"),
            num("transfer.density", "1", "ground-state density n"),
            num("transfer.U21", "0", "interspecies interaction"),
            num("transfer.U22", "1", "output-state self-interaction"),
            num("transfer.V2", "0", "constant trap potential of the output state"),
            num("transfer.L", "10", "length of the transfer region")};
}

std::vector<KeySpec> control_keys(const std::string& peak)
{
    return {num("control.omega_peak", peak, "control Rabi frequency at the input end"),
            num("control.ramp_divisor", "15", "ramp width is L / ramp_divisor"),
            num("control.steepness", "1", "divides the ramp width"),
            num("control.floor", "1e-3", "floor of the control profile relative to the peak")};
}

std::vector<KeySpec> caps_keys()
{
    return {num("caps.cos_in_min", "0.999", "required cos(theta) at the input end"),
            num("caps.cos_out_max", "0.05", "allowed cos(theta) at the output end"),
            pick("transfer.phase_form", "per_length", "phase integrals per unit length or per unit time",
                 {"per_length", "per_time"})};
}

std::vector<KeySpec> concat(std::initializer_list<std::vector<KeySpec>> parts)
{
    std::vector<KeySpec> out;
    for (const auto& p : parts) out.insert(out.end(), p.begin(), p.end());
    return out;
}

const std::map<std::string, std::vector<KeySpec>>& schemas()
{
    static const std::map<std::string, std::vector<KeySpec>> s = [] {
        std::map<std::string, std::vector<KeySpec>> m;
        m["chirp_analytic"] = concat({
            output_keys("graylaser_out/fig2b"),
            transfer_keys("100", "100"),
            control_keys("30"),
            caps_keys(),
            {num("transfer.z_out", "10", "output position, at least L"),
             num("pulse.E0", "1", "input peak amplitude"),
             num("pulse.T0", "1", "input duration"),
             num("chirp.T_max", "3", "chirp.csv covers |T / T0| <= T_max"),
             whole("chirp.n_samples", "601", "rows of chirp.csv"),
             whole("grid.n_points", "8192", "time samples of the numeric check"),
             num("grid.length", "16", "time window of the numeric check, in units of T0")},
        });
        m["transfer"] = concat({
            output_keys("graylaser_out/transfer"),
            transfer_keys("100", "100"),
            control_keys("30"),
            caps_keys(),
            {num("transfer.z_out", "10", "output position, at least L"),
             num("pulse.E0", "1", "input peak amplitude"),
             num("pulse.T0", "1", "input duration"),
             whole("pulse.m", "1", "super-Gaussian order"),
             whole("grid.n_points", "4096", "time samples"),
             num("grid.length", "16", "time window centred on the pulse")},
        });
        m["three_level_compare"] = concat({
            output_keys("graylaser_out/three_level_compare"),
            transfer_keys("1e4", "10"),
            control_keys("1000"),
            {num("pulse.E0", "0.1", "input peak amplitude"),
             num("pulse.T0", "1", "input duration"),
             whole("pulse.m", "1", "super-Gaussian order"),
             num("threelevel.gamma", "0", "excited-state decay rate"),
             num("threelevel.eps12", "0", "two-photon detuning"),
             num("threelevel.eps13", "0", "one-photon detuning"),
             flag("threelevel.kinetic", "false", "include atomic dispersion"),
             whole("grid.n_points", "4096", "spatial samples"),
             num("grid.z_right", "150", "right end of the domain"),
             num("compare.cfl", "0.8", "dt as a fraction of spacing / c"),
             whole("compare.refine", "1", "divides dt")},
        });
        m["soliton_single"] = concat({
            output_keys("graylaser_out/soliton_single"),
            {whole("output.snapshot_stride", "50", "steps between field snapshots"),
             num("nlse.g22", "1", "self-interaction"),
             num("nlse.k_bg", "0", "background wavenumber; k L / 2 pi should be an integer"),
             num("soliton.eta", "0.5", "grayness in (0, 1]"),
             num("soliton.bg_amp", "1", "background amplitude"),
             whole("grid.n_points", "512", "spatial samples"),
             num("grid.length", "128", "domain length, centred on 0"),
             num("time.dt", "0.02", "time step"),
             whole("time.n_steps", "750", "number of steps"),
             num("tracking.threshold", "0.95", "dips count below threshold * background^2")},
        });
        m["soliton_split_fig3a"] = concat({
            output_keys("graylaser_out/fig3a"),
            {whole("output.snapshot_stride", "100", "steps between field snapshots"),
             num("nlse.g22", "1", "self-interaction"),
             num("soliton.eta", "0.5", "grayness of each soliton"),
             pick("background.kind", "gaussian_peak_decay", "imposed background law",
                  {"constant", "gaussian_peak_decay"}),
             num("background.a0", "1", "initial background amplitude"),
             num("background.t_decay", "20", "decay time of the peak-decay law"),
             whole("grid.n_points", "1024", "spatial samples"),
             num("grid.length", "200", "domain length, centred on 0"),
             num("time.dt", "0.01", "time step"),
             whole("time.n_steps", "6000", "number of steps"),
             num("tracking.threshold", "0.9", "dips count below threshold * background^2"),
             num("tracking.separation_widths", "3", "split once dips are this many FWHM apart")},
        });
        m["soliton_split_fig3b"] = concat({
            output_keys("graylaser_out/fig3b"),
            {whole("output.snapshot_stride", "200", "steps between field snapshots"),
             num("nlse.g22", "1", "self-interaction"),
             num("soliton.eta", "0.5", "grayness of each soliton at the start"),
             num("background.a0", "1", "peak of the Gaussian background"),
             num("background.width", "40", "width W of the Gaussian background"),
             whole("grid.n_points", "2048", "spatial samples"),
             num("grid.length", "320", "domain length, centred on 0"),
             num("time.dt", "0.01", "time step"),
             whole("time.n_steps", "4600", "number of steps"),
             num("tracking.threshold", "0.95", "dips count below threshold * background^2"),
             num("tracking.separation_widths", "3", "split once dips are this many FWHM apart"),
             num("tracking.min_background", "0.25", "ignore dips where the background is below this fraction of a0"),
             num("phase.dtau", "0.01", "scaled time step of the phase-angle equation"),
             num("depletion.d", "0", "localized depletion strength in [0, 0.5)")},
        });
        m["phase_angle"] = concat({
            output_keys("graylaser_out/phase_angle"),
            {num("phase.alpha0", "1", "initial phase angle"),
             num("phase.xi0", "1", "initial scaled position"),
             num("phase.dtau", "0.05", "scaled time step"),
             whole("phase.n_steps", "200", "number of steps"),
             whole("phase.direction", "1", "+1 right mover, -1 left mover"),
             whole("phase.window_points", "2048", "quadrature points of the soliton-frame integral"),
             num("phase.window_half_width", "20", "half width of the soliton-frame window"),
             pick("background.kind", "gaussian", "background in scaled units", {"uniform", "gaussian"}),
             num("background.width", "10", "width of the Gaussian background in scaled units"),
             num("depletion.d", "0", "localized depletion strength in [0, 0.5)")},
        });
        return m;
    }();
    return s;
}

const std::map<std::string, std::string>& preset_map()
{
    static const std::map<std::string, std::string> m = {
        {"fig2b", "chirp_analytic"},
        {"transfer", "transfer"},
        {"three_level_compare", "three_level_compare"},
        {"soliton_single", "soliton_single"},
        {"fig3a", "soliton_split_fig3a"},
        {"fig3b", "soliton_split_fig3b"},
        {"phase_angle", "phase_angle"},
    };
    return m;
}

std::string trim(std::string_view s)
{
    const auto b = s.find_first_not_of(" \t\r");
    if (b == std::string_view::npos) return {};
    const auto e = s.find_last_not_of(" \t\r");
    return std::string(s.substr(b, e - b + 1));
}

bool valid_key(const std::string& k)
{
    return !k.empty() && std::all_of(k.begin(), k.end(), [](char ch) {
        return std::isalnum(static_cast<unsigned char>(ch)) || ch == '_' || ch == '.';
    });
}

// Empty string when the value is acceptable, otherwise the reason.
std::string check_value(const KeySpec& spec, const std::string& value)
{
    switch (spec.type) {
    case V::number: {
        double x = 0.0;
        const auto [p, ec] = std::from_chars(value.data(), value.data() + value.size(), x);
        if (ec != std::errc{} || p != value.data() + value.size()) return "expected a number";
        if (!std::isfinite(x)) return "expected a finite number";
        return {};
    }
    case V::integer: {
        long x = 0;
        const auto [p, ec] = std::from_chars(value.data(), value.data() + value.size(), x);
        if (ec != std::errc{} || p != value.data() + value.size()) return "expected an integer";
        return {};
    }
    case V::boolean:
        return value == "true" || value == "false" ? std::string{} : "expected true or false";
    case V::choice: {
        if (std::find(spec.choices.begin(), spec.choices.end(), value) != spec.choices.end()) return {};
        std::string msg = "expected one of";
        for (const auto& c : spec.choices) msg += " " + c;
        return msg;
    }
    case V::text:
        return value.empty() ? "expected a non-empty value" : std::string{};
    }
    return {};
}

}  // namespace

const std::vector<KeySpec>& experiment_schema(const std::string& experiment)
{
    const auto& s = schemas();
    const auto it = s.find(experiment);
    if (it == s.end()) throw ConfigError("unknown experiment '" + experiment + "'");
    return it->second;
}

const std::vector<std::string>& experiment_names()
{
    static const std::vector<std::string> names = [] {
        std::vector<std::string> v;
        for (const auto& [k, _] : schemas()) v.push_back(k);
        return v;
    }();
    return names;
}

double parse_number(const std::string& s, const std::string& what)
{
    double x = 0.0;
    const auto [p, ec] = std::from_chars(s.data(), s.data() + s.size(), x);
    if (ec != std::errc{} || p != s.data() + s.size() || !std::isfinite(x))
        throw ConfigError(what + ": '" + s + "' is not a number");
    return x;
}

const KeySpec& ExperimentConfig::spec(const std::string& key) const
{
    for (const auto& k : experiment_schema(experiment_))
        if (k.key == key) return k;
    throw ConfigError("unknown key '" + key + "' for experiment '" + experiment_ + "'");
}

const std::string& ExperimentConfig::text(const std::string& key) const
{
    for (const auto& [k, v] : entries_)
        if (k == key) return v;
    throw ConfigError("unknown key '" + key + "' for experiment '" + experiment_ + "'");
}

double ExperimentConfig::number(const std::string& key) const { return parse_number(text(key), key); }

long ExperimentConfig::integer(const std::string& key) const
{
    const auto& s = text(key);
    long x = 0;
    const auto [p, ec] = std::from_chars(s.data(), s.data() + s.size(), x);
    if (ec != std::errc{} || p != s.data() + s.size()) throw ConfigError(key + ": '" + s + "' is not an integer");
    return x;
}

std::size_t ExperimentConfig::count(const std::string& key) const
{
    const long x = integer(key);
    if (x < 0) throw ConfigError(key + " must not be negative");
    return static_cast<std::size_t>(x);
}

bool ExperimentConfig::flag(const std::string& key) const { return text(key) == "true"; }

void ExperimentConfig::set(const std::string& key, const std::string& value)
{
    const auto& ks = spec(key);
    const auto why = check_value(ks, value);
    if (!why.empty()) throw ConfigError("key '" + key + "': " + why + ", got '" + value + "'");
    for (auto& [k, v] : entries_)
        if (k == key) v = value;
}

std::string ExperimentConfig::render() const
{
    std::ostringstream out;
    out << "experiment = " << experiment_ << "\n";
    for (const auto& [k, v] : entries_) out << k << " = " << v << "\n";
    return out.str();
}

ExperimentConfig resolve(const std::string& experiment, const std::map<std::string, std::pair<std::string, int>>& given)
{
    ExperimentConfig cfg;
    cfg.experiment_ = experiment;
    const auto& schema = experiment_schema(experiment);
    for (const auto& [key, vl] : given) {
        const auto it = std::find_if(schema.begin(), schema.end(), [&](const KeySpec& k) { return k.key == key; });
        if (it == schema.end()) {
            throw ConfigError("line " + std::to_string(vl.second) + ": unknown key '" + key + "' for experiment '" +
                              experiment + "'");
        }
        const auto why = check_value(*it, vl.first);
        if (!why.empty()) {
            throw ConfigError("line " + std::to_string(vl.second) + ": key '" + key + "': " + why + ", got '" +
                              vl.first + "'");
        }
    }
    for (const auto& k : schema) {
        const auto it = given.find(k.key);
        cfg.entries_.emplace_back(k.key, it == given.end() ? k.default_value : it->second.first);
    }
    return cfg;
}

ExperimentConfig parse_config(std::string_view text, const std::string& source)
{
    std::map<std::string, std::pair<std::string, int>> given;
    std::string experiment;
    int experiment_line = 0;
    std::istringstream in{std::string(text)};
    std::string line;
    int lineno = 0;
    auto fail = [&](const std::string& msg) {
        throw ConfigError(source + ": line " + std::to_string(lineno) + ": " + msg);
    };
    while (std::getline(in, line)) {
        ++lineno;
        const auto hash = line.find('#');
        const std::string body = trim(hash == std::string::npos ? line : line.substr(0, hash));
        if (body.empty()) continue;
        const auto eq = body.find('=');
        if (eq == std::string::npos) fail("expected 'key = value'");
        const std::string key = trim(body.substr(0, eq));
        const std::string value = trim(body.substr(eq + 1));
        if (!valid_key(key)) fail("malformed key '" + key + "'");
        if (value.empty()) fail("missing value for '" + key + "'");
        if (key == "experiment") {
            if (!experiment.empty()) fail("duplicate key 'experiment'");
            experiment = value;
            experiment_line = lineno;
            continue;
        }
        if (given.count(key)) fail("duplicate key '" + key + "'");
        given[key] = {value, lineno};
    }
    if (experiment.empty()) {
        if (given.empty()) throw ConfigError(source + ": empty config");
        throw ConfigError(source + ": missing required key 'experiment'");
    }
    if (!schemas().count(experiment)) {
        std::string msg = source + ": line " + std::to_string(experiment_line) + ": unknown experiment '" + experiment +
                          "'; expected one of";
        for (const auto& n : experiment_names()) msg += " " + n;
        throw ConfigError(msg);
    }
    try {
        return resolve(experiment, given);
    } catch (const ConfigError& e) {
        throw ConfigError(source + ": " + e.what());
    }
}

ExperimentConfig load_config(const std::string& path)
{
    std::ifstream f(path);
    if (!f) throw ConfigError("cannot read config file '" + path + "'");
    std::ostringstream ss;
    ss << f.rdbuf();
    return parse_config(ss.str(), path);
}

const std::vector<std::string>& preset_names()
{
    static const std::vector<std::string> names = [] {
        std::vector<std::string> v;
        for (const auto& [k, _] : preset_map()) v.push_back(k);
        return v;
    }();
    return names;
}

std::string preset_text(const std::string& name)
{
    const auto it = preset_map().find(name);
    if (it == preset_map().end()) {
        std::string msg = "unknown preset '" + name + "'; expected one of";
        for (const auto& n : preset_names()) msg += " " + n;
        throw ConfigError(msg);
    }
    std::ostringstream out;
    out << "# graylaser preset " << name << "\n";
    out << "experiment = " << it->second << "\n";
    for (const auto& k : experiment_schema(it->second)) {
        out << "\n# " << k.help;
        if (k.type == ValueType::choice) {
            out << " (";
            for (std::size_t i = 0; i < k.choices.size(); ++i) out << (i ? ", " : "") << k.choices[i];
            out << ")";
        }
        out << "\n" << k.key << " = " << k.default_value << "\n";
    }
    return out.str();
}

}  // namespace graylaser
