#include "graylaser/runner.hpp"

#include <algorithm>
#include <chrono>
#include <cstdio>
#include <cmath>
#include <filesystem>
#include <fstream>
#include <future>
#include <numbers>
#include <sstream>
#include <thread>

#include "graylaser/experiments.hpp"
#include "graylaser/output.hpp"
#include "graylaser/threelevel.hpp"
#include "graylaser/transfer.hpp"

#ifndef GRAYLASER_VERSION
#define GRAYLASER_VERSION "dev"
#endif
#ifndef GRAYLASER_BUILD_TYPE
#define GRAYLASER_BUILD_TYPE "unknown"
#endif

namespace fs = std::filesystem;

namespace graylaser {

namespace {

// Collects files and results for one run directory.
class RunContext {
public:
    RunContext(const ExperimentConfig& cfg, RunReport& report)
        : dir_(cfg.text("output.directory")), svg_(cfg.flag("output.emit_svg")), report_(report)
    {
        fs::create_directories(dir_);
    }

    void csv(const std::string& name, const std::vector<std::string>& header,
             const std::vector<std::vector<double>>& rows)
    {
        write_csv((dir_ / name).string(), header, rows);
        report_.files.push_back(name);
    }

    void svg(const std::string& name, const std::string& title, const std::string& xl, const std::string& yl,
             const std::vector<PlotSeries>& series)
    {
        if (!svg_) return;
        write_svg((dir_ / name).string(), title, xl, yl, series);
        report_.files.push_back(name);
    }

    void scalar(const std::string& name, double v) { report_.scalars.emplace_back(name, v); }

    void check(const std::string& name, bool pass, const std::string& detail)
    {
        report_.checks.push_back({name, pass, detail});
    }

private:
    fs::path dir_;
    bool svg_;
    RunReport& report_;
};

// Human-readable number for diagnostics; CSV and scalars keep full precision.
std::string brief(double v)
{
    char buf[32];
    std::snprintf(buf, sizeof buf, "%.6g", v);
    return buf;
}

std::string describe(const std::string& what, double value, const std::string& op, double limit)
{
    return what + " = " + brief(value) + " " + op + " " + brief(limit);
}

TransferParams transfer_params(const ExperimentConfig& c)
{
    TransferParams p;
    p.g2n = c.number("transfer.g2n");
    p.c = c.number("transfer.c");
    p.v0 = c.number("transfer.v0");
    p.vr = c.number("transfer.vr");
    p.k0 = c.number("transfer.k0");
    p.density = c.number("transfer.density");
    p.U21 = c.number("transfer.U21");
    p.U22 = c.number("transfer.U22");
    const double v2 = c.number("transfer.V2");
    p.V2 = [v2](double) { return v2; };
    p.L = c.number("transfer.L");
    return p;
}

double ramp_width(const ExperimentConfig& c)
{
    const double divisor = c.number("control.ramp_divisor"), steep = c.number("control.steepness");
    if (!(divisor > 0.0) || !(steep > 0.0)) throw ConfigError("control.ramp_divisor and control.steepness must be positive");
    return c.number("transfer.L") / (divisor * steep);
}

ControlProfile control_profile(const ExperimentConfig& c)
{
    const double floor = c.number("control.floor");
    if (!(floor > 0.0 && floor < 1.0)) throw ConfigError("control.floor must lie in (0, 1)");
    if (!(c.number("control.omega_peak") > 0.0)) throw ConfigError("control.omega_peak must be positive");
    return ControlProfile::tanh_ramp(c.number("control.omega_peak"), 0.5 * c.number("transfer.L"), ramp_width(c), floor);
}

BoundaryCaps boundary_caps(const ExperimentConfig& c)
{
    BoundaryCaps caps;
    caps.cos_theta_in_min = c.number("caps.cos_in_min");
    caps.cos_theta_out_max = c.number("caps.cos_out_max");
    caps.phase_form = c.text("transfer.phase_form") == "per_time" ? PhaseForm::per_time : PhaseForm::per_length;
    return caps;
}

int super_gaussian_order(const ExperimentConfig& c)
{
    const long m = c.integer("pulse.m");
    if (m < 1 || m > 20) throw ConfigError("pulse.m must lie in [1, 20]");
    return static_cast<int>(m);
}

Grid1D checked_grid(std::size_t n, double length, double origin)
{
    try {
        return make_grid(n, length, origin);
    } catch (const std::invalid_argument& e) {
        throw ConfigError(std::string("grid: ") + e.what());
    }
}

NlseParams nlse_params(const ExperimentConfig& c)
{
    NlseParams p;
    p.g22 = c.number("nlse.g22");
    p.validate_gray();
    return p;
}

void check_eta(double eta)
{
    if (!(eta > 0.0 && eta <= 1.0)) throw ConfigError("soliton.eta must lie in (0, 1]");
}

DepletionProfile depletion_from(const ExperimentConfig& c)
{
    const double d = c.number("depletion.d");
    if (!(d >= 0.0 && d < 0.5)) throw ConfigError("depletion.d must lie in [0, 0.5)");
    return d > 0.0 ? localized_depletion(d) : DepletionProfile{};
}

void write_snapshots(RunContext& ctx, const std::vector<Snapshot>& snaps)
{
    for (const auto& s : snaps) {
        std::vector<std::vector<double>> rows;
        rows.reserve(s.field.size());
        for (std::size_t j = 0; j < s.field.size(); ++j) {
            const cplx v = s.field[j];
            rows.push_back({s.field.grid.coord(j), v.real(), v.imag(), std::norm(v)});
        }
        ctx.csv("field_" + std::to_string(s.step) + ".csv", {"z", "re", "im", "density"}, rows);
    }
}

void write_minima(RunContext& ctx, const std::vector<MinimaRecord>& minima)
{
    std::vector<std::vector<double>> rows;
    for (const auto& m : minima)
        for (std::size_t i = 0; i < m.dips.size(); ++i)
            rows.push_back({m.t, static_cast<double>(i), m.dips[i].position, m.dips[i].depth_fraction, m.dips[i].fwhm});
    ctx.csv("minima.csv", {"t", "minimum_index", "position", "depth_fraction", "fwhm"}, rows);
}

PlotSeries density_series(const Snapshot& s)
{
    PlotSeries p{"t = " + brief(s.t), {}, {}};
    for (std::size_t j = 0; j < s.field.size(); ++j) {
        p.x.push_back(s.field.grid.coord(j));
        p.y.push_back(std::norm(s.field[j]));
    }
    return p;
}

void density_plot(RunContext& ctx, const std::vector<Snapshot>& snaps, const std::string& title)
{
    if (snaps.empty()) return;
    std::vector<PlotSeries> series{density_series(snaps.front())};
    if (snaps.size() > 2) series.push_back(density_series(snaps[snaps.size() / 2]));
    if (snaps.size() > 1) series.push_back(density_series(snaps.back()));
    ctx.svg("density.svg", title, "z", "density", series);
}

// ---------------------------------------------------------------------------

void run_chirp(const ExperimentConfig& c, RunContext& ctx)
{
    const auto tp = transfer_params(c);
    tp.validate();
    const auto prof = control_profile(c);
    const auto caps = boundary_caps(c);
    const double z_out = c.number("transfer.z_out"), E0 = c.number("pulse.E0"), T0 = c.number("pulse.T0");
    if (!(T0 > 0.0)) throw ConfigError("pulse.T0 must be positive");
    const TransferIntegrals ints(prof, tp, z_out, 4096, caps.phase_form);

    const double tmax = c.number("chirp.T_max");
    const std::size_t ns = c.count("chirp.n_samples");
    if (ns < 2 || !(tmax > 0.0)) throw ConfigError("chirp.n_samples must be >= 2 and chirp.T_max positive");
    std::vector<std::vector<double>> rows;
    PlotSeries s1{"m = 1", {}, {}}, s3{"m = 3", {}, {}};
    for (std::size_t i = 0; i < ns; ++i) {
        const double u = -tmax + 2.0 * tmax * static_cast<double>(i) / static_cast<double>(ns - 1);
        const double a1 = chirp_analytic(u, {1, 1.0, 1.0}), a3 = chirp_analytic(u, {3, 1.0, 1.0});
        rows.push_back({u, a1, a3});
        s1.x.push_back(u), s1.y.push_back(a1);
        s3.x.push_back(u), s3.y.push_back(a3);
    }
    ctx.csv("chirp.csv", {"T_over_T0", "chirp_over_Lambda0_m1", "chirp_over_Lambda0_m3"}, rows);
    ctx.svg("chirp.svg", "Frequency chirp of the output", "T / T0", "chirp / Lambda0", {s1, s3});

    const double len = c.number("grid.length") * T0;
    const auto grid = checked_grid(c.count("grid.n_points"), len, -0.5 * len);
    std::vector<std::vector<double>> num_rows(grid.n_points());
    for (int m : {1, 3}) {
        const PulseShape pulse{E0, T0, m, 0.0};
        const auto in = sample(grid, [&](double T) { return pulse(T); });
        const auto chirp = chirp_numeric(transfer_map(in, tp, prof, z_out, caps));
        const ChirpSpec spec{m, T0, chirp_normalization(ints, z_out, pulse)};
        double peak = 0.0, scale = 0.0, err = 0.0, integral = 0.0;
        for (std::size_t j = 0; j < in.size(); ++j) {
            peak = std::max(peak, std::norm(in[j]));
            scale = std::max(scale, std::abs(chirp_analytic(grid.coord(j), spec)));
        }
        for (std::size_t j = 0; j < in.size(); ++j) {
            const double a = chirp_analytic(grid.coord(j), spec);
            integral += chirp[j] * grid.spacing();
            if (m == 1) num_rows[j] = {grid.coord(j) / T0, a, chirp[j]};
            else num_rows[j].insert(num_rows[j].end(), {a, chirp[j]});
            if (std::norm(in[j]) > 1e-6 * peak) err = std::max(err, std::abs(chirp[j] - a));
        }
        const std::string tag = "m" + std::to_string(m);
        ctx.scalar("Lambda0_" + tag, spec.Lambda0);
        ctx.scalar("numeric_chirp_error_" + tag, err / scale);
        ctx.scalar("chirp_integral_" + tag, integral / scale);
        ctx.check("numeric_chirp_" + tag, err <= 1e-6 * scale, describe("max error / peak", err / scale, "<=", 1e-6));
        ctx.check("chirp_integral_" + tag, std::abs(integral) <= 1e-9 * scale,
                  describe("|integral| / peak", std::abs(integral) / scale, "<=", 1e-9));
    }
    ctx.csv("chirp_numeric.csv",
            {"T_over_T0", "analytic_m1", "numeric_m1", "analytic_m3", "numeric_m3"}, num_rows);
}

void run_transfer_map(const ExperimentConfig& c, RunContext& ctx)
{
    const auto tp = transfer_params(c);
    tp.validate();
    const auto prof = control_profile(c);
    const auto caps = boundary_caps(c);
    const double z_out = c.number("transfer.z_out");
    const PulseShape pulse{c.number("pulse.E0"), c.number("pulse.T0"), super_gaussian_order(c), 0.0};
    if (!(pulse.T0 > 0.0)) throw ConfigError("pulse.T0 must be positive");
    const double len = c.number("grid.length") * pulse.T0;
    const auto grid = checked_grid(c.count("grid.n_points"), len, -0.5 * len);
    const auto in = sample(grid, [&](double T) { return pulse(T); });
    const auto out = transfer_map(in, tp, prof, z_out, caps);
    const TransferIntegrals ints(prof, tp, z_out, 4096, caps.phase_form);

    const double ratio = out.norm2() / in.norm2(), expect = tp.c / tp.v();
    double shape = 0.0;
    for (std::size_t j = 0; j < in.size(); ++j)
        shape = std::max(shape, std::abs(std::abs(out[j]) - std::sqrt(expect) * std::abs(in[j])));
    const double tau = out.grid.origin() - in.grid.origin();

    std::vector<double> chirp(in.size(), NAN);
    bool chirp_ok = true;
    std::string chirp_msg = "phase unwrapped";
    try {
        chirp = chirp_numeric(out).values;
    } catch (const NumericalError& e) {
        chirp_ok = false;
        chirp_msg = e.what();
    }

    std::vector<std::vector<double>> rows;
    PlotSeries sin{"input |E|^2", {}, {}}, sout{"output |Phi2|^2 (shifted by delay)", {}, {}};
    for (std::size_t j = 0; j < in.size(); ++j) {
        rows.push_back({in.grid.coord(j), in[j].real(), in[j].imag(), out.grid.coord(j), out[j].real(), out[j].imag(),
                        chirp[j]});
        sin.x.push_back(in.grid.coord(j)), sin.y.push_back(std::norm(in[j]));
        sout.x.push_back(in.grid.coord(j)), sout.y.push_back(std::norm(out[j]));
    }
    ctx.csv("transfer.csv", {"T_in", "in_re", "in_im", "T_out", "out_re", "out_im", "chirp"}, rows);
    ctx.svg("transfer.svg", "Input pulse and output matter wave", "T - delay", "intensity", {sin, sout});

    ctx.scalar("delay", tau);
    ctx.scalar("norm_ratio", ratio);
    ctx.scalar("expected_norm_ratio", expect);
    ctx.scalar("spm_integral", ints.spm(z_out));
    ctx.scalar("a_phase_integral", ints.a_phase(z_out));
    ctx.check("norm_ratio", std::abs(ratio - expect) <= 1e-10 * expect,
              describe("|ratio - c/v| / (c/v)", std::abs(ratio - expect) / expect, "<=", 1e-10));
    ctx.check("delayed_envelope", shape <= 1e-8 * c.number("pulse.E0"),
              describe("Linf envelope error", shape, "<=", 1e-8 * c.number("pulse.E0")));
    ctx.check("chirp_unwrap", chirp_ok, chirp_msg);
}

void run_three_level(const ExperimentConfig& c, RunContext& ctx)
{
    CompareSetup s;
    s.params.transfer = transfer_params(c);
    s.params.transfer.validate();
    s.params.gamma = c.number("threelevel.gamma");
    s.params.eps12 = c.number("threelevel.eps12");
    s.params.eps13 = c.number("threelevel.eps13");
    s.params.kinetic = c.flag("threelevel.kinetic");
    if (s.params.gamma < 0.0) throw ConfigError("threelevel.gamma must not be negative");
    s.omega_peak = c.number("control.omega_peak");
    s.ramp_width = ramp_width(c);
    s.omega_floor = c.number("control.floor");
    s.pulse = PulseShape{c.number("pulse.E0"), c.number("pulse.T0"), super_gaussian_order(c), 0.0};
    s.n_points = c.count("grid.n_points");
    s.z_right = c.number("grid.z_right");
    s.cfl = c.number("compare.cfl");
    s.refine = c.count("compare.refine");
    if (s.refine == 0) throw ConfigError("compare.refine must be at least 1");
    if (!is_power_of_two(s.n_points)) throw ConfigError("grid.n_points must be a power of two");

    CompareResult r;
    try {
        r = compare_with_adiabatic(s);
    } catch (const std::invalid_argument& e) {
        throw ConfigError(e.what());
    }

    std::vector<std::vector<double>> rows;
    PlotSeries ss{"simulated |Phi2|", {}, {}}, sp{"adiabatic map |Phi2|", {}, {}};
    for (std::size_t j = 0; j < r.simulated.size(); ++j) {
        const double z = r.simulated.grid.coord(j);
        rows.push_back({z, r.simulated[j].real(), r.simulated[j].imag(), r.predicted[j].real(), r.predicted[j].imag()});
        if (z >= 0.0) {
            ss.x.push_back(z), ss.y.push_back(std::abs(r.simulated[j]));
            sp.x.push_back(z), sp.y.push_back(std::abs(r.predicted[j]));
        }
    }
    ctx.csv("matter_wave.csv", {"z", "sim_re", "sim_im", "pred_re", "pred_im"}, rows);
    ctx.svg("matter_wave.svg", "Three-level run vs adiabatic map", "z", "|Phi2|", {ss, sp});

    std::vector<std::vector<double>> nrows;
    for (std::size_t i = 0; i < r.number_history.size(); ++i)
        nrows.push_back({static_cast<double>(i), static_cast<double>(i) * r.dt, r.number_history[i]});
    ctx.csv("number.csv", {"step", "t", "excitation_number"}, nrows);

    ctx.scalar("discrepancy", r.discrepancy);
    ctx.scalar("discrepancy_per_length", r.discrepancy_per_length);
    ctx.scalar("initial_number", r.initial_number);
    ctx.scalar("final_number", r.final_number);
    ctx.scalar("output_energy", r.simulated.norm2());
    ctx.scalar("peak_excited_fraction", r.peak_excited_fraction);
    ctx.scalar("mid_dark_projection", r.mid_dark_projection);
    ctx.scalar("dt", r.dt);
    ctx.scalar("n_steps", static_cast<double>(r.n_steps));

    ctx.check("adiabatic_map_l2", r.discrepancy < 0.05, describe("relative L2", r.discrepancy, "<", 0.05));
    if (s.params.gamma == 0.0) {
        const double drift = std::abs(r.final_number - r.initial_number) / r.initial_number;
        ctx.check("number_conserved", drift <= 1e-8, describe("relative drift", drift, "<=", 1e-8));
    } else {
        bool down = true;
        for (std::size_t i = 1; i < r.number_history.size(); ++i)
            if (r.number_history[i] > r.number_history[i - 1] * (1.0 + 1e-12)) down = false;
        ctx.check("number_non_increasing", down, down ? "monotone" : "number increased during the run");
    }
    ctx.check("dark_state_midpoint", r.mid_dark_projection > 0.99,
              describe("projection", r.mid_dark_projection, ">", 0.99));
}

void run_single(const ExperimentConfig& c, RunContext& ctx)
{
    SingleSolitonSetup s;
    s.params = nlse_params(c);
    s.params.k_bg = c.number("nlse.k_bg");
    s.eta = c.number("soliton.eta");
    check_eta(s.eta);
    s.bg_amp = c.number("soliton.bg_amp");
    if (!(s.bg_amp > 0.0)) throw ConfigError("soliton.bg_amp must be positive");
    s.n_points = c.count("grid.n_points");
    s.length = c.number("grid.length");
    checked_grid(s.n_points, s.length, 0.0);
    s.dt = c.number("time.dt");
    if (!(s.dt > 0.0)) throw ConfigError("time.dt must be positive");
    s.n_steps = c.count("time.n_steps");
    s.snapshot_stride = c.count("output.snapshot_stride");
    s.threshold = c.number("tracking.threshold");

    const auto r = run_single_soliton(s);
    write_snapshots(ctx, r.snapshots);
    write_minima(ctx, r.minima);
    std::vector<std::vector<double>> rows;
    PlotSeries tr{"tracked", {}, {}}, an{"analytic", {}, {}};
    for (std::size_t i = 0; i < r.minima.size(); ++i) {
        const double t = r.minima[i].t;
        rows.push_back({t, r.track[i], r.z0 + r.analytic_speed * t});
        tr.x.push_back(t), tr.y.push_back(r.track[i]);
        an.x.push_back(t), an.y.push_back(r.z0 + r.analytic_speed * t);
    }
    ctx.csv("track.csv", {"t", "tracked_position", "analytic_position"}, rows);
    ctx.svg("track.svg", "Gray soliton trajectory", "t", "position", {tr, an});
    density_plot(ctx, r.snapshots, "Gray soliton density");

    const auto& first = r.snapshots.front().field;
    const auto& last = r.snapshots.back().field;
    const double n0 = first.norm2(), e0 = nlse_energy(first, s.params);
    const double norm_drift = std::abs(last.norm2() - n0) / n0;
    const double energy_drift = std::abs(nlse_energy(last, s.params) - e0) / std::abs(e0);
    const double spacing = s.length / static_cast<double>(s.n_points);

    ctx.scalar("analytic_speed", r.analytic_speed);
    ctx.scalar("tracked_speed", r.tracked_speed);
    ctx.scalar("max_drift", r.max_drift);
    ctx.scalar("norm_drift", norm_drift);
    ctx.scalar("energy_drift", energy_drift);
    if (s.eta < 1.0) {
        const double rel = std::abs(r.tracked_speed - r.analytic_speed) / std::abs(r.analytic_speed);
        ctx.scalar("speed_relative_error", rel);
        ctx.check("speed_law", rel < 0.02, describe("relative speed error", rel, "<", 0.02));
    } else {
        ctx.check("dark_soliton_drift", r.max_drift < spacing, describe("max drift", r.max_drift, "<", spacing));
    }
    ctx.check("norm_conserved", norm_drift <= 1e-10, describe("relative drift", norm_drift, "<=", 1e-10));
    ctx.check("energy_conserved", energy_drift <= 1e-8, describe("relative drift", energy_drift, "<=", 1e-8));
}

void run_fig3a(const ExperimentConfig& c, RunContext& ctx)
{
    SplitSetup s;
    s.params = nlse_params(c);
    s.eta = c.number("soliton.eta");
    check_eta(s.eta);
    const double a0 = c.number("background.a0");
    if (!(a0 > 0.0)) throw ConfigError("background.a0 must be positive");
    s.background = c.text("background.kind") == "constant" ? BackgroundSpec::constant(a0)
                                                           : BackgroundSpec::peak_decay(a0, c.number("background.t_decay"));
    if (!(s.background.t_decay > 0.0)) throw ConfigError("background.t_decay must be positive");
    s.n_points = c.count("grid.n_points");
    s.length = c.number("grid.length");
    checked_grid(s.n_points, s.length, 0.0);
    s.dt = c.number("time.dt");
    if (!(s.dt > 0.0)) throw ConfigError("time.dt must be positive");
    s.n_steps = c.count("time.n_steps");
    s.snapshot_stride = c.count("output.snapshot_stride");
    s.threshold = c.number("tracking.threshold");
    s.separation_widths = c.number("tracking.separation_widths");

    const auto r = run_split_fig3a(s);
    write_snapshots(ctx, r.snapshots);
    write_minima(ctx, r.minima);
    PlotSeries left{"left dip", {}, {}}, right{"right dip", {}, {}}, width{"mean FWHM", {}, {}};
    for (const auto& m : r.minima) {
        if (m.dips.size() != 2) continue;
        left.x.push_back(m.t), left.y.push_back(m.dips[0].position);
        right.x.push_back(m.t), right.y.push_back(m.dips[1].position);
        width.x.push_back(m.t), width.y.push_back(0.5 * (m.dips[0].fwhm + m.dips[1].fwhm));
    }
    ctx.svg("minima.svg", "Second-order soliton splits into two", "t", "position", {left, right});
    ctx.svg("width.svg", "Dip width", "t", "FWHM", {width});
    density_plot(ctx, r.snapshots, "Density on a decaying background");

    const bool split = r.separated_from < r.minima.size();
    ctx.scalar("split_time", split ? r.minima[r.separated_from].t : NAN);
    ctx.scalar("speed_ratio_deviation", r.speed_ratio_deviation);
    ctx.check("split", split, split ? "split at t = " + brief(r.minima[r.separated_from].t) : "never split");
    ctx.check("two_minima", r.two_minima, "exactly two tracked minima after the split");
    ctx.check("separation_grows", r.separation_grows, "separation strictly increasing");
    ctx.check("width_grows", r.width_grows, "mean FWHM strictly increasing");
    ctx.check("speed_follows_background", split && r.speed_ratio_deviation < 0.1,
              describe("max deviation of (v / a) from its value at the split", r.speed_ratio_deviation, "<", 0.1));
}

void run_fig3b(const ExperimentConfig& c, RunContext& ctx)
{
    PhaseAngleSetup s;
    s.params = nlse_params(c);
    s.eta = c.number("soliton.eta");
    check_eta(s.eta);
    s.a0 = c.number("background.a0");
    s.width = c.number("background.width");
    if (!(s.a0 > 0.0) || !(s.width > 0.0)) throw ConfigError("background.a0 and background.width must be positive");
    s.n_points = c.count("grid.n_points");
    s.length = c.number("grid.length");
    checked_grid(s.n_points, s.length, 0.0);
    s.dt = c.number("time.dt");
    if (!(s.dt > 0.0)) throw ConfigError("time.dt must be positive");
    s.n_steps = c.count("time.n_steps");
    s.snapshot_stride = c.count("output.snapshot_stride");
    s.threshold = c.number("tracking.threshold");
    s.separation_widths = c.number("tracking.separation_widths");
    s.min_background = c.number("tracking.min_background");
    s.dtau = c.number("phase.dtau");
    if (!(s.dtau > 0.0)) throw ConfigError("phase.dtau must be positive");
    s.depletion = depletion_from(c);

    const auto r = run_split_fig3b(s);
    write_snapshots(ctx, r.snapshots);
    write_minima(ctx, r.minima);
    std::vector<std::vector<double>> prow;
    for (const auto& st : r.trajectory.states) prow.push_back({st.tau, st.alpha, st.eta(), st.xi0});
    ctx.csv("phase_angle.csv", {"tau", "alpha", "eta", "xi0"}, prow);
    std::vector<std::vector<double>> crow;
    PlotSeries meas{"tracked eta^2", {}, {}}, pred{"cos^2 alpha (phase-angle equation)", {}, {}};
    for (const auto& x : r.comparison) {
        crow.push_back({x.t, x.tau, x.position, x.measured_depth, x.predicted_depth});
        meas.x.push_back(x.t), meas.y.push_back(x.measured_depth);
        pred.x.push_back(x.t), pred.y.push_back(x.predicted_depth);
    }
    ctx.csv("comparison.csv", {"t", "tau", "position", "measured_depth", "predicted_depth"}, crow);
    ctx.svg("depth.svg", "Dip depth vs phase-angle equation", "t", "depth fraction", {meas, pred});
    density_plot(ctx, r.snapshots, "Density on a Gaussian background");

    ctx.scalar("max_relative_deviation", r.max_relative_deviation);
    ctx.scalar("compared_snapshots", static_cast<double>(r.comparison.size()));
    const bool enough = r.comparison.size() >= 3;
    ctx.check("depth_matches_phase_angle", enough && r.max_relative_deviation < 0.05,
              describe("max |eta^2 - cos^2 alpha| / cos^2 alpha", r.max_relative_deviation, "<", 0.05) + " over " +
                  std::to_string(r.comparison.size()) + " snapshots");
    ctx.check("phase_angle_in_range", !r.trajectory.saturated,
              r.trajectory.saturated ? r.trajectory.diagnostic : "alpha stayed inside [0, pi/2)");
}

ScaledBackground scaled_background(const ExperimentConfig& c)
{
    if (c.text("background.kind") == "uniform") return [](double, double) { return 1.0; };
    const double w = c.number("background.width");
    if (!(w > 0.0)) throw ConfigError("background.width must be positive");
    return [w](double xi, double) { return std::exp(-xi * xi / (2.0 * w * w)); };
}

PhaseAngleWindow phase_window(const ExperimentConfig& c)
{
    PhaseAngleWindow w;
    w.n_points = c.count("phase.window_points");
    w.half_width = c.number("phase.window_half_width");
    if (w.n_points < 8 || w.n_points % 2 != 0) throw ConfigError("phase.window_points must be even and >= 8");
    if (!(w.half_width > 0.0)) throw ConfigError("phase.window_half_width must be positive");
    return w;
}

void run_phase_angle(const ExperimentConfig& c, RunContext& ctx)
{
    const PhaseAngleState init{c.number("phase.alpha0"), c.number("phase.xi0"), 0.0};
    if (!(init.alpha >= 0.0 && init.alpha < std::numbers::pi / 2)) throw ConfigError("phase.alpha0 must lie in [0, pi/2)");
    const long dir = c.integer("phase.direction");
    if (dir != 1 && dir != -1) throw ConfigError("phase.direction must be 1 or -1");
    const double dtau = c.number("phase.dtau");
    if (!(dtau > 0.0)) throw ConfigError("phase.dtau must be positive");
    const auto bg = scaled_background(c);
    PhaseAngleTrajectory traj;
    try {
        traj = evolve_phase_angle(init, bg, depletion_from(c), dtau, c.count("phase.n_steps"), static_cast<int>(dir),
                                  phase_window(c));
    } catch (const std::invalid_argument& e) {
        throw ConfigError(e.what());
    } catch (const std::domain_error& e) {
        throw NumericalError(e.what());
    }

    std::vector<std::vector<double>> rows;
    PlotSeries eta{"eta = cos alpha", {}, {}};
    for (const auto& s : traj.states) {
        rows.push_back({s.tau, s.alpha, s.eta(), s.xi0});
        eta.x.push_back(s.tau), eta.y.push_back(s.eta());
    }
    ctx.csv("phase_angle.csv", {"tau", "alpha", "eta", "xi0"}, rows);
    ctx.svg("phase_angle.svg", "Soliton phase angle", "tau", "eta", {eta});

    const auto& last = traj.states.back();
    ctx.scalar("final_alpha", last.alpha);
    ctx.scalar("final_eta", last.eta());
    ctx.scalar("final_xi0", last.xi0);
    double drift = 0.0;
    const double inv0 = std::pow(bg(init.xi0, 0.0) * std::cos(init.alpha), 2);
    for (const auto& s : traj.states)
        drift = std::max(drift, std::abs(std::pow(bg(s.xi0, s.tau) * std::cos(s.alpha), 2) - inv0) / inv0);
    ctx.scalar("invariant_drift", drift);
    ctx.check("phase_angle_in_range", !traj.saturated, traj.saturated ? traj.diagnostic : "alpha stayed inside [0, pi/2)");
    if (c.text("background.kind") == "uniform") {
        const double change = std::abs(last.alpha - init.alpha);
        ctx.check("uniform_alpha_constant", change <= 1e-12, describe("|alpha - alpha0|", change, "<=", 1e-12));
    }
}

void write_manifest(const ExperimentConfig& cfg, const RunReport& r)
{
    std::ofstream f(fs::path(r.directory) / "manifest.txt", std::ios::binary);
    if (!f) throw std::runtime_error("cannot write manifest in '" + r.directory + "'");
    f << "status: " << (r.ok ? "ok" : "numerical_failure") << '\n';
    if (!r.ok) f << "error: " << r.error << '\n';
    f << "experiment: " << r.experiment << '\n';
    f << "build: " << build_identifier() << '\n';
    f << "wall_clock_seconds: " << format_number(r.wall_seconds) << '\n';
    for (const auto& [k, v] : cfg.entries()) f << "config." << k << ": " << v << '\n';
    for (const auto& [k, v] : r.scalars) f << "scalar." << k << ": " << format_number(v) << '\n';
    for (const auto& ch : r.checks) f << "check." << ch.name << ": " << (ch.pass ? "PASS" : "FAIL") << " (" << ch.detail << ")\n";
    f << "checks_passed: " << (r.checks_pass() ? "yes" : "no") << '\n';
    for (const auto& file : r.files) f << "file: " << file << '\n';
}

}  // namespace

double RunReport::scalar(const std::string& name) const
{
    for (const auto& [k, v] : scalars)
        if (k == name) return v;
    return NAN;
}

bool RunReport::checks_pass() const
{
    return ok && std::all_of(checks.begin(), checks.end(), [](const Check& c) { return c.pass; });
}

std::string build_identifier()
{
    return std::string("graylaser ") + GRAYLASER_VERSION + " (" + GRAYLASER_BUILD_TYPE + ", " +
#if defined(__clang__)
           "clang " + __clang_version__ +
#elif defined(__GNUC__)
           "gcc " + __VERSION__ +
#else
           "unknown compiler" +
#endif
           ")";
}

RunReport run_experiment(const ExperimentConfig& config)
{
    RunReport report;
    report.experiment = config.experiment();
    report.directory = config.text("output.directory");
    RunContext ctx(config, report);
    const auto start = std::chrono::steady_clock::now();
    try {
        const auto& e = config.experiment();
        if (e == "chirp_analytic") run_chirp(config, ctx);
        else if (e == "transfer") run_transfer_map(config, ctx);
        else if (e == "three_level_compare") run_three_level(config, ctx);
        else if (e == "soliton_single") run_single(config, ctx);
        else if (e == "soliton_split_fig3a") run_fig3a(config, ctx);
        else if (e == "soliton_split_fig3b") run_fig3b(config, ctx);
        else if (e == "phase_angle") run_phase_angle(config, ctx);
        else throw ConfigError("unknown experiment '" + e + "'");
    } catch (const NumericalError& err) {
        report.ok = false;
        report.error = err.what();
    }
    report.wall_seconds = std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
    write_manifest(config, report);
    return report;
}

// ---------------------------------------------------------------------------

namespace {

void add(std::vector<Diagnostic>& out, Severity s, std::string name, std::string msg)
{
    out.push_back({s, std::move(name), std::move(msg)});
}

void validate_transfer_family(const ExperimentConfig& c, std::vector<Diagnostic>& out, bool with_caps)
{
    const auto tp = transfer_params(c);
    try {
        tp.validate();
        add(out, Severity::ok, "parameters", "c = " + brief(tp.c) + " > v = " + brief(tp.v()));
    } catch (const ConfigError& e) {
        add(out, Severity::violation, "parameters", e.what());
        return;
    }
    ControlProfile prof;
    try {
        prof = control_profile(c);
    } catch (const ConfigError& e) {
        add(out, Severity::violation, "control", e.what());
        return;
    }
    const double cin = std::cos(mixing_angle(0.0, prof, tp)), cout = std::cos(mixing_angle(tp.L, prof, tp));
    if (with_caps) {
        const auto caps = boundary_caps(c);
        add(out, cin >= caps.cos_theta_in_min ? Severity::ok : Severity::violation, "boundary_angle_in",
            describe("cos theta(0)", cin, ">=", caps.cos_theta_in_min));
        add(out, cout <= caps.cos_theta_out_max ? Severity::ok : Severity::violation, "boundary_angle_out",
            describe("cos theta(L)", cout, "<=", caps.cos_theta_out_max));
        const double z_out = c.number("transfer.z_out");
        add(out, z_out >= tp.L ? Severity::ok : Severity::violation, "output_position",
            describe("z_out", z_out, ">=", tp.L));
    } else {
        add(out, Severity::ok, "boundary_angles",
            "cos theta(0) = " + brief(cin) + ", cos theta(L) = " + brief(cout));
    }
    double ratio = 0.0;
    for (int i = 0; i <= 2000; ++i) ratio = std::max(ratio, std::abs(prof.dlog(tp.L * i / 2000.0)) / tp.k());
    add(out, ratio < 0.1 ? Severity::ok : Severity::warning, "neglected_term_ratio",
        describe("max |d_z ln Omega0| / k", ratio, ratio < 0.1 ? "<" : ">=", 0.1));
}

void validate_nlse_family(const ExperimentConfig& c, std::vector<Diagnostic>& out)
{
    const double g = c.number("nlse.g22");
    add(out, g > 0.0 ? Severity::ok : Severity::violation, "g22", describe("g22", g, ">", 0.0));
    const double eta = c.number("soliton.eta");
    add(out, eta > 0.0 && eta <= 1.0 ? Severity::ok : Severity::violation, "eta", "eta = " + brief(eta) + " in (0, 1]");
    const std::size_t n = c.count("grid.n_points");
    const double len = c.number("grid.length");
    if (!is_power_of_two(n) || !(len > 0.0)) {
        add(out, Severity::violation, "grid", "n_points must be a power of two and length positive");
        return;
    }
    const double dz = len / static_cast<double>(n), dt = c.number("time.dt");
    const double kmax = std::numbers::pi / dz, bound = 2.0 * std::numbers::pi / (kmax * kmax);
    add(out, dt <= bound ? Severity::ok : Severity::warning, "cfl",
        describe("dt", dt, dt <= bound ? "<=" : ">", bound) + " (kinetic phase per step below pi at the grid cutoff)");
    const double amp = c.experiment() == "soliton_single" ? c.number("soliton.bg_amp") : c.number("background.a0");
    if (g > 0.0 && amp > 0.0 && eta > 0.0) {
        const double w = 1.0 / (std::sqrt(g) * amp * eta);
        add(out, w >= 4.0 * dz ? Severity::ok : Severity::warning, "resolution",
            describe("dip half-width / spacing", w / dz, ">=", 4.0));
    }
    if (c.experiment() == "soliton_single") {
        const double k = c.number("nlse.k_bg"), turns = k * len / (2.0 * std::numbers::pi);
        const bool periodic = std::abs(turns - std::round(turns)) < 1e-9;
        add(out, periodic ? Severity::ok : Severity::warning, "background_periodicity",
            "k L / 2 pi = " + brief(turns) + (periodic ? "" : " is not an integer; the background jumps at the boundary"));
    }
    const std::size_t stride = c.count("output.snapshot_stride"), steps = c.count("time.n_steps");
    const std::size_t snaps = 2 + (stride ? steps / stride : 0);
    add(out, Severity::ok, "estimate",
        "memory ~ " + brief(static_cast<double>(snaps * n * 16) / 1e6) + " MB for " +
            std::to_string(snaps) + " snapshots, " + std::to_string(steps) + " FFT pairs of size " + std::to_string(n));
}

}  // namespace

std::vector<Diagnostic> validate_experiment(const ExperimentConfig& c)
{
    std::vector<Diagnostic> out;
    const auto& e = c.experiment();
    if (e == "chirp_analytic" || e == "transfer") {
        validate_transfer_family(c, out, true);
        const std::size_t n = c.count("grid.n_points");
        add(out, is_power_of_two(n) ? Severity::ok : Severity::violation, "grid",
            "n_points = " + std::to_string(n) + (is_power_of_two(n) ? "" : " is not a power of two"));
    } else if (e == "three_level_compare") {
        validate_transfer_family(c, out, false);
        const std::size_t n = c.count("grid.n_points");
        if (!is_power_of_two(n)) {
            add(out, Severity::violation, "grid", "n_points must be a power of two");
            return out;
        }
        const double T0 = c.number("pulse.T0"), m = static_cast<double>(c.integer("pulse.m"));
        const double cc = c.number("transfer.c");
        const double t_edge = T0 * std::pow(2.0 * std::log(1e7), 1.0 / (2.0 * m));
        const double z_left = -cc * (2.0 * t_edge + 2.0 * T0) - 16.0;
        const double dz = (c.number("grid.z_right") - z_left) / static_cast<double>(n);
        const double bound = dz / cc, dt = c.number("compare.cfl") * bound / static_cast<double>(c.count("compare.refine"));
        add(out, dt <= bound ? Severity::ok : Severity::warning, "cfl",
            describe("dt", dt, dt <= bound ? "<=" : ">", bound) + " (spacing / c)");
        const double t_end = 2.0 * t_edge + T0 + 6.0;
        const double steps = std::ceil(t_end / dt);
        add(out, Severity::ok, "estimate",
            "memory ~ " + brief(static_cast<double>(n) * 16.0 * 17.0 / 1e6) + " MB, " +
                brief(steps) + " steps of size " + std::to_string(n));
    } else if (e == "soliton_single" || e == "soliton_split_fig3a" || e == "soliton_split_fig3b") {
        validate_nlse_family(c, out);
        if (e == "soliton_split_fig3b") {
            const double d = c.number("depletion.d");
            add(out, d >= 0.0 && d < 0.5 ? Severity::ok : Severity::violation, "depletion", "d = " + brief(d) + " in [0, 0.5)");
        }
    } else if (e == "phase_angle") {
        const double a = c.number("phase.alpha0");
        add(out, a >= 0.0 && a < std::numbers::pi / 2 ? Severity::ok : Severity::violation, "alpha0",
            "alpha0 = " + brief(a) + " in [0, pi/2)");
        const double d = c.number("depletion.d");
        add(out, d >= 0.0 && d < 0.5 ? Severity::ok : Severity::violation, "depletion", "d = " + brief(d) + " in [0, 0.5)");
        if (a >= 0.0 && a < std::numbers::pi / 2) {
            try {
                const auto bg = scaled_background(c);
                const double xi0 = c.number("phase.xi0"), dir = static_cast<double>(c.integer("phase.direction"));
                const double ca = std::cos(a);
                PolarBackground frame{[&](double z) { return bg(xi0 + dir * z / ca, 0.0); }, {}};
                const double step = std::abs(phase_angle_rhs(a, frame, {}, phase_window(c))) * c.number("phase.dtau");
                add(out, step < 0.1 ? Severity::ok : Severity::warning, "step_size",
                    describe("initial |d alpha| per step", step, step < 0.1 ? "<" : ">=", 0.1));
            } catch (const std::exception& ex) {
                add(out, Severity::violation, "background", ex.what());
            }
        }
    }
    return out;
}

SweepReport run_sweep(const ExperimentConfig& base, const std::string& key, const std::vector<std::string>& values,
                      unsigned workers)
{
    const auto& ks = base.spec(key);
    if (ks.type != ValueType::number && ks.type != ValueType::integer)
        throw ConfigError("sweep: key '" + key + "' is not numeric");
    if (values.empty()) throw ConfigError("sweep: no values given");
    std::vector<double> numeric;
    for (const auto& v : values) numeric.push_back(parse_number(v, "sweep value for " + key));

    const fs::path root = base.text("output.directory");
    std::vector<ExperimentConfig> configs;
    for (const auto& v : values) {
        ExperimentConfig c = base;
        c.set(key, v);
        c.set("output.directory", (root / (key + "=" + v)).string());
        configs.push_back(std::move(c));
    }

    SweepReport rep;
    rep.runs.resize(configs.size());
    if (workers == 0) workers = std::max(1u, std::thread::hardware_concurrency());
    std::size_t next = 0;
    while (next < configs.size()) {
        std::vector<std::future<RunReport>> batch;
        for (unsigned w = 0; w < workers && next < configs.size(); ++w, ++next)
            batch.push_back(std::async(std::launch::async, [&configs, i = next] { return run_experiment(configs[i]); }));
        const std::size_t first = next - batch.size();
        for (std::size_t i = 0; i < batch.size(); ++i) rep.runs[first + i] = batch[i].get();
    }

    std::vector<std::string> names;
    for (const auto& r : rep.runs)
        for (const auto& [k, _] : r.scalars)
            if (std::find(names.begin(), names.end(), k) == names.end()) names.push_back(k);
    std::vector<std::string> header{key, "ok", "checks_passed"};
    header.insert(header.end(), names.begin(), names.end());
    std::vector<std::vector<double>> rows;
    for (std::size_t i = 0; i < rep.runs.size(); ++i) {
        const auto& r = rep.runs[i];
        std::vector<double> row{numeric[i], r.ok ? 1.0 : 0.0, r.checks_pass() ? 1.0 : 0.0};
        for (const auto& n : names) row.push_back(r.scalar(n));
        rows.push_back(std::move(row));
    }
    fs::create_directories(root);
    rep.summary_path = (root / "sweep_summary.csv").string();
    write_csv(rep.summary_path, header, rows);
    return rep;
}

}  // namespace graylaser
