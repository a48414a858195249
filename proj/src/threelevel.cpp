#include "graylaser/threelevel.hpp"

#include <unsupported/Eigen/MatrixFunctions>

#include <Eigen/Dense>
#include <algorithm>
#include <cmath>
#include <sstream>
#include <stdexcept>

namespace graylaser {

double ThreeLevelState::excitation_number() const { return probe.norm2() + psi2.norm2() + psi3.norm2(); }

ThreeLevelSolver::ThreeLevelSolver(const Grid1D& grid, ThreeLevelParams params, ControlProfile profile, double dt)
    : grid_(grid), params_(std::move(params)), profile_(std::move(profile)), dt_(dt), fft_(grid.n_points())
{
    if (!(dt > 0.0)) throw std::invalid_argument("ThreeLevelSolver: dt must be positive");
    if (dt > cfl_bound()) {
        std::ostringstream msg;
        msg << "ThreeLevelSolver: dt = " << dt << " violates the advection bound dt <= spacing / c = " << cfl_bound();
        throw std::invalid_argument(msg.str());
    }
    const auto& tp = params_.transfer;
    const double G = params_.coupling();
    const std::size_t n = grid_.n_points();

    half_coupling_.resize(n);
    for (std::size_t j = 0; j < n; ++j) {
        const double z = grid_.coord(j);
        const double om = profile_.omega0(z);
        Eigen::Matrix3cd M;
        M << 0.0, 0.0, G,
             0.0, tp.V2(z) + tp.density * tp.U21 + params_.eps12, om,
             G, om, cplx{params_.eps13, -params_.gamma};
        const Eigen::Matrix3cd U = (cplx{0.0, -0.5 * dt_} * M).exp();
        for (int r = 0; r < 3; ++r)
            for (int c = 0; c < 3; ++c) half_coupling_[j][static_cast<std::size_t>(3 * r + c)] = U(r, c);
    }

    const auto q = wavenumbers(grid_);
    probe_transport_.resize(n);
    atom_transport_.resize(n);
    const double kin = params_.kinetic ? 0.5 : 0.0;
    for (std::size_t j = 0; j < n; ++j) {
        probe_transport_[j] = std::polar(1.0, -tp.c * q[j] * dt_);
        atom_transport_[j] = std::polar(1.0, -(kin * q[j] * q[j] + tp.v() * q[j]) * dt_);
    }
}

void ThreeLevelSolver::couple(ThreeLevelState& s) const
{
    for (std::size_t j = 0; j < grid_.n_points(); ++j) {
        const auto& U = half_coupling_[j];
        const cplx e = s.probe[j], a = s.psi2[j], b = s.psi3[j];
        s.probe[j] = U[0] * e + U[1] * a + U[2] * b;
        s.psi2[j] = U[3] * e + U[4] * a + U[5] * b;
        s.psi3[j] = U[6] * e + U[7] * a + U[8] * b;
    }
}

void ThreeLevelSolver::self_phase(ThreeLevelState& s, double tau) const
{
    const double u22 = params_.transfer.U22;
    if (u22 == 0.0) return;
    for (auto& v : s.psi2.values) v *= std::polar(1.0, -u22 * std::norm(v) * tau);
}

void ThreeLevelSolver::transport(ThreeLevelState& s) const
{
    auto apply = [this](ComplexField& f, const std::vector<cplx>& prop) {
        fft_.forward(f.values);
        for (std::size_t j = 0; j < f.size(); ++j) f[j] *= prop[j];
        fft_.inverse(f.values);
    };
    apply(s.probe, probe_transport_);
    apply(s.psi2, atom_transport_);
    apply(s.psi3, atom_transport_);
}

void ThreeLevelSolver::step(ThreeLevelState& state) const
{
    couple(state);
    self_phase(state, 0.5 * dt_);
    transport(state);
    self_phase(state, 0.5 * dt_);
    couple(state);
    state.t += dt_;
}

ThreeLevelState initial_state(const Envelope& envelope, const ThreeLevelParams& params, const ControlProfile& prof,
                              const Grid1D& grid)
{
    const auto& tp = params.transfer;
    const double G = params.coupling();
    ThreeLevelState s{ComplexField(grid), ComplexField(grid), ComplexField(grid), 0.0};
    for (std::size_t j = 0; j < grid.n_points(); ++j) {
        const double z = grid.coord(j);
        // signed tau(z) = \int_0^z dxi / V_g
        const double tau = simpson([&](double x) { return 1.0 / group_velocity(x, prof, tp); }, 0.0, z, 64);
        s.probe[j] = envelope(-tau);
        s.psi2[j] = -G * s.probe[j] / prof.omega0(z);
    }
    return s;
}

namespace {

void check_window(const ThreeLevelState& s, double peak, std::size_t step)
{
    const double limit = 1e-6 * peak;
    const std::size_t last = s.probe.size() - 1;
    for (const ComplexField* f : {&s.probe, &s.psi2, &s.psi3}) {
        if (std::abs((*f)[0]) > limit || std::abs((*f)[last]) > limit) {
            std::ostringstream msg;
            msg << "run_transfer: " << (f == &s.probe ? "probe" : f == &s.psi2 ? "psi2" : "psi3")
                << " touches the window edge at step " << step << " (t = " << s.t << ", edge amplitudes " << std::abs((*f)[0]) << ", " << std::abs((*f)[last]) << ")";
            throw NumericalError(msg.str());
        }
    }
}

}  // namespace

TransferRun run_transfer(const Envelope& envelope, const ThreeLevelParams& params, const ControlProfile& prof,
                         const Grid1D& grid, double dt, std::size_t n_steps)
{
    const ThreeLevelSolver solver(grid, params, prof, dt);
    TransferRun run;
    run.final_state = initial_state(envelope, params, prof, grid);
    auto& s = run.final_state;
    double peak = 0.0;
    for (const auto& v : s.probe.values) peak = std::max(peak, std::abs(v));
    run.initial_number = s.excitation_number();
    run.number_history.reserve(n_steps + 1);
    run.number_history.push_back(run.initial_number);
    run.dark_projection_history.push_back(dark_state_projection(s, prof, params));
    if (peak == 0.0) {
        run.number_history.resize(n_steps + 1, 0.0);
        run.dark_projection_history.resize(n_steps + 1, 1.0);
        s.t = static_cast<double>(n_steps) * dt;
        return run;
    }
    check_window(s, peak, 0);
    for (std::size_t i = 1; i <= n_steps; ++i) {
        solver.step(s);
        check_window(s, peak, i);
        const double number = s.excitation_number();
        if (!std::isfinite(number)) throw NumericalError("run_transfer: non-finite excitation number");
        run.number_history.push_back(number);
        run.dark_projection_history.push_back(dark_state_projection(s, prof, params));
        run.peak_excited_fraction = std::max(run.peak_excited_fraction, s.excited_population() / run.initial_number);
    }
    run.final_number = run.number_history.back();
    return run;
}

double dark_state_projection(const ThreeLevelState& state, const ControlProfile& prof, const ThreeLevelParams& params)
{
    const double G = params.coupling();
    double num = 0.0, den = 0.0;
    for (std::size_t j = 0; j < state.psi2.size(); ++j) {
        const double z = state.psi2.grid.coord(j);
        num += std::norm(state.psi2[j] + G * state.probe[j] / prof.omega0(z));
        den += std::norm(state.psi2[j]);
    }
    if (den == 0.0) return 1.0;
    return std::clamp(1.0 - num / den, 0.0, 1.0);
}

ComplexField adiabatic_matter_wave(const Envelope& envelope, const TransferParams& p, const ControlProfile& prof,
                                   const Grid1D& grid, double t, PhaseForm form)
{
    const double z_end = grid.coord(grid.n_points() - 1);
    ComplexField out(grid);
    if (z_end < p.L) return out;
    const TransferIntegrals ints(prof, p, z_end, 8192, form);
    const double amp = std::sqrt(p.c / p.v());
    for (std::size_t j = 0; j < grid.n_points(); ++j) {
        const double z = grid.coord(j);
        if (z < p.L) continue;
        const cplx e = envelope(t - ints.delay(z));
        const double dphi = ints.a_phase(z) + std::norm(e) * ints.spm(z);
        out[j] = -amp * e * std::polar(1.0, -dphi);
    }
    return out;
}

CompareSetup default_compare_setup()
{
    CompareSetup s;
    auto& tp = s.params.transfer;
    tp.c = 10.0;
    tp.g2n = 1e4;
    tp.U22 = 1.0;
    s.params.kinetic = false;
    s.ramp_width = tp.L / 15.0;
    return s;
}

ControlProfile compare_profile(const CompareSetup& setup)
{
    return ControlProfile::tanh_ramp(setup.omega_peak, setup.params.transfer.L / 2, setup.ramp_width,
                                     setup.omega_floor);
}

CompareResult compare_with_adiabatic(const CompareSetup& setup)
{
    const auto& tp = setup.params.transfer;
    const auto prof = compare_profile(setup);
    // envelope below 1e-7 of its peak beyond |T - center| > t_edge
    const double t_edge = setup.pulse.T0 * std::pow(2.0 * std::log(1e7), 1.0 / (2.0 * setup.pulse.m));
    PulseShape pulse = setup.pulse;
    pulse.center = t_edge + pulse.T0;
    const double z_left = -tp.c * (2.0 * t_edge + 2.0 * pulse.T0) - 16.0;
    const Grid1D grid = make_grid(setup.n_points, setup.z_right - z_left, z_left);
    const double t_end = pulse.center + t_edge + 6.0;
    const double dt_max = setup.cfl * grid.spacing() / tp.c;
    const auto n_steps = static_cast<std::size_t>(std::ceil(t_end / dt_max)) * setup.refine;
    const double dt = t_end / static_cast<double>(n_steps);

    const Envelope env = [pulse](double T) { return pulse(T); };
    const TransferRun run = run_transfer(env, setup.params, prof, grid, dt, n_steps);

    CompareResult r;
    r.simulated = run.final_state.psi2;
    r.final_time = run.final_state.t;
    r.n_steps = n_steps;
    r.dt = dt;
    r.number_history = run.number_history;
    r.predicted = adiabatic_matter_wave(env, tp, prof, grid, r.final_time, PhaseForm::per_time);
    r.discrepancy = relative_l2(r.simulated, r.predicted);
    r.discrepancy_per_length =
        relative_l2(r.simulated, adiabatic_matter_wave(env, tp, prof, grid, r.final_time, PhaseForm::per_length));
    r.initial_number = run.initial_number;
    r.final_number = run.final_number;
    r.peak_excited_fraction = run.peak_excited_fraction;
    r.mid_dark_projection = run.dark_projection_history[n_steps / 2];
    return r;
}

double relative_l2(const ComplexField& a, const ComplexField& b)
{
    double num = 0.0, den = 0.0;
    for (std::size_t j = 0; j < a.size(); ++j) {
        num += std::norm(a[j] - b[j]);
        den += std::norm(b[j]);
    }
    return std::sqrt(num / den);
}

}  // namespace graylaser
