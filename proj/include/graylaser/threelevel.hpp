#pragma once

#include <array>
#include <functional>
#include <vector>

#include "graylaser/grid.hpp"
#include "graylaser/spectral.hpp"
#include "graylaser/transfer.hpp"

namespace graylaser {

// Mean-field Lambda system with the ground state frozen at sqrt(n):
//   (d_t + c d_z) E   = -i G Phi3
//   i (d_t + v d_z) Phi2 = -1/2 d_z^2 Phi2 + (V2 + n U21 + eps12 + U22 |Phi2|^2) Phi2 + Omega0 Phi3
//   i (d_t + v d_z) Phi3 = -1/2 d_z^2 Phi3 + (eps13 - i gamma) Phi3 + G E + Omega0 Phi2
// with G = sqrt(g^2 n), all in the slowly varying frames.
struct ThreeLevelParams {
    TransferParams transfer;
    double gamma = 0.0;
    double eps12 = 0.0;
    double eps13 = 0.0;
    bool kinetic = true;

    double coupling() const { return std::sqrt(transfer.g2n); }
};

struct ThreeLevelState {
    ComplexField probe;
    ComplexField psi2;
    ComplexField psi3;
    double t = 0.0;

    /// \int (|E|^2 + |Phi2|^2 + |Phi3|^2) dz
    double excitation_number() const;
    double excited_population() const { return psi3.norm2(); }
};

// One Strang step: pointwise coupling (exact 3x3 exponential, precomputed per
// grid point) and SPM phase half-steps around a spectral transport step.
class ThreeLevelSolver {
public:
    /// Throws std::invalid_argument if dt exceeds the advection bound spacing / c.
    ThreeLevelSolver(const Grid1D& grid, ThreeLevelParams params, ControlProfile profile, double dt);

    void step(ThreeLevelState& state) const;
    double dt() const { return dt_; }
    const Grid1D& grid() const { return grid_; }
    double cfl_bound() const { return grid_.spacing() / params_.transfer.c; }

private:
    void couple(ThreeLevelState& s) const;
    void self_phase(ThreeLevelState& s, double tau) const;
    void transport(ThreeLevelState& s) const;

    Grid1D grid_;
    ThreeLevelParams params_;
    ControlProfile profile_;
    double dt_;
    FftPlan fft_;
    std::vector<std::array<cplx, 9>> half_coupling_;  // row-major exp(-i M dt/2)
    std::vector<cplx> probe_transport_;
    std::vector<cplx> atom_transport_;
};

using Envelope = std::function<cplx(double)>;

/// Probe occupying z < 0 at t = 0 such that E(0, t) = envelope(t); Phi2 on
/// its dark-state value, Phi3 = 0.
ThreeLevelState initial_state(const Envelope& envelope, const ThreeLevelParams& params, const ControlProfile& prof,
                              const Grid1D& grid);

struct TransferRun {
    ThreeLevelState final_state;
    double initial_number = 0.0;
    double final_number = 0.0;
    double peak_excited_fraction = 0.0;  ///< max_t \int|Phi3|^2 / initial number
    std::vector<double> number_history;
    std::vector<double> dark_projection_history;
};

/// Steps from t = 0 to n_steps * dt. Throws NumericalError if any field's
/// edge samples exceed 1e-6 of the initial probe peak.
TransferRun run_transfer(const Envelope& envelope, const ThreeLevelParams& params, const ControlProfile& prof,
                         const Grid1D& grid, double dt, std::size_t n_steps);

/// 1 - ||Phi2 + G E / Omega0||^2 / ||Phi2||^2 clipped to [0, 1]; 1 when Phi2 = 0.
double dark_state_projection(const ThreeLevelState& state, const ControlProfile& prof, const ThreeLevelParams& params);

/// Adiabatic prediction of Phi2(z, t) on `grid` for z >= L (zero for z < L):
/// -sqrt(c/v) E(0, t - tau(z)) exp(-i dphi(z)). The overall minus is the
/// dark-state sign Phi2 = -G E / Omega0; the phase advances as exp(-i U t)
/// for repulsive U22, the same sense as the propagated field.
ComplexField adiabatic_matter_wave(const Envelope& envelope, const TransferParams& p, const ControlProfile& prof,
                                   const Grid1D& grid, double t, PhaseForm form = PhaseForm::per_time);

// Side-by-side run of the three-level field equations and the adiabatic map
// for a pulse that starts as light in z < 0 and ends as atoms beyond L.
struct CompareSetup {
    ThreeLevelParams params;
    double omega_peak = 1000.0;
    double ramp_width = 10.0 / 15.0;
    double omega_floor = 1e-3;
    PulseShape pulse{0.1, 1.0, 1, 0.0};  ///< center is overwritten
    std::size_t n_points = 4096;
    double z_right = 150.0;
    double cfl = 0.8;            ///< dt as a fraction of spacing / c
    std::size_t refine = 1;      ///< divides dt
};

struct CompareResult {
    double discrepancy = 0.0;             ///< vs prediction with per-time phase
    double discrepancy_per_length = 0.0;  ///< vs prediction with per-length phase
    double initial_number = 0.0;
    double final_number = 0.0;
    double peak_excited_fraction = 0.0;
    double mid_dark_projection = 0.0;  ///< dark-state projection halfway through the run
    double final_time = 0.0;
    std::size_t n_steps = 0;
    double dt = 0.0;
    std::vector<double> number_history;
    ComplexField simulated;
    ComplexField predicted;
};

CompareSetup default_compare_setup();
ControlProfile compare_profile(const CompareSetup& setup);
CompareResult compare_with_adiabatic(const CompareSetup& setup);

/// ||a - b|| / ||b||
double relative_l2(const ComplexField& a, const ComplexField& b);

}  // namespace graylaser
