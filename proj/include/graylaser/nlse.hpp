#pragma once

#include <functional>
#include <vector>

#include "graylaser/grid.hpp"
#include "graylaser/spectral.hpp"

namespace graylaser {

// i psi_t = -1/2 psi_zz + V(z) psi + g22 |psi|^2 psi   (hbar = m = 1)
struct NlseParams {
    double g22 = 1.0;
    std::function<double(double)> v_eff;  ///< empty means V = 0
    double k_bg = 0.0;                    ///< background wavenumber

    /// Throws ConfigError if g22 <= 0 (gray solitons need repulsion).
    void validate_gray() const;
};

struct SolitonSpec {
    double eta = 1.0;  ///< grayness, (0, 1]; 1 is a black soliton
    double z0 = 0.0;
    int sign = 1;      ///< +1 or -1; -1 mirrors the kink and reverses the motion
};

enum class BackgroundKind { constant, gaussian_peak_decay };

// Imposed background amplitude a(t). The peak-decay law a0 (1 + (t/td)^2)^(-1/4)
// is the peak amplitude of a freely spreading 1D Gaussian.
struct BackgroundSpec {
    BackgroundKind kind = BackgroundKind::constant;
    double a0 = 1.0;
    double t_decay = 20.0;

    double amplitude(double t) const;

    static BackgroundSpec constant(double a0) { return {BackgroundKind::constant, a0, 20.0}; }
    static BackgroundSpec peak_decay(double a0, double t_decay = 20.0)
    {
        return {BackgroundKind::gaussian_peak_decay, a0, t_decay};
    }
};

/// Width scale l = 1 / (sqrt(g22) * bg_amp); the dip has half-width l / eta.
double healing_length(double bg_amp, const NlseParams& params);
double sound_speed(double bg_amp, const NlseParams& params);

/// bg_amp * (i sqrt(1 - eta^2) + sign * eta * tanh(eta (z - z0) / l)) * exp(i k z).
/// Not periodic by itself; see periodic_soliton_field for simulation input.
/// Throws std::domain_error for bg_amp <= 0 or eta outside (0, 1].
ComplexField gray_soliton_field(const SolitonSpec& spec, double bg_amp, const NlseParams& params,
                                const Grid1D& grid);

/// Gray soliton at spec.z0 times the conjugate (mirror) soliton half a period away,
/// so both far fields meet with the same phase at the domain boundary.
ComplexField periodic_soliton_field(const SolitonSpec& spec, double bg_amp, const NlseParams& params,
                                    const Grid1D& grid);

/// Lab-frame speed: sign * c_s * sqrt(1 - eta^2) + k.
double soliton_speed(const SolitonSpec& spec, double bg_amp, const NlseParams& params);

/// Two opposite-kink gray solitons co-located at z0: bg * f(u) * conj(f(u)),
/// f(u) = i sqrt(1 - eta^2) + eta tanh u, which equals bg * (1 - eta^2 sech^2 u).
ComplexField two_soliton_field(double eta, double bg_amp, const NlseParams& params, const Grid1D& grid,
                               double z0);

/// E = \int (1/2 |psi_z|^2 + V |psi|^2 + 1/2 g22 |psi|^4) dz
double nlse_energy(const ComplexField& psi, const NlseParams& params);

// Strang split-step Fourier stepper: half nonlinear+potential phase, full kinetic
// step in Fourier space, half phase. dt may be negative.
class NlseSolver {
public:
    NlseSolver(const Grid1D& grid, NlseParams params, double dt);

    void step(ComplexField& psi) const;
    double dt() const { return dt_; }

private:
    void phase(ComplexField& psi, double tau) const;

    Grid1D grid_;
    NlseParams params_;
    double dt_;
    std::vector<double> potential_;
    std::vector<cplx> kinetic_;
    FftPlan fft_;
};

struct Snapshot {
    std::size_t step = 0;
    double t = 0.0;
    ComplexField field;
};

struct EvolveOptions {
    std::size_t snapshot_stride = 0;  ///< 0 keeps only the first and last snapshot
    BackgroundSpec background;        ///< rescaling between steps unless constant
    double t0 = 0.0;
};

/// Evolves n_steps with dt > 0. Snapshot 0 is the input.
/// Throws NumericalError naming the step if a non-finite value appears.
std::vector<Snapshot> evolve(ComplexField field, const NlseParams& params, double dt, std::size_t n_steps,
                             const EvolveOptions& options = {});

struct Dip {
    std::size_t index = 0;        ///< grid index of the discrete minimum
    double position = 0.0;
    double depth_fraction = 0.0;  ///< 1 - rho_min / background^2
    double fwhm = 0.0;
};

struct MinimaRecord {
    double t = 0.0;
    std::vector<Dip> dips;
};

/// Background amplitude as a function of (t, z).
using BackgroundField = std::function<double(double, double)>;

/// Local density minima below threshold * background^2, refined by a parabola
/// through the three nearest samples. Widths are full widths at half depth.
std::vector<Dip> find_minima(const ComplexField& psi, double t, const BackgroundField& background,
                             double threshold = 0.9);
std::vector<MinimaRecord> track_minima(const std::vector<Snapshot>& snapshots, const BackgroundField& background,
                                       double threshold = 0.9);

}  // namespace graylaser
