#pragma once

#include <functional>
#include <stdexcept>
#include <string>

#include "graylaser/errors.hpp"
#include "graylaser/grid.hpp"
#include "graylaser/quadrature.hpp"

namespace graylaser {

// Control Rabi frequency Omega0(z) > 0 together with d/dz ln Omega0 and
// d^2/dz^2 ln Omega0.
struct ControlProfile {
    std::function<double(double)> omega0;
    std::function<double(double)> dlog;
    std::function<double(double)> d2log;

    static ControlProfile constant(double omega);
    /// omega * exp(-kappa z)
    static ControlProfile exponential(double omega, double kappa);
    /// omega * sqrt(max(floor^2, (1 - tanh((z - center)/width)) / 2)); floor is
    /// relative to omega. Log-derivatives vanish where the floor is active.
    static ControlProfile tanh_ramp(double omega, double center, double width, double floor = 1e-3);
    /// Linear interpolation of ln Omega0 on a grid; derivatives by centered
    /// differences of the table.
    static ControlProfile tabulated(const RealField& omega);
};

struct TransferParams {
    double g2n = 100.0;     ///< g^2 n
    double c = 100.0;       ///< probe speed
    double v0 = 1.0;        ///< beam velocity
    double vr = 0.0;        ///< recoil velocity (k_p - k_c in units hbar = m = 1)
    double k0 = 100.0;      ///< beam wavenumber
    double density = 1.0;  ///< n, multiplies U21
    double U21 = 0.0;
    double U22 = 1.0;
    std::function<double(double)> V2 = [](double) { return 0.0; };
    double L = 10.0;

    double v() const { return v0 + vr; }
    double k() const { return k0 + vr; }

    /// Throws ConfigError when v <= 0, c <= v or k0 < 100 |vr|.
    void validate() const;
};

struct PhaseCoefficients {
    double A = 0.0;
    double B = 0.0;
    double A_prime = 0.0;
    double B_prime = 0.0;
};

double mixing_angle(double z, const ControlProfile& prof, const TransferParams& p);
double group_velocity(double z, const ControlProfile& prof, const TransferParams& p);
PhaseCoefficients phase_coefficients(double z, const ControlProfile& prof, const TransferParams& p);

// How the phase rates A', B' are accumulated along the transfer region:
// per unit length (the closed-form adiabatic solution as usually quoted) or
// per unit time along the characteristic, d tau = d xi / V_g.
enum class PhaseForm { per_length, per_time };

// Running integrals along the transfer region, tabulated once on [0, z_max]:
//   tau(z)     = \int_0^z dxi / V_g
//   a_phase(z) = \int_0^z A'
//   spm(z)     = \int_0^z cos^2(theta) B'
class TransferIntegrals {
public:
    TransferIntegrals(const ControlProfile& prof, const TransferParams& p, double z_max, std::size_t n_cells = 4096,
                      PhaseForm form = PhaseForm::per_length);

    double delay(double z) const;
    double a_phase(double z) const;
    double spm(double z) const;
    double z_max() const { return z_max_; }

private:
    double z_max_;
    CumulativeIntegral tau_;
    CumulativeIntegral a_;
    CumulativeIntegral b_;
};

/// tau(z) with the integral resolved on the cells of `grid` (its spacing and
/// extent beyond z are ignored; at least 64 cells are used).
double delay(double z, const ControlProfile& prof, const TransferParams& p, const Grid1D& grid);

struct BoundaryCaps {
    double cos_theta_in_min = 0.999;
    double cos_theta_out_max = 0.05;
    PhaseForm phase_form = PhaseForm::per_length;
};

/// Output matter wave at z_out over lab time t: the input samples scaled by
/// sqrt(c/v), phase-shifted by the accumulated phase, on a grid whose origin
/// is delayed by tau(z_out).
ComplexField transfer_map(const ComplexField& input_pulse, const TransferParams& p, const ControlProfile& prof,
                          double z_out, const BoundaryCaps& caps = {});

/// Pulse envelope E0 * exp(-(T/T0)^(2m) / 2); intensity exp(-(T/T0)^(2m)).
struct PulseShape {
    double E0 = 1.0;
    double T0 = 1.0;
    int m = 1;
    double center = 0.0;

    cplx operator()(double T) const;
};

struct ChirpSpec {
    int m = 1;
    double T0 = 1.0;
    double Lambda0 = 1.0;
};

/// Lambda0 * m * u^(2m-1) * exp(-u^(2m)), u = T/T0.
double chirp_analytic(double T, const ChirpSpec& spec);

/// Lambda0 = (2/T0) * E0^2 * \int_0^z cos^2(theta) B'.
double chirp_normalization(const TransferIntegrals& ints, double z, const PulseShape& pulse);

/// Instantaneous frequency shift -d(arg)/dT of the unwrapped phase.
/// Throws NumericalError if the phase steps by more than 0.9 pi between
/// neighbouring samples where the amplitude exceeds 1e-6 of its peak.
RealField chirp_numeric(const ComplexField& output);

}  // namespace graylaser
