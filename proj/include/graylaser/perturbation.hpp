#pragma once

#include <functional>
#include <string>
#include <utility>
#include <vector>

namespace graylaser {

// Soliton phase angle alpha = acos(eta), scaled center xi0, scaled time tau.
struct PhaseAngleState {
    double alpha = 0.0;
    double xi0 = 0.0;
    double tau = 0.0;

    double eta() const;
};

// Background in polar form. The phase never enters the phase-angle equation;
// it is carried so callers can hand over a full complex background.
struct PolarBackground {
    std::function<double(double)> amplitude;
    std::function<double(double)> phase;  ///< may be empty
};

/// |S|(Z, tau), the condensate-fraction amplitude. Empty means |S| = 1.
using DepletionProfile = std::function<double(double, double)>;

/// |S|(Z) = sqrt(1 - d sech^2 Z), depletion localized at the soliton; d in [0, 0.5).
DepletionProfile localized_depletion(double d);

// Quadrature window for the soliton-frame integral.
struct PhaseAngleWindow {
    double half_width = 20.0;
    std::size_t n_points = 2048;
};

/// d alpha / d tau = 1/2 cos^2 alpha \int sech^2 Z (d_Z ln|Phi| + d_Z ln|S|) dZ,
/// with the background and |S| given as functions of the soliton-frame Z.
/// Throws std::domain_error if the background amplitude is <= 0 in the window.
double phase_angle_rhs(double alpha, const PolarBackground& background,
                       const std::function<double(double)>& s_mag = {}, const PhaseAngleWindow& window = {});

/// Background |Phi|(xi, tau) in scaled lab coordinates.
using ScaledBackground = std::function<double(double, double)>;

struct PhaseAngleTrajectory {
    std::vector<PhaseAngleState> states;
    bool saturated = false;      ///< alpha hit 0 or pi/2 and was clamped
    std::string diagnostic;
};

/// RK4 for (alpha, xi0) with d xi0 / d tau = direction * sin alpha. The soliton
/// frame Z = direction * cos alpha (xi - xi0) points along the motion;
/// direction = +1 for a right mover.
/// Throws std::invalid_argument if alpha changes by more than 0.1 per step.
PhaseAngleTrajectory evolve_phase_angle(const PhaseAngleState& initial, const ScaledBackground& background,
                                        const DepletionProfile& depletion, double dtau, std::size_t n_steps,
                                        int direction = 1, const PhaseAngleWindow& window = {});

/// tau(t, z) = g22 \int_0^t |Phi|(t', z)^2 dt',  xi(t, z) = sqrt(g22) \int_0^z |Phi|(t, z') dz'.
/// Throws std::domain_error if |Phi| vanishes on either path.
std::pair<double, double> scaled_variables(double t, double z, const std::function<double(double, double)>& amplitude,
                                           double g22, std::size_t n_cells = 4096);

}  // namespace graylaser
