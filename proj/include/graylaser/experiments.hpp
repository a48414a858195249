#pragma once

#include <vector>

#include "graylaser/nlse.hpp"
#include "graylaser/perturbation.hpp"

namespace graylaser {

// Single gray soliton (plus its mirror image for periodicity) on a constant background.
struct SingleSolitonSetup {
    NlseParams params;
    double eta = 0.5;
    double bg_amp = 1.0;
    std::size_t n_points = 512;
    double length = 128.0;
    double dt = 0.02;
    std::size_t n_steps = 750;
    std::size_t snapshot_stride = 50;
    double threshold = 0.95;
};

struct SingleSolitonResult {
    std::vector<Snapshot> snapshots;
    std::vector<MinimaRecord> minima;
    std::vector<double> track;  ///< position of the followed dip per snapshot
    double z0 = 0.0;
    double analytic_speed = 0.0;
    double tracked_speed = 0.0;  ///< least-squares slope of the track
    double max_drift = 0.0;      ///< largest |track - z0 - analytic_speed t|
};

/// The soliton starts at -length/4 and is followed by the dip nearest its
/// analytic trajectory.
SingleSolitonResult run_single_soliton(const SingleSolitonSetup& setup);

// Two co-located gray solitons splitting on a decaying, spatially uniform background.
struct SplitSetup {
    NlseParams params;
    double eta = 0.5;
    BackgroundSpec background = BackgroundSpec::peak_decay(1.0, 20.0);
    std::size_t n_points = 1024;
    double length = 200.0;
    double dt = 0.01;
    std::size_t n_steps = 6000;
    std::size_t snapshot_stride = 100;
    double threshold = 0.9;
    double separation_widths = 3.0;  ///< split once the dips are this many FWHM apart
};

struct SplitResult {
    std::vector<Snapshot> snapshots;
    std::vector<MinimaRecord> minima;
    std::size_t separated_from = 0;  ///< first snapshot counted as split; size() if never
    bool two_minima = false;         ///< exactly two dips in every split snapshot
    bool separation_grows = false;
    bool width_grows = false;
    /// largest |(v/a)(t) / (v/a)(t_split) - 1| over split snapshots, with v the
    /// speed of the right dip (centered differences) and a the background amplitude
    double speed_ratio_deviation = 0.0;
};

SplitResult run_split_fig3a(const SplitSetup& setup);

// Two solitons splitting on a static Gaussian background G(z) = a0 exp(-z^2 / 2W^2),
// held stationary by V(z) = g22 (a0^2 - G^2) + (z^2 / W^4 - 1 / W^2) / 2.
// The right dip is compared with the phase-angle equation started from its
// measured depth at the split.
struct PhaseAngleSetup {
    NlseParams params;
    double eta = 0.5;
    double a0 = 1.0;
    double width = 40.0;
    std::size_t n_points = 2048;
    double length = 320.0;
    double dt = 0.01;
    std::size_t n_steps = 4600;
    std::size_t snapshot_stride = 200;
    double threshold = 0.95;
    double separation_widths = 3.0;
    double min_background = 0.25;  ///< ignore dips where G < min_background * a0
    double dtau = 0.01;
    DepletionProfile depletion;
};

struct PhaseAngleComparison {
    double t = 0.0;
    double tau = 0.0;
    double position = 0.0;
    double measured_depth = 0.0;   ///< tracked eta^2
    double predicted_depth = 0.0;  ///< cos^2 alpha from the ODE
};

struct PhaseAngleResult {
    std::vector<Snapshot> snapshots;
    std::vector<MinimaRecord> minima;
    PhaseAngleTrajectory trajectory;
    std::vector<double> trajectory_t;  ///< lab time of each trajectory state
    std::vector<PhaseAngleComparison> comparison;
    double max_relative_deviation = 0.0;
};

PhaseAngleResult run_split_fig3b(const PhaseAngleSetup& setup);

/// G(z) and the matching scaled coordinate xi(z) = sqrt(g22) \int_0^z G.
double gaussian_background(double z, double a0, double width);
double gaussian_background_xi(double z, double a0, double width, double g22);

}  // namespace graylaser
