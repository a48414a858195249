#include "doctest.h"

#include <cmath>
#include <functional>
#include <numbers>

#include "graylaser/transfer.hpp"

using namespace graylaser;

namespace {

TransferParams defaults() { return TransferParams{}; }

ControlProfile default_ramp(const TransferParams& p) { return ControlProfile::tanh_ramp(30.0, p.L / 2, p.L / 15); }

// Test-only adaptive Simpson, independent of the cumulative tables.
double adaptive_simpson(const std::function<double(double)>& f, double a, double b, double tol, int depth = 40)
{
    auto simp = [&](double x0, double x1) { return (x1 - x0) / 6.0 * (f(x0) + 4.0 * f(0.5 * (x0 + x1)) + f(x1)); };
    std::function<double(double, double, double, double, int)> rec = [&](double x0, double x1, double whole,
                                                                          double eps, int d) {
        const double m = 0.5 * (x0 + x1);
        const double left = simp(x0, m), right = simp(m, x1);
        if (d <= 0 || std::abs(left + right - whole) <= 15.0 * eps) return left + right + (left + right - whole) / 15.0;
        return rec(x0, m, left, eps / 2, d - 1) + rec(m, x1, right, eps / 2, d - 1);
    };
    return rec(a, b, simp(a, b), tol, depth);
}

// Golden-section maximisation of a unimodal function on [a, b].
double argmax_oracle(const std::function<double(double)>& f, double a, double b)
{
    const double r = (std::sqrt(5.0) - 1.0) / 2.0;
    double x1 = b - r * (b - a), x2 = a + r * (b - a);
    for (int i = 0; i < 200 && b - a > 1e-14; ++i) {
        if (f(x1) < f(x2)) {
            a = x1;
            x1 = x2;
            x2 = a + r * (b - a);
        } else {
            b = x2;
            x2 = x1;
            x1 = b - r * (b - a);
        }
    }
    return 0.5 * (a + b);
}

ComplexField pulse_field(const PulseShape& pulse, std::size_t n = 8192, double half = 8.0)
{
    return sample(make_grid(n, 2 * half, -half), pulse);
}

}  // namespace

TEST_CASE("mixing angle limits")
{
    auto p = defaults();
    CHECK(mixing_angle(0.0, ControlProfile::constant(1e12), p) < 1e-10);
    const double om = std::sqrt(p.g2n * p.v() / p.c);
    CHECK(mixing_angle(0.0, ControlProfile::constant(om), p) == doctest::Approx(std::numbers::pi / 4).epsilon(1e-14));
    p.g2n = 0.0;
    CHECK(mixing_angle(3.0, default_ramp(p), p) == 0.0);
    CHECK_THROWS_AS(mixing_angle(0.0, ControlProfile::constant(0.0), p), std::domain_error);
}

TEST_CASE("group velocity limits and bounds")
{
    auto p = defaults();
    CHECK(group_velocity(0.0, ControlProfile::constant(1e9), p) == doctest::Approx(p.c).epsilon(1e-12));
    CHECK(group_velocity(0.0, ControlProfile::constant(1e-6), p) == doctest::Approx(p.v()).epsilon(1e-9));
    auto same = p;
    same.c = same.v();
    for (double om : {0.01, 1.0, 50.0}) CHECK(group_velocity(0.0, ControlProfile::constant(om), same) == doctest::Approx(same.c));

    const auto prof = default_ramp(p);
    double prev_vg = 1e300, prev_theta = -1.0;
    for (int i = 0; i <= 200; ++i) {
        const double z = 0.05 * i;
        const double vg = group_velocity(z, prof, p);
        CHECK(vg > p.v());
        CHECK(vg <= p.c);
        CHECK(vg <= prev_vg);  // Omega0 decreasing => V_g decreasing
        const double th = mixing_angle(z, prof, p);
        CHECK(th >= prev_theta);
        prev_vg = vg;
        prev_theta = th;
    }
}

TEST_CASE("delay")
{
    auto p = defaults();
    const auto g = make_grid(256, 10.0, 0.0);
    const auto flat = ControlProfile::constant(5.0);
    const double vg = group_velocity(0.0, flat, p);
    CHECK(delay(7.0, flat, p, g) == doctest::Approx(7.0 / vg).epsilon(1e-14));
    CHECK(delay(0.0, flat, p, g) == 0.0);
    CHECK_THROWS_AS(delay(-1.0, flat, p, g), std::domain_error);

    const auto ramp = default_ramp(p);
    const TransferIntegrals ints(ramp, p, p.L);
    double prev = -1.0;
    for (double z : {0.5, 2.0, 4.9, 5.3, 7.5, 10.0}) {
        const double oracle = adaptive_simpson([&](double x) { return 1.0 / group_velocity(x, ramp, p); }, 0.0, z, 1e-14);
        CHECK(std::abs(delay(z, ramp, p, g) - oracle) <= 1e-8 * oracle);
        CHECK(std::abs(ints.delay(z) - oracle) <= 1e-8 * oracle);
        CHECK(ints.delay(z) > prev);
        prev = ints.delay(z);
    }
}

TEST_CASE("phase coefficients")
{
    auto p = defaults();
    const auto flat = ControlProfile::constant(3.0);
    CHECK(phase_coefficients(1.0, flat, p).A == 0.0);

    const double b1 = phase_coefficients(0.0, ControlProfile::constant(2.0), p).B;
    const double b2 = phase_coefficients(0.0, ControlProfile::constant(4.0), p).B;
    CHECK(b1 / b2 == doctest::Approx(16.0).epsilon(1e-14));

    const double kappa = 0.3;
    const auto expo = ControlProfile::exponential(2.0, kappa);
    const double z = 1.7;
    const double r = p.g2n / std::pow(expo.omega0(z), 2);
    const auto pc = phase_coefficients(z, expo, p);
    CHECK(pc.A == doctest::Approx(r * p.v0 * p.v0 / (2 * p.k0 * p.k0) * kappa * kappa).epsilon(1e-13));
    CHECK(pc.A_prime == doctest::Approx(pc.A / (1 + r)).epsilon(1e-14));
    CHECK(pc.B_prime == doctest::Approx(pc.B / (1 + r)).epsilon(1e-14));
}

TEST_CASE("tabulated profile derivatives track the analytic ramp")
{
    const auto ramp = ControlProfile::tanh_ramp(30.0, 5.0, 1.0);
    auto err_at = [&](std::size_t n) {
        const auto g = make_grid(n, 10.0, 0.0);
        RealField om(g);
        for (std::size_t j = 0; j < n; ++j) om[j] = ramp.omega0(g.coord(j));
        const auto tab = ControlProfile::tabulated(om);
        const double z = g.coord(n / 2 + 3);
        return std::abs(tab.dlog(z) - ramp.dlog(z));
    };
    const double e1 = err_at(512), e2 = err_at(1024);
    CHECK(e2 < 1e-3);
    CHECK(e1 / e2 > 3.5);
}

TEST_CASE("transfer map without phase terms is a scaled delay")
{
    TransferParams p;
    p.U22 = 0.0;
    p.v0 = 0.0;  // kills the log-derivative part of A
    p.vr = 4.0;
    p.c = 16.0;  // c / v = 4
    const auto prof = ControlProfile::tanh_ramp(30.0, p.L / 2, p.L / 15);
    const PulseShape pulse{1.0, 1.0, 1, 0.0};
    const auto in = pulse_field(pulse, 1024);
    const auto out = transfer_map(in, p, prof, p.L, {0.98, 0.2});
    const TransferIntegrals ints(prof, p, p.L);
    CHECK(out.grid.origin() == doctest::Approx(in.grid.origin() + ints.delay(p.L)).epsilon(1e-14));
    for (std::size_t j = 0; j < in.size(); ++j) {
        CHECK(out[j].real() == doctest::Approx(2.0 * in[j].real()).epsilon(1e-14));
        CHECK(out[j].imag() == 0.0);
    }
}

TEST_CASE("transfer map preserves norm up to c/v and applies the SPM phase")
{
    auto p = defaults();
    // Constant coefficients: cos^2(theta) B' is constant, so the SPM integral is z times it.
    const auto flat = ControlProfile::constant(2.0);
    const double om = 2.0, r = p.g2n / (om * om);
    const double cos2 = 1.0 / (1.0 + r * p.v() / p.c);
    const double spm_closed = cos2 * p.U22 * r * r / (1.0 + r) * p.L;

    const PulseShape pulse{0.3, 1.0, 1, 0.0};
    const auto in = pulse_field(pulse, 4096);
    const auto out = transfer_map(in, p, flat, p.L, {0.0, 1.0});
    CHECK(out.norm2() == doctest::Approx(p.c / p.v() * in.norm2()).epsilon(1e-10));
    const double far = std::arg(out[0]);
    for (std::size_t j = 0; j < in.size(); j += 97) {
        const double dphi = std::remainder(std::arg(out[j]) - far, 2 * std::numbers::pi);
        const double expect = std::remainder(std::norm(in[j]) * spm_closed, 2 * std::numbers::pi);
        CHECK(std::abs(dphi - expect) < 1e-9);
        CHECK(std::abs(out[j]) == doctest::Approx(std::sqrt(p.c / p.v()) * std::abs(in[j])).epsilon(1e-13));
    }
}

TEST_CASE("transfer map checks the boundary angles")
{
    auto p = defaults();
    const auto in = pulse_field(PulseShape{}, 256);
    try {
        transfer_map(in, p, ControlProfile::constant(2.0), p.L);
        FAIL("expected ConfigError");
    } catch (const ConfigError& e) {
        CHECK(std::string(e.what()).find("z = 0") != std::string::npos);
    }
    try {
        transfer_map(in, p, ControlProfile::constant(1e3), p.L);
        FAIL("expected ConfigError");
    } catch (const ConfigError& e) {
        CHECK(std::string(e.what()).find("output endpoint") != std::string::npos);
    }
    CHECK_THROWS_AS(transfer_map(in, p, default_ramp(p), p.L - 1.0), ConfigError);
    CHECK_NOTHROW(transfer_map(in, p, default_ramp(p), p.L));
}

TEST_CASE("chirp law extrema")
{
    CHECK(chirp_analytic(0.0, {1, 1.0, 1.0}) == 0.0);
    CHECK(chirp_analytic(0.0, {3, 2.0, 5.0}) == 0.0);

    for (int m : {1, 3}) {
        const ChirpSpec spec{m, 1.0, 1.0};
        const double at = argmax_oracle([&](double u) { return chirp_analytic(u, spec); }, 0.05, 2.0);
        const double expected_at = std::pow((2.0 * m - 1.0) / (2.0 * m), 1.0 / (2.0 * m));
        CHECK(std::abs(at - expected_at) < 1e-6);
        if (m == 1) {
            CHECK(std::abs(at - 1 / std::sqrt(2.0)) < 1e-6);
            CHECK(std::abs(chirp_analytic(at, spec) - 0.42888194248) < 1e-6);
        } else {
            CHECK(std::abs(at - 0.97007) < 1e-5);
            CHECK(std::abs(chirp_analytic(at, spec) - 1.120) < 5e-4);
        }
    }
}

TEST_CASE("numeric chirp of a zero-SPM transfer vanishes")
{
    TransferParams p;
    p.U22 = 0.0;
    const auto out = transfer_map(pulse_field(PulseShape{}), p, default_ramp(p), p.L);
    for (double v : chirp_numeric(out).values) CHECK(std::abs(v) < 1e-10);
}

TEST_CASE("numeric chirp matches the chirp law")
{
    const auto p = defaults();
    const auto prof = default_ramp(p);
    const TransferIntegrals ints(prof, p, p.L);
    for (int m : {1, 3}) {
        const PulseShape pulse{1.0, 1.0, m, 0.0};
        const auto in = pulse_field(pulse);
        const auto chirp = chirp_numeric(transfer_map(in, p, prof, p.L));
        const ChirpSpec spec{m, pulse.T0, chirp_normalization(ints, p.L, pulse)};
        double scale = 0.0, err = 0.0, integral = 0.0;
        for (std::size_t j = 0; j < in.size(); ++j) scale = std::max(scale, std::abs(chirp_analytic(in.grid.coord(j), spec)));
        for (std::size_t j = 0; j < in.size(); ++j) {
            integral += chirp[j] * in.grid.spacing();
            if (std::norm(in[j]) < 1e-6) continue;
            err = std::max(err, std::abs(chirp[j] - chirp_analytic(in.grid.coord(j), spec)));
        }
        CHECK(err <= 1e-6 * scale);
        CHECK(std::abs(integral) <= 1e-9 * scale);
        if (m == 3) {
            // flat top: negligible chirp in the middle, the action is at the edges
            const auto mid = in.size() / 2;
            CHECK(std::abs(chirp[mid]) < 1e-6 * scale);
            CHECK(std::abs(chirp[in.grid.n_points() / 2 + static_cast<std::size_t>(0.5 / in.grid.spacing())]) < 0.1 * scale);
        }
    }
}

TEST_CASE("chirp_numeric reports an under-resolved phase")
{
    const auto p = defaults();
    const auto out = transfer_map(pulse_field(PulseShape{1.0, 1.0, 3, 0.0}, 256), p, default_ramp(p), p.L);
    CHECK_THROWS_AS(chirp_numeric(out), NumericalError);
}

TEST_CASE("transfer params validation")
{
    auto p = defaults();
    CHECK_NOTHROW(p.validate());
    p.c = 0.5;
    CHECK_THROWS_AS(p.validate(), ConfigError);
    p = defaults();
    p.vr = 2.0;
    CHECK_THROWS_AS(p.validate(), ConfigError);
}
