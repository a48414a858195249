#include "doctest.h"

#include <cmath>
#include <string>

#include "graylaser/threelevel.hpp"

using namespace graylaser;

namespace {

double diff_norm(const ComplexField& a, const ComplexField& b)
{
    double s = 0.0;
    for (std::size_t j = 0; j < a.size(); ++j) s += std::norm(a[j] - b[j]);
    return std::sqrt(s * a.grid.spacing());
}

ThreeLevelState gaussian_probe_state(const Grid1D& g, double center, double width)
{
    ThreeLevelState s{ComplexField(g), ComplexField(g), ComplexField(g), 0.0};
    for (std::size_t j = 0; j < g.n_points(); ++j) {
        const double x = (g.coord(j) - center) / width;
        s.probe[j] = std::exp(-0.5 * x * x);
    }
    return s;
}

}  // namespace

TEST_CASE("solver enforces the advection bound")
{
    ThreeLevelParams p;
    const auto g = make_grid(256, 64.0, -32.0);
    const double bound = g.spacing() / p.transfer.c;
    CHECK_NOTHROW(ThreeLevelSolver(g, p, ControlProfile::constant(10.0), bound));
    try {
        ThreeLevelSolver(g, p, ControlProfile::constant(10.0), 1.5 * bound);
        FAIL("expected invalid_argument");
    } catch (const std::invalid_argument& e) {
        CHECK(std::string(e.what()).find("spacing / c") != std::string::npos);
    }
}

TEST_CASE("uncoupled probe advects rigidly at c")
{
    ThreeLevelParams p;
    p.transfer.g2n = 0.0;
    const auto g = make_grid(512, 200.0, -100.0);
    const double dt = 0.9 * g.spacing() / p.transfer.c;
    const ThreeLevelSolver solver(g, p, ControlProfile::constant(5.0), dt);
    auto s = gaussian_probe_state(g, -40.0, 4.0);
    for (int i = 0; i < 100; ++i) solver.step(s);
    const auto expect = gaussian_probe_state(g, -40.0 + p.transfer.c * s.t, 4.0).probe;
    CHECK(diff_norm(s.probe, expect) < 1e-8);
}

TEST_CASE("strong constant control keeps the excited state empty")
{
    ThreeLevelParams p;
    p.transfer.c = 10.0;
    p.transfer.g2n = 1e4;
    p.transfer.U22 = 0.0;
    p.kinetic = false;
    const auto prof = ControlProfile::constant(100.0);
    const auto g = make_grid(2048, 400.0, -200.0);
    PulseShape pulse{1.0, 2.0, 1, 0.0};
    auto s = initial_state([&](double T) { return pulse(T); }, p, prof, g);
    const ThreeLevelSolver solver(g, p, prof, 0.8 * g.spacing() / p.transfer.c);
    for (int i = 0; i < 400; ++i) solver.step(s);
    CHECK(s.excited_population() < 1e-4 * s.psi2.norm2());
    CHECK(dark_state_projection(s, prof, p) > 0.999);
}

TEST_CASE("excitation number is conserved without loss and decays with it")
{
    auto setup = default_compare_setup();
    const auto prof = compare_profile(setup);
    const auto g = make_grid(setup.n_points, 350.0, -250.0);
    PulseShape pulse{0.5, 1.0, 1, 15.0};
    const Envelope env = [&](double T) { return pulse(T); };
    const double dt = 0.8 * g.spacing() / setup.params.transfer.c;

    const auto lossless = run_transfer(env, setup.params, prof, g, dt, 1500);
    for (double n : lossless.number_history) CHECK(std::abs(n - lossless.initial_number) <= 1e-8 * lossless.initial_number);

    auto lossy = setup.params;
    lossy.gamma = 5.0;
    const auto run = run_transfer(env, lossy, prof, g, dt, 1500);
    for (std::size_t i = 1; i < run.number_history.size(); ++i)
        CHECK(run.number_history[i] <= run.number_history[i - 1] * (1.0 + 1e-13));
    CHECK(run.final_number < run.initial_number);
}

TEST_CASE("output energy decreases monotonically with the loss rate")
{
    auto setup = default_compare_setup();
    double prev = 1e300;
    for (double gamma : {0.0, 1.0, 10.0, 100.0}) {
        setup.params.gamma = gamma;
        const auto r = compare_with_adiabatic(setup);
        const double out = r.simulated.norm2();
        CHECK(out < prev);
        prev = out;
    }
}

TEST_CASE("splitting converges at second order in dt")
{
    auto setup = default_compare_setup();
    setup.cfl = 1.0;
    std::vector<ComplexField> out;
    for (std::size_t refine : {1, 2, 4}) {
        setup.refine = refine;
        out.push_back(compare_with_adiabatic(setup).simulated);
    }
    const double ratio = diff_norm(out[0], out[1]) / diff_norm(out[1], out[2]);
    MESSAGE("Richardson ratio " << ratio);
    CHECK(ratio >= 3.5);
    CHECK(ratio <= 4.5);
}

TEST_CASE("run_transfer with a zero pulse stays zero")
{
    auto setup = default_compare_setup();
    const auto g = make_grid(512, 100.0, -50.0);
    const auto run = run_transfer([](double) { return cplx{0.0, 0.0}; }, setup.params, compare_profile(setup), g,
                                  0.5 * g.spacing() / setup.params.transfer.c, 50);
    for (const auto& v : run.final_state.psi2.values) CHECK(v == cplx{0.0, 0.0});
    CHECK(run.final_number == 0.0);
}

TEST_CASE("run_transfer detects a pulse leaving the window")
{
    ThreeLevelParams p;
    p.transfer.c = 10.0;
    const auto g = make_grid(512, 60.0, -30.0);
    PulseShape pulse{1.0, 1.0, 1, 2.0};  // already touching z = -30 at t = 0
    CHECK_THROWS_AS(run_transfer([&](double T) { return pulse(T); }, p, ControlProfile::constant(100.0), g,
                                 0.5 * g.spacing() / p.transfer.c, 10),
                    NumericalError);
}

TEST_CASE("dark state projection")
{
    ThreeLevelParams p;
    const auto prof = ControlProfile::tanh_ramp(30.0, 0.0, 2.0);
    const auto g = make_grid(128, 20.0, -10.0);
    auto s = gaussian_probe_state(g, 0.0, 2.0);
    const double G = p.coupling();
    for (std::size_t j = 0; j < g.n_points(); ++j) s.psi2[j] = -G * s.probe[j] / prof.omega0(g.coord(j));
    CHECK(dark_state_projection(s, prof, p) == doctest::Approx(1.0).epsilon(1e-14));
    for (std::size_t j = 0; j < g.n_points(); ++j) s.psi2[j] = cplx{0.0, 1.0} * G * s.probe[j] / prof.omega0(g.coord(j));
    CHECK(dark_state_projection(s, prof, p) == 0.0);
    for (auto& v : s.psi2.values) v = 0.0;
    CHECK(dark_state_projection(s, prof, p) == 1.0);
}

TEST_CASE("adiabatic run stays on the dark state mid-transfer")
{
    const auto r = compare_with_adiabatic(default_compare_setup());
    CHECK(r.mid_dark_projection > 0.99);
    CHECK(r.discrepancy < 0.05);
}

TEST_CASE("faster control variation breaks adiabaticity")
{
    auto setup = default_compare_setup();
    const double slow = compare_with_adiabatic(setup).discrepancy;
    setup.ramp_width /= 10.0;
    const double fast = compare_with_adiabatic(setup).discrepancy;
    CHECK(fast > slow);
}
