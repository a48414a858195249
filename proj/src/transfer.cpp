#include "graylaser/transfer.hpp"

#include <algorithm>
#include <cmath>
#include <memory>
#include <numbers>
#include <sstream>

#include "graylaser/spectral.hpp"

namespace graylaser {

namespace {

double checked_omega(double z, const ControlProfile& prof)
{
    const double om = prof.omega0(z);
    if (!(om > 0.0)) {
        std::ostringstream msg;
        msg << "control profile: Omega0(" << z << ") = " << om << " is not positive";
        throw std::domain_error(msg.str());
    }
    return om;
}

// Linear interpolation on a uniform table, clamped at the ends.
double interp(const std::vector<double>& y, double x0, double h, double x)
{
    const double s = (x - x0) / h;
    if (s <= 0.0) return y.front();
    const auto last = static_cast<double>(y.size() - 1);
    if (s >= last) return y.back();
    const auto i = static_cast<std::size_t>(s);
    const double w = s - static_cast<double>(i);
    return (1.0 - w) * y[i] + w * y[i + 1];
}

std::vector<double> centered_diff(const std::vector<double>& y, double h)
{
    const std::size_t n = y.size();
    std::vector<double> d(n, 0.0);
    if (n < 2) return d;
    d[0] = (y[1] - y[0]) / h;
    d[n - 1] = (y[n - 1] - y[n - 2]) / h;
    for (std::size_t j = 1; j + 1 < n; ++j) d[j] = (y[j + 1] - y[j - 1]) / (2.0 * h);
    return d;
}

}  // namespace

ControlProfile ControlProfile::constant(double omega)
{
    return {[omega](double) { return omega; }, [](double) { return 0.0; }, [](double) { return 0.0; }};
}

ControlProfile ControlProfile::exponential(double omega, double kappa)
{
    return {[=](double z) { return omega * std::exp(-kappa * z); }, [=](double) { return -kappa; },
            [](double) { return 0.0; }};
}

ControlProfile ControlProfile::tanh_ramp(double omega, double center, double width, double floor)
{
    if (!(width > 0.0)) throw std::invalid_argument("tanh_ramp: width must be positive");
    const double floor2 = floor * floor;
    // s = (1 - tanh x)/2 = 1/(1 + e^{2x}); d ln s / dx = -(1 + tanh x)
    auto s_of = [=](double z) { return 0.5 * (1.0 - std::tanh((z - center) / width)); };
    return {[=](double z) { return omega * std::sqrt(std::max(floor2, s_of(z))); },
            [=](double z) {
                if (s_of(z) <= floor2) return 0.0;
                return -0.5 * (1.0 + std::tanh((z - center) / width)) / width;
            },
            [=](double z) {
                if (s_of(z) <= floor2) return 0.0;
                const double sech = 1.0 / std::cosh((z - center) / width);
                return -0.5 * sech * sech / (width * width);
            }};
}

ControlProfile ControlProfile::tabulated(const RealField& omega)
{
    auto logs = std::make_shared<std::vector<double>>(omega.size());
    for (std::size_t j = 0; j < omega.size(); ++j) {
        if (!(omega[j] > 0.0)) throw std::domain_error("tabulated profile: Omega0 must be positive");
        (*logs)[j] = std::log(omega[j]);
    }
    const double x0 = omega.grid.origin();
    const double h = omega.grid.spacing();
    auto d1 = std::make_shared<std::vector<double>>(centered_diff(*logs, h));
    auto d2 = std::make_shared<std::vector<double>>(centered_diff(*d1, h));
    return {[=](double z) { return std::exp(interp(*logs, x0, h, z)); },
            [=](double z) { return interp(*d1, x0, h, z); }, [=](double z) { return interp(*d2, x0, h, z); }};
}

void TransferParams::validate() const
{
    if (!(v() > 0.0)) throw ConfigError("transfer: beam velocity v = v0 + vr must be positive");
    if (!(c > v())) throw ConfigError("transfer: atoms faster than light (need c > v)");
    if (!(g2n >= 0.0)) throw ConfigError("transfer: g2n must be non-negative");
    if (k0 < 100.0 * std::abs(vr)) throw ConfigError("transfer: need k0 >= 100 |k_p - k_c|");
    if (!(L > 0.0)) throw ConfigError("transfer: L must be positive");
}

double mixing_angle(double z, const ControlProfile& prof, const TransferParams& p)
{
    const double om = checked_omega(z, prof);
    return std::atan(std::sqrt(p.g2n * p.v() / p.c) / om);
}

double group_velocity(double z, const ControlProfile& prof, const TransferParams& p)
{
    const double om = checked_omega(z, prof);
    const double r = p.g2n / (om * om);
    return (p.c + r * p.v()) / (1.0 + r);
}

PhaseCoefficients phase_coefficients(double z, const ControlProfile& prof, const TransferParams& p)
{
    const double om = checked_omega(z, prof);
    const double r = p.g2n / (om * om);
    const double dl = prof.dlog(z);
    const double bracket = dl * dl - prof.d2log(z);
    PhaseCoefficients pc;
    pc.A = r * ((p.V2(z) + p.density * p.U21) + p.v0 * p.v0 / (2.0 * p.k0 * p.k0) * bracket);
    pc.B = p.U22 * r * r;
    pc.A_prime = pc.A / (1.0 + r);
    pc.B_prime = pc.B / (1.0 + r);
    return pc;
}

TransferIntegrals::TransferIntegrals(const ControlProfile& prof, const TransferParams& p, double z_max,
                                     std::size_t n_cells, PhaseForm form)
    : z_max_(z_max),
      tau_([prof, p](double z) { return 1.0 / group_velocity(z, prof, p); }, 0.0, z_max, n_cells),
      a_(
          [prof, p, form](double z) {
              const double w = form == PhaseForm::per_time ? 1.0 / group_velocity(z, prof, p) : 1.0;
              return w * phase_coefficients(z, prof, p).A_prime;
          },
          0.0, z_max, n_cells),
      b_(
          [prof, p, form](double z) {
              const double w = form == PhaseForm::per_time ? 1.0 / group_velocity(z, prof, p) : 1.0;
              const double c = std::cos(mixing_angle(z, prof, p));
              return w * c * c * phase_coefficients(z, prof, p).B_prime;
          },
          0.0, z_max, n_cells)
{
    if (z_max < 0.0) throw std::domain_error("TransferIntegrals: z_max must be non-negative");
}

double TransferIntegrals::delay(double z) const
{
    if (z < 0.0) throw std::domain_error("delay: z must be non-negative");
    return tau_(z);
}

double TransferIntegrals::a_phase(double z) const { return a_(z); }
double TransferIntegrals::spm(double z) const { return b_(z); }

double delay(double z, const ControlProfile& prof, const TransferParams& p, const Grid1D& grid)
{
    if (z < 0.0) throw std::domain_error("delay: z must be non-negative");
    if (z == 0.0) return 0.0;
    // 16 Simpson cells per grid cell keeps the floor kink of ramp profiles below 1e-9 relative
    const auto cells = std::max<std::size_t>(64, 16 * static_cast<std::size_t>(std::ceil(z / grid.spacing())));
    return simpson([&](double x) { return 1.0 / group_velocity(x, prof, p); }, 0.0, z, cells);
}

ComplexField transfer_map(const ComplexField& input_pulse, const TransferParams& p, const ControlProfile& prof,
                          double z_out, const BoundaryCaps& caps)
{
    if (z_out < p.L) throw ConfigError("transfer_map: z_out must be >= L");
    const double cos_in = std::cos(mixing_angle(0.0, prof, p));
    if (cos_in < caps.cos_theta_in_min) {
        std::ostringstream msg;
        msg << "transfer_map: input endpoint z = 0 has cos(theta) = " << cos_in << " < " << caps.cos_theta_in_min;
        throw ConfigError(msg.str());
    }
    const double cos_out = std::cos(mixing_angle(z_out, prof, p));
    if (cos_out > caps.cos_theta_out_max) {
        std::ostringstream msg;
        msg << "transfer_map: output endpoint z = " << z_out << " has cos(theta) = " << cos_out << " > "
            << caps.cos_theta_out_max;
        throw ConfigError(msg.str());
    }

    const TransferIntegrals ints(prof, p, z_out, 4096, caps.phase_form);
    const double tau = ints.delay(z_out);
    const double phase0 = ints.a_phase(z_out);
    const double spm = ints.spm(z_out);
    const double amp = std::sqrt(p.c / p.v());

    const Grid1D out_grid = make_grid(input_pulse.grid.n_points(), input_pulse.grid.length(),
                                      input_pulse.grid.origin() + tau);
    ComplexField out(out_grid);
    for (std::size_t j = 0; j < out.size(); ++j) {
        const cplx e = input_pulse[j];
        const double dphi = phase0 + std::norm(e) * spm;
        out[j] = amp * e * std::polar(1.0, dphi);
    }
    return out;
}

cplx PulseShape::operator()(double T) const
{
    const double u = (T - center) / T0;
    return {E0 * std::exp(-0.5 * std::pow(u * u, m)), 0.0};
}

double chirp_analytic(double T, const ChirpSpec& spec)
{
    const double u = T / spec.T0;
    const int m = spec.m;
    return spec.Lambda0 * m * std::pow(u, 2 * m - 1) * std::exp(-std::pow(u, 2 * m));
}

double chirp_normalization(const TransferIntegrals& ints, double z, const PulseShape& pulse)
{
    return 2.0 / pulse.T0 * pulse.E0 * pulse.E0 * ints.spm(z);
}

RealField chirp_numeric(const ComplexField& output)
{
    const std::size_t n = output.size();
    const Grid1D& g = output.grid;
    double peak = 0.0;
    for (const auto& v : output.values) peak = std::max(peak, std::abs(v));
    const double significant = 1e-6 * peak;

    auto wrap = [](double d) { return std::remainder(d, 2.0 * std::numbers::pi); };

    std::vector<double> phase(n);
    phase[0] = std::arg(output[0]);
    double prev_step = 0.0;
    for (std::size_t j = 1; j < n; ++j) {
        const double step = wrap(std::arg(output[j]) - std::arg(output[j - 1]));
        const bool resolved = std::abs(step) <= 0.9 * std::numbers::pi &&
                              (j == 1 || std::abs(step - prev_step) <= 0.5 * std::numbers::pi);
        prev_step = step;
        if (!resolved && std::abs(output[j]) > significant && std::abs(output[j - 1]) > significant) {
            std::ostringstream msg;
            msg << "chirp_numeric: phase step " << step << " between samples " << j - 1 << " and " << j
                << " is ambiguous; refine the time grid";
            throw NumericalError(msg.str());
        }
        phase[j] = phase[j - 1] + step;
    }
    // Net winding over the period is a linear carrier; differentiate the
    // periodic remainder spectrally.
    const double winding = phase[n - 1] + wrap(std::arg(output[0]) - std::arg(output[n - 1])) - phase[0];
    RealField rest(g);
    for (std::size_t j = 0; j < n; ++j)
        rest[j] = phase[j] - winding * static_cast<double>(j) / static_cast<double>(n);
    RealField d = spectral_derivative(rest, 1);
    const double slope = winding / g.length();
    for (auto& v : d.values) v = -(v + slope);
    return d;
}

}  // namespace graylaser
