#include "graylaser/nlse.hpp"

#include <cmath>
#include <sstream>
#include <stdexcept>

#include "graylaser/errors.hpp"

namespace graylaser {

namespace {

void check_soliton(double eta, double bg_amp, const NlseParams& params)
{
    if (!(bg_amp > 0.0)) throw std::domain_error("gray soliton: background amplitude must be positive");
    if (!(eta > 0.0 && eta <= 1.0)) throw std::domain_error("gray soliton: eta must lie in (0, 1]");
    params.validate_gray();
}

// i sqrt(1 - eta^2) + sign * eta * tanh(x)
cplx kink(double eta, int sign, double x)
{
    return {static_cast<double>(sign) * eta * std::tanh(x), std::sqrt(1.0 - eta * eta)};
}

}  // namespace

void NlseParams::validate_gray() const
{
    if (!(g22 > 0.0)) throw ConfigError("nlse: g22 must be positive for gray solitons");
}

double BackgroundSpec::amplitude(double t) const
{
    if (kind == BackgroundKind::constant) return a0;
    const double s = t / t_decay;
    return a0 * std::pow(1.0 + s * s, -0.25);
}

double healing_length(double bg_amp, const NlseParams& params) { return 1.0 / (std::sqrt(params.g22) * bg_amp); }

double sound_speed(double bg_amp, const NlseParams& params) { return std::sqrt(params.g22) * bg_amp; }

ComplexField gray_soliton_field(const SolitonSpec& spec, double bg_amp, const NlseParams& params,
                                const Grid1D& grid)
{
    check_soliton(spec.eta, bg_amp, params);
    const double l = healing_length(bg_amp, params);
    return sample(grid, [&](double z) {
        return bg_amp * kink(spec.eta, spec.sign, spec.eta * (z - spec.z0) / l) * std::polar(1.0, params.k_bg * z);
    });
}

ComplexField periodic_soliton_field(const SolitonSpec& spec, double bg_amp, const NlseParams& params,
                                    const Grid1D& grid)
{
    check_soliton(spec.eta, bg_amp, params);
    const double l = healing_length(bg_amp, params);
    const double half = 0.5 * grid.length();
    const double mid = grid.origin() + half;
    const double z1 = spec.z0 < mid ? spec.z0 + half : spec.z0 - half;
    return sample(grid, [&](double z) {
        const cplx main = kink(spec.eta, spec.sign, spec.eta * (z - spec.z0) / l);
        const cplx image = std::conj(kink(spec.eta, spec.sign, spec.eta * (z - z1) / l));
        return bg_amp * main * image * std::polar(1.0, params.k_bg * z);
    });
}

double soliton_speed(const SolitonSpec& spec, double bg_amp, const NlseParams& params)
{
    return static_cast<double>(spec.sign) * sound_speed(bg_amp, params) * std::sqrt(1.0 - spec.eta * spec.eta) +
           params.k_bg;
}

ComplexField two_soliton_field(double eta, double bg_amp, const NlseParams& params, const Grid1D& grid, double z0)
{
    check_soliton(eta, bg_amp, params);
    const double l = healing_length(bg_amp, params);
    return sample(grid, [&](double z) {
        const double s = 1.0 / std::cosh(eta * (z - z0) / l);
        return bg_amp * (1.0 - eta * eta * s * s) * std::polar(1.0, params.k_bg * z);
    });
}

double nlse_energy(const ComplexField& psi, const NlseParams& params)
{
    const ComplexField d = spectral_derivative(psi, 1);
    double sum = 0.0;
    for (std::size_t j = 0; j < psi.size(); ++j) {
        const double rho = std::norm(psi[j]);
        const double v = params.v_eff ? params.v_eff(psi.grid.coord(j)) : 0.0;
        sum += 0.5 * std::norm(d[j]) + v * rho + 0.5 * params.g22 * rho * rho;
    }
    return sum * psi.grid.spacing();
}

NlseSolver::NlseSolver(const Grid1D& grid, NlseParams params, double dt)
    : grid_(grid), params_(std::move(params)), dt_(dt), fft_(grid.n_points())
{
    if (dt == 0.0 || !std::isfinite(dt)) throw std::invalid_argument("NlseSolver: dt must be finite and nonzero");
    const std::size_t n = grid_.n_points();
    potential_.assign(n, 0.0);
    if (params_.v_eff)
        for (std::size_t j = 0; j < n; ++j) potential_[j] = params_.v_eff(grid_.coord(j));
    const auto q = wavenumbers(grid_);
    kinetic_.resize(n);
    for (std::size_t j = 0; j < n; ++j) kinetic_[j] = std::polar(1.0, -0.5 * q[j] * q[j] * dt_);
}

void NlseSolver::phase(ComplexField& psi, double tau) const
{
    for (std::size_t j = 0; j < psi.size(); ++j)
        psi[j] *= std::polar(1.0, -(potential_[j] + params_.g22 * std::norm(psi[j])) * tau);
}

void NlseSolver::step(ComplexField& psi) const
{
    phase(psi, 0.5 * dt_);
    fft_.forward(psi.values);
    for (std::size_t j = 0; j < psi.size(); ++j) psi[j] *= kinetic_[j];
    fft_.inverse(psi.values);
    phase(psi, 0.5 * dt_);
}

std::vector<Snapshot> evolve(ComplexField field, const NlseParams& params, double dt, std::size_t n_steps,
                             const EvolveOptions& options)
{
    if (!(dt > 0.0)) throw std::invalid_argument("evolve: dt must be positive");
    const NlseSolver solver(field.grid, params, dt);
    const bool rescale = options.background.kind != BackgroundKind::constant;

    std::vector<Snapshot> out;
    out.push_back({0, options.t0, field});
    for (std::size_t s = 1; s <= n_steps; ++s) {
        const double t_prev = options.t0 + static_cast<double>(s - 1) * dt;
        const double t = options.t0 + static_cast<double>(s) * dt;
        solver.step(field);
        if (rescale) {
            const double f = options.background.amplitude(t) / options.background.amplitude(t_prev);
            for (auto& v : field.values) v *= f;
        }
        for (const auto& v : field.values) {
            if (!std::isfinite(v.real()) || !std::isfinite(v.imag())) {
                std::ostringstream msg;
                msg << "nlse: non-finite field at step " << s << " (t = " << t << ")";
                throw NumericalError(msg.str());
            }
        }
        const bool keep = s == n_steps || (options.snapshot_stride > 0 && s % options.snapshot_stride == 0);
        if (keep) out.push_back({s, t, field});
    }
    return out;
}

std::vector<Dip> find_minima(const ComplexField& psi, double t, const BackgroundField& background, double threshold)
{
    const std::size_t n = psi.size();
    const double h = psi.grid.spacing();
    const std::vector<double> rho = psi.density();
    auto at = [&](std::ptrdiff_t j) {
        const auto nn = static_cast<std::ptrdiff_t>(n);
        return rho[static_cast<std::size_t>(((j % nn) + nn) % nn)];
    };

    std::vector<Dip> dips;
    for (std::size_t j = 0; j < n; ++j) {
        const auto sj = static_cast<std::ptrdiff_t>(j);
        const double ym = at(sj - 1), y0 = rho[j], yp = at(sj + 1);
        if (!(y0 < ym && y0 <= yp)) continue;
        const double z = psi.grid.coord(j);
        const double b2 = std::pow(background(t, z), 2);
        if (!(y0 < threshold * b2)) continue;

        const double curv = ym - 2.0 * y0 + yp;
        const double delta = curv > 0.0 ? 0.5 * (ym - yp) / curv : 0.0;
        const double rho_min = y0 - 0.25 * (ym - yp) * delta;

        Dip d;
        d.index = j;
        d.position = z + delta * h;
        const double bg2 = std::pow(background(t, d.position), 2);
        d.depth_fraction = 1.0 - rho_min / bg2;

        // Walk out to the half-depth level on both sides.
        const double level = 0.5 * (bg2 + rho_min);
        const auto limit = static_cast<std::ptrdiff_t>(n / 2);
        double left = 0.0, right = 0.0;
        for (std::ptrdiff_t k = 1; k < limit; ++k) {
            const double a = at(sj - k + 1), b = at(sj - k);
            if (b >= level) {
                left = static_cast<double>(k - 1) + (level - a) / (b - a);
                break;
            }
        }
        for (std::ptrdiff_t k = 1; k < limit; ++k) {
            const double a = at(sj + k - 1), b = at(sj + k);
            if (b >= level) {
                right = static_cast<double>(k - 1) + (level - a) / (b - a);
                break;
            }
        }
        d.fwhm = (left + right) * h;
        dips.push_back(d);
    }
    return dips;
}

std::vector<MinimaRecord> track_minima(const std::vector<Snapshot>& snapshots, const BackgroundField& background,
                                       double threshold)
{
    std::vector<MinimaRecord> out;
    out.reserve(snapshots.size());
    for (const auto& s : snapshots) out.push_back({s.t, find_minima(s.field, s.t, background, threshold)});
    return out;
}

}  // namespace graylaser
