#include "graylaser/perturbation.hpp"

#include <cmath>
#include <numbers>
#include <sstream>
#include <stdexcept>

#include "graylaser/quadrature.hpp"

namespace graylaser {

namespace {

// Samples Z_j = (j - (n-1)/2) h, exactly symmetric about 0.
std::vector<double> window_nodes(const PhaseAngleWindow& w)
{
    if (w.n_points < 8 || w.n_points % 2 != 0)
        throw std::invalid_argument("phase_angle_rhs: window needs an even number of points >= 8");
    const double h = 2.0 * w.half_width / static_cast<double>(w.n_points - 1);
    std::vector<double> z(w.n_points);
    for (std::size_t j = 0; j < w.n_points; ++j)
        z[j] = (static_cast<double>(j) - 0.5 * static_cast<double>(w.n_points - 1)) * h;
    return z;
}

// d/dZ of y on the window. Every stencil is written so that reflecting y
// (y_j -> y_{n-1-j}) negates the result bit for bit.
std::vector<double> log_gradient(const std::vector<double>& y, double h)
{
    const std::size_t n = y.size();
    std::vector<double> d(n);
    auto one_sided = [h](double a, double b, double c) { return ((4.0 * b - 3.0 * a) - c) / (2.0 * h); };
    d[0] = one_sided(y[0], y[1], y[2]);
    d[n - 1] = -one_sided(y[n - 1], y[n - 2], y[n - 3]);
    d[1] = (y[2] - y[0]) / (2.0 * h);
    d[n - 2] = (y[n - 1] - y[n - 3]) / (2.0 * h);
    for (std::size_t j = 2; j + 2 < n; ++j)
        d[j] = (8.0 * (y[j + 1] - y[j - 1]) - (y[j + 2] - y[j - 2])) / (12.0 * h);
    return d;
}

double frame_integral(const std::function<double(double)>& amp, const std::function<double(double)>& s_mag,
                      const PhaseAngleWindow& window)
{
    const auto z = window_nodes(window);
    const std::size_t n = z.size();
    const double h = z[1] - z[0];

    std::vector<double> lphi(n);
    for (std::size_t j = 0; j < n; ++j) {
        const double a = amp(z[j]);
        if (!(a > 0.0)) {
            std::ostringstream msg;
            msg << "phase_angle_rhs: background amplitude " << a << " at Z = " << z[j] << " is not positive";
            throw std::domain_error(msg.str());
        }
        lphi[j] = std::log(a);
    }
    const auto dphi = log_gradient(lphi, h);

    std::vector<double> ds(n, 0.0);
    if (s_mag) {
        std::vector<double> ls(n);
        for (std::size_t j = 0; j < n; ++j) {
            const double s = s_mag(z[j]);
            if (!(s > 0.0 && s <= 1.0)) throw std::domain_error("phase_angle_rhs: |S| must lie in (0, 1]");
            ls[j] = std::log(s);
        }
        ds = log_gradient(ls, h);
    }

    auto term = [&](std::size_t j) {
        const double sech = 1.0 / std::cosh(z[j]);
        const double w = (j == 0 || j == n - 1) ? 0.5 * h : h;
        return w * sech * sech * (dphi[j] + ds[j]);
    };
    // Pair mirrored nodes so a reflected background gives exactly the negated sum.
    double sum = 0.0;
    for (std::size_t k = 0; k < n / 2; ++k) sum += term(k) + term(n - 1 - k);
    return sum;
}

}  // namespace

double PhaseAngleState::eta() const { return std::cos(alpha); }

DepletionProfile localized_depletion(double d)
{
    if (!(d >= 0.0 && d < 0.5)) throw std::invalid_argument("localized_depletion: d must lie in [0, 0.5)");
    return [d](double z, double) {
        const double s = 1.0 / std::cosh(z);
        return std::sqrt(1.0 - d * s * s);
    };
}

double phase_angle_rhs(double alpha, const PolarBackground& background, const std::function<double(double)>& s_mag,
                       const PhaseAngleWindow& window)
{
    const double c = std::cos(alpha);
    return 0.5 * c * c * frame_integral(background.amplitude, s_mag, window);
}

PhaseAngleTrajectory evolve_phase_angle(const PhaseAngleState& initial, const ScaledBackground& background,
                                        const DepletionProfile& depletion, double dtau, std::size_t n_steps,
                                        int direction, const PhaseAngleWindow& window)
{
    if (!(dtau > 0.0)) throw std::invalid_argument("evolve_phase_angle: dtau must be positive");
    if (direction != 1 && direction != -1) throw std::invalid_argument("evolve_phase_angle: direction must be +1 or -1");
    const double dir = static_cast<double>(direction);
    const double top = std::nextafter(std::numbers::pi / 2, 0.0);

    // (d alpha, d xi0) at a given state
    auto rhs = [&](double alpha, double xi0, double tau) {
        const double c = std::cos(alpha);
        PolarBackground frame;
        frame.amplitude = [&](double z) { return background(xi0 + dir * z / c, tau); };
        std::function<double(double)> s;
        if (depletion) s = [&](double z) { return depletion(z, tau); };
        return std::pair{phase_angle_rhs(alpha, frame, s, window), dir * std::sin(alpha)};
    };

    PhaseAngleTrajectory out;
    out.states.push_back(initial);
    PhaseAngleState st = initial;
    for (std::size_t i = 0; i < n_steps; ++i) {
        const double h = dtau;
        const auto [a1, x1] = rhs(st.alpha, st.xi0, st.tau);
        const auto [a2, x2] = rhs(st.alpha + 0.5 * h * a1, st.xi0 + 0.5 * h * x1, st.tau + 0.5 * h);
        const auto [a3, x3] = rhs(st.alpha + 0.5 * h * a2, st.xi0 + 0.5 * h * x2, st.tau + 0.5 * h);
        const auto [a4, x4] = rhs(st.alpha + h * a3, st.xi0 + h * x3, st.tau + h);
        const double da = h / 6.0 * (a1 + 2.0 * a2 + 2.0 * a3 + a4);
        if (std::abs(da) > 0.1) {
            std::ostringstream msg;
            msg << "evolve_phase_angle: alpha changed by " << da << " in one step at tau = " << st.tau
                << "; reduce dtau";
            throw std::invalid_argument(msg.str());
        }
        st.alpha += da;
        st.xi0 += h / 6.0 * (x1 + 2.0 * x2 + 2.0 * x3 + x4);
        st.tau = initial.tau + static_cast<double>(i + 1) * h;
        if (st.alpha < 0.0 || st.alpha > top) {
            if (!out.saturated) {
                std::ostringstream msg;
                msg << (st.alpha < 0.0 ? "soliton became fully dark" : "soliton depth vanished") << " at tau = " << st.tau;
                out.diagnostic = msg.str();
            }
            out.saturated = true;
            st.alpha = st.alpha < 0.0 ? 0.0 : top;
        }
        out.states.push_back(st);
    }
    return out;
}

std::pair<double, double> scaled_variables(double t, double z, const std::function<double(double, double)>& amplitude,
                                           double g22, std::size_t n_cells)
{
    auto checked = [&](double tt, double zz) {
        const double a = amplitude(tt, zz);
        if (!(a > 0.0)) {
            std::ostringstream msg;
            msg << "scaled_variables: background vanishes at t = " << tt << ", z = " << zz;
            throw std::domain_error(msg.str());
        }
        return a;
    };
    const double tau = g22 * simpson([&](double s) { return std::pow(checked(s, z), 2); }, 0.0, t, n_cells);
    const double xi = std::sqrt(g22) * simpson([&](double y) { return checked(t, y); }, 0.0, z, n_cells);
    return {tau, xi};
}

}  // namespace graylaser
