#include "graylaser/quadrature.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

namespace graylaser {

double quadrature(std::span<const double> f, const Grid1D& grid)
{
    double s = 0.0;
    for (double v : f) s += v;
    return s * grid.spacing();
}

cplx quadrature(std::span<const cplx> f, const Grid1D& grid)
{
    cplx s{0.0, 0.0};
    for (const auto& v : f) s += v;
    return s * grid.spacing();
}

double simpson(const std::function<double(double)>& f, double a, double b, std::size_t n_cells)
{
    if (n_cells == 0) throw std::invalid_argument("simpson: need at least one cell");
    const double h = (b - a) / static_cast<double>(n_cells);
    double s = f(a) + f(b);
    for (std::size_t i = 0; i < n_cells; ++i) {
        const double x0 = a + static_cast<double>(i) * h;
        s += 4.0 * f(x0 + 0.5 * h);
        if (i > 0) s += 2.0 * f(x0);
    }
    return s * h / 6.0;
}

CumulativeIntegral::CumulativeIntegral(std::function<double(double)> f, double a, double b, std::size_t n_cells)
    : f_(std::move(f)), a_(a), b_(b)
{
    if (n_cells == 0 || !(b >= a)) throw std::invalid_argument("CumulativeIntegral: need b >= a and n_cells > 0");
    h_ = (b - a) / static_cast<double>(n_cells);
    nodes_.assign(n_cells + 1, 0.0);
    if (h_ == 0.0) return;
    double f0 = f_(a);
    for (std::size_t i = 0; i < n_cells; ++i) {
        const double x0 = a + static_cast<double>(i) * h_;
        const double f1 = f_(x0 + h_);
        nodes_[i + 1] = nodes_[i] + h_ / 6.0 * (f0 + 4.0 * f_(x0 + 0.5 * h_) + f1);
        f0 = f1;
    }
}

double CumulativeIntegral::operator()(double x) const
{
    if (x < a_ || x > b_ + 1e-12 * std::max(1.0, std::abs(b_)))
        throw std::domain_error("CumulativeIntegral: argument outside tabulated range");
    if (h_ == 0.0) return 0.0;
    const auto last = nodes_.size() - 1;
    auto i = static_cast<std::size_t>(std::floor((x - a_) / h_));
    i = std::min(i, last);
    const double x0 = a_ + static_cast<double>(i) * h_;
    const double dx = x - x0;
    if (dx <= 0.0) return nodes_[i];
    return nodes_[i] + dx / 6.0 * (f_(x0) + 4.0 * f_(x0 + 0.5 * dx) + f_(x));
}

}  // namespace graylaser
