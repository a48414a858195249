#pragma once

#include <cstddef>
#include <functional>
#include <span>
#include <vector>

#include "graylaser/grid.hpp"

namespace graylaser {

// Trapezoidal rule on a periodic grid (endpoint weights merge, so every
// sample carries the full spacing). NaN in, NaN out.
double quadrature(std::span<const double> f, const Grid1D& grid);
cplx quadrature(std::span<const cplx> f, const Grid1D& grid);

/// Composite Simpson rule of f over [a, b] with n_cells cells (each cell
/// sampled at both ends and the midpoint).
double simpson(const std::function<double(double)>& f, double a, double b, std::size_t n_cells);

// Running integral F(x) = \int_a^x f on [a, b]. Node values are accumulated
// once with per-cell Simpson; evaluation between nodes adds a Simpson
// estimate of the partial cell.
class CumulativeIntegral {
public:
    CumulativeIntegral() = default;
    CumulativeIntegral(std::function<double(double)> f, double a, double b, std::size_t n_cells);

    double operator()(double x) const;
    double lower() const { return a_; }
    double upper() const { return b_; }

private:
    std::function<double(double)> f_;
    double a_ = 0.0;
    double b_ = 0.0;
    double h_ = 0.0;
    std::vector<double> nodes_;
};

}  // namespace graylaser
