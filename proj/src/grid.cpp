#include "graylaser/grid.hpp"

#include <cmath>
#include <stdexcept>
#include <string>

namespace graylaser {

bool is_power_of_two(std::size_t n) { return n != 0 && (n & (n - 1)) == 0; }

Grid1D make_grid(std::size_t n_points, double length, double origin)
{
    if (!is_power_of_two(n_points))
        throw std::invalid_argument("grid: n_points must be a power of two, got " + std::to_string(n_points));
    if (!(length > 0.0) || !std::isfinite(length))
        throw std::invalid_argument("grid: length must be positive and finite");
    if (!std::isfinite(origin)) throw std::invalid_argument("grid: origin must be finite");
    return Grid1D(n_points, length, origin);
}

std::vector<double> Grid1D::coords() const
{
    std::vector<double> z(n_);
    for (std::size_t j = 0; j < n_; ++j) z[j] = coord(j);
    return z;
}

ComplexField::ComplexField(const Grid1D& g, std::vector<cplx> v) : grid(g), values(std::move(v))
{
    if (values.size() != grid.n_points()) throw std::invalid_argument("ComplexField: size does not match grid");
}

double ComplexField::norm2() const
{
    double s = 0.0;
    for (const auto& c : values) s += std::norm(c);
    return s * grid.spacing();
}

std::vector<double> ComplexField::density() const
{
    std::vector<double> d(values.size());
    for (std::size_t j = 0; j < values.size(); ++j) d[j] = std::norm(values[j]);
    return d;
}

RealField::RealField(const Grid1D& g, std::vector<double> v) : grid(g), values(std::move(v))
{
    if (values.size() != grid.n_points()) throw std::invalid_argument("RealField: size does not match grid");
}

}  // namespace graylaser
