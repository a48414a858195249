#pragma once

#include <complex>
#include <cstddef>
#include <vector>

namespace graylaser {

using cplx = std::complex<double>;

// Uniform periodic grid: coordinates origin + j*spacing, j in [0, n_points).
class Grid1D {
public:
    Grid1D() = default;

    std::size_t n_points() const { return n_; }
    double length() const { return length_; }
    double origin() const { return origin_; }
    double spacing() const { return length_ / static_cast<double>(n_); }
    double coord(std::size_t j) const { return origin_ + static_cast<double>(j) * spacing(); }
    std::vector<double> coords() const;

    bool operator==(const Grid1D&) const = default;

private:
    friend Grid1D make_grid(std::size_t, double, double);
    Grid1D(std::size_t n, double length, double origin) : n_(n), length_(length), origin_(origin) {}

    std::size_t n_ = 0;
    double length_ = 0.0;
    double origin_ = 0.0;
};

/// Throws std::invalid_argument unless n_points is a power of two and length > 0.
Grid1D make_grid(std::size_t n_points, double length, double origin);

bool is_power_of_two(std::size_t n);

struct ComplexField {
    Grid1D grid;
    std::vector<cplx> values;

    ComplexField() = default;
    explicit ComplexField(const Grid1D& g) : grid(g), values(g.n_points()) {}
    ComplexField(const Grid1D& g, std::vector<cplx> v);

    std::size_t size() const { return values.size(); }
    cplx& operator[](std::size_t j) { return values[j]; }
    const cplx& operator[](std::size_t j) const { return values[j]; }

    /// sum |values|^2 * spacing
    double norm2() const;
    std::vector<double> density() const;
};

struct RealField {
    Grid1D grid;
    std::vector<double> values;

    RealField() = default;
    explicit RealField(const Grid1D& g) : grid(g), values(g.n_points()) {}
    RealField(const Grid1D& g, std::vector<double> v);

    std::size_t size() const { return values.size(); }
    double& operator[](std::size_t j) { return values[j]; }
    const double& operator[](std::size_t j) const { return values[j]; }
};

template <class F>
ComplexField sample(const Grid1D& g, F&& f)
{
    ComplexField out(g);
    for (std::size_t j = 0; j < g.n_points(); ++j) out[j] = f(g.coord(j));
    return out;
}

}  // namespace graylaser
