#include "graylaser/spectral.hpp"

#include <fftw3.h>

#include <algorithm>
#include <cmath>
#include <mutex>
#include <numbers>
#include <stdexcept>

namespace graylaser {

namespace {
std::mutex& planner_mutex()
{
    static std::mutex m;
    return m;
}
}  // namespace

FftPlan::FftPlan(std::size_t n) : n_(n)
{
    if (n == 0) throw std::invalid_argument("FftPlan: size must be positive");
    std::lock_guard lock(planner_mutex());
    buffer_ = reinterpret_cast<cplx*>(fftw_malloc(sizeof(fftw_complex) * n));
    if (buffer_ == nullptr) throw std::bad_alloc();
    auto* buf = reinterpret_cast<fftw_complex*>(buffer_);
    const int ni = static_cast<int>(n);
    fwd_ = fftw_plan_dft_1d(ni, buf, buf, FFTW_FORWARD, FFTW_ESTIMATE);
    bwd_ = fftw_plan_dft_1d(ni, buf, buf, FFTW_BACKWARD, FFTW_ESTIMATE);
}

FftPlan::~FftPlan() { release(); }

FftPlan::FftPlan(FftPlan&& other) noexcept
    : n_(other.n_), buffer_(other.buffer_), fwd_(other.fwd_), bwd_(other.bwd_)
{
    other.n_ = 0;
    other.buffer_ = nullptr;
    other.fwd_ = other.bwd_ = nullptr;
}

FftPlan& FftPlan::operator=(FftPlan&& other) noexcept
{
    if (this != &other) {
        release();
        std::swap(n_, other.n_);
        std::swap(buffer_, other.buffer_);
        std::swap(fwd_, other.fwd_);
        std::swap(bwd_, other.bwd_);
    }
    return *this;
}

void FftPlan::release() noexcept
{
    std::lock_guard lock(planner_mutex());
    if (fwd_) fftw_destroy_plan(static_cast<fftw_plan>(fwd_));
    if (bwd_) fftw_destroy_plan(static_cast<fftw_plan>(bwd_));
    if (buffer_) fftw_free(buffer_);
    fwd_ = bwd_ = nullptr;
    buffer_ = nullptr;
}

void FftPlan::forward(std::span<cplx> data) const
{
    if (data.size() != n_) throw std::invalid_argument("FftPlan::forward: size mismatch");
    std::copy(data.begin(), data.end(), buffer_);
    fftw_execute(static_cast<fftw_plan>(fwd_));
    std::copy(buffer_, buffer_ + n_, data.begin());
}

void FftPlan::inverse(std::span<cplx> data) const
{
    if (data.size() != n_) throw std::invalid_argument("FftPlan::inverse: size mismatch");
    std::copy(data.begin(), data.end(), buffer_);
    fftw_execute(static_cast<fftw_plan>(bwd_));
    const double inv = 1.0 / static_cast<double>(n_);
    for (std::size_t j = 0; j < n_; ++j) data[j] = buffer_[j] * inv;
}

std::vector<double> wavenumbers(const Grid1D& grid)
{
    const std::size_t n = grid.n_points();
    const double dk = 2.0 * std::numbers::pi / grid.length();
    std::vector<double> k(n);
    for (std::size_t j = 0; j < n; ++j) {
        const auto jj = static_cast<double>(j);
        k[j] = (j < n / 2 ? jj : jj - static_cast<double>(n)) * dk;
    }
    return k;
}

ComplexField spectral_derivative(const ComplexField& f, int order)
{
    if (order != 1 && order != 2)
        throw std::invalid_argument("spectral_derivative: order must be 1 or 2, got " + std::to_string(order));
    const std::size_t n = f.size();
    FftPlan plan(n);
    ComplexField out = f;
    plan.forward(out.values);
    const auto k = wavenumbers(f.grid);
    for (std::size_t j = 0; j < n; ++j) {
        if (order == 1)
            out[j] *= (n > 1 && j == n / 2) ? cplx{0.0, 0.0} : cplx{0.0, k[j]};
        else
            out[j] *= -k[j] * k[j];
    }
    plan.inverse(out.values);
    return out;
}

RealField spectral_derivative(const RealField& f, int order)
{
    ComplexField c(f.grid);
    for (std::size_t j = 0; j < f.size(); ++j) c[j] = f[j];
    const ComplexField d = spectral_derivative(c, order);
    RealField out(f.grid);
    for (std::size_t j = 0; j < f.size(); ++j) out[j] = d[j].real();
    return out;
}

}  // namespace graylaser
