#pragma once

#include <cstddef>
#include <span>
#include <vector>

#include "graylaser/grid.hpp"

namespace graylaser {

// Complex-to-complex FFT of fixed size backed by FFTW. The plan owns its
// work buffer, so results do not depend on the caller's array alignment.
// Forward is unnormalized; inverse divides by n.
class FftPlan {
public:
    explicit FftPlan(std::size_t n);
    ~FftPlan();
    FftPlan(const FftPlan&) = delete;
    FftPlan& operator=(const FftPlan&) = delete;
    FftPlan(FftPlan&& other) noexcept;
    FftPlan& operator=(FftPlan&& other) noexcept;

    std::size_t size() const { return n_; }
    void forward(std::span<cplx> data) const;
    void inverse(std::span<cplx> data) const;

private:
    void release() noexcept;

    std::size_t n_ = 0;
    cplx* buffer_ = nullptr;
    void* fwd_ = nullptr;
    void* bwd_ = nullptr;
};

/// Angular wavenumbers in FFT order: 2*pi/L * {0, 1, ..., n/2-1, -n/2, ..., -1}.
std::vector<double> wavenumbers(const Grid1D& grid);

/// d^order f / dz^order for order 1 or 2 via multiplication by (ik)^order.
/// The Nyquist mode is zeroed for odd orders.
ComplexField spectral_derivative(const ComplexField& f, int order);
RealField spectral_derivative(const RealField& f, int order);

}  // namespace graylaser
