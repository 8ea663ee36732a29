#pragma once

#include <complex>
#include <span>
#include <vector>

#include <fftw3.h>

namespace gapsol {

/// In-place complex DFT of a row-major multi-dimensional array (unnormalised, FFTW sign
/// convention: forward uses e^{-i k x}). Plans are created with FFTW_ESTIMATE so results are
/// reproducible run to run.
class FftPlan {
public:
    explicit FftPlan(std::vector<int> shape);
    ~FftPlan();

    FftPlan(const FftPlan&) = delete;
    FftPlan& operator=(const FftPlan&) = delete;
    FftPlan(FftPlan&& other) noexcept;
    FftPlan& operator=(FftPlan&& other) noexcept;

    std::size_t size() const { return size_; }
    const std::vector<int>& shape() const { return shape_; }

    void forward(std::span<std::complex<double>> data) const;
    void backward(std::span<std::complex<double>> data) const;

private:
    std::vector<int> shape_;
    std::size_t size_ = 0;
    fftw_plan forward_ = nullptr;
    fftw_plan backward_ = nullptr;
};

/// Angular wavenumbers of an n-point periodic axis of length `period`, in FFT order.
std::vector<double> fft_wavenumbers(int n, double period);

}  // namespace gapsol
