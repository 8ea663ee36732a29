#include "gapsol/fft.hpp"

#include <mutex>
#include <numbers>
#include <utility>

#include "gapsol/error.hpp"

namespace gapsol {

namespace {

// The FFTW planner is not thread safe; execution of distinct plans is.
std::mutex& planner_mutex() {
    static std::mutex m;
    return m;
}

fftw_complex* as_fftw(std::complex<double>* p) { return reinterpret_cast<fftw_complex*>(p); }

}  // namespace

FftPlan::FftPlan(std::vector<int> shape) : shape_(std::move(shape)) {
    if (shape_.empty()) throw Error(ErrorCode::InvalidArgument, "FFT shape must be non-empty");
    size_ = 1;
    for (int n : shape_) {
        if (n <= 0) throw Error(ErrorCode::InvalidArgument, "FFT extents must be positive");
        size_ *= static_cast<std::size_t>(n);
    }
    std::vector<std::complex<double>> scratch(size_);
    std::lock_guard lock(planner_mutex());
    const int rank = static_cast<int>(shape_.size());
    const unsigned flags = FFTW_ESTIMATE | FFTW_UNALIGNED;
    forward_ = fftw_plan_dft(rank, shape_.data(), as_fftw(scratch.data()), as_fftw(scratch.data()), FFTW_FORWARD, flags);
    backward_ =
        fftw_plan_dft(rank, shape_.data(), as_fftw(scratch.data()), as_fftw(scratch.data()), FFTW_BACKWARD, flags);
    if (!forward_ || !backward_) throw Error(ErrorCode::InvalidArgument, "FFTW planning failed");
}

FftPlan::~FftPlan() {
    std::lock_guard lock(planner_mutex());
    if (forward_) fftw_destroy_plan(forward_);
    if (backward_) fftw_destroy_plan(backward_);
}

FftPlan::FftPlan(FftPlan&& other) noexcept
    : shape_(std::move(other.shape_)),
      size_(other.size_),
      forward_(std::exchange(other.forward_, nullptr)),
      backward_(std::exchange(other.backward_, nullptr)) {}

FftPlan& FftPlan::operator=(FftPlan&& other) noexcept {
    if (this != &other) {
        std::lock_guard lock(planner_mutex());
        if (forward_) fftw_destroy_plan(forward_);
        if (backward_) fftw_destroy_plan(backward_);
        shape_ = std::move(other.shape_);
        size_ = other.size_;
        forward_ = std::exchange(other.forward_, nullptr);
        backward_ = std::exchange(other.backward_, nullptr);
    }
    return *this;
}

void FftPlan::forward(std::span<std::complex<double>> data) const {
    if (data.size() != size_) throw Error(ErrorCode::DimensionMismatch, "FFT buffer size mismatch");
    fftw_execute_dft(forward_, as_fftw(data.data()), as_fftw(data.data()));
}

void FftPlan::backward(std::span<std::complex<double>> data) const {
    if (data.size() != size_) throw Error(ErrorCode::DimensionMismatch, "FFT buffer size mismatch");
    fftw_execute_dft(backward_, as_fftw(data.data()), as_fftw(data.data()));
}

std::vector<double> fft_wavenumbers(int n, double period) {
    std::vector<double> k(static_cast<std::size_t>(n));
    const double base = 2.0 * std::numbers::pi / period;
    for (int m = 0; m < n; ++m) k[static_cast<std::size_t>(m)] = base * (m < (n + 1) / 2 ? m : m - n);
    return k;
}

}  // namespace gapsol
