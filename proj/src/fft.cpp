#include "tvortex/fft.hpp"

#include <fftw3.h>

namespace tvortex {

std::mutex& fftw_planner_mutex() {
    static std::mutex m;
    return m;
}

ComplexFft2d::ComplexFft2d(int n) : n_(n) {
    const auto size = static_cast<std::size_t>(n) * static_cast<std::size_t>(n);
    buf_ = reinterpret_cast<std::complex<double>*>(fftw_alloc_complex(size));
    auto* raw = reinterpret_cast<fftw_complex*>(buf_);
    std::lock_guard lock(fftw_planner_mutex());
    fwd_ = fftw_plan_dft_2d(n, n, raw, raw, FFTW_FORWARD, FFTW_ESTIMATE);
    inv_ = fftw_plan_dft_2d(n, n, raw, raw, FFTW_BACKWARD, FFTW_ESTIMATE);
}

ComplexFft2d::~ComplexFft2d() {
    {
        std::lock_guard lock(fftw_planner_mutex());
        fftw_destroy_plan(static_cast<fftw_plan>(fwd_));
        fftw_destroy_plan(static_cast<fftw_plan>(inv_));
    }
    fftw_free(buf_);
}

std::span<std::complex<double>> ComplexFft2d::data() {
    return {buf_, static_cast<std::size_t>(n_) * static_cast<std::size_t>(n_)};
}

void ComplexFft2d::forward() { fftw_execute(static_cast<fftw_plan>(fwd_)); }
void ComplexFft2d::inverse() { fftw_execute(static_cast<fftw_plan>(inv_)); }

}  // namespace tvortex
