#pragma once

#include <complex>
#include <mutex>
#include <span>

namespace tvortex {

// FFTW planning is not thread safe; every planner call goes through this.
std::mutex& fftw_planner_mutex();

// Signed frequency of FFT bin i on an n-point grid (Nyquist maps to -n/2).
inline int signed_wavenumber(int i, int n) { return i < n / 2 ? i : i - n; }

// In-place n x n complex DFT pair on an owned buffer. Plans use FFTW_ESTIMATE
// so the arithmetic is the same on every run. The inverse is unnormalized.
class ComplexFft2d {
public:
    explicit ComplexFft2d(int n);
    ~ComplexFft2d();
    ComplexFft2d(const ComplexFft2d&) = delete;
    ComplexFft2d& operator=(const ComplexFft2d&) = delete;

    int n() const { return n_; }
    std::span<std::complex<double>> data();
    void forward();
    void inverse();

private:
    int n_;
    std::complex<double>* buf_;
    void* fwd_;
    void* inv_;
};

}  // namespace tvortex
