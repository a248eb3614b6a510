#pragma once

#include <filesystem>
#include <memory>
#include <vector>

#include "tvortex/vec2.hpp"

namespace tvortex {

// Periodic Green's function of the unit torus: Laplacian F = 2*pi*(delta - 1),
// zero mean. F behaves like log|x| at the origin.
//
// The table stores the smooth remainder Ft = F - chi(|x|) log|x| on an n x n
// grid (sample (i, j) sits at (i/n, j/n), stored at i*n + j), together with
// its gradient. chi is a C-infinity cutoff equal to 1 near the origin and 0 beyond
// rc, so the Poisson right-hand side for Ft is smooth and one FFT solve gives
// spectral accuracy.
struct GreenTable {
    int n = 0;
    double cutoff_radius = 0.0;
    double mean_shift = 0.0;
    std::vector<double> f;
    std::vector<double> gx;
    std::vector<double> gy;

    double h() const { return 1.0 / n; }
    std::size_t index(int i, int j) const {
        return static_cast<std::size_t>(i) * static_cast<std::size_t>(n) + static_cast<std::size_t>(j);
    }
};

using GreenTablePtr = std::shared_ptr<const GreenTable>;

inline constexpr int kDefaultTableSize = 1024;
inline constexpr double kDefaultCutoff = 0.25;

// n must be a power of two >= 256 (>= 16 accepted for tests via allow_small);
// BadCutoff unless 8/n <= cutoff_radius <= 0.25.
GreenTable build_table(int n = kDefaultTableSize, double cutoff_radius = kDefaultCutoff);
GreenTablePtr build_shared_table(int n = kDefaultTableSize, double cutoff_radius = kDefaultCutoff);

// Throws SingularPoint when d is a lattice point (within 1e-12).
double eval_F(const GreenTable& t, const Vec2& d);
Vec2 eval_gradF(const GreenTable& t, const Vec2& d);

// Analytic singular part chi(r) log r and its gradient at a displacement.
double singular_part(double cutoff_radius, const Vec2& d);
Vec2 singular_part_gradient(double cutoff_radius, const Vec2& d);

// Integral of chi(|x|) log|x| over the plane.
double singular_part_integral(double cutoff_radius);

// Spectral Laplacian of the stored remainder, sampled on the table grid.
std::vector<double> remainder_laplacian(const GreenTable& t);

// Binary cache: "TGF1", n (uint32 LE), cutoff (float64 LE), then row-major
// float64 LE samples of Ft, dFt/dx, dFt/dy.
void save_table(const GreenTable& t, const std::filesystem::path& path);
GreenTable load_table(const std::filesystem::path& path);

// Loads the cache when present and matching (n, cutoff); otherwise builds and
// writes it.
GreenTablePtr load_or_build_table(int n, double cutoff_radius, const std::filesystem::path& cache);

namespace cutoff {
// chi is identically 1 on [0, kPlateauFraction * rc].
inline constexpr double kPlateauFraction = 0.15;
// chi and its first two radial derivatives.
struct Profile {
    double value;
    double d1;
    double d2;
};
Profile eval(double r, double cutoff_radius);
}  // namespace cutoff

// Independent evaluation of F from its Fourier series, used as the reference
// for the table. The Gaussian-regularized lattice sum
//   -(1/2pi) sum_{0<|k|_inf<=K} exp(-sigma |k|^2) cos(2 pi k.x) / |k|^2
// differs from F by the smoothing of the heat semigroup at time
// sigma/(4 pi^2); that difference is sigma/(2 pi) minus half the sum of
// E1(pi^2 |x+n|^2 / sigma) over image points, added back in closed form.
namespace oracle {

double regularized_lattice_sum(const Vec2& x, double sigma, int K);
Vec2 regularized_lattice_sum_gradient(const Vec2& x, double sigma, int K);

// Throws SingularPoint at lattice points. Defaults give ~1e-15 accuracy.
double F(const Vec2& x, double sigma = kPi, int K = 8);
Vec2 gradF(const Vec2& x, double sigma = kPi, int K = 8);

// Plain sigma -> 0 Richardson extrapolation of the regularized sum over
// sigma in {4, 2, 1} * (2/K)^2, without the closed-form correction.
double F_richardson(const Vec2& x, int K);

}  // namespace oracle

}  // namespace tvortex
