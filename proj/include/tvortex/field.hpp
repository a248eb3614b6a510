#pragma once

#include <filesystem>
#include <optional>
#include <span>
#include <vector>

#include "tvortex/green.hpp"
#include "tvortex/kernels.hpp"
#include "tvortex/torus.hpp"

namespace tvortex {

// Complex field on the periodic n x n grid: sample (i, j) sits at (i/n, j/n)
// and is stored at i*n + j.
struct ComplexField {
    int n = 0;
    std::vector<Complex> values;

    ComplexField() = default;
    explicit ComplexField(int size, Complex fill = {1.0, 0.0});

    double h() const { return 1.0 / n; }
    std::size_t index(int i, int j) const {
        const int a = ((i % n) + n) % n;
        const int b = ((j % n) + n) % n;
        return static_cast<std::size_t>(a) * static_cast<std::size_t>(n) + static_cast<std::size_t>(b);
    }
    Complex& operator()(int i, int j) { return values[index(i, j)]; }
    const Complex& operator()(int i, int j) const { return values[index(i, j)]; }
};

enum class Derivative { Centered, Spectral };

struct Densities {
    int n = 0;
    std::vector<double> e;    // 1/2 |grad u|^2 + (1 - |u|^2)^2 / (4 eps^2)
    std::vector<Vec2> j;      // Im(conj(u) grad u)
    std::vector<double> jac;  // Im(conj(u_x) u_y)
};

// Spectral derivatives zero the Nyquist mode; they ring near vortex cores.
void gradient(const ComplexField& u, Derivative kind, std::vector<Complex>& ux, std::vector<Complex>& uy);
Densities densities(const ComplexField& u, double epsilon, Derivative kind = Derivative::Centered);

// h^2 times the sum over the grid, accumulated row by row in a fixed order.
double grid_integral(std::span<const double> values, int n);
Vec2 grid_integral(std::span<const Vec2> values, int n);

struct DetectedVortex {
    Vec2 position;
    int degree = 0;
};

struct FieldDiagnostics {
    double E_eps = 0.0;
    Vec2 Q;
    // h^2 sum of the Jacobian over disks of the requested radius around each
    // window centre.
    std::vector<double> jacobian_integrals;
    std::vector<DetectedVortex> vortex_list;
};

FieldDiagnostics diagnostics(const ComplexField& u, double epsilon, std::span<const TorusPoint> windows,
                             double window_radius);

// Moves every vortex onto the centre of its grid cell, so it sits h/2 from the
// nodes in both directions and the grid is symmetric about it; q follows the
// displacement through lift_q.
VortexConfiguration nudge_off_grid(const VortexConfiguration& c, int n);

// j_H = -sum_j d_j J gradF(x - a_j) + J q on the grid, for the nudged
// configuration.
std::vector<Vec2> harmonic_current(const VortexConfiguration& c, const GreenTable& t, int n);

struct PointCore {
    Vec2 position;
    int degree = 0;
};

// Builds H = exp(i theta) with grad theta = j_field away from the cores. The
// phase is integrated along row 0 and then up each column. Near a core the
// model current d chi(r) theta_hat / r is integrated exactly and only the smooth
// remainder goes through the trapezoid rule. Without explicit cores they are
// detected from plaquette circulations and located by a local fit.
// theta(0, 0) = 0. Throws InconsistentCirculation when a torus cycle or a
// plaquette of the smooth remainder fails to close within 1e-2.
ComplexField phase_integrate(std::span<const Vec2> j_field, int n,
                             std::optional<std::vector<PointCore>> cores = std::nullopt,
                             double model_cutoff = kDefaultCutoff);

// Cores located from a current field alone.
std::vector<PointCore> detect_current_cores(std::span<const Vec2> j_field, int n);

// Relative L^2 mismatch between two vector fields over grid nodes farther than
// rho from every vortex.
double masked_relative_l2(std::span<const Vec2> a, std::span<const Vec2> b, int n,
                          const VortexConfiguration& c, double rho);

// u0 = prod_j tanh(dist(x, a_j) / eps) * H for the nudged configuration.
// Throws CoreUnresolved if eps < 2h.
ComplexField initial_data(const VortexConfiguration& c, const GreenTable& t, double epsilon, int n);

// Quadrature of 1/2 |j|^2 over the torus minus the rho-disks around all
// vortices. Cells cut by a disk boundary are weighted by their area fraction
// outside the disks.
double ring_energy(std::span<const Vec2> j_field, int n, const VortexConfiguration& c, double rho);

// Minimum over f of pi int_0^R [f'^2 + f^2/r^2 + (1 - f^2)^2 / (2 eps^2)] r dr
// with f(0) = 0, f(R) = 1: the degree-one energy on the disk B_R.
struct RadialProfile {
    std::vector<double> r;
    std::vector<double> f;
    double energy = 0.0;
    int newton_iterations = 0;
};
RadialProfile radial_minimizer(double epsilon, double radius = 1.0);

// gamma_hat(eps) = radial minimum on B_1 minus pi log(1/eps).
double gamma_hat(double epsilon);

// Richardson limit over the last two entries of a decreasing list, assuming an
// eps^2 error term: (4 g(eps/2) - g(eps)) / 3 when they halve. Throws
// NoConvergence when Newton fails after 200 iterations.
double gamma_estimate(std::span<const double> eps_list);

// Field snapshot: "TVF1", n (int32 LE), eps (float64 LE), then row-major
// interleaved re/im float64 LE.
void save_snapshot(const ComplexField& u, double epsilon, const std::filesystem::path& path);
ComplexField load_snapshot(const std::filesystem::path& path, double* epsilon = nullptr);

}  // namespace tvortex
