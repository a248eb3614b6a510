#pragma once

// Data-parallel grid kernels. Each kernel has a plain serial reference and an
// OpenMP version with identical arithmetic per grid point; the library calls
// the OpenMP versions and the tests check them against the references.

#include <complex>
#include <span>

#include "tvortex/vec2.hpp"

namespace tvortex {

struct GreenTable;
struct VortexConfiguration;

using Complex = std::complex<double>;

namespace kernels {

// Right-hand side of the Poisson problem for the smooth remainder of F:
// -2*pi - Laplacian(chi log r) evaluated away from the origin.
void green_rhs_serial(int n, double cutoff_radius, std::span<double> out);
void green_rhs_omp(int n, double cutoff_radius, std::span<double> out);

// Exact flow of m u_t = -eps^-2 (|u|^2 - 1) u over dt, with 1/m = p + i w.
void cgl_nonlinear_serial(std::span<Complex> u, double dt, double eps, double p, double w);
void cgl_nonlinear_omp(std::span<Complex> u, double dt, double eps, double p, double w);

// Second-order centered differences on the periodic n x n grid, spacing 1/n.
void centered_gradient_serial(std::span<const Complex> u, int n, std::span<Complex> ux,
                              std::span<Complex> uy);
void centered_gradient_omp(std::span<const Complex> u, int n, std::span<Complex> ux,
                           std::span<Complex> uy);

// Harmonic current -sum_j d_j J gradF(x - a_j) + J q at every grid node.
void sample_current_serial(const GreenTable& t, const VortexConfiguration& c, int n,
                           std::span<Vec2> out);
void sample_current_omp(const GreenTable& t, const VortexConfiguration& c, int n,
                        std::span<Vec2> out);

}  // namespace kernels
}  // namespace tvortex
