#include "tvortex/kernels.hpp"

#include <cmath>

#include "tvortex/green.hpp"
#include "tvortex/torus.hpp"

namespace tvortex::kernels {

namespace {

inline double green_rhs_point(int i, int j, int n, double rc) {
    const double h = 1.0 / n;
    const Vec2 d = min_image(Vec2{i * h, j * h});
    const double r = norm(d);
    if (r <= cutoff::kPlateauFraction * rc || r >= rc) return -kTwoPi;
    const auto c = cutoff::eval(r, rc);
    const double lap_chi = c.d2 + c.d1 / r;
    return -kTwoPi - (lap_chi * std::log(r) + 2.0 * c.d1 / r);
}

inline void nonlinear_point(Complex& u, double decay, double twist) {
    const double s0 = std::norm(u);
    const double ratio = 1.0 / (s0 + (1.0 - s0) * decay);
    const double lr = std::log(ratio);
    u *= std::sqrt(ratio) * Complex{std::cos(twist * lr), std::sin(twist * lr)};
}

inline void gradient_point(std::span<const Complex> u, int n, int i, int j, std::span<Complex> ux,
                           std::span<Complex> uy) {
    const auto at = [n](int a, int b) {
        return static_cast<std::size_t>((a + n) % n) * static_cast<std::size_t>(n) +
               static_cast<std::size_t>((b + n) % n);
    };
    const double half_inv_h = 0.5 * n;
    ux[at(i, j)] = (u[at(i + 1, j)] - u[at(i - 1, j)]) * half_inv_h;
    uy[at(i, j)] = (u[at(i, j + 1)] - u[at(i, j - 1)]) * half_inv_h;
}

inline Vec2 current_point(const GreenTable& t, const VortexConfiguration& c, int n, int i, int j) {
    const double h = 1.0 / n;
    const Vec2 x{i * h, j * h};
    Vec2 acc = c.q;
    for (std::size_t k = 0; k < c.size(); ++k)
        acc -= static_cast<double>(c.degrees[k]) * eval_gradF(t, x - c.position(k).vec());
    return apply_J(acc);
}

}  // namespace

void green_rhs_serial(int n, double rc, std::span<double> out) {
    for (int i = 0; i < n; ++i)
        for (int j = 0; j < n; ++j) out[static_cast<std::size_t>(i) * n + j] = green_rhs_point(i, j, n, rc);
}

void green_rhs_omp(int n, double rc, std::span<double> out) {
#pragma omp parallel for schedule(static)
    for (int i = 0; i < n; ++i)
        for (int j = 0; j < n; ++j) out[static_cast<std::size_t>(i) * n + j] = green_rhs_point(i, j, n, rc);
}

void cgl_nonlinear_serial(std::span<Complex> u, double dt, double eps, double p, double w) {
    const double decay = std::exp(-2.0 * p * dt / (eps * eps));
    const double twist = 0.5 * w / p;
    for (auto& v : u) nonlinear_point(v, decay, twist);
}

void cgl_nonlinear_omp(std::span<Complex> u, double dt, double eps, double p, double w) {
    const double decay = std::exp(-2.0 * p * dt / (eps * eps));
    const double twist = 0.5 * w / p;
    const auto size = static_cast<std::ptrdiff_t>(u.size());
#pragma omp parallel for schedule(static)
    for (std::ptrdiff_t k = 0; k < size; ++k) nonlinear_point(u[static_cast<std::size_t>(k)], decay, twist);
}

void centered_gradient_serial(std::span<const Complex> u, int n, std::span<Complex> ux,
                              std::span<Complex> uy) {
    for (int i = 0; i < n; ++i)
        for (int j = 0; j < n; ++j) gradient_point(u, n, i, j, ux, uy);
}

void centered_gradient_omp(std::span<const Complex> u, int n, std::span<Complex> ux,
                           std::span<Complex> uy) {
#pragma omp parallel for schedule(static)
    for (int i = 0; i < n; ++i)
        for (int j = 0; j < n; ++j) gradient_point(u, n, i, j, ux, uy);
}

void sample_current_serial(const GreenTable& t, const VortexConfiguration& c, int n,
                           std::span<Vec2> out) {
    for (int i = 0; i < n; ++i)
        for (int j = 0; j < n; ++j) out[static_cast<std::size_t>(i) * n + j] = current_point(t, c, n, i, j);
}

void sample_current_omp(const GreenTable& t, const VortexConfiguration& c, int n,
                        std::span<Vec2> out) {
#pragma omp parallel for schedule(static)
    for (int i = 0; i < n; ++i)
        for (int j = 0; j < n; ++j) out[static_cast<std::size_t>(i) * n + j] = current_point(t, c, n, i, j);
}

}  // namespace tvortex::kernels
