#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <omp.h>

#include "support.hpp"
#include "tvortex/dynamics.hpp"
#include "tvortex/field.hpp"
#include "tvortex/kernels.hpp"

using namespace tvortex;

// The OpenMP kernels do the same arithmetic per point as the serial ones, so
// the results must agree bit for bit whatever the thread count.

namespace {

std::vector<Complex> random_field(int n) {
    std::vector<Complex> u(static_cast<std::size_t>(n) * n);
    for (auto& v : u) v = {testing::uniform(-1.2, 1.2), testing::uniform(-1.2, 1.2)};
    return u;
}

struct Threads {
    explicit Threads(int k) : saved(omp_get_max_threads()) { omp_set_num_threads(k); }
    ~Threads() { omp_set_num_threads(saved); }
    int saved;
};

}  // namespace

TEST_CASE("Poisson right-hand side") {
    for (int threads : {1, 4}) {
        Threads guard(threads);
        const int n = 128;
        std::vector<double> a(n * n), b(n * n);
        kernels::green_rhs_serial(n, 0.2, a);
        kernels::green_rhs_omp(n, 0.2, b);
        CHECK(a == b);
    }
}

TEST_CASE("nonlinear flow") {
    for (int threads : {1, 3}) {
        Threads guard(threads);
        auto a = random_field(64);
        auto b = a;
        kernels::cgl_nonlinear_serial(a, 1e-4, 1.0 / 16, 0.4, -0.3);
        kernels::cgl_nonlinear_omp(b, 1e-4, 1.0 / 16, 0.4, -0.3);
        CHECK(a == b);
    }
}

TEST_CASE("centered gradient") {
    for (int threads : {1, 4}) {
        Threads guard(threads);
        const int n = 64;
        const auto u = random_field(n);
        std::vector<Complex> ax(n * n), ay(n * n), bx(n * n), by(n * n);
        kernels::centered_gradient_serial(u, n, ax, ay);
        kernels::centered_gradient_omp(u, n, bx, by);
        CHECK(ax == bx);
        CHECK(ay == by);
    }
}

TEST_CASE("harmonic current sampling") {
    const auto& t = testing::table(256);
    const auto c = nudge_off_grid(symmetric_4v_configuration(-0.15, 0.2), 128);
    for (int threads : {1, 4}) {
        Threads guard(threads);
        std::vector<Vec2> a(128 * 128), b(128 * 128);
        kernels::sample_current_serial(t, c, 128, a);
        kernels::sample_current_omp(t, c, 128, b);
        CHECK(a == b);
    }
}
