#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>
#include <filesystem>

#include "support.hpp"
#include "tvortex/dynamics.hpp"
#include "tvortex/energy.hpp"
#include "tvortex/errors.hpp"
#include "tvortex/field.hpp"
#include "tvortex/io.hpp"

using namespace tvortex;

namespace {

const double kR0 = std::log(std::tgamma(0.25) * std::tgamma(0.25) / (2.0 * std::sqrt(kPi)));

ComplexField plane_wave(int n, int kx, int ky) {
    ComplexField u(n);
    for (int i = 0; i < n; ++i)
        for (int j = 0; j < n; ++j) u(i, j) = std::polar(1.0, kTwoPi * (kx * double(i) + ky * double(j)) / n);
    return u;
}

std::vector<PointCore> cores_of(const VortexConfiguration& c) {
    std::vector<PointCore> out;
    for (std::size_t k = 0; k < c.size(); ++k) out.push_back({c.position(k).vec(), c.degrees[k]});
    return out;
}

}  // namespace

TEST_CASE("constant field has no energy, current or vorticity") {
    const ComplexField u(32, std::polar(1.0, 0.7));
    for (auto kind : {Derivative::Centered, Derivative::Spectral}) {
        const auto d = densities(u, 0.1, kind);
        CHECK(grid_integral(d.e, 32) < 1e-28);
        CHECK(max_abs(grid_integral(d.j, 32)) < 1e-14);
        CHECK(std::fabs(grid_integral(d.jac, 32)) < 1e-28);
    }
}

TEST_CASE("plane wave current matches the discrete symbol") {
    const int n = 64, kx = 3, ky = -2;
    const auto u = plane_wave(n, kx, ky);
    const auto dc = densities(u, 0.1, Derivative::Centered);
    const auto ds = densities(u, 0.1, Derivative::Spectral);
    const double h = 1.0 / n;
    const Vec2 centred{std::sin(kTwoPi * kx * h) / h, std::sin(kTwoPi * ky * h) / h};
    const Vec2 exact{kTwoPi * kx, kTwoPi * ky};
    for (std::size_t s = 0; s < dc.j.size(); s += 37) {
        CHECK(max_abs(dc.j[s] - centred) < 1e-10);
        CHECK(max_abs(ds.j[s] - exact) < 1e-10);
        CHECK(std::fabs(dc.jac[s]) < 1e-10);
    }
    CHECK(max_abs(grid_integral(ds.j, n) - exact) < 1e-10);
}

TEST_CASE("density identity |u|^2 |grad u|^2 = |Re(conj(u) grad u)|^2 + |j|^2") {
    const int n = 64;
    ComplexField u(n);
    for (int i = 0; i < n; ++i)
        for (int j = 0; j < n; ++j) {
            const double x = double(i) / n, y = double(j) / n;
            u(i, j) = {0.5 + 0.3 * std::cos(kTwoPi * x), 0.4 * std::sin(kTwoPi * (x + 2 * y))};
        }
    const double eps = 0.2;
    const auto d = densities(u, eps);
    std::vector<Complex> ux, uy;
    gradient(u, Derivative::Centered, ux, uy);
    for (std::size_t s = 0; s < d.e.size(); ++s) {
        const double m = 1.0 - std::norm(u.values[s]);
        const double grad2 = 2.0 * (d.e[s] - m * m / (4 * eps * eps));
        const double re_x = std::real(std::conj(u.values[s]) * ux[s]);
        const double re_y = std::real(std::conj(u.values[s]) * uy[s]);
        const double rhs = re_x * re_x + re_y * re_y + norm2(d.j[s]);
        CHECK(std::fabs(std::norm(u.values[s]) * grad2 - rhs) < 1e-10 * (1.0 + rhs));
    }
}

TEST_CASE("total Jacobian of a periodic field vanishes") {
    const auto& t = testing::table();
    const auto u = initial_data(symmetric_2v_configuration(-0.15, 0.25), t, 1.0 / 32, 256);
    const auto d = densities(u, 1.0 / 32);
    CHECK(std::fabs(grid_integral(d.jac, 256)) < 1e-10);
}

TEST_CASE("nudging moves vortices to cell centres and keeps q on its coset") {
    const auto c = make_configuration({{0.3, 0.41}, {0.7001, 0.5}, {0.123, 0.9}, {0.5, 0.5}}, {1, -1, -1, 1});
    const int n = 128;
    const auto m = nudge_off_grid(c, n);
    for (std::size_t k = 0; k < c.size(); ++k) {
        const double fx = m.position(k).x() * n - std::floor(m.position(k).x() * n);
        const double fy = m.position(k).y() * n - std::floor(m.position(k).y() * n);
        CHECK(fx == doctest::Approx(0.5).epsilon(1e-9));
        CHECK(fy == doctest::Approx(0.5).epsilon(1e-9));
        CHECK(torus_distance(m.position(k), c.position(k)) <= std::sqrt(0.5) / n + 1e-15);
    }
    CHECK(coset_defect(m.lifted, m.degrees, m.q) < 1e-12);
}

TEST_CASE("harmonic current integrates to Jq") {
    const auto& t = testing::table();
    for (const auto& c : {symmetric_2v_configuration(-0.15, 0.25), symmetric_4v_configuration(-0.15, 0.2),
                          make_configuration({{0.21, 0.33}, {0.64, 0.52}}, {1, -1})}) {
        for (int n : {256, 1024}) {
            const auto j = harmonic_current(c, t, n);
            const auto m = nudge_off_grid(c, n);
            CHECK(max_abs(grid_integral(j, n) - apply_J(m.q)) < 1e-6);
        }
    }
}

TEST_CASE("harmonic current circulates 2 pi d around each vortex") {
    const auto& t = testing::table();
    const int n = 512;
    const auto c = symmetric_2v_configuration(-0.15, 0.25);
    const auto m = nudge_off_grid(c, n);
    const auto j = harmonic_current(c, t, n);
    auto at = [&](int i, int k) { return j[static_cast<std::size_t>(((i % n) + n) % n) * n + ((k % n) + n) % n]; };
    const double h = 1.0 / n;
    for (std::size_t v = 0; v < m.size(); ++v) {
        const int ci = static_cast<int>(std::floor(m.position(v).x() * n));
        const int cj = static_cast<int>(std::floor(m.position(v).y() * n));
        const int r = 20;  // square of side 2r + 1 cells around the vortex cell
        const int i0 = ci - r, i1 = ci + r + 1, j0 = cj - r, j1 = cj + r + 1;
        double circ = 0.0;
        for (int i = i0; i < i1; ++i) circ += 0.5 * h * (at(i, j0).x + at(i + 1, j0).x);
        for (int k = j0; k < j1; ++k) circ += 0.5 * h * (at(i1, k).y + at(i1, k + 1).y);
        for (int i = i1; i > i0; --i) circ -= 0.5 * h * (at(i, j1).x + at(i - 1, j1).x);
        for (int k = j1; k > j0; --k) circ -= 0.5 * h * (at(i0, k).y + at(i0, k - 1).y);
        CHECK(std::fabs(circ - kTwoPi * m.degrees[v]) < 1e-2);
    }
}

TEST_CASE("phase integration of a uniform quantized current") {
    const int n = 64;
    std::vector<Vec2> j(n * n, Vec2{kTwoPi, -2 * kTwoPi});
    const auto H = phase_integrate(j, n, std::vector<PointCore>{});
    const auto expected = plane_wave(n, 1, -2);
    double worst = 0.0;
    for (std::size_t s = 0; s < H.values.size(); ++s) worst = std::max(worst, std::abs(H.values[s] - expected.values[s]));
    CHECK(worst < 1e-12);
}

TEST_CASE("phase integration rejects a non-quantized current") {
    const int n = 64;
    std::vector<Vec2> j(n * n, Vec2{0.5 * kTwoPi, 0.0});
    CHECK_THROWS_AS(phase_integrate(j, n, std::vector<PointCore>{}), InconsistentCirculation);
    std::vector<Vec2> wrong_size(10);
    CHECK_THROWS_AS(phase_integrate(wrong_size, n), InvalidConfiguration);
}

TEST_CASE("harmonic map round trip") {
    const auto& t = testing::table();
    const int n = 1024;
    const auto c = symmetric_2v_configuration(-0.15, 0.25);
    const auto m = nudge_off_grid(c, n);
    const auto j = harmonic_current(c, t, n);
    {
        const auto H = phase_integrate(j, n, cores_of(m));
        for (const auto& v : H.values) CHECK(std::fabs(std::abs(v) - 1.0) < 1e-12);
        CHECK(masked_relative_l2(densities(H, 1.0).j, j, n, m, 0.05) < 1e-3);
    }
    {
        const auto H = phase_integrate(j, n);
        CHECK(masked_relative_l2(densities(H, 1.0).j, j, n, m, 0.05) < 1e-3);
    }
}

TEST_CASE("current cores are located from the field") {
    const auto& t = testing::table();
    const int n = 256;
    const auto c = symmetric_4v_configuration(-0.15, 0.2);
    const auto m = nudge_off_grid(c, n);
    const auto found = detect_current_cores(harmonic_current(c, t, n), n);
    REQUIRE(found.size() == m.size());
    for (std::size_t k = 0; k < m.size(); ++k) {
        bool matched = false;
        for (const auto& f : found)
            if (torus_distance(TorusPoint(f.position), m.position(k)) < 0.25 / n && f.degree == m.degrees[k])
                matched = true;
        CHECK(matched);
    }
}

TEST_CASE("initial data") {
    const auto& t = testing::table();
    const auto c = symmetric_2v_configuration(-0.15, 0.25);
    const int n = 256;
    const double eps = 1.0 / 32;
    const auto u = initial_data(c, t, eps, n);
    for (const auto& v : u.values) CHECK(std::abs(v) <= 1.0 + 1e-14);
    const auto m = nudge_off_grid(c, n);
    const std::vector<TorusPoint> windows = m.positions();
    const auto d = diagnostics(u, eps, windows, 0.1);
    for (std::size_t k = 0; k < m.size(); ++k) CHECK(std::fabs(d.jacobian_integrals[k] - kPi * m.degrees[k]) < 0.05);
    CHECK(d.vortex_list.size() == 2);
    CHECK_THROWS_AS(initial_data(c, t, 1.0 / 200, n), CoreUnresolved);
}

TEST_CASE("ring energy on the four-vortex equilibrium") {
    const auto& t = testing::table();
    const int n = 512;
    const auto c = symmetric_4v_configuration(-0.25, 0.25);
    const auto m = nudge_off_grid(c, n);
    const auto j = harmonic_current(c, t, n);
    const double W = renormalized_W(m, t).W;
    const double r10 = ring_energy(j, n, m, 0.1), r05 = ring_energy(j, n, m, 0.05);
    CHECK(std::fabs(r10 + 4 * kPi * std::log(0.1) - (W - 4 * kPi * kR0)) < 5e-3);
    CHECK(std::fabs(r05 + 4 * kPi * std::log(0.05) - (W - 4 * kPi * kR0)) < 5e-3);
    CHECK(std::fabs((r05 - r10) / (4 * kPi * std::log(2.0)) - 1.0) < 1e-3);
}

TEST_CASE("radial minimizer") {
    const auto p = radial_minimizer(1.0 / 32);
    CHECK(p.f.front() == 0.0);
    CHECK(p.f.back() == 1.0);
    for (std::size_t k = 1; k < p.f.size(); ++k) {
        CHECK(p.f[k] >= p.f[k - 1] - 1e-12);
        CHECK(p.f[k] <= 1.0 + 1e-12);
    }
    CHECK(p.newton_iterations < 50);
    CHECK_THROWS_AS(radial_minimizer(1e-5), InvalidConfiguration);
    CHECK_THROWS_AS(radial_minimizer(0.1, 0.0), InvalidConfiguration);
}

TEST_CASE("gamma self-convergence and scaling") {
    const double g64 = gamma_hat(1.0 / 64), g128 = gamma_hat(1.0 / 128);
    CHECK(std::fabs(g64 - g128) < 5e-3);
    CHECK(g128 < g64);
    // the disk of radius 2 at eps equals the unit disk at eps / 2
    const double e2 = radial_minimizer(1.0 / 64, 2.0).energy, e1 = radial_minimizer(1.0 / 128, 1.0).energy;
    CHECK(std::fabs(e2 - e1) < 1e-3);
    const std::vector<double> list{1.0 / 64, 1.0 / 128};
    const double g = gamma_estimate(list);
    CHECK(std::fabs(g - g128) < std::fabs(g64 - g128));
    CHECK(std::fabs(g - 1.1966) < 1e-3);
}

TEST_CASE("gamma estimate input checks") {
    const std::vector<double> empty, rising{1.0 / 64, 1.0 / 32}, tiny{1e-5};
    CHECK_THROWS_AS(gamma_estimate(empty), InvalidConfiguration);
    CHECK_THROWS_AS(gamma_estimate(rising), InvalidConfiguration);
    CHECK_THROWS_AS(gamma_estimate(tiny), InvalidConfiguration);
}

TEST_CASE("snapshot round trip") {
    const int n = 16;
    ComplexField u(n);
    for (std::size_t s = 0; s < u.values.size(); ++s) u.values[s] = {std::sin(double(s)), std::cos(3.0 * s)};
    const auto path = std::filesystem::temp_directory_path() / "tvortex_test_snapshot.tvf";
    save_snapshot(u, 0.0625, path);
    double eps = 0.0;
    const auto v = load_snapshot(path, &eps);
    CHECK(eps == 0.0625);
    CHECK(v.n == n);
    CHECK(v.values == u.values);
    const std::string bytes = io::read_file(path);
    io::write_atomic(path, bytes.substr(0, bytes.size() - 1));
    CHECK_THROWS_AS(load_snapshot(path), FormatError);
    io::write_atomic(path, "TVF2" + bytes.substr(4));
    CHECK_THROWS_AS(load_snapshot(path), FormatError);
    std::filesystem::remove(path);
}
