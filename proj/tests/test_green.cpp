#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>
#include <filesystem>
#include <fstream>

#include "support.hpp"
#include "tvortex/errors.hpp"
#include "tvortex/green.hpp"
#include "tvortex/io.hpp"
#include "tvortex/torus.hpp"

using namespace tvortex;

namespace {

// lim_{x -> 0} F(x) - log|x| = log(2 pi eta(i)^2) = log(Gamma(1/4)^2 / (2 sqrt(pi)))
const double kR0 = std::log(std::tgamma(0.25) * std::tgamma(0.25) / (2.0 * std::sqrt(kPi)));

double max_abs_diff(const std::vector<double>& a, const std::vector<double>& b) {
    double m = 0.0;
    for (std::size_t k = 0; k < a.size(); ++k) m = std::max(m, std::fabs(a[k] - b[k]));
    return m;
}

}  // namespace

TEST_CASE("oracle golden value at the cell centre") {
    CHECK(std::fabs(oracle::F({0.5, 0.5}) - 0.34657359027997237) < 1e-14);
    CHECK(std::fabs(oracle::F({0.5, 0.5}) - 0.5 * std::log(2.0)) < 1e-14);
}

TEST_CASE("oracle half-lattice identity") {
    // 2 F(1/2, 0) + F(1/2, 1/2) = log 2
    CHECK(std::fabs(2.0 * oracle::F({0.5, 0.0}) + oracle::F({0.5, 0.5}) - std::log(2.0)) < 1e-13);
    CHECK(std::fabs(oracle::F({0.5, 0.0}) - oracle::F({0.0, 0.5})) < 1e-14);
}

TEST_CASE("oracle regular part at the origin") {
    // F = log r + R0 - (pi / 2) r^2 - (G4 / 4) r^4 cos(4 th) + O(r^8), where
    // G4 = sum over nonzero Gaussian integers w of w^-4 = Gamma(1/4)^8 / (960 pi^2)
    const double G4 = std::pow(std::tgamma(0.25), 8) / (960.0 * kPi * kPi);
    for (double r : {1e-3, 3e-3, 1e-2, 3e-2}) {
        for (double th : {0.0, 0.4, 1.1}) {
            const Vec2 x{r * std::cos(th), r * std::sin(th)};
            const double model = std::log(r) + kR0 - 0.5 * kPi * r * r - 0.25 * G4 * std::pow(r, 4) * std::cos(4 * th);
            CHECK(std::fabs(oracle::F(x) - model) < 1e-11);
        }
    }
}

TEST_CASE("oracle is insensitive to its smoothing parameter") {
    for (const Vec2 x : {Vec2{0.1, 0.2}, Vec2{0.37, -0.05}, Vec2{0.01, 0.49}}) {
        CHECK(std::fabs(oracle::F(x, kPi, 8) - oracle::F(x, 2.0, 10)) < 1e-13);
        const Vec2 g1 = oracle::gradF(x, kPi, 8), g2 = oracle::gradF(x, 2.0, 10);
        CHECK(max_abs(g1 - g2) < 1e-12);
    }
}

TEST_CASE("plain Richardson oracle agrees loosely") {
    const Vec2 x{0.3, 0.2};
    CHECK(std::fabs(oracle::F_richardson(x, 40) - oracle::F(x)) < 1e-2);
}

TEST_CASE("table matches the oracle at random points") {
    const auto& t = testing::table();
    double ef = 0.0, eg = 0.0;
    for (int k = 0; k < 64; ++k) {
        const Vec2 x{testing::uniform(-0.5, 0.5), testing::uniform(-0.5, 0.5)};
        ef = std::max(ef, std::fabs(eval_F(t, x) - oracle::F(x)));
        eg = std::max(eg, max_abs(eval_gradF(t, x) - oracle::gradF(x)));
    }
    CHECK(ef < 1e-7);
    CHECK(eg < 1e-6);
}

TEST_CASE("table near the origin and across the cutoff band") {
    const auto& t = testing::table();
    for (double r : {1e-4, 0.01, 0.03, 0.1, 0.2, 0.24, 0.25, 0.26}) {
        const Vec2 x{0.8 * r, 0.6 * r};
        CHECK(std::fabs(eval_F(t, x) - oracle::F(x)) < 1e-7);
        CHECK(max_abs(eval_gradF(t, x) - oracle::gradF(x)) < 1e-6);
    }
}

TEST_CASE("symmetries of F") {
    const auto& t = testing::table();
    for (int k = 0; k < 64; ++k) {
        const double x = testing::uniform(0.01, 0.99), y = testing::uniform(0.01, 0.99);
        const double f = eval_F(t, {x, y});
        CHECK(std::fabs(f - eval_F(t, {-x, -y})) < 1e-9);
        CHECK(std::fabs(f - eval_F(t, {y, x})) < 1e-9);
        CHECK(std::fabs(f - eval_F(t, {-x, y})) < 1e-9);
        CHECK(std::fabs(f - eval_F(t, {x, 1.0 - y})) < 1e-9);
        CHECK(std::fabs(f - eval_F(t, {x + 3.0, y - 2.0})) < 1e-9);
    }
}

TEST_CASE("normal derivatives vanish on the edge and middle lines") {
    const auto& t = testing::table();
    for (int k = 0; k < 64; ++k) {
        const double s = testing::uniform(0.01, 0.99);
        CHECK(std::fabs(eval_gradF(t, {0.5, s}).x) < 1e-8);
        CHECK(std::fabs(eval_gradF(t, {s, 0.5}).y) < 1e-8);
        CHECK(std::fabs(eval_gradF(t, {0.0, s}).x) < 1e-8);
        CHECK(std::fabs(eval_gradF(t, {s, 0.0}).y) < 1e-8);
    }
}

TEST_CASE("table gradient is the derivative of the table value") {
    const auto& t = testing::table();
    const double h = 1e-5;
    for (int k = 0; k < 32; ++k) {
        const Vec2 x{testing::uniform(-0.5, 0.5), testing::uniform(-0.5, 0.5)};
        if (norm(x) < 0.02) continue;
        const Vec2 fd{(eval_F(t, x + Vec2{h, 0}) - eval_F(t, x - Vec2{h, 0})) / (2 * h),
                      (eval_F(t, x + Vec2{0, h}) - eval_F(t, x - Vec2{0, h})) / (2 * h)};
        CHECK(max_abs(fd - eval_gradF(t, x)) < 1e-6);
    }
}

TEST_CASE("remainder solves the Poisson problem beyond the cutoff") {
    const int n = 512;
    const double rc = 0.25;
    const GreenTable t = build_table(n, rc);
    const auto lap = remainder_laplacian(t);
    double worst = 0.0;
    for (int i = 0; i < n; ++i)
        for (int j = 0; j < n; ++j) {
            const Vec2 x = min_image(Vec2{double(i) / n, double(j) / n});
            if (norm(x) <= rc) continue;
            worst = std::max(worst, std::fabs(lap[t.index(i, j)] + kTwoPi));
        }
    CHECK(worst < 1e-8);
}

TEST_CASE("cutoff profile") {
    const double rc = 0.25;
    CHECK(cutoff::eval(0.0, rc).value == 1.0);
    CHECK(cutoff::eval(cutoff::kPlateauFraction * rc, rc).value == 1.0);
    CHECK(cutoff::eval(rc, rc).value == 0.0);
    CHECK(cutoff::eval(0.3, rc).value == 0.0);
    double prev = 1.0;
    for (int k = 0; k <= 100; ++k) {
        const double r = rc * k / 100.0;
        const auto p = cutoff::eval(r, rc);
        CHECK(p.value <= prev + 1e-15);
        prev = p.value;
        if (k > 0 && k < 100) {
            const double e = 1e-6;
            const double fd = (cutoff::eval(r + e, rc).value - cutoff::eval(r - e, rc).value) / (2 * e);
            CHECK(std::fabs(fd - p.d1) < 1e-5 * (1.0 + std::fabs(p.d1)));
        }
    }
}

TEST_CASE("table cache round trip") {
    const GreenTable t = build_table(64, 0.2);
    const auto path = std::filesystem::temp_directory_path() / "tvortex_test_table.tgf";
    save_table(t, path);
    const GreenTable u = load_table(path);
    CHECK(u.n == t.n);
    CHECK(u.cutoff_radius == t.cutoff_radius);
    CHECK(u.mean_shift == t.mean_shift);
    CHECK(max_abs_diff(u.f, t.f) == 0.0);
    CHECK(max_abs_diff(u.gx, t.gx) == 0.0);
    CHECK(max_abs_diff(u.gy, t.gy) == 0.0);

    const auto loaded = load_or_build_table(64, 0.2, path);
    CHECK(max_abs_diff(loaded->f, t.f) == 0.0);

    std::string bytes = io::read_file(path);
    {
        std::string bad = bytes;
        bad[0] = 'X';
        io::write_atomic(path, bad);
        CHECK_THROWS_AS(load_table(path), FormatError);
    }
    {
        io::write_atomic(path, bytes.substr(0, bytes.size() - 8));
        CHECK_THROWS_AS(load_table(path), FormatError);
    }
    std::filesystem::remove(path);
}

TEST_CASE("bad table parameters") {
    CHECK_THROWS_AS(build_table(256, 0.3), BadCutoff);
    CHECK_THROWS_AS(build_table(256, 0.01), BadCutoff);
    CHECK_THROWS_AS(build_table(256, 0.0), BadCutoff);
    CHECK_THROWS_AS(build_table(100, 0.2), InvalidConfiguration);
}

TEST_CASE("evaluation at a lattice point") {
    const auto& t = testing::table(64, 0.2);
    CHECK_THROWS_AS(eval_F(t, {0.0, 0.0}), SingularPoint);
    CHECK_THROWS_AS(eval_F(t, {1.0, -2.0}), SingularPoint);
    CHECK_THROWS_AS(eval_gradF(t, {0.0, 1.0}), SingularPoint);
    CHECK_THROWS_AS(oracle::F({0.0, 0.0}), SingularPoint);
}

TEST_CASE("table build is deterministic") {
    const GreenTable a = build_table(128, 0.2), b = build_table(128, 0.2);
    CHECK(max_abs_diff(a.f, b.f) == 0.0);
    CHECK(max_abs_diff(a.gx, b.gx) == 0.0);
}
