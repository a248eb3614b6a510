#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>

#include "support.hpp"
#include "tvortex/energy.hpp"
#include "tvortex/errors.hpp"
#include "tvortex/torus.hpp"

using namespace tvortex;

TEST_CASE("wrapping reduces into the unit cell") {
    const TorusPoint p(1.25, -0.25);
    CHECK(p.x() == doctest::Approx(0.25));
    CHECK(p.y() == doctest::Approx(0.75));
    // just below an integer must not produce 1.0
    const TorusPoint q(-1e-18, 3.0);
    CHECK(q.x() < 1.0);
    CHECK(q.y() == 0.0);
}

TEST_CASE("minimal image lies in [-1/2, 1/2)") {
    for (int k = 0; k < 1000; ++k) {
        const Vec2 d{testing::uniform(-5, 5), testing::uniform(-5, 5)};
        const Vec2 m = min_image(d);
        CHECK(m.x >= -0.5);
        CHECK(m.x < 0.5);
        CHECK(m.y >= -0.5);
        CHECK(m.y < 0.5);
        CHECK(std::fabs((d.x - m.x) - std::round(d.x - m.x)) < 1e-12);
    }
    CHECK(min_image(Vec2{0.5, -0.5}).x == -0.5);
}

TEST_CASE("torus distance is symmetric and translation invariant") {
    for (int k = 0; k < 200; ++k) {
        const TorusPoint a(testing::uniform(0, 1), testing::uniform(0, 1));
        const TorusPoint b(testing::uniform(0, 1), testing::uniform(0, 1));
        const Vec2 s{testing::uniform(-3, 3), testing::uniform(-3, 3)};
        const double d = torus_distance(a, b);
        CHECK(d == doctest::Approx(torus_distance(b, a)).epsilon(1e-14));
        CHECK(d <= std::sqrt(0.5) + 1e-15);
        const TorusPoint as(a.x() + s.x, a.y() + s.y), bs(b.x() + s.x, b.y() + s.y);
        CHECK(torus_distance(as, bs) == doctest::Approx(d).epsilon(1e-10));
    }
}

TEST_CASE("lift steps follow a path across many cells") {
    LiftedPoint p(0.9, 0.1);
    const Vec2 v{0.137, -0.071};
    Vec2 exact{0.9, 0.1};
    for (int k = 0; k < 10000; ++k) {
        exact += v;
        p = lift_step(p, wrap(exact));
    }
    CHECK(p.x() == doctest::Approx(exact.x).epsilon(1e-12));
    CHECK(p.y() == doctest::Approx(exact.y).epsilon(1e-12));
    CHECK(p.cell_x() == static_cast<std::int64_t>(std::floor(exact.x)));
}

TEST_CASE("lift step rejects jumps of a quarter period") {
    const LiftedPoint p(0.1, 0.1);
    CHECK_THROWS_AS(lift_step(p, TorusPoint(0.36, 0.1)), StepTooLarge);
    CHECK_NOTHROW(lift_step(p, TorusPoint(0.34, 0.1)));
}

TEST_CASE("lifted difference avoids cancellation at large winding") {
    const LiftedPoint a(1000000 + 0.25, 0.0);
    const LiftedPoint b(1000000 + 0.125, 0.0);
    CHECK(lifted_difference(a, b).x == 0.125);
}

TEST_CASE("configuration validation") {
    CHECK_NOTHROW(make_configuration({{0.2, 0.5}, {0.8, 0.5}}, {1, -1}));
    CHECK_THROWS_AS(make_configuration({{0.2, 0.5}}, {1}), InvalidConfiguration);
    CHECK_THROWS_AS(make_configuration({{0.2, 0.5}, {0.8, 0.5}}, {1, 1}), InvalidConfiguration);
    CHECK_THROWS_AS(make_configuration({{0.2, 0.5}, {0.8, 0.5}}, {2, -2}), InvalidConfiguration);
    CHECK_THROWS_AS(make_configuration({{0.2, 0.5}, {0.8, 0.5}}, {1, -1}, Vec2{0.1, 0.0}), InvalidConfiguration);
    // q on the coset, shifted by a lattice vector
    const Vec2 q{kTwoPi * (-0.6) + kTwoPi, 0.0};
    CHECK_NOTHROW(make_configuration({{0.2, 0.5}, {0.8, 0.5}}, {1, -1}, q));
}

TEST_CASE("default q0 breaks ties toward the smallest lattice offset") {
    const auto c = make_configuration({{0.25, 0.5}, {0.75, 0.5}}, {1, -1});
    CHECK(c.q.x == doctest::Approx(kTwoPi * -0.5).epsilon(1e-15));
    CHECK(c.q.y == doctest::Approx(0.0));
}

TEST_CASE("default q0 is the minimal-norm coset element") {
    for (int k = 0; k < 200; ++k) {
        const auto c = make_configuration({{testing::uniform(0, 1), testing::uniform(0, 1)},
                                           {testing::uniform(0, 1), testing::uniform(0, 1)}},
                                          {1, -1});
        CHECK(std::fabs(c.q.x) <= kPi + 1e-12);
        CHECK(std::fabs(c.q.y) <= kPi + 1e-12);
        CHECK(coset_defect(c.lifted, c.degrees, c.q) < 1e-12);
    }
}

TEST_CASE("shifting a vortex by a period keeps the default q0") {
    const auto c1 = make_configuration({{0.3, 0.4}, {0.6, 0.7}}, {1, -1});
    const auto c2 = make_configuration({{1.3, 0.4}, {0.6, 0.7}}, {1, -1});
    CHECK(c1.q.x == doctest::Approx(c2.q.x).epsilon(1e-13));
    CHECK(c1.q.y == doctest::Approx(c2.q.y).epsilon(1e-13));
}

TEST_CASE("pair separation") {
    const auto c = make_configuration({{0.1, 0.5}, {0.9, 0.5}, {0.5, 0.5}, {0.5, 0.1}}, {1, -1, 1, -1});
    const auto p = closest_pair(c);
    CHECK(p.j == 0);
    CHECK(p.k == 1);
    CHECK(p.distance == doctest::Approx(0.2));
    CHECK(min_pair_separation(c) == doctest::Approx(0.05));
}
