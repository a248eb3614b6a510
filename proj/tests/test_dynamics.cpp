#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>

#include "support.hpp"
#include "tvortex/dynamics.hpp"
#include "tvortex/energy.hpp"
#include "tvortex/errors.hpp"
#include "tvortex/output.hpp"

using namespace tvortex;

namespace {

double max_position_gap(const VortexConfiguration& a, const VortexConfiguration& b) {
    double m = 0.0;
    for (std::size_t j = 0; j < a.size(); ++j) m = std::max(m, max_abs(a.lifted[j].vec() - b.lifted[j].vec()));
    return m;
}

double xi_drift(const TrajectoryRecord& rec) {
    double m = 0.0;
    for (const auto& x : rec.xi_series) m = std::max(m, max_abs(x - rec.xi_series.front()));
    return m;
}

OdeParams params(double lambda, double dt, double t_max) {
    OdeParams p;
    p.lambda = lambda;
    p.dt = dt;
    p.t_max = t_max;
    return p;
}

}  // namespace

TEST_CASE("velocities satisfy the reduced law") {
    const auto& t = testing::table();
    const auto c = make_configuration({{0.2, 0.3}, {0.55, 0.35}, {0.4, 0.8}, {0.9, 0.6}}, {1, -1, -1, 1});
    for (double lambda : {0.0, 1.7}) {
        const auto v = velocities(c, t, lambda);
        const auto g = grad_W_all(c, t);
        for (std::size_t j = 0; j < c.size(); ++j) {
            const Vec2 lhs = v[j] - (lambda * c.degrees[j]) * apply_J(v[j]);
            CHECK(max_abs(lhs + (1.0 / kPi) * g[j]) < 1e-12 * (1.0 + norm(g[j])));
            CHECK(max_abs(velocity(c, t, lambda, j) - v[j]) == 0.0);
        }
    }
}

TEST_CASE("four-vortex equilibrium is stationary") {
    const auto& t = testing::table();
    const auto c = symmetric_4v_configuration(-0.25, 0.25);
    for (double lambda : {0.0, 1.0, 2.0})
        for (const auto& v : velocities(c, t, lambda)) CHECK(norm(v) < 1e-7);
    const auto rec = integrate(c, t, params(1.0, 1e-3, 0.1));
    CHECK(rec.stop_reason == StopReason::ReachedTmax);
    CHECK(max_position_gap(rec.configurations.back(), c) < 1e-6);
}

TEST_CASE("first integral is conserved up to collision") {
    const auto& t = testing::table();
    const auto rec = integrate(symmetric_4v_configuration(-0.15, 0.2), t, params(1.0, 1e-4, 1.0));
    CHECK(rec.stop_reason == StopReason::Collision);
    CHECK(xi_drift(rec) < 1e-8);
}

TEST_CASE("energy dissipation identity for a generic configuration") {
    const auto& t = testing::table();
    const auto c = make_configuration({{0.2, 0.3}, {0.55, 0.35}, {0.4, 0.8}, {0.9, 0.6}}, {1, -1, -1, 1});
    const auto rec = integrate(c, t, params(0.5, 1e-4, 0.01));
    CHECK(dissipation_residual(rec) < 1e-5 * (1.0 + std::fabs(rec.W_series.front())));
    for (std::size_t s = 1; s < rec.samples(); ++s) CHECK(rec.W_series[s] <= rec.W_series[s - 1] + 1e-12);
}

TEST_CASE("large lambda slows the motion") {
    const auto& t = testing::table();
    const auto c = symmetric_2v_configuration(-0.15, 0.25);
    const auto v0 = velocities(c, t, 0.0);
    const auto v = velocities(c, t, 1e4);
    CHECK(norm(v[0]) < 1e-3 * norm(v0[0]));
}

TEST_CASE("two-vortex path has slope -lambda") {
    const auto& t = testing::table();
    for (double lambda : {0.0, 0.5, 1.0, 2.0}) {
        const auto rec = symmetric_2v(-0.15, 0.25, lambda, params(lambda, 1e-4, 0.02), t);
        for (std::size_t s = 1; s < rec.samples(); ++s) {
            const Vec2 a = rec.configurations[s].lifted[0].vec(), a0 = rec.configurations[0].lifted[0].vec();
            const double da = a.x - a0.x, db = a.y - a0.y;
            CHECK(std::fabs(db + lambda * da) < 1e-6 * (1.0 + std::fabs(da)));
        }
        if (lambda == 0.0)
            for (const auto& c : rec.configurations) CHECK(std::fabs(c.lifted[0].y() - 0.75) < 1e-9);
    }
}

TEST_CASE("symmetric reductions agree with the full system") {
    const auto& t = testing::table();
    for (double lambda : {0.0, 1.0, 2.0}) {
        const auto p = params(lambda, 1e-4, 0.01);
        const auto r2 = symmetric_2v(-0.15, 0.25, lambda, p, t);
        const auto f2 = integrate(symmetric_2v_configuration(-0.15, 0.25), t, p);
        REQUIRE(r2.samples() == f2.samples());
        for (std::size_t s = 0; s < r2.samples(); ++s)
            CHECK(max_position_gap(r2.configurations[s], f2.configurations[s]) < 1e-7);

        const auto r4 = symmetric_4v(-0.15, 0.2, lambda, p, t);
        const auto f4 = integrate(symmetric_4v_configuration(-0.15, 0.2), t, p);
        REQUIRE(r4.samples() == f4.samples());
        for (std::size_t s = 0; s < r4.samples(); ++s)
            CHECK(max_position_gap(r4.configurations[s], f4.configurations[s]) < 1e-7);
    }
}

TEST_CASE("reduced right-hand sides match the full velocities") {
    const auto& t = testing::table();
    for (double lambda : {0.0, 0.7}) {
        const auto c2 = symmetric_2v_configuration(-0.12, 0.3);
        CHECK(max_abs(symmetric_2v_rhs(-0.12, lambda, t) - velocity(c2, t, lambda, 0)) < 1e-12);
        const auto c4 = symmetric_4v_configuration(-0.12, 0.3);
        CHECK(max_abs(symmetric_4v_rhs(-0.12, 0.3, lambda, t) - velocity(c4, t, lambda, 0)) < 1e-12);
    }
}

TEST_CASE("RK4 converges at fourth order") {
    const auto& t = testing::table();
    const auto c = make_configuration({{0.2, 0.3}, {0.45, 0.35}, {0.4, 0.8}, {0.9, 0.6}}, {1, -1, -1, 1});
    auto run_with = [&](double dt) {
        OdeParams p = params(0.8, dt, 0.02);
        p.collision_resolution = 1e9;  // fixed steps
        return integrate(c, t, p).configurations.back();
    };
    const auto ref = run_with(2.5e-5);
    const double e1 = max_position_gap(run_with(5e-4), ref);
    const double e2 = max_position_gap(run_with(2.5e-4), ref);
    CHECK(e1 / e2 > 12.0);
}

TEST_CASE("collision phenomenology of the four-vortex family") {
    const auto& t = testing::table();
    const std::vector<std::pair<double, std::vector<std::pair<int, int>>>> cases = {
        {0.1, {{1, 4}, {2, 3}}}, {0.3, {{1, 3}, {2, 4}}}, {0.45, {{1, 4}, {2, 3}}}};
    for (const auto& [beta, pairs] : cases) {
        const auto rec = integrate(symmetric_4v_configuration(-0.15, beta), t, params(1.0, 1e-4, 1.0));
        CHECK(rec.stop_reason == StopReason::Collision);
        CHECK(rec.colliding_pairs == pairs);
    }
}

TEST_CASE("integrator input checks") {
    const auto& t = testing::table();
    const auto c = symmetric_2v_configuration(-0.15, 0.25);
    CHECK_THROWS_AS(integrate(c, t, params(0.0, 0.0, 0.1)), InvalidConfiguration);
    CHECK_THROWS_AS(symmetric_2v(0.0, 0.25, 1.0, params(1.0, 1e-4, 0.1), t), CollisionError);
    auto bad = c;
    bad.q = {0.3, 0.0};
    CHECK_THROWS_AS(integrate(bad, t, params(0.0, 1e-4, 0.1)), InvalidConfiguration);
    OdeParams p = params(0.0, 1e-4, 0.1);
    p.collision_stop_radius = 0.5;
    CHECK_THROWS_AS(integrate(c, t, p), CollisionError);
}

TEST_CASE("trajectory output is reproducible") {
    const auto& t = testing::table();
    const auto c = make_configuration({{0.2, 0.3}, {0.55, 0.35}}, {1, -1});
    OdeParams p = params(1.0, 1e-4, 0.01);
    p.sample_stride = 10;
    const auto a = output::trajectory_csv(integrate(c, t, p));
    const auto b = output::trajectory_csv(integrate(c, t, p));
    CHECK(a == b);
}

TEST_CASE("sampling stride keeps the endpoints") {
    const auto& t = testing::table();
    OdeParams p = params(1.0, 1e-4, 0.0105);
    p.sample_stride = 20;
    p.collision_resolution = 1e9;  // fixed steps
    const auto rec = integrate(symmetric_2v_configuration(-0.25, 0.25), t, p);
    CHECK(rec.times.front() == 0.0);
    CHECK(rec.times.back() == doctest::Approx(0.0105).epsilon(1e-12));
    CHECK(rec.samples() == 1 + 5 + 1);
}
