#pragma once

#include <span>
#include <string>
#include <utility>
#include <vector>

#include "tvortex/energy.hpp"
#include "tvortex/green.hpp"
#include "tvortex/torus.hpp"

namespace tvortex {

// Parameters of the reduced law (I - lambda d_j J) a_j' = -(1/pi) grad_{a_j} W.
struct OdeParams {
    double lambda = 0.0;
    double dt = 1e-4;
    double t_max = 0.1;
    double collision_stop_radius = 1e-3;
    int sample_stride = 1;
    // A step is halved until dt * max speed <= collision_resolution * (closest
    // pair distance), which resolves the approach to a collision.
    double collision_resolution = 3e-4;
    // Retries (each halving dt) after a step violates the lift precondition.
    int max_lift_retries = 8;
};

enum class StopReason { ReachedTmax, Collision, StepFailure };
std::string to_string(StopReason r);

struct TrajectoryRecord {
    double lambda = 0.0;
    std::vector<double> times;
    std::vector<VortexConfiguration> configurations;
    std::vector<double> W_series;
    std::vector<Vec2> xi_series;
    // per sample, per vortex
    std::vector<std::vector<Vec2>> velocity_series;
    std::vector<std::vector<double>> speed_series;
    StopReason stop_reason = StopReason::ReachedTmax;
    // pairs (1-based) closer than twice the stop radius at a collision stop
    std::vector<std::pair<int, int>> colliding_pairs;
    std::string failure_message;

    std::size_t samples() const { return times.size(); }
};

Vec2 velocity(const VortexConfiguration& c, const GreenTable& t, double lambda, std::size_t j);
std::vector<Vec2> velocities(const VortexConfiguration& c, const GreenTable& t, double lambda);

// Velocity field for raw positions and an explicit q.
void velocity_points(std::span<const Vec2> points, std::span<const int> degrees, const Vec2& q,
                     const GreenTable& t, double lambda, std::span<Vec2> out);

// Classical RK4 in lifted coordinates, q carried along by lift_q.
TrajectoryRecord integrate(const VortexConfiguration& c0, const GreenTable& t, const OdeParams& p);

// sum_j a_j - lambda J sum_j d_j a_j on lifted coordinates.
Vec2 first_integral_xi(const VortexConfiguration& c, double lambda);

// max over samples of |pi * int_0^t sum_j |a_j'|^2 + W(t) - W(0)| (trapezoid).
double dissipation_residual(const TrajectoryRecord& rec);

// Symmetric initial data around the cell centre (0.5, 0.5).
// Two vortices: a1 = c + (alpha, beta) with d = +1, a2 = c + (-alpha, beta)
// with d = -1, q = (4 pi alpha, 0).
VortexConfiguration symmetric_2v_configuration(double alpha, double beta);
// Four vortices: a1 = c + (alpha, beta), a2 = c - (alpha, beta),
// a3 = c + (-alpha, beta), a4 = c + (alpha, -beta); d = (+1, +1, -1, -1), q = 0.
VortexConfiguration symmetric_4v_configuration(double alpha, double beta);

// Right-hand sides of the scalar reductions.
Vec2 symmetric_2v_rhs(double alpha, double lambda, const GreenTable& t);
Vec2 symmetric_4v_rhs(double alpha, double beta, double lambda, const GreenTable& t);

TrajectoryRecord symmetric_2v(double alpha0, double beta0, double lambda, const OdeParams& p,
                              const GreenTable& t);
TrajectoryRecord symmetric_4v(double alpha0, double beta0, double lambda, const OdeParams& p,
                              const GreenTable& t);

}  // namespace tvortex
