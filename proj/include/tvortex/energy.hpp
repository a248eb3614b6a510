#pragma once

#include <optional>
#include <span>
#include <vector>

#include "tvortex/green.hpp"
#include "tvortex/torus.hpp"

namespace tvortex {

struct EnergyReport {
    double W = 0.0;
    double interaction_part = 0.0;  // -pi sum_{j != k} d_j d_k F(a_j - a_k)
    double momentum_part = 0.0;     // |q|^2 / 2
    std::optional<double> W_eps;
    std::optional<double> epsilon;
    std::optional<double> gamma;
};

// Torus distance below which two vortices count as coincident.
inline constexpr double kCollisionThreshold = 1e-10;

// Throws CollisionError if two positions coincide.
void check_no_collision(std::span<const Vec2> points);

EnergyReport renormalized_W(const VortexConfiguration& c, const GreenTable& t);

// Gradient of W with respect to vortex j, accounting for the dependence of q
// on the positions: 2 pi d_j (q - sum_{k != j} d_k gradF(a_j - a_k)).
Vec2 grad_W(const VortexConfiguration& c, const GreenTable& t, std::size_t j);
std::vector<Vec2> grad_W_all(const VortexConfiguration& c, const GreenTable& t);

// Same, for raw positions (any representatives) and an explicit q.
void grad_W_points(std::span<const Vec2> points, std::span<const int> degrees, const Vec2& q,
                   const GreenTable& t, std::span<Vec2> out);

// 2N (pi log(1/eps) + gamma) + W.
EnergyReport W_eps(const VortexConfiguration& c, const GreenTable& t, double epsilon, double gamma);

// q + 2 pi sum_j d_j disp_j, for lifted per-vortex increments.
Vec2 lift_q(const VortexConfiguration& c, std::span<const Vec2> displacements);

// Minimal-norm element of 2 pi sum(d_j a_j) + 2 pi Z^2. Ties go to the
// lexicographically smallest lattice offset.
Vec2 default_q0(std::span<const LiftedPoint> lifted, std::span<const int> degrees);

}  // namespace tvortex
