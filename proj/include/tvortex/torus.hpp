#pragma once

#include <cstdint>
#include <optional>
#include <span>
#include <vector>

#include "tvortex/vec2.hpp"

namespace tvortex {

// A point of the flat unit torus (R/Z)^2; both coordinates live in [0, 1).
class TorusPoint {
public:
    constexpr TorusPoint() = default;
    // Reduces arbitrary reals mod 1.
    TorusPoint(double x, double y);
    explicit TorusPoint(const Vec2& v) : TorusPoint(v.x, v.y) {}

    double x() const { return x_; }
    double y() const { return y_; }
    Vec2 vec() const { return {x_, y_}; }

    friend bool operator==(const TorusPoint&, const TorusPoint&) = default;

private:
    double x_ = 0.0;
    double y_ = 0.0;
};

// A point of the universal cover R^2, stored as an integer cell plus the
// wrapped representative so that wrapping is exact at any winding count.
class LiftedPoint {
public:
    constexpr LiftedPoint() = default;
    LiftedPoint(double x, double y);
    LiftedPoint(std::int64_t cell_x, std::int64_t cell_y, TorusPoint frac)
        : cell_x_(cell_x), cell_y_(cell_y), frac_(frac) {}

    double x() const { return static_cast<double>(cell_x_) + frac_.x(); }
    double y() const { return static_cast<double>(cell_y_) + frac_.y(); }
    Vec2 vec() const { return {x(), y()}; }
    std::int64_t cell_x() const { return cell_x_; }
    std::int64_t cell_y() const { return cell_y_; }
    const TorusPoint& wrapped() const { return frac_; }

    friend bool operator==(const LiftedPoint&, const LiftedPoint&) = default;

private:
    std::int64_t cell_x_ = 0;
    std::int64_t cell_y_ = 0;
    TorusPoint frac_;
};

// Lifted difference a - b, computed cell-wise to avoid cancellation.
Vec2 lifted_difference(const LiftedPoint& a, const LiftedPoint& b);

TorusPoint wrap(const LiftedPoint& p);
TorusPoint wrap(const Vec2& p);

// Representative of p - r with both components in [-0.5, 0.5).
Vec2 min_image_diff(const TorusPoint& p, const TorusPoint& r);
// Same, for an arbitrary real displacement.
Vec2 min_image(const Vec2& d);

double torus_distance(const TorusPoint& p, const TorusPoint& r);

// Continues a lift across one integration step. Throws StepTooLarge when the
// torus distance between wrap(prev) and next is not below kMaxLiftStep.
inline constexpr double kMaxLiftStep = 0.25;
LiftedPoint lift_step(const LiftedPoint& prev, const TorusPoint& next);

// Vortex positions (lifted, so trajectories keep their winding), degrees and
// the lifted momentum parameter q.
struct VortexConfiguration {
    std::vector<LiftedPoint> lifted;
    std::vector<int> degrees;
    Vec2 q;

    std::size_t size() const { return lifted.size(); }
    TorusPoint position(std::size_t j) const { return lifted[j].wrapped(); }
    std::vector<TorusPoint> positions() const;
};

inline constexpr double kCosetTolerance = 1e-9;

// Distance of q from the coset 2*pi*sum(d_j a_j) + 2*pi*Z^2.
double coset_defect(std::span<const LiftedPoint> lifted, std::span<const int> degrees,
                    const Vec2& q);

// Throws InvalidConfiguration unless degrees are +-1 with zero sum, there are at
// least two vortices, and q lies on its coset.
void validate(const VortexConfiguration& c);

// Builds and validates a configuration. Without q the minimal-norm coset
// representative is used (see default_q0).
VortexConfiguration make_configuration(const std::vector<Vec2>& points, std::vector<int> degrees,
                                       std::optional<Vec2> q = std::nullopt);

// r(a): a quarter of the minimal pairwise torus distance.
double min_pair_separation(const VortexConfiguration& c);

struct PairDistance {
    std::size_t j = 0;
    std::size_t k = 0;
    double distance = 0.0;
};
PairDistance closest_pair(const VortexConfiguration& c);

}  // namespace tvortex
