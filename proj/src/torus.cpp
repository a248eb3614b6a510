#include "tvortex/torus.hpp"

#include <cmath>
#include <limits>
#include <numeric>
#include <sstream>

#include "tvortex/energy.hpp"
#include "tvortex/errors.hpp"

namespace tvortex {

namespace {

double wrap_unit(double v) {
    double w = v - std::floor(v);
    // v slightly below an integer rounds up to exactly 1.0
    if (w >= 1.0) w = 0.0;
    return w;
}

double min_image_component(double d) {
    double r = d - std::floor(d + 0.5);
    if (r >= 0.5) r -= 1.0;
    if (r < -0.5) r += 1.0;
    return r;
}

}  // namespace

TorusPoint::TorusPoint(double x, double y) : x_(wrap_unit(x)), y_(wrap_unit(y)) {}

LiftedPoint::LiftedPoint(double x, double y) {
    const double fx = std::floor(x);
    const double fy = std::floor(y);
    frac_ = TorusPoint(x, y);
    // frac may have been rounded up to the next cell (then reset to 0)
    cell_x_ = static_cast<std::int64_t>(fx) + ((x - fx) >= 1.0 ? 1 : 0);
    cell_y_ = static_cast<std::int64_t>(fy) + ((y - fy) >= 1.0 ? 1 : 0);
}

Vec2 lifted_difference(const LiftedPoint& a, const LiftedPoint& b) {
    return {static_cast<double>(a.cell_x() - b.cell_x()) + (a.wrapped().x() - b.wrapped().x()),
            static_cast<double>(a.cell_y() - b.cell_y()) + (a.wrapped().y() - b.wrapped().y())};
}

TorusPoint wrap(const LiftedPoint& p) { return p.wrapped(); }

TorusPoint wrap(const Vec2& p) { return TorusPoint(p.x, p.y); }

Vec2 min_image(const Vec2& d) { return {min_image_component(d.x), min_image_component(d.y)}; }

Vec2 min_image_diff(const TorusPoint& p, const TorusPoint& r) {
    return min_image(Vec2{p.x() - r.x(), p.y() - r.y()});
}

double torus_distance(const TorusPoint& p, const TorusPoint& r) {
    return norm(min_image_diff(p, r));
}

LiftedPoint lift_step(const LiftedPoint& prev, const TorusPoint& next) {
    const TorusPoint& base = prev.wrapped();
    const Vec2 d = min_image_diff(next, base);
    if (!(norm(d) < kMaxLiftStep)) {
        std::ostringstream msg;
        msg << "lift step of length " << norm(d) << " exceeds " << kMaxLiftStep;
        throw StepTooLarge(msg.str());
    }
    const auto carry_x = static_cast<std::int64_t>(std::lround(base.x() + d.x - next.x()));
    const auto carry_y = static_cast<std::int64_t>(std::lround(base.y() + d.y - next.y()));
    return {prev.cell_x() + carry_x, prev.cell_y() + carry_y, next};
}

std::vector<TorusPoint> VortexConfiguration::positions() const {
    std::vector<TorusPoint> out;
    out.reserve(lifted.size());
    for (const auto& p : lifted) out.push_back(p.wrapped());
    return out;
}

double coset_defect(std::span<const LiftedPoint> lifted, std::span<const int> degrees,
                    const Vec2& q) {
    Vec2 base;
    for (std::size_t j = 0; j < lifted.size(); ++j) base += static_cast<double>(degrees[j]) * lifted[j].vec();
    const Vec2 r = (1.0 / kTwoPi) * (q - kTwoPi * base);
    const Vec2 off{r.x - std::round(r.x), r.y - std::round(r.y)};
    return kTwoPi * norm(off);
}

void validate(const VortexConfiguration& c) {
    if (c.lifted.size() < 2) throw InvalidConfiguration("at least two vortices are required");
    if (c.degrees.size() != c.lifted.size())
        throw InvalidConfiguration("degree list and position list differ in length");
    for (int d : c.degrees)
        if (d != 1 && d != -1) throw InvalidConfiguration("degrees must be +1 or -1");
    if (std::accumulate(c.degrees.begin(), c.degrees.end(), 0) != 0)
        throw InvalidConfiguration("degrees must sum to zero on the torus");
    const double defect = coset_defect(c.lifted, c.degrees, c.q);
    if (defect > kCosetTolerance) {
        std::ostringstream msg;
        msg << "q is off its coset 2*pi*sum(d_j a_j) + 2*pi*Z^2 by " << defect;
        throw InvalidConfiguration(msg.str());
    }
}

VortexConfiguration make_configuration(const std::vector<Vec2>& points, std::vector<int> degrees,
                                       std::optional<Vec2> q) {
    VortexConfiguration c;
    c.lifted.reserve(points.size());
    for (const auto& p : points) c.lifted.emplace_back(p.x, p.y);
    c.degrees = std::move(degrees);
    if (c.degrees.size() != c.lifted.size())
        throw InvalidConfiguration("degree list and position list differ in length");
    c.q = q ? *q : default_q0(c.lifted, c.degrees);
    validate(c);
    return c;
}

double min_pair_separation(const VortexConfiguration& c) {
    return 0.25 * closest_pair(c).distance;
}

PairDistance closest_pair(const VortexConfiguration& c) {
    PairDistance best{0, 0, std::numeric_limits<double>::infinity()};
    for (std::size_t j = 0; j < c.size(); ++j)
        for (std::size_t k = j + 1; k < c.size(); ++k) {
            const double d = torus_distance(c.position(j), c.position(k));
            if (d < best.distance) best = {j, k, d};
        }
    return best;
}

}  // namespace tvortex
