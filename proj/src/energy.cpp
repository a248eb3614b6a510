#include "tvortex/energy.hpp"

#include <algorithm>
#include <cmath>
#include <sstream>

#include "tvortex/errors.hpp"

namespace tvortex {

void check_no_collision(std::span<const Vec2> points) {
    for (std::size_t j = 0; j < points.size(); ++j)
        for (std::size_t k = j + 1; k < points.size(); ++k)
            if (norm(min_image(points[j] - points[k])) < kCollisionThreshold) {
                std::ostringstream msg;
                msg << "vortices " << j + 1 << " and " << k + 1 << " coincide";
                throw CollisionError(msg.str());
            }
}

namespace {

std::vector<Vec2> points_of(const VortexConfiguration& c) {
    std::vector<Vec2> p;
    p.reserve(c.size());
    for (std::size_t j = 0; j < c.size(); ++j) p.push_back(c.position(j).vec());
    return p;
}

}  // namespace

EnergyReport renormalized_W(const VortexConfiguration& c, const GreenTable& t) {
    const auto p = points_of(c);
    check_no_collision(p);
    // One term per unordered pair holding both ordered contributions; the
    // sorted sum makes W independent of the labelling.
    std::vector<double> terms;
    terms.reserve(p.size() * (p.size() - 1) / 2);
    for (std::size_t j = 0; j < p.size(); ++j)
        for (std::size_t k = j + 1; k < p.size(); ++k) {
            const Vec2 d = p[j] - p[k];
            const double pair = eval_F(t, d) + eval_F(t, -d);
            terms.push_back(static_cast<double>(c.degrees[j] * c.degrees[k]) * pair);
        }
    std::sort(terms.begin(), terms.end());
    double sum = 0.0;
    for (double v : terms) sum += v;
    EnergyReport r;
    r.interaction_part = -kPi * sum;
    r.momentum_part = 0.5 * norm2(c.q);
    r.W = r.interaction_part + r.momentum_part;
    return r;
}

void grad_W_points(std::span<const Vec2> points, std::span<const int> degrees, const Vec2& q,
                   const GreenTable& t, std::span<Vec2> out) {
    check_no_collision(points);
    for (std::size_t j = 0; j < points.size(); ++j) {
        Vec2 acc = q;
        for (std::size_t k = 0; k < points.size(); ++k) {
            if (k == j) continue;
            acc -= static_cast<double>(degrees[k]) * eval_gradF(t, points[j] - points[k]);
        }
        out[j] = (kTwoPi * degrees[j]) * acc;
    }
}

std::vector<Vec2> grad_W_all(const VortexConfiguration& c, const GreenTable& t) {
    const auto p = points_of(c);
    std::vector<Vec2> g(p.size());
    grad_W_points(p, c.degrees, c.q, t, g);
    return g;
}

Vec2 grad_W(const VortexConfiguration& c, const GreenTable& t, std::size_t j) {
    const auto p = points_of(c);
    check_no_collision(p);
    Vec2 acc = c.q;
    for (std::size_t k = 0; k < p.size(); ++k) {
        if (k == j) continue;
        acc -= static_cast<double>(c.degrees[k]) * eval_gradF(t, p[j] - p[k]);
    }
    return (kTwoPi * c.degrees[j]) * acc;
}

EnergyReport W_eps(const VortexConfiguration& c, const GreenTable& t, double epsilon, double gamma) {
    if (!(epsilon > 0.0)) throw InvalidConfiguration("epsilon must be positive");
    EnergyReport r = renormalized_W(c, t);
    r.epsilon = epsilon;
    r.gamma = gamma;
    r.W_eps = static_cast<double>(c.size()) * (kPi * std::log(1.0 / epsilon) + gamma) + r.W;
    return r;
}

Vec2 lift_q(const VortexConfiguration& c, std::span<const Vec2> displacements) {
    Vec2 acc;
    for (std::size_t j = 0; j < c.size(); ++j) acc += static_cast<double>(c.degrees[j]) * displacements[j];
    return c.q + kTwoPi * acc;
}

Vec2 default_q0(std::span<const LiftedPoint> lifted, std::span<const int> degrees) {
    Vec2 base;
    for (std::size_t j = 0; j < lifted.size(); ++j) base += static_cast<double>(degrees[j]) * lifted[j].vec();
    auto pick = [](double c) {
        // candidates c + k around the nearest lattice offset
        const double k0 = -std::floor(c);
        double best_k = k0 - 1.0;
        double best = std::fabs(c + best_k);
        for (double k : {k0, k0 + 1.0}) {
            const double v = std::fabs(c + k);
            if (v < best - 1e-12) {
                best = v;
                best_k = k;
            }
        }
        return kTwoPi * (c + best_k);
    };
    return {pick(base.x), pick(base.y)};
}

}  // namespace tvortex
