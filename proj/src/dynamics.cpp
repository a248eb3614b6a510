#include "tvortex/dynamics.hpp"

#include <algorithm>
#include <cmath>

#include "tvortex/errors.hpp"

namespace tvortex {

std::string to_string(StopReason r) {
    switch (r) {
        case StopReason::ReachedTmax: return "ReachedTmax";
        case StopReason::Collision: return "Collision";
        case StopReason::StepFailure: return "StepFailure";
    }
    return "Unknown";
}

void velocity_points(std::span<const Vec2> points, std::span<const int> degrees, const Vec2& q,
                     const GreenTable& t, double lambda, std::span<Vec2> out) {
    grad_W_points(points, degrees, q, t, out);
    const double scale = -1.0 / (kPi * (1.0 + lambda * lambda));
    for (std::size_t j = 0; j < points.size(); ++j) {
        const Vec2 g = out[j];
        out[j] = scale * (g + (lambda * degrees[j]) * apply_J(g));
    }
}

std::vector<Vec2> velocities(const VortexConfiguration& c, const GreenTable& t, double lambda) {
    std::vector<Vec2> p;
    for (std::size_t j = 0; j < c.size(); ++j) p.push_back(c.position(j).vec());
    std::vector<Vec2> v(p.size());
    velocity_points(p, c.degrees, c.q, t, lambda, v);
    return v;
}

Vec2 velocity(const VortexConfiguration& c, const GreenTable& t, double lambda, std::size_t j) {
    return velocities(c, t, lambda)[j];
}

Vec2 first_integral_xi(const VortexConfiguration& c, double lambda) {
    Vec2 sum, weighted;
    for (std::size_t j = 0; j < c.size(); ++j) {
        const Vec2 a = c.lifted[j].vec();
        sum += a;
        weighted += static_cast<double>(c.degrees[j]) * a;
    }
    return sum - lambda * apply_J(weighted);
}

double dissipation_residual(const TrajectoryRecord& rec) {
    if (rec.samples() < 2) return 0.0;
    auto power = [&](std::size_t s) {
        double acc = 0.0;
        for (const auto& v : rec.velocity_series[s]) acc += norm2(v);
        return acc;
    };
    double integral = 0.0;
    double worst = 0.0;
    double prev = power(0);
    for (std::size_t s = 1; s < rec.samples(); ++s) {
        const double cur = power(s);
        integral += 0.5 * (rec.times[s] - rec.times[s - 1]) * (prev + cur);
        prev = cur;
        worst = std::max(worst, std::fabs(kPi * integral + rec.W_series[s] - rec.W_series[0]));
    }
    return worst;
}

namespace {

// Full system in lifted coordinates.
class FullModel {
public:
    using State = VortexConfiguration;
    using Deriv = std::vector<Vec2>;

    FullModel(const GreenTable& t, double lambda) : t_(t), lambda_(lambda) {}

    Deriv rate(const State& s, double a = 0.0, const Deriv* k = nullptr) const {
        std::vector<Vec2> pts(s.size());
        Vec2 q = s.q;
        for (std::size_t j = 0; j < s.size(); ++j) {
            pts[j] = s.position(j).vec();
            if (k) {
                pts[j] += a * (*k)[j];
                q += (kTwoPi * a * s.degrees[j]) * (*k)[j];
            }
        }
        Deriv out(s.size());
        velocity_points(pts, s.degrees, q, t_, lambda_, out);
        return out;
    }

    State advance(const State& s, double h, const Deriv& k1, const Deriv& k2, const Deriv& k3,
                  const Deriv& k4) const {
        State next = s;
        std::vector<Vec2> disp(s.size());
        for (std::size_t j = 0; j < s.size(); ++j) {
            const Vec2 inc = (h / 6.0) * (k1[j] + 2.0 * k2[j] + 2.0 * k3[j] + k4[j]);
            next.lifted[j] = lift_step(s.lifted[j], wrap(s.position(j).vec() + inc));
            disp[j] = lifted_difference(next.lifted[j], s.lifted[j]);
        }
        next.q = lift_q(s, disp);
        return next;
    }

    const VortexConfiguration& config(const State& s) const { return s; }
    std::vector<Vec2> vortex_velocities(const State&, const Deriv& k) const { return k; }

private:
    const GreenTable& t_;
    double lambda_;
};

// Scalar reductions: state (alpha, beta).
class SymmetricModel {
public:
    using State = Vec2;
    using Deriv = Vec2;

    SymmetricModel(const GreenTable& t, double lambda, bool four) : t_(t), lambda_(lambda), four_(four) {}

    Deriv rate(const State& s, double a = 0.0, const Deriv* k = nullptr) const {
        const Vec2 x = k ? s + a * *k : s;
        return four_ ? symmetric_4v_rhs(x.x, x.y, lambda_, t_) : symmetric_2v_rhs(x.x, lambda_, t_);
    }

    State advance(const State& s, double h, const Deriv& k1, const Deriv& k2, const Deriv& k3,
                  const Deriv& k4) const {
        const Vec2 inc = (h / 6.0) * (k1 + 2.0 * k2 + 2.0 * k3 + k4);
        if (!(norm(inc) < kMaxLiftStep)) throw StepTooLarge("reduced step too large");
        return s + inc;
    }

    VortexConfiguration config(const State& s) const {
        return four_ ? symmetric_4v_configuration(s.x, s.y) : symmetric_2v_configuration(s.x, s.y);
    }

    std::vector<Vec2> vortex_velocities(const State&, const Deriv& k) const {
        if (four_) return {k, -k, {-k.x, k.y}, {k.x, -k.y}};
        return {k, {-k.x, k.y}};
    }

private:
    const GreenTable& t_;
    double lambda_;
    bool four_;
};

template <typename Model>
TrajectoryRecord run_rk4(const Model& model, typename Model::State state, const OdeParams& p,
                         const GreenTable& table) {
    if (!(p.dt > 0.0)) throw InvalidConfiguration("dt must be positive");
    if (p.sample_stride < 1) throw InvalidConfiguration("sample_stride must be >= 1");
    TrajectoryRecord rec;
    rec.lambda = p.lambda;

    auto record = [&](double t, const typename Model::State& s, const typename Model::Deriv& k) {
        const VortexConfiguration c = model.config(s);
        rec.times.push_back(t);
        rec.W_series.push_back(renormalized_W(c, table).W);
        rec.xi_series.push_back(first_integral_xi(c, p.lambda));
        auto v = model.vortex_velocities(s, k);
        std::vector<double> speeds;
        speeds.reserve(v.size());
        for (const auto& vj : v) speeds.push_back(norm(vj));
        rec.velocity_series.push_back(std::move(v));
        rec.speed_series.push_back(std::move(speeds));
        rec.configurations.push_back(c);
    };
    auto mark_collision = [&](const VortexConfiguration& c) {
        rec.stop_reason = StopReason::Collision;
        for (std::size_t j = 0; j < c.size(); ++j)
            for (std::size_t k = j + 1; k < c.size(); ++k)
                if (torus_distance(c.position(j), c.position(k)) < 2.0 * p.collision_stop_radius)
                    rec.colliding_pairs.emplace_back(static_cast<int>(j + 1), static_cast<int>(k + 1));
    };

    {
        const VortexConfiguration c0 = model.config(state);
        validate(c0);
        if (!(closest_pair(c0).distance > p.collision_stop_radius))
            throw CollisionError("initial configuration is already within the collision radius");
    }

    double t = 0.0;
    auto k1 = model.rate(state);
    record(t, state, k1);
    long steps = 0;
    const double min_step = p.dt * std::ldexp(1.0, -48);

    while (p.t_max - t > 1e-9 * p.dt) {
        double h = std::min(p.dt, p.t_max - t);
        const VortexConfiguration c = model.config(state);
        double vmax = 0.0;
        for (const auto& v : model.vortex_velocities(state, k1)) vmax = std::max(vmax, norm(v));
        const double dmin = closest_pair(c).distance;
        while (h * vmax > p.collision_resolution * dmin && h > min_step) h *= 0.5;

        typename Model::State next{};
        bool advanced = false;
        for (int attempt = 0; attempt <= p.max_lift_retries; ++attempt) {
            try {
                const auto k2 = model.rate(state, 0.5 * h, &k1);
                const auto k3 = model.rate(state, 0.5 * h, &k2);
                const auto k4 = model.rate(state, h, &k3);
                next = model.advance(state, h, k1, k2, k3, k4);
                advanced = true;
                break;
            } catch (const StepTooLarge&) {
                h *= 0.5;
            } catch (const CollisionError&) {
                h *= 0.5;
            }
        }
        if (!advanced) {
            rec.stop_reason = StopReason::StepFailure;
            rec.failure_message = "step rejected after " + std::to_string(p.max_lift_retries) + " halvings";
            break;
        }
        state = next;
        t += h;
        ++steps;
        const VortexConfiguration cn = model.config(state);
        if (closest_pair(cn).distance < p.collision_stop_radius) {
            record(t, state, model.rate(state));
            mark_collision(cn);
            return rec;
        }
        k1 = model.rate(state);
        const bool last = !(p.t_max - t > 1e-9 * p.dt);
        if (steps % p.sample_stride == 0 || last) record(t, state, k1);
    }
    return rec;
}

}  // namespace

TrajectoryRecord integrate(const VortexConfiguration& c0, const GreenTable& t, const OdeParams& p) {
    return run_rk4(FullModel(t, p.lambda), c0, p, t);
}

VortexConfiguration symmetric_2v_configuration(double alpha, double beta) {
    VortexConfiguration c;
    c.lifted = {LiftedPoint(0.5 + alpha, 0.5 + beta), LiftedPoint(0.5 - alpha, 0.5 + beta)};
    c.degrees = {1, -1};
    c.q = {4.0 * kPi * alpha, 0.0};
    return c;
}

VortexConfiguration symmetric_4v_configuration(double alpha, double beta) {
    VortexConfiguration c;
    c.lifted = {LiftedPoint(0.5 + alpha, 0.5 + beta), LiftedPoint(0.5 - alpha, 0.5 - beta),
                LiftedPoint(0.5 - alpha, 0.5 + beta), LiftedPoint(0.5 + alpha, 0.5 - beta)};
    c.degrees = {1, 1, -1, -1};
    c.q = {0.0, 0.0};
    return c;
}

Vec2 symmetric_2v_rhs(double alpha, double lambda, const GreenTable& t) {
    if (std::fabs(min_image(Vec2{2.0 * alpha, 0.0}).x) < kCollisionThreshold)
        throw CollisionError("symmetric pair has collided");
    const double g = eval_gradF(t, {2.0 * alpha, 0.0}).x + 4.0 * kPi * alpha;
    const double s = 1.0 / (1.0 + lambda * lambda);
    return {-2.0 * g * s, 2.0 * lambda * g * s};
}

Vec2 symmetric_4v_rhs(double alpha, double beta, double lambda, const GreenTable& t) {
    const Vec2 diag = eval_gradF(t, {2.0 * alpha, 2.0 * beta});
    const double fx = diag.x - eval_gradF(t, {2.0 * alpha, 0.0}).x;
    const double fy = diag.y - eval_gradF(t, {0.0, 2.0 * beta}).y;
    const double s = 2.0 / (1.0 + lambda * lambda);
    return {s * (fx + lambda * fy), s * (-lambda * fx + fy)};
}

TrajectoryRecord symmetric_2v(double alpha0, double beta0, double lambda, const OdeParams& p,
                              const GreenTable& t) {
    if (alpha0 == 0.0) throw CollisionError("alpha0 = 0 places both vortices at the same point");
    OdeParams q = p;
    q.lambda = lambda;
    return run_rk4(SymmetricModel(t, lambda, false), Vec2{alpha0, beta0}, q, t);
}

TrajectoryRecord symmetric_4v(double alpha0, double beta0, double lambda, const OdeParams& p,
                              const GreenTable& t) {
    OdeParams q = p;
    q.lambda = lambda;
    return run_rk4(SymmetricModel(t, lambda, true), Vec2{alpha0, beta0}, q, t);
}

}  // namespace tvortex
