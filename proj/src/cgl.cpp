#include "tvortex/cgl.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

#include "tvortex/dynamics.hpp"
#include "tvortex/errors.hpp"
#include "tvortex/fft.hpp"
#include "tvortex/kernels.hpp"

namespace tvortex {

double k_eps_for(double epsilon) { return 1.0 / std::log(1.0 / epsilon); }

PdeParams make_pde_params(double epsilon, double lambda, int n, double dt, double t_max, int track_stride) {
    PdeParams p;
    p.epsilon = epsilon;
    p.lambda = lambda;
    p.k_eps = k_eps_for(epsilon);
    p.n = n;
    p.dt = dt;
    p.t_max = t_max;
    p.track_stride = track_stride;
    validate(p);
    return p;
}

void validate(const PdeParams& p) {
    if (!(p.epsilon > 0.0 && p.epsilon < 1.0)) throw InvalidConfiguration("epsilon must lie in (0, 1)");
    if (std::fabs(p.k_eps - k_eps_for(p.epsilon)) > 1e-14) throw InvalidConfiguration("k_eps must equal 1/log(1/eps)");
    if (!(p.k_eps / (p.k_eps * p.k_eps + p.lambda * p.lambda) > 0.0))
        throw InvalidConfiguration("linear substep is not dissipative");
    if (p.n < 8 || (p.n & (p.n - 1)) != 0) throw InvalidConfiguration("grid size must be a power of two >= 8");
    if (!(p.dt > 0.0)) throw InvalidConfiguration("dt must be positive");
    if (!(p.t_max >= 0.0)) throw InvalidConfiguration("t_max must be non-negative");
    if (p.track_stride < 1) throw InvalidConfiguration("track_stride must be >= 1");
}

struct CglSolver::Impl {
    explicit Impl(int n) : fft(n) {}
    ComplexFft2d fft;
    std::vector<double> k2;  // (2 pi |k|)^2 per bin
    double cached_dt = -1.0;
    std::vector<Complex> multiplier;
};

CglSolver::CglSolver(const PdeParams& p) : p_(p) {
    validate(p_);
    impl_ = std::make_unique<Impl>(p_.n);
    const int n = p_.n;
    impl_->k2.resize(static_cast<std::size_t>(n) * n);
    for (int i = 0; i < n; ++i)
        for (int j = 0; j < n; ++j) {
            const double kx = kTwoPi * signed_wavenumber(i, n);
            const double ky = kTwoPi * signed_wavenumber(j, n);
            impl_->k2[static_cast<std::size_t>(i) * n + j] = kx * kx + ky * ky;
        }
}

CglSolver::~CglSolver() = default;

void CglSolver::linear(ComplexField& u, double dt) {
    auto& im = *impl_;
    const int n = p_.n;
    if (dt != im.cached_dt) {
        const Complex inv_m = 1.0 / Complex{p_.k_eps, p_.lambda};
        const double scale = 1.0 / (static_cast<double>(n) * n);
        im.multiplier.resize(im.k2.size());
        for (std::size_t s = 0; s < im.k2.size(); ++s) im.multiplier[s] = std::exp(-dt * im.k2[s] * inv_m) * scale;
        im.cached_dt = dt;
    }
    auto buf = im.fft.data();
    std::copy(u.values.begin(), u.values.end(), buf.begin());
    im.fft.forward();
    for (std::size_t s = 0; s < buf.size(); ++s) buf[s] *= im.multiplier[s];
    im.fft.inverse();
    std::copy(buf.begin(), buf.end(), u.values.begin());
}

void CglSolver::nonlinear(ComplexField& u, double dt) const {
    const Complex inv_m = 1.0 / Complex{p_.k_eps, p_.lambda};
    kernels::cgl_nonlinear_omp(u.values, dt, p_.epsilon, inv_m.real(), inv_m.imag());
}

void CglSolver::step(ComplexField& u) {
    nonlinear(u, 0.5 * p_.dt);
    linear(u, p_.dt);
    nonlinear(u, 0.5 * p_.dt);
}

double CglSolver::energy(const ComplexField& u) {
    auto buf = impl_->fft.data();
    std::copy(u.values.begin(), u.values.end(), buf.begin());
    impl_->fft.forward();
    const int n = p_.n;
    const double nn = static_cast<double>(n) * n;
    double grad = 0.0;
    for (int i = 0; i < n; ++i) {
        double row = 0.0;
        for (int j = 0; j < n; ++j) {
            const std::size_t s = static_cast<std::size_t>(i) * n + j;
            row += impl_->k2[s] * std::norm(buf[s]);
        }
        grad += row;
    }
    grad *= 0.5 / (nn * nn);
    const double pot = 1.0 / (4.0 * p_.epsilon * p_.epsilon);
    double potential = 0.0;
    for (int i = 0; i < n; ++i) {
        double row = 0.0;
        for (int j = 0; j < n; ++j) {
            const double m = 1.0 - std::norm(u.values[static_cast<std::size_t>(i) * n + j]);
            row += m * m;
        }
        potential += row;
    }
    return grad + pot * potential / nn;
}

ComplexField step(const ComplexField& u, const PdeParams& p) {
    PdeParams q = p;
    q.n = u.n;
    CglSolver solver(q);
    ComplexField out = u;
    solver.step(out);
    return out;
}

double pde_energy(const ComplexField& u, double epsilon) {
    CglSolver solver(make_pde_params(epsilon, 0.0, u.n, 1.0, 0.0));
    return solver.energy(u);
}

namespace {

// Zero of the bilinear interpolant on the unit cell, by Newton from the centre.
Vec2 bilinear_zero(Complex u00, Complex u10, Complex u01, Complex u11) {
    double s = 0.5, t = 0.5;
    for (int it = 0; it < 30; ++it) {
        const Complex f = u00 * (1 - s) * (1 - t) + u10 * s * (1 - t) + u01 * (1 - s) * t + u11 * s * t;
        const Complex fs = (u10 - u00) * (1 - t) + (u11 - u01) * t;
        const Complex ft = (u01 - u00) * (1 - s) + (u11 - u10) * s;
        const double det = fs.real() * ft.imag() - ft.real() * fs.imag();
        if (det == 0.0) break;
        const double ds = (f.real() * ft.imag() - ft.real() * f.imag()) / det;
        const double dtt = (fs.real() * f.imag() - f.real() * fs.imag()) / det;
        s = std::clamp(s - ds, 0.0, 1.0);
        t = std::clamp(t - dtt, 0.0, 1.0);
        if (std::fabs(ds) + std::fabs(dtt) < 1e-14) break;
    }
    return {s, t};
}

}  // namespace

std::vector<DetectedVortex> track_vortices(const ComplexField& u) {
    const int n = u.n;
    const double h = u.h();
    std::vector<DetectedVortex> out;
    for (int i = 0; i < n; ++i) {
        for (int j = 0; j < n; ++j) {
            const Complex a = u(i, j), b = u(i + 1, j), c = u(i + 1, j + 1), d = u(i, j + 1);
            const double w = std::arg(b * std::conj(a)) + std::arg(c * std::conj(b)) + std::arg(d * std::conj(c)) +
                             std::arg(a * std::conj(d));
            const int degree = static_cast<int>(std::lround(w / kTwoPi));
            if (degree == 0) continue;
            const Vec2 st = bilinear_zero(a, b, d, c);
            out.push_back({wrap(Vec2{(i + st.x) * h, (j + st.y) * h}).vec(), degree});
        }
    }
    return out;
}

PdeRun run(const ComplexField& u0, const PdeParams& p, RunOptions options) {
    validate(p);
    if (u0.n != p.n) throw InvalidConfiguration("initial field does not match the grid size");
    CglSolver solver(p);
    PdeRun out;
    ComplexField u = u0;
    const double h = 1.0 / p.n;
    const double h2 = h * h;
    const long steps = std::lround(p.t_max / p.dt);
    double dissipated = 0.0;

    for (const auto& v : track_vortices(u)) {
        VortexTrack tr;
        tr.degree = v.degree;
        tr.times.push_back(0.0);
        tr.positions.push_back(v.position);
        out.tracks.push_back(tr);
    }
    out.energy_times.push_back(0.0);
    out.energy.push_back(solver.energy(u));
    out.dissipation.push_back(0.0);

    auto track = [&](double t) {
        if (!out.tracked) return;
        auto found = track_vortices(u);
        if (found.size() != out.tracks.size()) {
            out.tracked = false;
            out.tracking_note = "vortex count changed at t=" + std::to_string(t);
            return;
        }
        std::vector<char> used(found.size(), 0);
        std::vector<std::size_t> match;
        for (auto& tr : out.tracks) {
            const TorusPoint last = wrap(tr.positions.back());
            std::size_t best = found.size();
            double best_d = 4.0 * h;
            for (std::size_t k = 0; k < found.size(); ++k) {
                if (used[k] || found[k].degree != tr.degree) continue;
                const double dist = torus_distance(last, TorusPoint(found[k].position));
                if (dist <= best_d) {
                    best_d = dist;
                    best = k;
                }
            }
            if (best == found.size()) {
                out.tracked = false;
                out.tracking_note = "no match within 4h at t=" + std::to_string(t);
                return;
            }
            used[best] = 1;
            match.push_back(best);
        }
        for (std::size_t k = 0; k < out.tracks.size(); ++k) {
            auto& tr = out.tracks[k];
            const TorusPoint last = wrap(tr.positions.back());
            tr.times.push_back(t);
            tr.positions.push_back(tr.positions.back() + min_image_diff(TorusPoint(found[match[k]].position), last));
        }
    };

    ComplexField prev;
    bool open = false;  // a trailing nonlinear half step is pending
    for (long s = 1; s <= steps; ++s) {
        const bool record = (s % p.track_stride == 0) || s == steps;
        if (options.track_dissipation) {
            prev = u;
            solver.step(u);
            double acc = 0.0;
            for (int i = 0; i < p.n; ++i) {
                double row = 0.0;
                for (int j = 0; j < p.n; ++j) {
                    const std::size_t k = static_cast<std::size_t>(i) * p.n + j;
                    row += std::norm(u.values[k] - prev.values[k]);
                }
                acc += row;
            }
            dissipated += p.k_eps * h2 * acc / p.dt;
        } else {
            // consecutive half steps of the nonlinear flow are merged
            solver.nonlinear(u, open ? p.dt : 0.5 * p.dt);
            solver.linear(u, p.dt);
            open = true;
            if (record) {
                solver.nonlinear(u, 0.5 * p.dt);
                open = false;
            }
        }
        if (record) {
            const double t = static_cast<double>(s) * p.dt;
            out.energy_times.push_back(t);
            out.energy.push_back(solver.energy(u));
            out.dissipation.push_back(dissipated);
            track(t);
        }
    }
    out.final_field = std::move(u);
    return out;
}

namespace {

// Cubic Hermite interpolation of a lifted ODE trajectory.
Vec2 ode_position(const TrajectoryRecord& rec, std::size_t vortex, double t) {
    const auto& ts = rec.times;
    if (t <= ts.front()) return rec.configurations.front().lifted[vortex].vec();
    if (t >= ts.back()) return rec.configurations.back().lifted[vortex].vec();
    const auto it = std::upper_bound(ts.begin(), ts.end(), t);
    const std::size_t b = static_cast<std::size_t>(it - ts.begin());
    const std::size_t a = b - 1;
    const double dt = ts[b] - ts[a];
    const double s = (t - ts[a]) / dt;
    const Vec2 p0 = rec.configurations[a].lifted[vortex].vec();
    const Vec2 p1 = rec.configurations[b].lifted[vortex].vec();
    const Vec2 m0 = dt * rec.velocity_series[a][vortex];
    const Vec2 m1 = dt * rec.velocity_series[b][vortex];
    const double s2 = s * s, s3 = s2 * s;
    return (2 * s3 - 3 * s2 + 1) * p0 + (s3 - 2 * s2 + s) * m0 + (-2 * s3 + 3 * s2) * p1 + (s3 - s2) * m1;
}

}  // namespace

CompareResult compare_to_ode(const VortexConfiguration& c0, double lambda, const std::vector<double>& eps_list,
                             double horizon, int n, double dt, const GreenTable& table, int track_stride) {
    const VortexConfiguration start = nudge_off_grid(c0, n);
    OdeParams op;
    op.lambda = lambda;
    op.t_max = horizon;
    const TrajectoryRecord ode = integrate(start, table, op);
    if (ode.stop_reason != StopReason::ReachedTmax)
        throw CollisionError("the reduced law stops before the comparison horizon");

    CompareResult result;
    for (double eps : eps_list) {
        const PdeParams p = make_pde_params(eps, lambda, n, dt, horizon, track_stride);
        const ComplexField u0 = initial_data(start, table, eps, n);
        PdeRun pr = run(u0, p);
        CompareRow row{eps, n, dt, 0.0, pr.tracked};
        // pair each track with the configured vortex nearest to its first position
        for (const auto& tr : pr.tracks) {
            std::size_t best = 0;
            double best_d = 2.0;
            for (std::size_t k = 0; k < start.size(); ++k) {
                if (start.degrees[k] != tr.degree) continue;
                const double d = torus_distance(wrap(tr.positions.front()), start.position(k));
                if (d < best_d) {
                    best_d = d;
                    best = k;
                }
            }
            for (std::size_t f = 0; f < tr.times.size(); ++f) {
                const Vec2 predicted = ode_position(ode, best, tr.times[f]);
                row.max_err = std::max(row.max_err, torus_distance(wrap(tr.positions[f]), wrap(predicted)));
            }
        }
        if (pr.tracks.size() != start.size()) {
            row.tracked = false;
            row.max_err = std::numeric_limits<double>::infinity();
        }
        result.rows.push_back(row);
        result.runs.push_back(std::move(pr));
    }
    return result;
}

}  // namespace tvortex
