#include <array>
#include <cmath>
#include <vector>

#include "tvortex/errors.hpp"
#include "tvortex/field.hpp"

namespace tvortex {

namespace {

constexpr std::array<double, 6> kGx = {0.033765242898423975, 0.16939530676686776, 0.38069040695840156,
                                       0.61930959304159844,  0.83060469323313224, 0.96623475710157603};
constexpr std::array<double, 6> kGw = {0.085662246189585173, 0.18038078652406930, 0.23395696728634552,
                                       0.23395696728634552,  0.18038078652406930, 0.085662246189585173};

// Uniform spacing 0.02 eps out to 20 eps, then 1% geometric growth.
std::vector<double> graded_mesh(double eps, double radius) {
    std::vector<double> r{0.0};
    const double fine = 0.02 * eps;
    double dr = fine;
    while (r.back() + dr < radius) {
        r.push_back(r.back() + dr);
        if (r.back() >= 20.0 * eps) dr *= 1.01;
    }
    if (radius - r.back() < 0.5 * dr) r.back() = radius;
    else r.push_back(radius);
    return r;
}

struct Assembly {
    double energy = 0.0;
    std::vector<double> grad;
    std::vector<double> diag;
    std::vector<double> off;  // coupling between node k and k + 1
};

// Energy (without the factor pi), gradient and tridiagonal Hessian.
Assembly assemble(const std::vector<double>& r, const std::vector<double>& f, double eps, bool derivatives) {
    const std::size_t m = r.size();
    Assembly a;
    if (derivatives) {
        a.grad.assign(m, 0.0);
        a.diag.assign(m, 0.0);
        a.off.assign(m, 0.0);
    }
    const double pot = 1.0 / (2.0 * eps * eps);
    for (std::size_t e = 0; e + 1 < m; ++e) {
        const double ra = r[e], rb = r[e + 1], len = rb - ra;
        const double fa = f[e], fb = f[e + 1];
        const double slope = (fb - fa) / len;
        // gradient term, exact
        const double kin = 0.5 * (rb * rb - ra * ra) / (len * len);
        a.energy += slope * slope * 0.5 * (rb * rb - ra * ra);
        double g[2] = {0.0, 0.0};
        double H[2][2] = {{0.0, 0.0}, {0.0, 0.0}};
        if (derivatives) {
            g[0] += 2.0 * kin * (fa - fb);
            g[1] += 2.0 * kin * (fb - fa);
            H[0][0] += 2.0 * kin;
            H[1][1] += 2.0 * kin;
            H[0][1] -= 2.0 * kin;
        }
        if (e == 0) {
            // f = fb r / len on the first element: int f^2 / r = fb^2 / 2.
            a.energy += 0.5 * fb * fb;
            if (derivatives) {
                g[1] += fb;
                H[1][1] += 1.0;
            }
        }
        for (std::size_t q = 0; q < kGx.size(); ++q) {
            const double x = ra + kGx[q] * len;
            const double w = kGw[q] * len;
            const double pa = (rb - x) / len, pb = (x - ra) / len;
            const double v = fa * pa + fb * pb;
            const double s = 1.0 - v * v;
            double val = pot * s * s * x;
            double dv = -4.0 * v * s * pot * x;
            double d2v = (12.0 * v * v - 4.0) * pot * x;
            if (e > 0) {
                val += v * v / x;
                dv += 2.0 * v / x;
                d2v += 2.0 / x;
            }
            a.energy += w * val;
            if (derivatives) {
                g[0] += w * dv * pa;
                g[1] += w * dv * pb;
                H[0][0] += w * d2v * pa * pa;
                H[1][1] += w * d2v * pb * pb;
                H[0][1] += w * d2v * pa * pb;
            }
        }
        if (derivatives) {
            a.grad[e] += g[0];
            a.grad[e + 1] += g[1];
            a.diag[e] += H[0][0];
            a.diag[e + 1] += H[1][1];
            a.off[e] += H[0][1];
        }
    }
    return a;
}

}  // namespace

RadialProfile radial_minimizer(double epsilon, double radius) {
    if (!(epsilon >= 1e-4)) throw InvalidConfiguration("epsilon must be at least 1e-4");
    if (!(radius > 0.0)) throw InvalidConfiguration("radius must be positive");
    RadialProfile out;
    out.r = graded_mesh(epsilon, radius);
    const std::size_t m = out.r.size();
    out.f.resize(m);
    const double norm_end = std::tanh(radius / epsilon);
    for (std::size_t k = 0; k < m; ++k) out.f[k] = std::tanh(out.r[k] / epsilon) / norm_end;
    out.f.front() = 0.0;
    out.f.back() = 1.0;

    constexpr int kMaxNewton = 200;
    for (int it = 0; it < kMaxNewton; ++it) {
        const Assembly a = assemble(out.r, out.f, epsilon, true);
        // Interior unknowns 1 .. m-2; Thomas algorithm.
        const std::size_t lo = 1, hi = m - 2;
        std::vector<double> c(m, 0.0), d(m, 0.0), step(m, 0.0);
        double gnorm = 0.0;
        for (std::size_t k = lo; k <= hi; ++k) gnorm = std::max(gnorm, std::fabs(a.grad[k]));
        bool ok = true;
        for (std::size_t k = lo; k <= hi; ++k) {
            const double sub = k > lo ? a.off[k - 1] : 0.0;
            const double denom = a.diag[k] - (k > lo ? sub * c[k - 1] : 0.0);
            if (!(denom > 0.0)) {
                ok = false;
                break;
            }
            c[k] = a.off[k] / denom;
            d[k] = (-a.grad[k] - (k > lo ? sub * d[k - 1] : 0.0)) / denom;
        }
        if (ok) {
            for (std::size_t k = hi + 1; k-- > lo;) step[k] = d[k] - (k < hi ? c[k] * step[k + 1] : 0.0);
        } else {
            for (std::size_t k = lo; k <= hi; ++k) step[k] = -a.grad[k] / std::max(std::fabs(a.diag[k]), 1e-300);
        }
        double smax = 0.0;
        for (std::size_t k = lo; k <= hi; ++k) smax = std::max(smax, std::fabs(step[k]));
        // The gradient bottoms out near 1e-13 from rounding.
        if (ok && (gnorm < 1e-10 || smax < 1e-13)) {
            out.energy = kPi * a.energy;
            out.newton_iterations = it;
            return out;
        }
        double slope = 0.0;
        for (std::size_t k = lo; k <= hi; ++k) slope += a.grad[k] * step[k];
        double alpha = 1.0;
        std::vector<double> trial(out.f);
        while (true) {
            for (std::size_t k = lo; k <= hi; ++k) trial[k] = out.f[k] + alpha * step[k];
            const double e = assemble(out.r, trial, epsilon, false).energy;
            if (e <= a.energy + 1e-4 * alpha * slope || alpha < 1e-10) break;
            alpha *= 0.5;
        }
        out.f = trial;
    }
    throw NoConvergence("Newton iteration for the radial profile did not converge");
}

double gamma_hat(double epsilon) { return radial_minimizer(epsilon).energy - kPi * std::log(1.0 / epsilon); }

double gamma_estimate(std::span<const double> eps_list) {
    if (eps_list.empty()) throw InvalidConfiguration("eps_list is empty");
    for (std::size_t k = 0; k < eps_list.size(); ++k) {
        if (!(eps_list[k] >= 1e-4)) throw InvalidConfiguration("epsilon values must be at least 1e-4");
        if (k > 0 && !(eps_list[k] < eps_list[k - 1])) throw InvalidConfiguration("eps_list must be decreasing");
    }
    if (eps_list.size() == 1) return gamma_hat(eps_list[0]);
    const double coarse = gamma_hat(eps_list[eps_list.size() - 2]);
    const double fine = gamma_hat(eps_list.back());
    const double ratio = eps_list[eps_list.size() - 2] / eps_list.back();
    const double w = ratio * ratio;
    return (w * fine - coarse) / (w - 1.0);
}

}  // namespace tvortex
