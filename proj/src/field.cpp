#include "tvortex/field.hpp"

#include <algorithm>
#include <array>
#include <cmath>

#include "tvortex/cgl.hpp"
#include "tvortex/energy.hpp"
#include "tvortex/errors.hpp"
#include "tvortex/fft.hpp"
#include "tvortex/io.hpp"

namespace tvortex {

ComplexField::ComplexField(int size, Complex fill)
    : n(size), values(static_cast<std::size_t>(size) * static_cast<std::size_t>(size), fill) {}

namespace {

std::size_t cells(int n) { return static_cast<std::size_t>(n) * static_cast<std::size_t>(n); }

Vec2 node(int i, int j, int n) { return {static_cast<double>(i) / n, static_cast<double>(j) / n}; }

// Gauss-Legendre nodes and weights on [0, 1].
constexpr std::array<double, 8> kGlX = {0.019855071751231856, 0.10166676129318664, 0.2372337950418355,
                                        0.4082826787521751,   0.5917173212478249,  0.7627662049581645,
                                        0.8983332387068134,   0.9801449282487681};
constexpr std::array<double, 8> kGlW = {0.050614268145188129, 0.11119051722668724, 0.15685332293894364,
                                        0.18134189168918099,  0.18134189168918099, 0.15685332293894364,
                                        0.11119051722668724,  0.050614268145188129};

}  // namespace

void gradient(const ComplexField& u, Derivative kind, std::vector<Complex>& ux, std::vector<Complex>& uy) {
    const int n = u.n;
    ux.assign(cells(n), {});
    uy.assign(cells(n), {});
    if (kind == Derivative::Centered) {
        kernels::centered_gradient_omp(u.values, n, ux, uy);
        return;
    }
    ComplexFft2d fft(n);
    auto buf = fft.data();
    std::copy(u.values.begin(), u.values.end(), buf.begin());
    fft.forward();
    const std::vector<Complex> spec(buf.begin(), buf.end());
    const double scale = 1.0 / static_cast<double>(cells(n));
    for (int axis = 0; axis < 2; ++axis) {
        for (int i = 0; i < n; ++i) {
            for (int j = 0; j < n; ++j) {
                const int k = axis == 0 ? i : j;
                const double kk = k == n / 2 ? 0.0 : kTwoPi * signed_wavenumber(k, n);
                buf[u.index(i, j)] = spec[u.index(i, j)] * Complex{0.0, kk} * scale;
            }
        }
        fft.inverse();
        std::copy(buf.begin(), buf.end(), (axis == 0 ? ux : uy).begin());
    }
}

Densities densities(const ComplexField& u, double epsilon, Derivative kind) {
    if (!(epsilon > 0.0)) throw InvalidConfiguration("epsilon must be positive");
    std::vector<Complex> ux, uy;
    gradient(u, kind, ux, uy);
    Densities d;
    d.n = u.n;
    const std::size_t size = cells(u.n);
    d.e.resize(size);
    d.j.resize(size);
    d.jac.resize(size);
    const double pot = 1.0 / (4.0 * epsilon * epsilon);
    const auto count = static_cast<std::ptrdiff_t>(size);
#pragma omp parallel for schedule(static)
    for (std::ptrdiff_t s = 0; s < count; ++s) {
        const auto k = static_cast<std::size_t>(s);
        const Complex v = u.values[k];
        const double m = 1.0 - std::norm(v);
        d.e[k] = 0.5 * (std::norm(ux[k]) + std::norm(uy[k])) + pot * m * m;
        d.j[k] = {std::imag(std::conj(v) * ux[k]), std::imag(std::conj(v) * uy[k])};
        d.jac[k] = std::imag(std::conj(ux[k]) * uy[k]);
    }
    return d;
}

double grid_integral(std::span<const double> values, int n) {
    std::vector<double> rows(static_cast<std::size_t>(n), 0.0);
#pragma omp parallel for schedule(static)
    for (int i = 0; i < n; ++i) {
        double acc = 0.0;
        for (int j = 0; j < n; ++j) acc += values[static_cast<std::size_t>(i) * n + j];
        rows[static_cast<std::size_t>(i)] = acc;
    }
    double total = 0.0;
    for (double r : rows) total += r;
    return total / (static_cast<double>(n) * n);
}

Vec2 grid_integral(std::span<const Vec2> values, int n) {
    std::vector<double> xs(values.size()), ys(values.size());
    for (std::size_t k = 0; k < values.size(); ++k) {
        xs[k] = values[k].x;
        ys[k] = values[k].y;
    }
    return {grid_integral(xs, n), grid_integral(ys, n)};
}

FieldDiagnostics diagnostics(const ComplexField& u, double epsilon, std::span<const TorusPoint> windows,
                             double window_radius) {
    const auto d = densities(u, epsilon);
    FieldDiagnostics out;
    out.E_eps = grid_integral(d.e, u.n);
    out.Q = grid_integral(d.j, u.n);
    const double h2 = u.h() * u.h();
    for (const auto& w : windows) {
        double acc = 0.0;
        for (int i = 0; i < u.n; ++i)
            for (int j = 0; j < u.n; ++j)
                if (torus_distance(TorusPoint(node(i, j, u.n)), w) < window_radius) acc += d.jac[u.index(i, j)];
        out.jacobian_integrals.push_back(acc * h2);
    }
    out.vortex_list = track_vortices(u);
    return out;
}

VortexConfiguration nudge_off_grid(const VortexConfiguration& c, int n) {
    const double h = 1.0 / n;
    VortexConfiguration out = c;
    std::vector<Vec2> disp(c.size());
    for (std::size_t k = 0; k < c.size(); ++k) {
        const Vec2 p = c.position(k).vec();
        const Vec2 centre{(std::floor(p.x * n) + 0.5) * h, (std::floor(p.y * n) + 0.5) * h};
        out.lifted[k] = lift_step(c.lifted[k], wrap(centre));
        disp[k] = lifted_difference(out.lifted[k], c.lifted[k]);
    }
    out.q = lift_q(c, disp);
    return out;
}

std::vector<Vec2> harmonic_current(const VortexConfiguration& c, const GreenTable& t, int n) {
    const VortexConfiguration nudged = nudge_off_grid(c, n);
    std::vector<Vec2> out(cells(n));
    kernels::sample_current_omp(t, nudged, n, out);
    return out;
}

namespace {

// d chi(r) theta_hat / r summed over cores.
// r times the radial derivative of chi(r) log r. The model current is the
// rotated gradient of chi log r, so that the harmonic current minus the model
// is the rotated gradient of the smooth remainder alone.
double model_profile(double r, double rc) {
    const auto chi = cutoff::eval(r, rc);
    return chi.value + r * chi.d1 * std::log(r);
}

Vec2 model_current(const Vec2& x, std::span<const PointCore> cores, double rc) {
    Vec2 acc;
    for (const auto& c : cores) {
        const Vec2 d = min_image(x - c.position);
        const double r2 = norm2(d);
        if (r2 >= rc * rc) continue;
        acc += (c.degree * model_profile(std::sqrt(r2), rc) / r2) * Vec2{-d.y, d.x};
    }
    return acc;
}

// Exact line integral of the model current along the segment from x to x + step.
double model_increment(const Vec2& x, const Vec2& step, std::span<const PointCore> cores, double rc) {
    const double len = norm(step);
    double total = 0.0;
    for (const auto& c : cores) {
        const Vec2 a = min_image(x - c.position);
        const Vec2 b = a + step;
        // closest approach of the segment to the core
        const double s = std::clamp(-dot(a, step) / (len * len), 0.0, 1.0);
        if (norm(a + s * step) >= rc) continue;
        double inc = std::atan2(a.x * b.y - a.y * b.x, dot(a, b));
        if (std::max(norm(a), norm(b)) > cutoff::kPlateauFraction * rc) {
            double corr = 0.0;
            for (std::size_t g = 0; g < kGlX.size(); ++g) {
                const Vec2 p = a + kGlX[g] * step;
                const double r2 = norm2(p);
                corr += kGlW[g] * (model_profile(std::sqrt(r2), rc) - 1.0) * (p.x * step.y - p.y * step.x) / r2;
            }
            inc += corr;
        }
        total += c.degree * inc;
    }
    return total;
}

double distance_to_two_pi_z(double v) { return std::fabs(v - kTwoPi * std::round(v / kTwoPi)); }

// Fit d (-dy, dx)/r^2 + b to the current on the 4 x 4 nodes around a guess.
Vec2 fit_core(std::span<const Vec2> j_field, int n, Vec2 guess, int degree) {
    const double h = 1.0 / n;
    const int i0 = static_cast<int>(std::floor(guess.x * n)) - 1;
    const int j0 = static_cast<int>(std::floor(guess.y * n)) - 1;
    Vec2 a = guess;
    Vec2 b;
    for (int iter = 0; iter < 20; ++iter) {
        std::array<std::array<double, 4>, 4> A{};
        std::array<double, 4> rhs{};
        for (int di = 0; di < 4; ++di) {
            for (int dj = 0; dj < 4; ++dj) {
                const int ii = ((i0 + di) % n + n) % n;
                const int jj = ((j0 + dj) % n + n) % n;
                const Vec2 x{(i0 + di) * h, (j0 + dj) * h};
                const Vec2 d = x - a;
                const double r2 = norm2(d);
                if (r2 < 1e-4 * h * h) continue;
                const double r4 = r2 * r2;
                const Vec2 model = (degree / r2) * Vec2{-d.y, d.x} + b;
                const Vec2 res = j_field[static_cast<std::size_t>(ii) * n + jj] - model;
                // d(model)/d(a) = -degree * d(g)/d(delta)
                const double gxx = 2.0 * d.x * d.y / r4, gxy = -1.0 / r2 + 2.0 * d.y * d.y / r4;
                const double gyx = 1.0 / r2 - 2.0 * d.x * d.x / r4, gyy = -2.0 * d.x * d.y / r4;
                const std::array<std::array<double, 4>, 2> Jm = {
                    std::array<double, 4>{-degree * gxx, -degree * gxy, 1.0, 0.0},
                    std::array<double, 4>{-degree * gyx, -degree * gyy, 0.0, 1.0}};
                const std::array<double, 2> rv = {res.x, res.y};
                for (int row = 0; row < 2; ++row)
                    for (int p = 0; p < 4; ++p) {
                        rhs[p] += Jm[row][p] * rv[row];
                        for (int q = 0; q < 4; ++q) A[p][q] += Jm[row][p] * Jm[row][q];
                    }
            }
        }
        // Gaussian elimination with partial pivoting on the 4 x 4 normal equations.
        for (int col = 0; col < 4; ++col) {
            int piv = col;
            for (int r = col + 1; r < 4; ++r)
                if (std::fabs(A[r][col]) > std::fabs(A[piv][col])) piv = r;
            std::swap(A[col], A[piv]);
            std::swap(rhs[col], rhs[piv]);
            if (A[col][col] == 0.0) return a;
            for (int r = col + 1; r < 4; ++r) {
                const double f = A[r][col] / A[col][col];
                for (int c = col; c < 4; ++c) A[r][c] -= f * A[col][c];
                rhs[r] -= f * rhs[col];
            }
        }
        std::array<double, 4> delta{};
        for (int r = 3; r >= 0; --r) {
            double acc = rhs[r];
            for (int c = r + 1; c < 4; ++c) acc -= A[r][c] * delta[c];
            delta[r] = acc / A[r][r];
        }
        Vec2 step{delta[0], delta[1]};
        if (norm(step) > 0.5 * h) step = (0.5 * h / norm(step)) * step;
        a += step;
        b += Vec2{delta[2], delta[3]};
        if (norm(step) < 1e-14) break;
    }
    return wrap(a).vec();
}

}  // namespace

std::vector<PointCore> detect_current_cores(std::span<const Vec2> j_field, int n) {
    const double h = 1.0 / n;
    auto at = [&](int i, int j) -> const Vec2& {
        return j_field[static_cast<std::size_t>((i % n + n) % n) * n + static_cast<std::size_t>((j % n + n) % n)];
    };
    std::vector<double> circ(cells(n));
    for (int i = 0; i < n; ++i)
        for (int j = 0; j < n; ++j)
            circ[static_cast<std::size_t>(i) * n + j] =
                0.5 * h *
                ((at(i, j).x + at(i + 1, j).x) + (at(i + 1, j).y + at(i + 1, j + 1).y) -
                 (at(i, j + 1).x + at(i + 1, j + 1).x) - (at(i, j).y + at(i, j + 1).y));

    std::vector<char> seen(cells(n), 0);
    std::vector<PointCore> cores;
    for (int i = 0; i < n; ++i) {
        for (int j = 0; j < n; ++j) {
            const std::size_t s = static_cast<std::size_t>(i) * n + j;
            if (seen[s] || std::fabs(circ[s]) < 1.0) continue;
            // flood fill over 8-neighbours with significant circulation
            std::vector<std::pair<int, int>> stack{{i, j}};
            seen[s] = 1;
            double total = 0.0, weight = 0.0;
            Vec2 centroid;
            const Vec2 origin = node(i, j, n);
            while (!stack.empty()) {
                const auto [a, b] = stack.back();
                stack.pop_back();
                const double c = circ[static_cast<std::size_t>(a) * n + b];
                total += c;
                weight += std::fabs(c);
                const Vec2 centre = min_image(node(a, b, n) + Vec2{0.5 * h, 0.5 * h} - origin);
                centroid += std::fabs(c) * centre;
                for (int da = -1; da <= 1; ++da)
                    for (int db = -1; db <= 1; ++db) {
                        const int na = ((a + da) % n + n) % n, nb = ((b + db) % n + n) % n;
                        const std::size_t ns = static_cast<std::size_t>(na) * n + nb;
                        if (seen[ns] || std::fabs(circ[ns]) < 1.0) continue;
                        seen[ns] = 1;
                        stack.emplace_back(na, nb);
                    }
            }
            const int degree = static_cast<int>(std::lround(total / kTwoPi));
            if (degree == 0) continue;
            const Vec2 guess = wrap(origin + (1.0 / weight) * centroid).vec();
            cores.push_back({fit_core(j_field, n, guess, degree), degree});
        }
    }
    return cores;
}

ComplexField phase_integrate(std::span<const Vec2> j_field, int n, std::optional<std::vector<PointCore>> cores,
                             double model_cutoff) {
    if (j_field.size() != cells(n)) throw InvalidConfiguration("current field size does not match the grid");
    const std::vector<PointCore> core_list = cores ? *cores : detect_current_cores(j_field, n);
    const double h = 1.0 / n;
    const double rc = model_cutoff;

    std::vector<Vec2> smooth(cells(n));
#pragma omp parallel for schedule(static)
    for (int i = 0; i < n; ++i)
        for (int j = 0; j < n; ++j) {
            const std::size_t s = static_cast<std::size_t>(i) * n + j;
            smooth[s] = j_field[s] - model_current(node(i, j, n), core_list, rc);
        }
    auto sm = [&](int i, int j) -> const Vec2& {
        return smooth[static_cast<std::size_t>((i % n + n) % n) * n + static_cast<std::size_t>((j % n + n) % n)];
    };
    auto inc_x = [&](int i, int j) {
        return 0.5 * h * (sm(i, j).x + sm(i + 1, j).x) + model_increment(node(i, j, n), {h, 0.0}, core_list, rc);
    };
    auto inc_y = [&](int i, int j) {
        return 0.5 * h * (sm(i, j).y + sm(i, j + 1).y) + model_increment(node(i, j, n), {0.0, h}, core_list, rc);
    };

    // Every plaquette must close up to a multiple of 2*pi. The remainder alone
    // is not curl-free where the model cutoff varies, so the check uses the
    // full increments.
    double worst = 0.0;
#pragma omp parallel for schedule(static) reduction(max : worst)
    for (int i = 0; i < n; ++i)
        for (int j = 0; j < n; ++j) {
            const double c = inc_x(i, j) + inc_y(i + 1, j) - inc_x(i, j + 1) - inc_y(i, j);
            worst = std::max(worst, distance_to_two_pi_z(c));
        }
    if (worst > 1e-2)
        throw InconsistentCirculation("plaquette circulation is not a multiple of 2*pi (off by " +
                                      std::to_string(worst) + ")");

    std::vector<double> theta(cells(n));
    double acc = 0.0;
    for (int i = 0; i < n; ++i) {
        theta[static_cast<std::size_t>(i) * n] = acc;
        acc += inc_x(i, 0);
    }
    if (distance_to_two_pi_z(acc) > 1e-2) throw InconsistentCirculation("row cycle is not a multiple of 2*pi");
    double worst_column = 0.0;
#pragma omp parallel for schedule(static) reduction(max : worst_column)
    for (int i = 0; i < n; ++i) {
        double th = theta[static_cast<std::size_t>(i) * n];
        for (int j = 0; j + 1 < n; ++j) {
            th += inc_y(i, j);
            theta[static_cast<std::size_t>(i) * n + j + 1] = th;
        }
        th += inc_y(i, n - 1);
        worst_column = std::max(worst_column, distance_to_two_pi_z(th - theta[static_cast<std::size_t>(i) * n]));
    }
    if (worst_column > 1e-2) throw InconsistentCirculation("column cycle is not a multiple of 2*pi");

    ComplexField H(n);
    for (std::size_t s = 0; s < cells(n); ++s) H.values[s] = std::polar(1.0, theta[s]);
    return H;
}

double masked_relative_l2(std::span<const Vec2> a, std::span<const Vec2> b, int n, const VortexConfiguration& c,
                          double rho) {
    double num = 0.0, den = 0.0;
    for (int i = 0; i < n; ++i) {
        double rn = 0.0, rd = 0.0;
        for (int j = 0; j < n; ++j) {
            const TorusPoint x(node(i, j, n));
            bool inside = false;
            for (std::size_t k = 0; k < c.size() && !inside; ++k) inside = torus_distance(x, c.position(k)) < rho;
            if (inside) continue;
            const std::size_t s = static_cast<std::size_t>(i) * n + j;
            rn += norm2(a[s] - b[s]);
            rd += norm2(b[s]);
        }
        num += rn;
        den += rd;
    }
    return den > 0.0 ? std::sqrt(num / den) : std::sqrt(num);
}

ComplexField initial_data(const VortexConfiguration& c, const GreenTable& t, double epsilon, int n) {
    if (!(epsilon >= 2.0 / n)) throw CoreUnresolved("epsilon is below two grid spacings");
    const VortexConfiguration nudged = nudge_off_grid(c, n);
    std::vector<Vec2> j(cells(n));
    kernels::sample_current_omp(t, nudged, n, j);
    std::vector<PointCore> cores;
    for (std::size_t k = 0; k < nudged.size(); ++k) cores.push_back({nudged.position(k).vec(), nudged.degrees[k]});
    ComplexField u = phase_integrate(j, n, cores, t.cutoff_radius);
#pragma omp parallel for schedule(static)
    for (int i = 0; i < n; ++i)
        for (int jj = 0; jj < n; ++jj) {
            double rho = 1.0;
            const TorusPoint x(node(i, jj, n));
            for (std::size_t k = 0; k < nudged.size(); ++k) rho *= std::tanh(torus_distance(x, nudged.position(k)) / epsilon);
            u(i, jj) *= rho;
        }
    return u;
}

double ring_energy(std::span<const Vec2> j_field, int n, const VortexConfiguration& c, double rho) {
    const double h = 1.0 / n;
    const double band = 0.5 * std::sqrt(2.0) * h;
    constexpr int kSub = 16;
    std::vector<double> rows(static_cast<std::size_t>(n), 0.0);
#pragma omp parallel for schedule(static)
    for (int i = 0; i < n; ++i) {
        double acc = 0.0;
        for (int j = 0; j < n; ++j) {
            const Vec2 x = node(i, j, n);
            double dmin = 1.0;
            for (std::size_t k = 0; k < c.size(); ++k) dmin = std::min(dmin, torus_distance(TorusPoint(x), c.position(k)));
            double w = 1.0;
            if (dmin < rho - band) {
                w = 0.0;
            } else if (dmin <= rho + band) {
                int outside = 0;
                for (int a = 0; a < kSub; ++a)
                    for (int b = 0; b < kSub; ++b) {
                        const Vec2 p = x + Vec2{((a + 0.5) / kSub - 0.5) * h, ((b + 0.5) / kSub - 0.5) * h};
                        bool in = false;
                        for (std::size_t k = 0; k < c.size() && !in; ++k)
                            in = norm(min_image(p - c.position(k).vec())) < rho;
                        outside += in ? 0 : 1;
                    }
                w = static_cast<double>(outside) / (kSub * kSub);
            }
            if (w > 0.0) acc += w * 0.5 * norm2(j_field[static_cast<std::size_t>(i) * n + j]);
        }
        rows[static_cast<std::size_t>(i)] = acc;
    }
    double total = 0.0;
    for (double r : rows) total += r;
    return total * h * h;
}

void save_snapshot(const ComplexField& u, double epsilon, const std::filesystem::path& path) {
    std::string out = "TVF1";
    out.reserve(16 + 16 * u.values.size());
    io::append_le(out, static_cast<std::int32_t>(u.n));
    io::append_le(out, epsilon);
    for (const auto& v : u.values) {
        io::append_le(out, v.real());
        io::append_le(out, v.imag());
    }
    io::write_atomic(path, out);
}

ComplexField load_snapshot(const std::filesystem::path& path, double* epsilon) {
    const std::string data = io::read_file(path);
    io::ByteReader reader(data);
    if (reader.take(4) != "TVF1") throw FormatError("not a TVF1 snapshot");
    const auto n = reader.read_le<std::int32_t>();
    const double eps = reader.read_le<double>();
    if (n <= 0 || n > (1 << 15)) throw FormatError("snapshot grid size out of range");
    if (reader.remaining() != 16 * cells(n)) throw FormatError("snapshot payload size mismatch");
    ComplexField u(n);
    for (auto& v : u.values) {
        const double re = reader.read_le<double>();
        const double im = reader.read_le<double>();
        v = {re, im};
    }
    if (epsilon) *epsilon = eps;
    return u;
}

}  // namespace tvortex
