#include "tvortex/green.hpp"

#include <fftw3.h>

#include <array>
#include <bit>
#include <cmath>
#include <complex>
#include <cstdint>
#include <cstring>
#include <fstream>
#include <mutex>
#include <sstream>

#include "tvortex/errors.hpp"
#include "tvortex/fft.hpp"
#include "tvortex/io.hpp"
#include "tvortex/kernels.hpp"
#include "tvortex/torus.hpp"

namespace tvortex {

namespace cutoff {

namespace {

struct Psi {
    double v, d1, d2;
};

// exp(-1/t) and derivatives, zero for t <= 0.
Psi psi(double t) {
    if (t <= 0.0) return {0.0, 0.0, 0.0};
    const double v = std::exp(-1.0 / t);
    const double it = 1.0 / t;
    return {v, v * it * it, v * (it * it * it * it - 2.0 * it * it * it)};
}

}  // namespace

Profile eval(double r, double cutoff_radius) {
    const double inner = kPlateauFraction * cutoff_radius;
    if (r <= inner) return {1.0, 0.0, 0.0};
    if (r >= cutoff_radius) return {0.0, 0.0, 0.0};
    const double width = cutoff_radius - inner;
    const double s = (r - inner) / width;
    const Psi a = psi(s);
    const Psi bb = psi(1.0 - s);
    const double b = bb.v, b1 = -bb.d1, b2 = bb.d2;
    const double sum = a.v + b;
    const double num = a.d1 * b - a.v * b1;
    const double phi = a.v / sum;
    const double phi1 = num / (sum * sum);
    const double num1 = a.d2 * b - a.v * b2;
    const double phi2 = (num1 * sum - 2.0 * num * (a.d1 + b1)) / (sum * sum * sum);
    return {1.0 - phi, -phi1 / width, -phi2 / (width * width)};
}

}  // namespace cutoff

namespace {

constexpr int kStencil = 6;
constexpr double kSingularTol = 1e-12;

struct Stencil {
    int base;  // index of the first stencil node
    std::array<double, kStencil> w;
};

// Lagrange weights for nodes base, ..., base + kStencil - 1 in grid units.
Stencil lagrange(double u) {
    const double fl = std::floor(u);
    const double t = u - fl;
    Stencil s{};
    s.base = static_cast<int>(fl) - (kStencil / 2 - 1);
    for (int m = 0; m < kStencil; ++m) {
        const double xm = m - (kStencil / 2 - 1);
        double w = 1.0;
        for (int k = 0; k < kStencil; ++k) {
            if (k == m) continue;
            const double xk = k - (kStencil / 2 - 1);
            w *= (t - xk) / (xm - xk);
        }
        s.w[static_cast<std::size_t>(m)] = w;
    }
    return s;
}

int wrap_index(int i, int n) {
    i %= n;
    return i < 0 ? i + n : i;
}

template <typename Sample>
double interpolate(const GreenTable& t, const Vec2& d, Sample&& sample) {
    const Stencil sx = lagrange(d.x * t.n);
    const Stencil sy = lagrange(d.y * t.n);
    double acc = 0.0;
    for (int a = 0; a < kStencil; ++a) {
        const int i = wrap_index(sx.base + a, t.n);
        double row = 0.0;
        for (int b = 0; b < kStencil; ++b) {
            const int j = wrap_index(sy.base + b, t.n);
            row += sy.w[static_cast<std::size_t>(b)] * sample(t.index(i, j));
        }
        acc += sx.w[static_cast<std::size_t>(a)] * row;
    }
    return acc;
}

Vec2 checked_min_image(const Vec2& d) {
    const Vec2 m = min_image(d);
    if (norm(m) < kSingularTol) throw SingularPoint("Green's function evaluated at a lattice point");
    return m;
}

bool is_power_of_two(int n) { return n > 0 && (n & (n - 1)) == 0; }

struct FftwBuffers {
    double* real = nullptr;
    fftw_complex* spec = nullptr;
    FftwBuffers(std::size_t nr, std::size_t nc)
        : real(fftw_alloc_real(nr)), spec(fftw_alloc_complex(nc)) {}
    ~FftwBuffers() {
        fftw_free(real);
        fftw_free(spec);
    }
    FftwBuffers(const FftwBuffers&) = delete;
    FftwBuffers& operator=(const FftwBuffers&) = delete;
};


}  // namespace

double singular_part(double rc, const Vec2& d) {
    const double r = norm(min_image(d));
    if (r >= rc) return 0.0;
    return cutoff::eval(r, rc).value * std::log(r);
}

Vec2 singular_part_gradient(double rc, const Vec2& d) {
    const Vec2 m = min_image(d);
    const double r = norm(m);
    if (r >= rc) return {};
    const auto c = cutoff::eval(r, rc);
    const double radial = c.d1 * std::log(r) + c.value / r;
    return (radial / r) * m;
}

double singular_part_integral(double rc) {
    // plateau: int_0^a r log r dr = a^2 log(a)/2 - a^2/4
    const double a = cutoff::kPlateauFraction * rc;
    double total = 0.5 * a * a * std::log(a) - 0.25 * a * a;
    // transition band, composite 8-point Gauss-Legendre
    static constexpr std::array<double, 8> x{-0.9602898564975363, -0.7966664774136267,
                                             -0.5255324099163290, -0.1834346424956498,
                                             0.1834346424956498,  0.5255324099163290,
                                             0.7966664774136267,  0.9602898564975363};
    static constexpr std::array<double, 8> w{0.1012285362903763, 0.2223810344533745,
                                             0.3137066458778873, 0.3626837833783620,
                                             0.3626837833783620, 0.3137066458778873,
                                             0.2223810344533745, 0.1012285362903763};
    constexpr int panels = 256;
    const double width = (rc - a) / panels;
    for (int p = 0; p < panels; ++p) {
        const double mid = a + (p + 0.5) * width;
        for (std::size_t g = 0; g < x.size(); ++g) {
            const double r = mid + 0.5 * width * x[g];
            total += 0.5 * width * w[g] * cutoff::eval(r, rc).value * r * std::log(r);
        }
    }
    return kTwoPi * total;
}

GreenTable build_table(int n, double rc) {
    if (!is_power_of_two(n) || n < 16) throw InvalidConfiguration("table size must be a power of two >= 16");
    if (!(rc > 0.0) || rc > 0.25 || rc < 8.0 / n) {
        std::ostringstream msg;
        msg << "cutoff radius " << rc << " must lie in [8/n, 0.25] to keep the cutoff resolved and "
            << "supported inside the fundamental cell";
        throw BadCutoff(msg.str());
    }
    GreenTable t;
    t.n = n;
    t.cutoff_radius = rc;
    const auto nn = static_cast<std::size_t>(n) * static_cast<std::size_t>(n);
    const int nh = n / 2 + 1;
    const auto nc = static_cast<std::size_t>(n) * static_cast<std::size_t>(nh);

    FftwBuffers buf(nn, nc);
    fftw_plan fwd, inv;
    {
        std::lock_guard lock(fftw_planner_mutex());
        fwd = fftw_plan_dft_r2c_2d(n, n, buf.real, buf.spec, FFTW_ESTIMATE);
        inv = fftw_plan_dft_c2r_2d(n, n, buf.spec, buf.real, FFTW_ESTIMATE);
    }

    kernels::green_rhs_omp(n, rc, std::span<double>(buf.real, nn));
    fftw_execute(fwd);

    std::vector<std::complex<double>> fhat(nc);
    const double scale = 1.0 / static_cast<double>(nn);
    for (int i = 0; i < n; ++i) {
        const double kx = signed_wavenumber(i, n);
        for (int j = 0; j < nh; ++j) {
            const double ky = j;
            const std::size_t idx = static_cast<std::size_t>(i) * nh + j;
            const double k2 = kx * kx + ky * ky;
            const std::complex<double> b{buf.spec[idx][0], buf.spec[idx][1]};
            fhat[idx] = k2 == 0.0 ? 0.0 : -scale * b / (4.0 * kPi * kPi * k2);
        }
    }

    auto inverse_into = [&](std::vector<double>& dst, auto&& multiplier) {
        for (int i = 0; i < n; ++i)
            for (int j = 0; j < nh; ++j) {
                const std::size_t idx = static_cast<std::size_t>(i) * nh + j;
                const std::complex<double> v = multiplier(i, j) * fhat[idx];
                buf.spec[idx][0] = v.real();
                buf.spec[idx][1] = v.imag();
            }
        fftw_execute(inv);
        dst.assign(buf.real, buf.real + nn);
    };
    const std::complex<double> i2pi{0.0, kTwoPi};
    inverse_into(t.f, [](int, int) { return std::complex<double>{1.0, 0.0}; });
    inverse_into(t.gx, [&](int i, int) {
        return i == n / 2 ? std::complex<double>{} : i2pi * static_cast<double>(signed_wavenumber(i, n));
    });
    inverse_into(t.gy, [&](int, int j) {
        return j == n / 2 ? std::complex<double>{} : i2pi * static_cast<double>(j);
    });

    {
        std::lock_guard lock(fftw_planner_mutex());
        fftw_destroy_plan(fwd);
        fftw_destroy_plan(inv);
    }
    // the remainder has zero grid mean, so the full F integrates to
    // integral(chi log r) + mean_shift
    t.mean_shift = -singular_part_integral(rc);
    return t;
}

GreenTablePtr build_shared_table(int n, double rc) {
    return std::make_shared<const GreenTable>(build_table(n, rc));
}

double eval_F(const GreenTable& t, const Vec2& d) {
    const Vec2 m = checked_min_image(d);
    const double smooth = interpolate(t, m, [&](std::size_t k) { return t.f[k]; });
    return smooth + singular_part(t.cutoff_radius, m) + t.mean_shift;
}

Vec2 eval_gradF(const GreenTable& t, const Vec2& d) {
    const Vec2 m = checked_min_image(d);
    const Vec2 smooth{interpolate(t, m, [&](std::size_t k) { return t.gx[k]; }),
                      interpolate(t, m, [&](std::size_t k) { return t.gy[k]; })};
    return smooth + singular_part_gradient(t.cutoff_radius, m);
}

std::vector<double> remainder_laplacian(const GreenTable& t) {
    const int n = t.n;
    const auto nn = static_cast<std::size_t>(n) * static_cast<std::size_t>(n);
    const int nh = n / 2 + 1;
    const auto nc = static_cast<std::size_t>(n) * static_cast<std::size_t>(nh);
    FftwBuffers buf(nn, nc);
    fftw_plan fwd, inv;
    {
        std::lock_guard lock(fftw_planner_mutex());
        fwd = fftw_plan_dft_r2c_2d(n, n, buf.real, buf.spec, FFTW_ESTIMATE);
        inv = fftw_plan_dft_c2r_2d(n, n, buf.spec, buf.real, FFTW_ESTIMATE);
    }
    std::copy(t.f.begin(), t.f.end(), buf.real);
    fftw_execute(fwd);
    const double scale = 1.0 / static_cast<double>(nn);
    for (int i = 0; i < n; ++i) {
        const double kx = signed_wavenumber(i, n);
        for (int j = 0; j < nh; ++j) {
            const std::size_t idx = static_cast<std::size_t>(i) * nh + j;
            const double m = -4.0 * kPi * kPi * (kx * kx + static_cast<double>(j) * j) * scale;
            buf.spec[idx][0] *= m;
            buf.spec[idx][1] *= m;
        }
    }
    fftw_execute(inv);
    std::vector<double> out(buf.real, buf.real + nn);
    {
        std::lock_guard lock(fftw_planner_mutex());
        fftw_destroy_plan(fwd);
        fftw_destroy_plan(inv);
    }
    return out;
}

namespace {
constexpr char kTableMagic[4] = {'T', 'G', 'F', '1'};
}

void save_table(const GreenTable& t, const std::filesystem::path& path) {
    std::string bytes;
    bytes.append(kTableMagic, 4);
    io::append_le<std::uint32_t>(bytes, static_cast<std::uint32_t>(t.n));
    io::append_le<double>(bytes, t.cutoff_radius);
    for (const auto* v : {&t.f, &t.gx, &t.gy})
        for (double x : *v) io::append_le<double>(bytes, x);
    io::write_atomic(path, bytes);
}

GreenTable load_table(const std::filesystem::path& path) {
    const std::string bytes = io::read_file(path);
    io::ByteReader in(bytes);
    if (in.take(4) != std::string_view(kTableMagic, 4)) throw FormatError("not a TGF1 Green table: " + path.string());
    GreenTable t;
    t.n = static_cast<int>(in.read_le<std::uint32_t>());
    t.cutoff_radius = in.read_le<double>();
    if (!is_power_of_two(t.n)) throw FormatError("TGF1 table size is not a power of two");
    const auto nn = static_cast<std::size_t>(t.n) * static_cast<std::size_t>(t.n);
    if (in.remaining() != 3 * nn * sizeof(double)) throw FormatError("TGF1 payload has the wrong length");
    for (auto* v : {&t.f, &t.gx, &t.gy}) {
        v->resize(nn);
        for (double& x : *v) x = in.read_le<double>();
    }
    t.mean_shift = -singular_part_integral(t.cutoff_radius);
    return t;
}

GreenTablePtr load_or_build_table(int n, double rc, const std::filesystem::path& cache) {
    if (!cache.empty() && std::filesystem::exists(cache)) {
        GreenTable t = load_table(cache);
        if (t.n == n && t.cutoff_radius == rc) return std::make_shared<const GreenTable>(std::move(t));
    }
    auto t = build_shared_table(n, rc);
    if (!cache.empty()) save_table(*t, cache);
    return t;
}

namespace oracle {

namespace {

constexpr int kImages = 4;

double e1(double u) { return -std::expint(-u); }

void check_regular(const Vec2& m) {
    if (norm(m) < kSingularTol) throw SingularPoint("Green's function evaluated at a lattice point");
}

}  // namespace

double regularized_lattice_sum(const Vec2& x, double sigma, int K) {
    double acc = 0.0;
    for (int kx = -K; kx <= K; ++kx)
        for (int ky = -K; ky <= K; ++ky) {
            if (kx == 0 && ky == 0) continue;
            const double k2 = static_cast<double>(kx) * kx + static_cast<double>(ky) * ky;
            acc += std::exp(-sigma * k2) * std::cos(kTwoPi * (kx * x.x + ky * x.y)) / k2;
        }
    return -acc / kTwoPi;
}

Vec2 regularized_lattice_sum_gradient(const Vec2& x, double sigma, int K) {
    Vec2 acc;
    for (int kx = -K; kx <= K; ++kx)
        for (int ky = -K; ky <= K; ++ky) {
            if (kx == 0 && ky == 0) continue;
            const double k2 = static_cast<double>(kx) * kx + static_cast<double>(ky) * ky;
            const double s = std::exp(-sigma * k2) * std::sin(kTwoPi * (kx * x.x + ky * x.y)) / k2;
            acc += s * Vec2{static_cast<double>(kx), static_cast<double>(ky)};
        }
    return acc;
}

double F(const Vec2& x, double sigma, int K) {
    const Vec2 m = min_image(x);
    check_regular(m);
    double images = 0.0;
    for (int a = -kImages; a <= kImages; ++a)
        for (int b = -kImages; b <= kImages; ++b) {
            const Vec2 y = m + Vec2{static_cast<double>(a), static_cast<double>(b)};
            images += e1(kPi * kPi * norm2(y) / sigma);
        }
    return regularized_lattice_sum(m, sigma, K) + sigma / kTwoPi - 0.5 * images;
}

Vec2 gradF(const Vec2& x, double sigma, int K) {
    const Vec2 m = min_image(x);
    check_regular(m);
    Vec2 images;
    for (int a = -kImages; a <= kImages; ++a)
        for (int b = -kImages; b <= kImages; ++b) {
            const Vec2 y = m + Vec2{static_cast<double>(a), static_cast<double>(b)};
            const double r2 = norm2(y);
            images += (std::exp(-kPi * kPi * r2 / sigma) / r2) * y;
        }
    return regularized_lattice_sum_gradient(m, sigma, K) + images;
}

double F_richardson(const Vec2& x, int K) {
    const Vec2 m = min_image(x);
    check_regular(m);
    const double s0 = 4.0 / (static_cast<double>(K) * K);
    const double a = regularized_lattice_sum(m, s0, K);
    const double b = regularized_lattice_sum(m, 2.0 * s0, K);
    const double c = regularized_lattice_sum(m, 4.0 * s0, K);
    const double a1 = 2.0 * a - b;
    const double b1 = 2.0 * b - c;
    return (4.0 * a1 - b1) / 3.0;
}

}  // namespace oracle

}  // namespace tvortex
