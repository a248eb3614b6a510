#include <benchmark/benchmark.h>

#include <random>

#include "tvortex/dynamics.hpp"
#include "tvortex/green.hpp"
#include "tvortex/kernels.hpp"

using namespace tvortex;

namespace {

std::vector<Complex> random_field(int n) {
    std::mt19937_64 rng(3);
    std::uniform_real_distribution<double> U(-1.2, 1.2);
    std::vector<Complex> u(static_cast<std::size_t>(n) * n);
    for (auto& v : u) v = {U(rng), U(rng)};
    return u;
}

const GreenTable& table() {
    static const GreenTable t = build_table(256, 0.25);
    return t;
}

void BM_green_rhs_serial(benchmark::State& s) {
    const int n = static_cast<int>(s.range(0));
    std::vector<double> out(static_cast<std::size_t>(n) * n);
    for (auto _ : s) kernels::green_rhs_serial(n, 0.25, out);
}

void BM_green_rhs_omp(benchmark::State& s) {
    const int n = static_cast<int>(s.range(0));
    std::vector<double> out(static_cast<std::size_t>(n) * n);
    for (auto _ : s) kernels::green_rhs_omp(n, 0.25, out);
}

void BM_nonlinear_serial(benchmark::State& s) {
    auto u = random_field(static_cast<int>(s.range(0)));
    for (auto _ : s) kernels::cgl_nonlinear_serial(u, 1e-6, 1.0 / 32, 0.4, -0.3);
}

void BM_nonlinear_omp(benchmark::State& s) {
    auto u = random_field(static_cast<int>(s.range(0)));
    for (auto _ : s) kernels::cgl_nonlinear_omp(u, 1e-6, 1.0 / 32, 0.4, -0.3);
}

void BM_gradient_serial(benchmark::State& s) {
    const int n = static_cast<int>(s.range(0));
    const auto u = random_field(n);
    std::vector<Complex> ux(u.size()), uy(u.size());
    for (auto _ : s) kernels::centered_gradient_serial(u, n, ux, uy);
}

void BM_gradient_omp(benchmark::State& s) {
    const int n = static_cast<int>(s.range(0));
    const auto u = random_field(n);
    std::vector<Complex> ux(u.size()), uy(u.size());
    for (auto _ : s) kernels::centered_gradient_omp(u, n, ux, uy);
}

void BM_current_serial(benchmark::State& s) {
    const int n = static_cast<int>(s.range(0));
    const auto c = symmetric_4v_configuration(-0.15, 0.2);
    std::vector<Vec2> out(static_cast<std::size_t>(n) * n);
    table();
    for (auto _ : s) kernels::sample_current_serial(table(), c, n, out);
}

void BM_current_omp(benchmark::State& s) {
    const int n = static_cast<int>(s.range(0));
    const auto c = symmetric_4v_configuration(-0.15, 0.2);
    std::vector<Vec2> out(static_cast<std::size_t>(n) * n);
    table();
    for (auto _ : s) kernels::sample_current_omp(table(), c, n, out);
}

}  // namespace

BENCHMARK(BM_green_rhs_serial)->Arg(512)->Arg(1024)->Unit(benchmark::kMillisecond);
BENCHMARK(BM_green_rhs_omp)->Arg(512)->Arg(1024)->Unit(benchmark::kMillisecond)->UseRealTime();
BENCHMARK(BM_nonlinear_serial)->Arg(256)->Arg(512)->Unit(benchmark::kMillisecond);
BENCHMARK(BM_nonlinear_omp)->Arg(256)->Arg(512)->Unit(benchmark::kMillisecond)->UseRealTime();
BENCHMARK(BM_gradient_serial)->Arg(256)->Arg(512)->Unit(benchmark::kMillisecond);
BENCHMARK(BM_gradient_omp)->Arg(256)->Arg(512)->Unit(benchmark::kMillisecond)->UseRealTime();
BENCHMARK(BM_current_serial)->Arg(256)->Unit(benchmark::kMillisecond);
BENCHMARK(BM_current_omp)->Arg(256)->Unit(benchmark::kMillisecond)->UseRealTime();

BENCHMARK_MAIN();
