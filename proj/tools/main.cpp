#include <CLI11.hpp>
#include <json.hpp>
#include <omp.h>

#include <algorithm>
#include <atomic>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <filesystem>
#include <functional>
#include <iostream>
#include <random>
#include <thread>

#include "config.hpp"
#include "tvortex/cgl.hpp"
#include "tvortex/dynamics.hpp"
#include "tvortex/energy.hpp"
#include "tvortex/errors.hpp"
#include "tvortex/field.hpp"
#include "tvortex/green.hpp"
#include "tvortex/io.hpp"
#include "tvortex/output.hpp"

#ifndef TVORTEX_GIT_DESCRIBE
#define TVORTEX_GIT_DESCRIBE "unknown"
#endif

namespace fs = std::filesystem;
using nlohmann::json;
using namespace tvortex;
using tvortex::cli::ConfigError;
using tvortex::cli::RunConfig;

namespace {

enum Exit { kOk = 0, kCheckFailure = 1, kConfigError = 2, kRuntimeFailure = 3 };

struct Flags {
    std::string config_path;
    std::string green_cache;
    std::string out;
    bool quick = false;
    bool check_full = false;
};

int thread_cap() {
    const char* env = std::getenv("TORUS_VORTEX_THREADS");
    int cap = omp_get_max_threads();
    if (env && *env) {
        char* end = nullptr;
        const long v = std::strtol(env, &end, 10);
        if (*end != '\0' || v < 1) throw ConfigError("TORUS_VORTEX_THREADS must be a positive integer");
        cap = std::min<int>(cap, static_cast<int>(v));
    }
    return std::max(cap, 1);
}

// Runs independent jobs on up to `cap` workers. With more than one worker
// each job's grid kernels run single-threaded.
void run_jobs(std::size_t count, int cap, const std::function<void(std::size_t)>& job) {
    const int workers = static_cast<int>(std::min<std::size_t>(count, static_cast<std::size_t>(cap)));
    if (workers <= 1) {
        for (std::size_t k = 0; k < count; ++k) job(k);
        return;
    }
    std::atomic<std::size_t> next{0};
    std::exception_ptr error;
    std::mutex error_mutex;
    std::vector<std::thread> pool;
    for (int w = 0; w < workers; ++w)
        pool.emplace_back([&] {
            omp_set_num_threads(1);
            for (std::size_t k = next++; k < count; k = next++) {
                try {
                    job(k);
                } catch (...) {
                    std::lock_guard lock(error_mutex);
                    if (!error) error = std::current_exception();
                }
            }
        });
    for (auto& t : pool) t.join();
    if (error) std::rethrow_exception(error);
}

json load_json(const std::string& path) {
    std::string text;
    try {
        text = io::read_file(path);
    } catch (const FormatError&) {
        throw ConfigError("cannot read config file " + path);
    }
    try {
        return json::parse(text);
    } catch (const json::parse_error& e) {
        throw ConfigError("$: invalid JSON: " + std::string(e.what()));
    }
}

RunConfig read_config(const Flags& f, const std::string& command, json& doc) {
    doc = load_json(f.config_path);
    RunConfig cfg = cli::parse_config(doc, command);
    if (!f.out.empty()) cfg.output_dir = f.out;
    if (!f.green_cache.empty()) cfg.green.cache_path = f.green_cache;
    if (cfg.output_dir.empty()) throw ConfigError("$.output_dir: no output directory given");
    return cfg;
}

GreenTablePtr table_for(const RunConfig& cfg) {
    try {
        return load_or_build_table(cfg.green.n_table, cfg.green.cutoff_radius, cfg.green.cache_path);
    } catch (const BadCutoff& e) {
        throw ConfigError(std::string("$.green.cutoff_radius: ") + e.what());
    }
}

std::string lambda_dir(const RunConfig& cfg, std::size_t k) {
    return cfg.lambdas.size() == 1 ? "" : "lambda_" + std::to_string(k);
}

json manifest(const json& doc, const RunConfig& cfg, double lambda, double seconds) {
    json config = cli::resolved_config(doc, cfg);
    if (config.contains("lambda")) config["lambda"] = lambda;
    return {{"tool", "torus_vortex"}, {"git_describe", TVORTEX_GIT_DESCRIBE}, {"config", config},
            {"wall_time_seconds", seconds}};
}

void write_json(const fs::path& path, const json& j) { io::write_atomic(path, j.dump(2) + "\n"); }

double elapsed(std::chrono::steady_clock::time_point t0) {
    return std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
}

std::string lambda_title(double lambda) {
    char buf[64];
    std::snprintf(buf, sizeof buf, "lambda = %g", lambda);
    return buf;
}

OdeParams ode_params(const RunConfig& cfg, double lambda) {
    OdeParams p;
    p.lambda = lambda;
    p.dt = cfg.dt;
    p.t_max = cfg.t_max;
    p.collision_stop_radius = cfg.collision_stop_radius;
    p.sample_stride = cfg.sample_stride;
    return p;
}

json pairs_json(const TrajectoryRecord& rec) {
    json out = json::array();
    for (const auto& [a, b] : rec.colliding_pairs) out.push_back({a, b});
    return out;
}

// Direction (degrees, counter-clockwise from +x) from the first vortex of each
// colliding pair to its partner at the stop sample.
json approach_bearings(const TrajectoryRecord& rec) {
    json out = json::array();
    if (rec.samples() == 0) return out;
    const auto& c = rec.configurations.back();
    for (const auto& [a, b] : rec.colliding_pairs) {
        const Vec2 d = min_image_diff(c.position(static_cast<std::size_t>(b - 1)), c.position(static_cast<std::size_t>(a - 1)));
        out.push_back({{"pair", {a, b}}, {"bearing_deg", std::atan2(d.y, d.x) * 180.0 / kPi}});
    }
    return out;
}

int cmd_ode(const Flags& f) {
    json doc;
    const RunConfig cfg = read_config(f, "ode", doc);
    const auto c0 = cli::build_configuration(cfg);
    const auto table = table_for(cfg);
    run_jobs(cfg.lambdas.size(), thread_cap(), [&](std::size_t k) {
        const auto t0 = std::chrono::steady_clock::now();
        const double lambda = cfg.lambdas[k];
        const auto rec = integrate(c0, *table, ode_params(cfg, lambda));
        const fs::path dir = cfg.output_dir / lambda_dir(cfg, k);
        io::write_atomic(dir / "trajectory.csv", output::trajectory_csv(rec));
        io::write_atomic(dir / "trajectory.svg", output::svg_plot(output::trajectory_paths(rec), lambda_title(lambda)));
        json m = manifest(doc, cfg, lambda, elapsed(t0));
        m["stop_reason"] = to_string(rec.stop_reason);
        m["final_time"] = rec.times.back();
        m["colliding_pairs"] = pairs_json(rec);
        if (!rec.failure_message.empty()) m["failure_message"] = rec.failure_message;
        write_json(dir / "manifest.json", m);
        std::printf("lambda=%g: %s at t=%.6g, %zu samples -> %s\n", lambda, to_string(rec.stop_reason).c_str(),
                    rec.times.back(), rec.samples(), dir.string().c_str());
    });
    return kOk;
}

int cmd_sym(const Flags& f) {
    json doc;
    const RunConfig cfg = read_config(f, "sym", doc);
    const bool four = cfg.mode == "4v";
    const auto c0 = four ? symmetric_4v_configuration(cfg.alpha0, cfg.beta0)
                         : symmetric_2v_configuration(cfg.alpha0, cfg.beta0);
    if (!four && cfg.alpha0 == 0.0) throw ConfigError("$.alpha0: must be nonzero for the two-vortex mode");
    const auto table = table_for(cfg);
    run_jobs(cfg.lambdas.size(), thread_cap(), [&](std::size_t k) {
        const auto t0 = std::chrono::steady_clock::now();
        const double lambda = cfg.lambdas[k];
        const auto p = ode_params(cfg, lambda);
        const auto rec = four ? symmetric_4v(cfg.alpha0, cfg.beta0, lambda, p, *table)
                              : symmetric_2v(cfg.alpha0, cfg.beta0, lambda, p, *table);
        const fs::path dir = cfg.output_dir / lambda_dir(cfg, k);
        io::write_atomic(dir / "trajectory.csv", output::trajectory_csv(rec));
        auto paths = output::trajectory_paths(rec);
        json m = manifest(doc, cfg, lambda, 0.0);
        if (f.check_full) {
            const auto full = integrate(c0, *table, p);
            io::write_atomic(dir / "full_trajectory.csv", output::trajectory_csv(full));
            double dev = 0.0;
            for (std::size_t s = 0; s < std::min(rec.samples(), full.samples()); ++s)
                for (std::size_t j = 0; j < c0.size(); ++j)
                    dev = std::max(dev, max_abs(rec.configurations[s].lifted[j].vec() -
                                                full.configurations[s].lifted[j].vec()));
            m["max_deviation_from_full"] = dev;
            m["full_stop_reason"] = to_string(full.stop_reason);
            std::printf("lambda=%g: reduced vs full max deviation %.3e\n", lambda, dev);
        }
        io::write_atomic(dir / "trajectory.svg", output::svg_plot(paths, cfg.mode + ", " + lambda_title(lambda)));
        m["wall_time_seconds"] = elapsed(t0);
        m["stop_reason"] = to_string(rec.stop_reason);
        m["final_time"] = rec.times.back();
        m["colliding_pairs"] = pairs_json(rec);
        m["approach_bearings"] = approach_bearings(rec);
        write_json(dir / "manifest.json", m);
        std::printf("lambda=%g: %s at t=%.6g", lambda, to_string(rec.stop_reason).c_str(), rec.times.back());
        for (const auto& [a, b] : rec.colliding_pairs) std::printf(" {%d,%d}", a, b);
        std::printf(" -> %s\n", dir.string().c_str());
    });
    return kOk;
}

ComplexField checked_initial_data(const VortexConfiguration& c, const GreenTable& t, double eps, int n) {
    try {
        return initial_data(c, t, eps, n);
    } catch (const CoreUnresolved& e) {
        throw ConfigError(std::string("$.epsilon: ") + e.what() + " (need epsilon >= 2 / grid_n)");
    }
}

int cmd_pde(const Flags& f) {
    json doc;
    const RunConfig cfg = read_config(f, "pde", doc);
    const auto c0 = cli::build_configuration(cfg);
    const int n = *cfg.grid_n;
    const double eps = *cfg.epsilon;
    if (!(eps >= 2.0 / n)) throw ConfigError("$.epsilon: must be at least 2 / grid_n");
    const auto table = table_for(cfg);
    run_jobs(cfg.lambdas.size(), thread_cap(), [&](std::size_t k) {
        const auto t0 = std::chrono::steady_clock::now();
        const double lambda = cfg.lambdas[k];
        const auto p = make_pde_params(eps, lambda, n, cfg.dt, cfg.t_max, cfg.track_stride);
        const auto u0 = checked_initial_data(c0, *table, eps, n);
        const auto r = run(u0, p);
        const fs::path dir = cfg.output_dir / lambda_dir(cfg, k);
        save_snapshot(u0, eps, dir / "initial.tvf");
        save_snapshot(r.final_field, eps, dir / "final.tvf");
        io::write_atomic(dir / "energy.csv", output::energy_csv(r));
        io::write_atomic(dir / "tracking.csv", output::tracking_csv(r));

        OdeParams op;
        op.lambda = lambda;
        op.dt = 1e-5;
        op.t_max = cfg.t_max;
        const auto ode = integrate(nudge_off_grid(c0, n), *table, op);
        auto paths = output::track_paths(r);
        for (auto& q : output::trajectory_paths(ode)) {
            q.colour = "#7f7f7f";
            paths.push_back(std::move(q));
        }
        io::write_atomic(dir / "overlay.svg",
                         output::svg_plot(paths, "PDE tracks and reduced law, eps = " + io::format_double(eps) + ", " +
                                                     lambda_title(lambda)));
        json m = manifest(doc, cfg, lambda, elapsed(t0));
        m["k_eps"] = p.k_eps;
        m["tracked"] = r.tracked;
        if (!r.tracked) m["tracking_note"] = r.tracking_note;
        m["ode_stop_reason"] = to_string(ode.stop_reason);
        m["energy_initial"] = r.energy.front();
        m["energy_final"] = r.energy.back();
        write_json(dir / "manifest.json", m);
        std::printf("lambda=%g: E %.6f -> %.6f, %s -> %s\n", lambda, r.energy.front(), r.energy.back(),
                    r.tracked ? "tracked" : r.tracking_note.c_str(), dir.string().c_str());
    });
    return kOk;
}

int cmd_compare(const Flags& f) {
    json doc;
    const RunConfig cfg = read_config(f, "compare", doc);
    const auto c0 = cli::build_configuration(cfg);
    const int n = *cfg.grid_n;
    for (std::size_t k = 0; k < cfg.epsilon_list.size(); ++k)
        if (!(cfg.epsilon_list[k] >= 2.0 / n))
            throw ConfigError("$.epsilon_list[" + std::to_string(k) + "]: must be at least 2 / grid_n");
    const auto table = table_for(cfg);
    run_jobs(cfg.lambdas.size(), thread_cap(), [&](std::size_t k) {
        const auto t0 = std::chrono::steady_clock::now();
        const double lambda = cfg.lambdas[k];
        const auto result = compare_to_ode(c0, lambda, cfg.epsilon_list, cfg.t_max, n, cfg.dt, *table, cfg.track_stride);
        const fs::path dir = cfg.output_dir / lambda_dir(cfg, k);
        io::write_atomic(dir / "compare.csv", output::compare_csv(result.rows));
        json runs = json::array();
        for (std::size_t e = 0; e < result.rows.size(); ++e) {
            const std::string tag = "eps_" + std::to_string(e);
            io::write_atomic(dir / ("energy_" + tag + ".csv"), output::energy_csv(result.runs[e]));
            io::write_atomic(dir / ("tracking_" + tag + ".csv"), output::tracking_csv(result.runs[e]));
            json r = {{"epsilon", result.rows[e].epsilon},
                      {"k_eps", k_eps_for(result.rows[e].epsilon)},
                      {"max_err", result.rows[e].max_err},
                      {"tracked", result.rows[e].tracked}};
            if (!result.runs[e].tracked) r["tracking_note"] = result.runs[e].tracking_note;
            runs.push_back(r);
        }
        json m = manifest(doc, cfg, lambda, elapsed(t0));
        m["runs"] = runs;
        write_json(dir / "manifest.json", m);
        std::printf("lambda=%g:", lambda);
        for (const auto& row : result.rows) std::printf(" eps=%g err=%.4f%s", row.epsilon, row.max_err, row.tracked ? "" : " (untracked)");
        std::printf(" -> %s\n", dir.string().c_str());
    });
    return kOk;
}

int cmd_green(const Flags& f) {
    json doc;
    doc = load_json(f.config_path);
    RunConfig cfg = cli::parse_config(doc, "green");
    if (!f.out.empty()) cfg.output_dir = f.out;
    if (!f.green_cache.empty()) cfg.green.cache_path = f.green_cache;
    const auto t0 = std::chrono::steady_clock::now();
    const auto table = table_for(cfg);
    const double centre = eval_F(*table, {0.5, 0.5});
    double sym = 0.0;
    std::mt19937_64 rng(7);
    std::uniform_real_distribution<double> U(0.01, 0.99);
    for (int k = 0; k < 64; ++k) {
        const Vec2 x{U(rng), U(rng)};
        sym = std::max(sym, std::fabs(eval_F(*table, x) - eval_F(*table, {x.y, x.x})));
    }
    std::printf("table n=%d cutoff=%g\nF(1/2, 1/2) = %.17g (log(2)/2 = %.17g)\nsymmetry defect %.3e\n", table->n,
                table->cutoff_radius, centre, 0.5 * std::log(2.0), sym);
    if (!cfg.green.cache_path.empty()) std::printf("cache %s\n", cfg.green.cache_path.string().c_str());
    if (!cfg.output_dir.empty()) {
        json m = manifest(doc, cfg, 0.0, elapsed(t0));
        m["F_centre"] = centre;
        m["symmetry_defect"] = sym;
        write_json(cfg.output_dir / "manifest.json", m);
    }
    return kOk;
}

// ---- selftest ----

struct Check {
    std::string name;
    double measured;
    double tolerance;
    bool ok() const { return measured < tolerance; }
};

int cmd_selftest(const Flags& f) {
    const auto t0 = std::chrono::steady_clock::now();
    const int n_table = f.quick ? 256 : kDefaultTableSize;
    std::vector<Check> checks;
    auto report = [&] {
        bool ok = true;
        std::printf("%-40s %14s %12s  %s\n", "check", "measured", "tolerance", "result");
        for (const auto& c : checks) {
            std::printf("%-40s %14.3e %12.1e  %s\n", c.name.c_str(), c.measured, c.tolerance, c.ok() ? "ok" : "FAILED");
            if (!c.ok()) {
                std::fprintf(stderr, "selftest failed: %s (measured %.3e, tolerance %.1e)\n", c.name.c_str(), c.measured,
                             c.tolerance);
                ok = false;
            }
        }
        std::printf("%.1f s\n", elapsed(t0));
        return ok ? kOk : kCheckFailure;
    };

    GreenTablePtr table;
    if (!f.green_cache.empty() && fs::exists(f.green_cache)) {
        try {
            table = std::make_shared<const GreenTable>(load_table(f.green_cache));
        } catch (const FormatError& e) {
            std::fprintf(stderr, "selftest failed: green cache is unreadable: %s\n", e.what());
            return kCheckFailure;
        }
    } else {
        table = load_or_build_table(n_table, kDefaultCutoff, f.green_cache);
    }
    const GreenTable& t = *table;
    std::mt19937_64 rng(11);
    std::uniform_real_distribution<double> U(-0.5, 0.5), S(0.01, 0.99);

    {
        double sym = 0.0, edge = 0.0, err = 0.0;
        for (int k = 0; k < 64; ++k) {
            const Vec2 x{U(rng), U(rng)};
            const double v = eval_F(t, x);
            for (const Vec2 y : {Vec2{-x.x, -x.y}, Vec2{x.y, x.x}, Vec2{-x.x, x.y}})
                sym = std::max(sym, std::fabs(v - eval_F(t, y)));
            const double s = S(rng);
            edge = std::max({edge, std::fabs(eval_gradF(t, {0.5, s}).x), std::fabs(eval_gradF(t, {s, 0.5}).y),
                             std::fabs(eval_gradF(t, {0.0, s}).x), std::fabs(eval_gradF(t, {s, 0.0}).y)});
            err = std::max(err, std::fabs(v - oracle::F(x)));
        }
        checks.push_back({"green: symmetry F(x)=F(-x)=F(y,x)", sym, 1e-9});
        // every stored node against its mirror images
        double node = 0.0;
        const int n = t.n;
        for (int i = 0; i < n; ++i)
            for (int j = 0; j < n; ++j) {
                const std::size_t a = t.index(i, j), b = t.index(j, i), c = t.index((n - i) % n, (n - j) % n);
                node = std::max({node, std::fabs(t.f[a] - t.f[b]), std::fabs(t.f[a] - t.f[c]),
                                 std::fabs(t.gx[a] - t.gy[b]), std::fabs(t.gx[a] + t.gx[c]),
                                 std::fabs(t.gy[a] + t.gy[c])});
            }
        checks.push_back({"green: stored nodes mirror symmetry", node, 1e-10});
        checks.push_back({"green: normal derivative on edges", edge, 1e-8});
        checks.push_back({"green: table vs oracle", err, t.n >= 1024 ? 1e-7 : 1e-5});
        checks.push_back({"green: F(1/2,1/2) - log(2)/2", std::fabs(eval_F(t, {0.5, 0.5}) - 0.5 * std::log(2.0)),
                          t.n >= 1024 ? 1e-7 : 1e-5});
    }
    {
        double fd_err = 0.0, sum = 0.0;
        const int trials = f.quick ? 3 : 10;
        std::uniform_real_distribution<double> P(0.0, 1.0);
        for (int trial = 0; trial < trials;) {
            std::vector<Vec2> pts;
            std::vector<int> deg;
            for (int k = 0; k < 4; ++k) {
                pts.push_back({P(rng), P(rng)});
                deg.push_back(k % 2 ? -1 : 1);
            }
            const auto c = make_configuration(pts, deg);
            if (closest_pair(c).distance < 0.05) continue;
            ++trial;
            const auto g = grad_W_all(c, t);
            Vec2 s;
            for (const auto& v : g) s += v;
            sum = std::max(sum, max_abs(s));
            const double h = 1e-5;
            for (std::size_t j = 0; j < c.size(); ++j) {
                auto W_at = [&](const Vec2& d) {
                    VortexConfiguration m = c;
                    std::vector<Vec2> disp(c.size());
                    disp[j] = d;
                    m.q = lift_q(c, disp);
                    m.lifted[j] = LiftedPoint(c.lifted[j].x() + d.x, c.lifted[j].y() + d.y);
                    return renormalized_W(m, t).W;
                };
                const Vec2 fd{(W_at({h, 0}) - W_at({-h, 0})) / (2 * h), (W_at({0, h}) - W_at({0, -h})) / (2 * h)};
                fd_err = std::max(fd_err, norm(fd - g[j]) / std::max(norm(g[j]), 1.0));
            }
        }
        checks.push_back({"energy: grad W vs finite differences", fd_err, t.n >= 1024 ? 1e-5 : 1e-4});
        checks.push_back({"energy: sum of grad W", sum, 1e-8});
    }
    {
        OdeParams p;
        p.lambda = 1.0;
        p.dt = 1e-4;
        p.t_max = f.quick ? 0.01 : 1.0;
        const auto rec = integrate(symmetric_4v_configuration(-0.15, 0.2), t, p);
        double drift = 0.0;
        for (const auto& x : rec.xi_series) drift = std::max(drift, max_abs(x - rec.xi_series.front()));
        checks.push_back({"dynamics: first integral xi", drift, 1e-8});
        checks.push_back({"dynamics: energy dissipation identity", dissipation_residual(rec),
                          1e-5 * (1.0 + std::fabs(rec.W_series.front()))});
        p.t_max = 0.01;
        double dev = 0.0;
        for (double lambda : {0.0, 1.0}) {
            p.lambda = lambda;
            const auto a = symmetric_4v(-0.15, 0.2, lambda, p, t);
            const auto b = integrate(symmetric_4v_configuration(-0.15, 0.2), t, p);
            const auto a2 = symmetric_2v(-0.15, 0.25, lambda, p, t);
            const auto b2 = integrate(symmetric_2v_configuration(-0.15, 0.25), t, p);
            for (std::size_t s = 0; s < std::min(a.samples(), b.samples()); ++s)
                for (std::size_t j = 0; j < 4; ++j)
                    dev = std::max(dev, max_abs(a.configurations[s].lifted[j].vec() - b.configurations[s].lifted[j].vec()));
            for (std::size_t s = 0; s < std::min(a2.samples(), b2.samples()); ++s)
                for (std::size_t j = 0; j < 2; ++j)
                    dev = std::max(dev, max_abs(a2.configurations[s].lifted[j].vec() - b2.configurations[s].lifted[j].vec()));
        }
        checks.push_back({"dynamics: reductions vs full system", dev, 1e-7});
    }
    {
        // 1/2 int_{T_rho} |j_H|^2 + M pi log rho -> W - M pi R0 on the equilibrium
        const int n = f.quick ? 256 : 512;
        const double R0 = std::log(std::tgamma(0.25) * std::tgamma(0.25) / (2.0 * std::sqrt(kPi)));
        const auto c = nudge_off_grid(symmetric_4v_configuration(-0.25, 0.25), n);
        const auto j = harmonic_current(c, t, n);
        const double W = renormalized_W(c, t).W;
        const double fit = ring_energy(j, n, c, 0.1) + 4.0 * kPi * std::log(0.1) - (W - 4.0 * kPi * R0);
        checks.push_back({"field: ring energy fit", std::fabs(fit), 5e-3});
    }
    return report();
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"Ginzburg-Landau vortex dynamics on the unit torus"};
    app.require_subcommand(1);
    Flags f;
    auto add_common = [&](CLI::App* sub, bool needs_config) {
        if (needs_config) sub->add_option("config", f.config_path, "JSON run configuration")->required();
        sub->add_option("--green-cache", f.green_cache, "Green table cache file");
        sub->add_option("--out", f.out, "output directory (overrides output_dir)");
    };
    auto* selftest = app.add_subcommand("selftest", "run the invariant suite");
    selftest->add_flag("--quick", f.quick, "reduced suite on a 256 table");
    selftest->add_option("--green-cache", f.green_cache, "Green table cache file");
    auto* ode = app.add_subcommand("ode", "integrate the reduced law");
    add_common(ode, true);
    auto* sym = app.add_subcommand("sym", "symmetric two- or four-vortex reduction");
    add_common(sym, true);
    sym->add_flag("--check-full", f.check_full, "also run the full system and report the deviation");
    auto* pde = app.add_subcommand("pde", "solve the PDE from well-prepared data");
    add_common(pde, true);
    auto* compare = app.add_subcommand("compare", "PDE vs reduced law over a list of eps");
    add_common(compare, true);
    auto* green = app.add_subcommand("green", "build or inspect the Green table");
    add_common(green, true);

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        const int code = app.exit(e);
        return code == 0 ? kOk : kConfigError;
    }

    try {
        omp_set_num_threads(thread_cap());
        if (selftest->parsed()) return cmd_selftest(f);
        if (ode->parsed()) return cmd_ode(f);
        if (sym->parsed()) return cmd_sym(f);
        if (pde->parsed()) return cmd_pde(f);
        if (compare->parsed()) return cmd_compare(f);
        if (green->parsed()) return cmd_green(f);
    } catch (const ConfigError& e) {
        std::fprintf(stderr, "config error: %s\n", e.what());
        return kConfigError;
    } catch (const InvalidConfiguration& e) {
        std::fprintf(stderr, "config error: %s\n", e.what());
        return kConfigError;
    } catch (const CollisionError& e) {
        std::fprintf(stderr, "config error: %s\n", e.what());
        return kConfigError;
    } catch (const std::exception& e) {
        std::fprintf(stderr, "runtime failure: %s\n", e.what());
        return kRuntimeFailure;
    }
    return kRuntimeFailure;
}
