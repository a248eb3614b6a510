#pragma once

#include <memory>
#include <string>
#include <vector>

#include "tvortex/field.hpp"
#include "tvortex/green.hpp"
#include "tvortex/torus.hpp"

namespace tvortex {

// (k_eps + i lambda) u_t = Laplacian u - eps^-2 (|u|^2 - 1) u on the unit torus.
struct PdeParams {
    double epsilon = 1.0 / 32.0;
    double lambda = 0.0;
    double k_eps = 0.0;
    int n = 256;
    double dt = 1e-6;
    double t_max = 0.02;
    int track_stride = 100;
};

// k_eps = 1 / log(1 / eps).
double k_eps_for(double epsilon);
PdeParams make_pde_params(double epsilon, double lambda, int n, double dt, double t_max, int track_stride = 100);
// Throws InvalidConfiguration on an inconsistent k_eps, a non-dissipative
// linear part or bad sizes.
void validate(const PdeParams& p);

// Strang splitting N(dt/2) L(dt) N(dt/2) with exact substeps:
//   L: Fourier mode k is multiplied by exp(-dt (2 pi |k|)^2 / m), m = k_eps + i lambda;
//   N: pointwise exact flow of m u_t = -eps^-2 (|u|^2 - 1) u.
class CglSolver {
public:
    explicit CglSolver(const PdeParams& p);
    ~CglSolver();
    CglSolver(const CglSolver&) = delete;
    CglSolver& operator=(const CglSolver&) = delete;

    const PdeParams& params() const { return p_; }

    void linear(ComplexField& u, double dt);
    void nonlinear(ComplexField& u, double dt) const;
    void step(ComplexField& u);

    // E = h^2 sum [1/2 |grad u|^2 + (1 - |u|^2)^2 / (4 eps^2)], gradient taken
    // spectrally so the linear substep never increases the first term.
    double energy(const ComplexField& u);

private:
    struct Impl;
    PdeParams p_;
    std::unique_ptr<Impl> impl_;
};

ComplexField step(const ComplexField& u, const PdeParams& p);
double pde_energy(const ComplexField& u, double epsilon);

// Plaquette phase winding: the four wrapped phase increments around each cell
// sum to 2 pi d. Positions come from the bilinear zero of u inside the cell.
std::vector<DetectedVortex> track_vortices(const ComplexField& u);

struct VortexTrack {
    int degree = 0;
    std::vector<double> times;
    std::vector<Vec2> positions;  // lifted, continued by minimal image steps
};

struct PdeRun {
    ComplexField final_field;
    std::vector<double> energy_times;
    std::vector<double> energy;
    std::vector<VortexTrack> tracks;
    bool tracked = true;
    std::string tracking_note;
    // k_eps * sum over steps of h^2 |u^{n+1} - u^n|^2 / dt, recorded with the energy.
    std::vector<double> dissipation;
};

struct RunOptions {
    // Record the dissipation integral; costs an extra field copy per step.
    bool track_dissipation = false;
};

// Energy and vortices are recorded at t = 0, every track_stride steps and at
// t_max. Tracking matches vortices frame to frame by nearest neighbour with a
// maximum jump of 4h and stops (tracked = false) if the count changes or a
// match fails.
PdeRun run(const ComplexField& u0, const PdeParams& p, RunOptions options = {});

struct CompareRow {
    double epsilon = 0.0;
    int n = 0;
    double dt = 0.0;
    double max_err = 0.0;
    bool tracked = true;
};

struct CompareResult {
    std::vector<CompareRow> rows;
    std::vector<PdeRun> runs;
};

// For each eps, runs the PDE from initial_data and the reduced law from the
// same (nudged) configuration; the error is the largest torus distance between
// a tracked vortex and its predicted position over the tracked frames.
CompareResult compare_to_ode(const VortexConfiguration& c0, double lambda, const std::vector<double>& eps_list,
                             double horizon, int n, double dt, const GreenTable& table, int track_stride = 100);

}  // namespace tvortex
