#pragma once

// First-order finite-volume solver: forward Euler in time, four-argument
// numerical flux in space, constant far-field pad cells, and the sharp
// entropy-dissipation timestep bound.

#include <cstdint>
#include <functional>
#include <limits>
#include <string>
#include <vector>

#include "hyp1d/flux.hpp"
#include "hyp1d/grid.hpp"

namespace hyp1d {

// ---------------------------------------------------------------------------
// Axis-aligned state hull.

struct Box {
    Vec lo, hi;

    int dim() const { return lo.size(); }
    bool contains(const Vec& u, double tol = 0.0) const;
    Vec corner(int mask) const;     // bit i of mask selects hi[i]
    int corner_count() const { return 1 << dim(); }
    Box inflated(double factor) const;  // half-widths scaled about the center

    static Box covering(const std::vector<Vec>& states);
    static Box covering(const PCField& u);
};

// ---------------------------------------------------------------------------
// Sharp timestep bound. alpha = (hess_min / hess_max)^2 penalizes entropy
// anisotropy over the hull; beta = flux_min / flux_max^2 is the dissipation
// to stiffness ratio of the frozen flux Jacobians.

struct CFLParams {
    double hess_min = 0.0;        // min eigenvalue of the entropy Hessian over the hull
    double hess_max = 0.0;        // max eigenvalue
    double flux_min_left = 0.0;   // min |eig| of D^l F over sampled states
    double flux_max_left = 0.0;   // max |eig|
    double flux_min_right = 0.0;  // same for D^r F
    double flux_max_right = 0.0;
    double safety = 1.0;          // in (0, 1]
    double max_speed = 0.0;       // transport scale for the plain h / speed bound
};

struct TimestepBound {
    double tau = 0.0;         // min of the two bounds
    double sharp = 0.0;       // safety * h * alpha * beta / 4
    double transport = 0.0;   // safety * h / max_speed
};

// Throws when a flux eigenvalue bound is not strictly positive (the flux has
// no uniform dissipation on the hull, e.g. plain hll at a sonic point).
TimestepBound cfl_timestep(const CFLParams& p, double h);

// Samples the hull (corners always included) to bound the entropy Hessian
// spectrum, finds the pair of states realizing the maximal path wave speed,
// and scans |eig| of D^l F / D^r F with the viscosity frozen at that worst
// pair while the argument sweeps entropy paths of the sampled pairs.
CFLParams estimate_cfl_params(const NumericalFlux& flux, const Box& hull, int n_pairs = 1000,
                              std::uint64_t seed = 20240501, double safety = 1.0);

// Minimal step count n with T/n within the bound, and the matching tau = T/n
// (so t^n = n tau lands on T exactly up to one rounding).
struct RunLength {
    double tau = 0.0;
    int n_steps = 0;
};
RunLength steps_for_time(double tau_bound, double T);

// ---------------------------------------------------------------------------
// Stepping.

struct FvStepStats {
    double max_speed = 0.0;     // max flux speed_bound over faces with distinct states
    double max_jac_norm = 0.0;  // max l1 norm of D^l/D^r over those faces
    double l1_change = 0.0;     // h * sum_j |u_out - u_in|_1, for the per-step L1 bound
    int active_faces = 0;       // faces where the flux was actually evaluated
};

// One forward-Euler step. Ghost cells hold pad_left / pad_right. Faces whose
// two states are bitwise equal take F = f(u) directly (the exact consistency
// value) and are not counted as active. Face fluxes are computed in parallel
// chunks; results are bit-identical for any worker count. Throws when an
// updated cell leaves the admissible set (reports the first such cell).
// out must not alias in.
void fv_step(const NumericalFlux& flux, const PCField& in, const Vec& pad_left,
             const Vec& pad_right, double tau, PCField& out, FvStepStats* stats = nullptr);

// Convenience: pads taken from the end cells of the input.
PCField fv_step(const NumericalFlux& flux, const PCField& in, double tau);

// ---------------------------------------------------------------------------
// Trajectories: levels at t^n = n tau plus per-level and per-step diagnostics.

struct Trajectory {
    std::string system_id, flux_id, scheme_id;
    double tau = 0.0;
    std::vector<PCField> levels;
    std::vector<double> tv;           // per level
    std::vector<FvStepStats> steps;   // per step
    double boundary_drift = 0.0;      // max far-field deviation seen, relative scale
    bool tv_exceeded = false;         // some level broke the configured variation budget

    double t(int n) const { return n * tau; }
    double max_speed() const;
    double max_jac_norm() const;
    double sup_tv() const;
};

struct FvRunOptions {
    bool store_levels = true;
    // End cells must stay within this relative distance of the pads. The
    // limit catches waves reaching the window boundary while tolerating the
    // exponentially small viscous tails every monotone scheme sheds.
    double pad_tolerance = 1e-3;
    // Variation budget: exceeding it flags the run (tv_exceeded) as outside
    // the bounded-variation hypothesis instead of failing the step.
    double tv_bound = std::numeric_limits<double>::infinity();
    // called with the initial level and after every step
    std::function<void(int level, const PCField& u)> on_level;
};

// Runs n_steps with the end cells of u0 as pads, checking the far-field
// drift after every step (throws when a wave reaches the boundary).
Trajectory fv_run(const NumericalFlux& flux, const PCField& u0, double tau, int n_steps,
                  const FvRunOptions& opt = {});

}  // namespace hyp1d
