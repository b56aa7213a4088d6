#pragma once

// Runge-Kutta discontinuous Galerkin solver of degree k <= 4: modal Legendre
// elements, the same four-argument face fluxes as the finite-volume scheme,
// slope limiting between stages, and the degree-scaled timestep bound.

#include <array>
#include <cstdint>
#include <functional>
#include <limits>
#include <memory>
#include <string>
#include <vector>

#include "hyp1d/flux.hpp"
#include "hyp1d/fv.hpp"
#include "hyp1d/grid.hpp"

namespace hyp1d {

// ---------------------------------------------------------------------------
// Limiters. A limiter postprocesses a modal field cell by cell. Two axioms
// are required of every implementation:
//   (1) cell means are preserved exactly, and
//   (2) the cell-interior slope grows by at most the declared constant:
//       sup |(Lu)_x| <= slope_constant() * sup |u_x| on every cell.
// verify_limiter measures both on sample fields; apply_limiter additionally
// re-checks them after every application in debug builds.

class Limiter {
public:
    virtual ~Limiter() = default;
    virtual std::string name() const = 0;
    virtual double slope_constant() const = 0;
    virtual DGField apply(const DGField& in) const = 0;
};

using LimiterPtr = std::shared_ptr<const Limiter>;

// Kinds: "identity" (slope constant 1), "zero_slope" (drops all modes >= 1,
// slope constant 0), and "minmod_tvb" (param "m" >= 0, default 50): per
// component, a cell is left untouched when |c_1| <= m h^2, otherwise c_1 is
// replaced by minmod(c_1, forward mean difference, backward mean difference)
// and, if that changed anything, the higher modes of the component are
// dropped. Boundary cells see a zero outward mean difference. The declared
// slope constant 1 is sharp for degrees <= 2, where the interior derivative
// at the cell center equals (2/h) c_1.
LimiterPtr make_limiter(const std::string& kind, const ParamMap& params = {});

// Applies lim and, in debug builds, verifies the two limiter axioms on this
// input/output pair (throws std::logic_error on a violation).
DGField apply_limiter(const Limiter& lim, const DGField& in);

struct LimiterReport {
    double max_mean_defect = 0.0;  // max_j,i |mean defect| / max(1, |mean in|)
    double max_slope_ratio = 0.0;  // max_j,i sup|(Lu)_x| / sup|u_x|, sampled
};

// Measures the axioms over sample fields. Slopes are sampled at xi in
// {-1, the 4-point Gauss nodes, 0, +1}, which captures the exact cellwise
// supremum for degrees <= 2. A cell whose input slope vanishes at every
// sample must come out with zero slope; otherwise the ratio is infinite.
LimiterReport verify_limiter(const Limiter& lim, const std::vector<DGField>& samples);

// ---------------------------------------------------------------------------
// Workspace: the volume quadrature and the basis values at its nodes. The
// rule has ceil((3k+2)/2) points, enough for f(u) P_m' with a quadratic
// flux; general fluxes are integrated approximately, as usual for DG.

struct DgWorkspace {
    int degree = 0;
    Quadrature quad;
    std::vector<std::array<double, 5>> basis;        // basis[q][m] = P_m(node q)
    std::vector<std::array<double, 5>> basis_deriv;  // P_m'(node q)
};

DgWorkspace make_dg_workspace(int degree);  // degree in [0, 4]

// Degree-scaled timestep: the finite-volume bound divided by 2k + 1.
TimestepBound dg_timestep(const CFLParams& p, double h, int degree);

// ---------------------------------------------------------------------------
// Steps. dg_euler_step advances the modal field by one forward Euler stage
//   c_m += (tau / h) (2m + 1) [ integral f(u) P_m' dxi - F_+ + (-1)^m F_- ]
// with face fluxes from the traces and constant pad states outside the
// window. Faces with bitwise-equal traces are skipped, and a constant cell
// between two skipped faces is copied bitwise, so constant regions are exact
// fixed points and degree 0 reproduces fv_step bit for bit. Input traces and
// quadrature states must be admissible (std::runtime_error otherwise).

struct DgStepStats {
    double max_speed = 0.0;  // max flux speed_bound over faces with distinct traces
    int active_faces = 0;
};

DGField dg_euler_step(const NumericalFlux& flux, const DGField& in, const Vec& pad_left,
                      const Vec& pad_right, double tau, const DgWorkspace& ws,
                      DgStepStats* stats = nullptr);

// Heun's method on the limited stages:
//   u~ = L u,   u1 = E(u~),   u~1 = L u1,   result = (u~ + E(u~1)) / 2.
// Stats are the maxima over the two Euler stages.
DGField rkdg2_step(const NumericalFlux& flux, const Limiter& lim, const DGField& in,
                   const Vec& pad_left, const Vec& pad_right, double tau,
                   const DgWorkspace& ws, DgStepStats* stats = nullptr);

// ---------------------------------------------------------------------------
// Runs. The stored levels are the certified representatives: the limited
// state at every time level, starting from L u0. Between levels the scheme
// is rkdg2_step followed by one limiter application, so level n+1 is
// L(rkdg2(level n)) and every stored field satisfies the limiter axioms.

struct DgTrajectory {
    std::string system_id, flux_id, scheme_id, limiter_id;
    int degree = 0;
    double tau = 0.0;
    Vec pad_left, pad_right;          // far-field states (mean of the end cells of u0)
    std::vector<DGField> levels;
    std::vector<double> tv;           // per level
    std::vector<double> sup_slope;    // per level, sampled sup |u_x|
    std::vector<DgStepStats> steps;   // per step
    double boundary_drift = 0.0;      // max far-field mean deviation, relative scale
    bool tv_exceeded = false;         // some level broke the variation budget
    bool slope_exceeded = false;      // some level broke the slope ceiling

    double t(int n) const { return n * tau; }
    double max_speed() const;
    double sup_tv() const;
    double max_sup_slope() const;
};

struct DgRunOptions {
    bool store_levels = true;
    // End-cell means must stay within this relative distance of the pads.
    double pad_tolerance = 1e-3;
    // Monitors: exceeding either flags the run instead of failing the step.
    double tv_bound = std::numeric_limits<double>::infinity();
    double slope_ceiling = std::numeric_limits<double>::infinity();
    // called with the initial limited level and after every step
    std::function<void(int level, const DGField& u)> on_level;
};

DgTrajectory dg_run(const NumericalFlux& flux, const Limiter& lim, const DGField& u0,
                    double tau, int n_steps, const DgRunOptions& opt = {});

// ---------------------------------------------------------------------------
// Diagnostics.

// Sampled sup-norm of the spatial derivative (exact for degrees <= 2).
double max_abs_slope(const DGField& u);

// Smallest C with  |u^{n+1} - u^n|_{L2(I_j)} <= C tau h^{-1/2}
//   ( |u^n_x|_{L1(I_j)} + |jump at j-1/2| + |jump at j+1/2| )
// over all steps and cells of the stored levels; boundary jumps are taken
// against the pads, and cells with a vanishing right-hand side are skipped.
double dg_oscillation_constant(const DgTrajectory& tr);

}  // namespace hyp1d
