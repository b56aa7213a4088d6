#pragma once

// Certification quantities on trajectories: time-grid Lipschitz constants,
// weak-form and entropy weak-form residuals against C1 compactly supported
// test functions, numerical entropy fluxes and their left/right identity,
// per-step dissipation balances, and the oscillation / shock-tube variation
// certificate. Everything here is a pure reader of immutable trajectories.

#include <functional>
#include <limits>
#include <string>
#include <vector>

#include "hyp1d/dg.hpp"
#include "hyp1d/fv.hpp"

namespace hyp1d {

// ---------------------------------------------------------------------------
// Test functions

struct SupportBox {
    double t_lo = 0.0, t_hi = 0.0;
    double x_lo = 0.0, x_hi = 0.0;
};

// C1 compactly supported scalar test function with exact derivative fields
// and a precomputed W^{1,inf} norm (max of sup|value|, sup|dt|, sup|dx|).
// The quadrature engine splits integration intervals at the support box
// edges and at the declared extra knots, so piecewise-polynomial test
// functions integrate exactly against piecewise-polynomial fields.
struct TestFunction {
    std::function<double(double t, double x)> value, dt, dx;
    SupportBox box;
    double w1inf_norm = 0.0;
    bool nonneg = false;
    std::vector<double> t_splits, x_splits;  // extra interior kink locations
};

// Separable bump a * B((t-t0)/rt) * B((x-x0)/rx) with B(s) = (1-s^2)^2 on
// |s| <= 1 and 0 outside. Norms are analytic: sup|B| = 1 at s = 0 and
// sup|B'| = 8/(3 sqrt 3) at s = 1/sqrt 3.
TestFunction make_bump(double t0, double x0, double rt, double rx, double amplitude);

// ---------------------------------------------------------------------------
// Weak residuals. The in-time representative of a trajectory is piecewise
// constant: level n on [t^n, t^{n+1}). Space-time integrals use a tensor
// Gauss rule per (step x cell) tile, split at the test-function knots.

struct QuadSpec {
    int time_nodes = 4;
    int space_nodes = 6;
};

struct WeakResidual {
    // Signed value of integral-minus-boundary-terms, one entry per equation
    // for the conservation form, a single entry for the entropy form.
    Vec signed_components;
    double residual = 0.0;    // max |component|
    double normalized = 0.0;  // conservation: residual / denom, >= 0;
                              // entropy: signed / denom, sign kept; when the
                              // denominator vanishes (flat trajectory) the
                              // raw value is kept instead
    double denominator = 0.0; // W1inf * (t^m - t^n) * sup TV
};

// ||u(t^m) - u(t^n)||_L1 / ((t^m - t^n) * sup TV over [n, m]). A constant
// trajectory returns 0; a zero-variation trajectory that moved is a broken
// conservation property and throws.
double lc_constant(const Trajectory& traj, int n, int m);
double lc_constant(const DgTrajectory& traj, int n, int m);

// | int int u phi_t + f(u) phi_x - [int u phi]_{t^n}^{t^m} | per component.
// The system supplies f (trajectories carry only id strings); phi's spatial
// support must lie inside the grid window. Test-function callables must be
// pure: quadrature contributions are evaluated concurrently and reduced in a
// fixed order.
WeakResidual wc_residual(const System& sys, const Trajectory& traj, const TestFunction& phi,
                         int n, int m, const QuadSpec& quad = {});
WeakResidual wc_residual(const System& sys, const DgTrajectory& traj, const TestFunction& phi,
                         int n, int m, const QuadSpec& quad = {});

// Entropy analogue with (eta, q) in place of (u, f); phi must be flagged
// nonneg. A nonnegative signed value certifies dissipation; the pass rule
// signed >= -C h * denominator is left to the caller.
WeakResidual wes_residual(const System& sys, const Trajectory& traj, const TestFunction& phi,
                          int n, int m, const QuadSpec& quad = {});
WeakResidual wes_residual(const System& sys, const DgTrajectory& traj, const TestFunction& phi,
                          int n, int m, const QuadSpec& quad = {});

// Building blocks of the residuals, for streaming consumers that see levels
// one at a time: the signed residual over [t^n, t^m] equals
//   sum_{k=n}^{m-1} step_term(level k, t^k, t^{k+1})
//     + boundary_term(level n, t^n) - boundary_term(level m, t^m),
// so prefix sums of step terms plus stored boundary terms reproduce
// wc_residual / wes_residual for any level pair exactly.
Vec wc_step_term(const System& sys, const PCField& u, const TestFunction& phi, double t0,
                 double t1, const QuadSpec& quad = {});
Vec wc_step_term(const System& sys, const DGField& u, const TestFunction& phi, double t0,
                 double t1, const QuadSpec& quad = {});
Vec wc_boundary_term(const PCField& u, const TestFunction& phi, double t,
                     const QuadSpec& quad = {});
Vec wc_boundary_term(const DGField& u, const TestFunction& phi, double t,
                     const QuadSpec& quad = {});
double wes_step_term(const System& sys, const PCField& u, const TestFunction& phi, double t0,
                     double t1, const QuadSpec& quad = {});
double wes_step_term(const System& sys, const DGField& u, const TestFunction& phi, double t0,
                     double t1, const QuadSpec& quad = {});
double wes_boundary_term(const System& sys, const PCField& u, const TestFunction& phi, double t,
                         const QuadSpec& quad = {});
double wes_boundary_term(const System& sys, const DGField& u, const TestFunction& phi, double t,
                         const QuadSpec& quad = {});

// Largest induced-l1 operator norm of the frozen flux Jacobians along all
// face segments of u (pads close the window); the time-grid Lipschitz
// constant of one forward Euler step is at most twice this number.
double flux_lipschitz_bound(const NumericalFlux& flux, const PCField& u, const Vec& pad_left,
                            const Vec& pad_right, int samples = 9);

// ---------------------------------------------------------------------------
// Numerical entropy fluxes, built from the straight segment between two
// entropy-variable states with the flux viscosity frozen at its endpoints:
//   right: Q^r = int_0^1 v(s)^T D^r Ftilde(vl, v(s)) (vr - vl) ds + q(u(vl))
//   left:  Q^l = -int_0^1 v(s)^T D^l Ftilde(v(s), vr) (vr - vl) ds + q(u(vr))
// where D Ftilde is the flux Jacobian in entropy variables. Both are
// consistent (Q(v, v) = q(u(v))) and coincide for second-order-consistent
// fluxes. Throws when the segment leaves the admissible set.

enum class EntropyFluxSide { left, right };

double numerical_entropy_flux(const NumericalFlux& flux, const Vec& vl, const Vec& vr,
                              EntropyFluxSide side, int quad_nodes = 20);

// ---------------------------------------------------------------------------
// Dissipation balance of one forward Euler step. Per cell, the time
// discretization contributes the anti-dissipative pairing
//   antidiss_j = (grad eta(u^{n+1}_j) - grad eta(u^n_j)) . (F_{j+1/2} - F_{j-1/2}) <= 0
// and the flux contributes, per face, the two nonnegative path integrals
//   diss_right = -int_0^1 s       dv^T D^r Ftilde(v_j, v(s))     dv ds
//   diss_left  = +int_0^1 (1 - s) dv^T D^l Ftilde(v(s), v_{j+1}) dv ds
// along the entropy segment of the face. net sums every term; under the
// sharp timestep bound it is nonnegative.

struct DissipationBalance {
    std::vector<double> antidiss;    // per cell, <= 0
    std::vector<double> diss_left;   // per face (cells + 1 with pads), >= 0
    std::vector<double> diss_right;  // per face, >= 0
    double net = 0.0;
};

DissipationBalance dissipation_balance(const NumericalFlux& flux, const PCField& from,
                                       const PCField& to, const Vec& pad_left,
                                       const Vec& pad_right, int quad_nodes = 20);
DissipationBalance dissipation_balance(const NumericalFlux& flux, const Trajectory& traj,
                                       int n, int quad_nodes = 20);

// ---------------------------------------------------------------------------
// Oscillation and shock tubes

// Per cell: ||u_x||_{L1(I_j)} + |jump at left face|_1 + |jump at right
// face|_1. Cell derivatives vanish for piecewise-constant fields; without
// pads the outer faces of the end cells contribute nothing.
std::vector<double> oscillation_profile(const PCField& u);
std::vector<double> oscillation_profile(const PCField& u, const Vec& pad_left, const Vec& pad_right);
std::vector<double> oscillation_profile(const DGField& u);
std::vector<double> oscillation_profile(const DGField& u, const Vec& pad_left, const Vec& pad_right);

struct ShockCurve {
    std::vector<double> t;   // strictly increasing node times
    std::vector<double> x;   // tracked front position per node
    double lipschitz = 0.0;  // max |segment slope|

    double t_begin() const { return t.front(); }
    double t_end() const { return t.back(); }
    bool alive(double time) const { return time >= t_begin() && time <= t_end(); }
    double position(double time) const;  // linear interpolation inside [t_begin, t_end]
    double slope() const;                // least-squares drift of the node cloud
};

struct ShockCurveSet {
    std::vector<ShockCurve> curves;
    double tube_radius = 0.0;  // h^{2/3} of the generating grid
};

// Incremental front tracker for consumers that see levels one at a time.
// feed marks the cells whose local oscillation exceeds
// jump_factor * h^{2/3} and merges adjacent marks into fronts at their
// oscillation-weighted centers (cell oscillation rather than bare face
// jumps keeps a piecewise-linear front visible while it crosses a cell
// interior). finish links fronts of consecutive levels whenever they moved
// at most link_tol, drops tracks alive for fewer than min_lifetime levels,
// and is deferred so link_tol can use the wave speed realized by the run.
class ShockTracker {
public:
    ShockTracker(const Grid1D& grid, double jump_factor, int min_lifetime = 3);

    void feed(double t, const std::vector<double>& osc);  // levels in time order
    ShockCurveSet finish(double link_tol) const;

    // front positions found by the most recent feed
    const std::vector<double>& last_fronts() const { return fronts_.back(); }
    int levels_fed() const { return static_cast<int>(times_.size()); }
    double tube_radius() const { return tube_radius_; }
    double threshold() const { return threshold_; }

private:
    Grid1D grid_;
    double tube_radius_ = 0.0;
    double threshold_ = 0.0;
    int min_lifetime_ = 3;
    std::vector<double> times_;
    std::vector<std::vector<double>> fronts_;  // per level, sorted positions
};

// One-shot detection over a stored trajectory: a ShockTracker fed every
// level, finished with link_tol = max_speed * tau + h.
ShockCurveSet detect_shock_curves(const Trajectory& traj, double jump_factor,
                                  int min_lifetime = 3);
ShockCurveSet detect_shock_curves(const DgTrajectory& traj, double jump_factor,
                                  int min_lifetime = 3);

struct BvViolation {
    int level = 0;
    int cell = 0;
    double value = 0.0;
    double threshold = 0.0;
};

struct BvReport {
    double sup_tv = 0.0;
    bool tv_ok = true;
    double max_outside_osc = 0.0;           // max oscillation seen outside all tubes
    std::vector<BvViolation> violations;    // oscillation breaches outside tubes

    bool pass() const { return tv_ok && violations.empty(); }
};

// Checks sup TV <= tv_bound and, for every cell farther than
// m_tube * curves.tube_radius from all curves alive at that level,
// oscillation_profile <= k_osc * h.
BvReport bv_certificate(const Trajectory& traj, const ShockCurveSet& curves, double m_tube,
                        double k_osc,
                        double tv_bound = std::numeric_limits<double>::infinity());
BvReport bv_certificate(const DgTrajectory& traj, const ShockCurveSet& curves, double m_tube,
                        double k_osc,
                        double tv_bound = std::numeric_limits<double>::infinity());

// ---------------------------------------------------------------------------
// Report bundle

struct CertificationReport {
    double lc = 0.0;                      // Lipschitz certificate constant
    double wc_residual = 0.0;             // worst raw weak residual
    double wc_normalized = 0.0;           // worst normalized weak residual
    double wes_signed = 0.0;              // most negative signed entropy residual
    double wes_normalized = 0.0;          // its normalized value
    double entropy_flux_identity = 0.0;   // max |Q^r - Q^l|
    double bv_sup_tv = 0.0;
    int bv_flagged = 0;                   // cells outside tubes over the budget
    double bv_max_outside_osc = 0.0;
    double cfl_margin = 0.0;              // tau used / tau allowed
};

std::string report_json(const CertificationReport& rep);
std::string violations_csv(const std::vector<BvViolation>& violations, const Grid1D& grid,
                           double tau);

}  // namespace hyp1d
