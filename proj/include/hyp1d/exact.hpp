#pragma once

// Exact reference solutions: isolated shocks, contact discontinuities, and
// transported smooth profiles for linear systems. Every constructor validates
// the Rankine-Hugoniot relation and entropy admissibility numerically, so a
// returned ExactSolution is trustworthy as a convergence reference.

#include <functional>
#include <limits>
#include <vector>

#include "hyp1d/system.hpp"

namespace hyp1d {

enum class ExactKind { single_shock, contact, smooth_linear, two_shock };

// Straight-line discontinuity path x(t) = x0 + sigma * t.
struct ShockLine {
    double x0 = 0.0;
    double sigma = 0.0;

    double position(double t) const { return x0 + sigma * t; }
};

// Closed-form solution of u_t + f(u)_x = 0. eval is total in (t, x), but the
// formula is the entropy solution only for 0 <= t < t_max (a two-shock stops
// being exact once its fronts meet; t_max is infinite otherwise).
struct ExactSolution {
    ExactKind kind = ExactKind::smooth_linear;
    SystemPtr system;
    std::function<Vec(double t, double x)> eval;
    std::vector<ShockLine> discontinuities;
    double t_max = std::numeric_limits<double>::infinity();

    // Sorted jump positions at time t, for exact L1 quadrature against
    // piecewise fields. Meaningful for t < t_max.
    std::vector<double> breakpoints(double t) const;
};

// Least-squares jump speed of (uL, uR) with diagnostics: rh_residual is the
// max norm of f(uR) - f(uL) - sigma (uR - uL) relative to the flux scale,
// entropy_production is sigma [eta] - [q] (positive across admissible
// shocks, zero across contacts, negative across expansion jumps).
struct ShockFit {
    double sigma = 0.0;
    double rh_residual = 0.0;
    double entropy_production = 0.0;
};

ShockFit fit_shock(const System& sys, const Vec& uL, const Vec& uR);

// Single straight shock from uL (x < x0 + sigma t) to uR. Requires the jump
// to satisfy Rankine-Hugoniot to 1e-10 and to dissipate entropy strictly;
// expansion jumps and contacts are rejected.
ExactSolution make_single_shock(SystemPtr sys, const Vec& uL, const Vec& uR, double x0 = 0.0);

// Two admissible shocks (uL|uM) at x_left and (uM|uR) at x_right > x_left.
// If the left front is faster, t_max is the meeting time of the two lines.
ExactSolution make_two_shock(SystemPtr sys, const Vec& uL, const Vec& uM, const Vec& uR,
                             double x_left, double x_right);

// Contact discontinuity: a Rankine-Hugoniot jump that travels with a
// characteristic speed of both end states and produces no entropy (each
// checked to 1e-10). Genuinely nonlinear jumps are rejected.
ExactSolution make_contact(SystemPtr sys, const Vec& uL, const Vec& uR, double x0 = 0.0);

// Transported profile for a system with a constant, diagonalizable flux
// Jacobian A: the profile is decomposed into characteristic components and
// each travels with its eigenspeed. A constant offset in the flux is
// harmless (it drops out of the divergence), but a state-dependent Jacobian
// is rejected.
ExactSolution make_smooth_linear(SystemPtr sys, std::function<Vec(double)> profile);

// One-parameter Hugoniot locus through uL for 2-component systems whose
// first flux component equals the second conserved variable (mass flux =
// momentum; shallow_water and isothermal_euler both qualify). Fixes the
// leading component of uR and solves the remaining jump relation for the
// second one with a safeguarded Newton iteration inside a bisection bracket
// (tolerance 1e-12). family 1 follows the slow branch, family 2 the fast
// one. The result is Rankine-Hugoniot connected to uL but not necessarily
// entropy admissible in this left-to-right order; admissibility is the
// caller's concern (make_single_shock checks it).
Vec hugoniot_state(const System& sys, const Vec& uL, double first_component, int family);

}  // namespace hyp1d
