#pragma once

// Four-argument numerical fluxes F(a, b; p, q): the first two slots carry
// the viscosity states, the last two the flux arguments. Freezing (a, b)
// fixes the wave-speed data (and for hll_fix the branch), after which the
// flux is smooth in (p, q) and deriv_left/deriv_right are its exact
// Jacobians. Builtins: rusanov, hll, hll_fix.

#include <memory>
#include <string>
#include <vector>

#include "hyp1d/system.hpp"

namespace hyp1d {

struct FrozenFlux {
    double s_minus = 0.0;     // min eigenvalue along the viscosity path
    double s_plus = 0.0;      // max eigenvalue along the viscosity path
    double lambda_hat = 0.0;  // max(|s_minus|, |s_plus|)
    int branch = 0;           // flux-specific case id, fixed at freeze time
};

class NumericalFlux {
public:
    NumericalFlux(SystemPtr sys, int path_samples);
    virtual ~NumericalFlux() = default;

    virtual std::string name() const = 0;
    const System& sys() const { return *system_; }
    SystemPtr system_ptr() const { return system_; }
    int dim() const { return system_->dim(); }
    int path_samples() const { return path_samples_; }

    FrozenFlux freeze(const Vec& a, const Vec& b) const;

    virtual Vec value(const FrozenFlux& fz, const Vec& p, const Vec& q) const = 0;
    virtual Mat deriv_left(const FrozenFlux& fz, const Vec& p, const Vec& q) const = 0;
    virtual Mat deriv_right(const FrozenFlux& fz, const Vec& p, const Vec& q) const = 0;

    // transport scale used for the plain h / speed timestep bound
    virtual double speed_bound(const FrozenFlux& fz) const = 0;

    Vec value4(const Vec& a, const Vec& b, const Vec& p, const Vec& q) const {
        return value(freeze(a, b), p, q);
    }

protected:
    virtual int classify(double s_minus, double s_plus) const {
        (void)s_minus;
        (void)s_plus;
        return 0;
    }

    SystemPtr system_;
    int path_samples_;
};

using FluxPtr = std::shared_ptr<const NumericalFlux>;

// Builtin factory. Common param: path_samples (default 17).
//   rusanov : mu (> 1, default 3)
//   hll     : no extra params
//   hll_fix : delta (> 0, required)
FluxPtr make_flux(const std::string& kind, SystemPtr sys, const ParamMap& params = {});

// ---------------------------------------------------------------------------
// Verification helpers. All return worst-case defects over the samples.

// |F(u, u; u, u) - f(u)|_inf
double check_consistency(const NumericalFlux& flux, const std::vector<Vec>& states);

// relative error of central finite differences of F in slots p and q against
// deriv_left / deriv_right, viscosity frozen
double check_flux_jacobians(const NumericalFlux& flux,
                            const std::vector<std::array<Vec, 4>>& tuples, double step = 1e-5);

// |D^l(x, q) + D^r(p, x) - Df(x)|_max for x along the (p, q) entropy path
double check_second_order_consistency(const NumericalFlux& flux,
                                      const std::vector<std::pair<Vec, Vec>>& pairs,
                                      int points_per_pair = 9);

struct MonotonicityReport {
    double min_left_eig = 0.0;   // min over samples of lambda_min(sym D^l F-tilde)
    double max_right_eig = 0.0;  // max over samples of lambda_max(sym D^r F-tilde)
    double asymmetry = 0.0;      // worst |A - A^T|_max of either product
};

// D^l F-tilde = D^l F . H^{-1} should be PSD and D^r F-tilde NSD when the
// viscosity pair brackets the path speeds; evaluated along entropy paths
// with the viscosity frozen at the endpoints.
MonotonicityReport check_monotonicity(const NumericalFlux& flux,
                                      const std::vector<std::pair<Vec, Vec>>& pairs,
                                      int points_per_pair = 9);

}  // namespace hyp1d
