#pragma once

// Hyperbolic system models: flux, entropy pair, entropy variable maps, and
// spectral helpers. Builtins: burgers, linear2, shallow_water,
// isothermal_euler. All state math is n <= 2.

#include <map>
#include <memory>
#include <string>
#include <vector>

#include "hyp1d/util.hpp"

namespace hyp1d {

using ParamMap = std::map<std::string, double>;

class System {
public:
    virtual ~System() = default;

    const std::string& name() const { return name_; }
    int dim() const { return dim_; }

    virtual Vec flux(const Vec& u) const = 0;
    virtual Mat flux_jacobian(const Vec& u) const = 0;
    virtual double entropy(const Vec& u) const = 0;
    virtual double entropy_flux(const Vec& u) const = 0;
    virtual Vec entropy_gradient(const Vec& u) const = 0;  // v(u)
    virtual Mat entropy_hessian(const Vec& u) const = 0;   // strictly positive definite
    virtual bool admissible(const Vec& u) const = 0;
    virtual Vec anchor() const = 0;  // admissible default Newton seed

    Vec to_entropy(const Vec& u) const { return entropy_gradient(u); }

    // Inverse entropy map by damped Newton on phi(u) = eta(u) - v.u
    // (strictly convex). Tolerance 1e-12 on the gradient, at most 50 steps,
    // Armijo backtracking restricted to admissible states. Throws on failure.
    // The default seed comes from entropy_seed, so builtins converge in a
    // couple of polishing steps from their closed-form inverses.
    Vec from_entropy(const Vec& v) const;
    Vec from_entropy(const Vec& v, const Vec& seed) const;

    // Cheap approximate inverse used to seed Newton; anchor() if unknown.
    virtual Vec entropy_seed(const Vec& v) const {
        (void)v;
        return anchor();
    }

protected:
    System(std::string name, int dim) : name_(std::move(name)), dim_(dim) {}

private:
    std::string name_;
    int dim_;
};

using SystemPtr = std::shared_ptr<const System>;

// Builtin factory. Unknown names or invalid/unknown params throw.
//   burgers          : no params
//   linear2          : a11, a12, a21, a22 (symmetric required; default [[0,1],[1,0]])
//   shallow_water    : g (default 1), d_min (default 1e-8)
//   isothermal_euler : a (default 1), rho_min (default 1e-8)
SystemPtr make_system(const std::string& name, const ParamMap& params = {});

// ---------------------------------------------------------------------------
// Entropy pair verification: max norms over the samples of the compatibility
// residual grad(eta).Df - grad(q) (q differentiated by central differences
// with the given step), the symmetry residual H.Df - Df^T.H, and the
// from_entropy(to_entropy(u)) - u round trip.

struct EntropyPairReport {
    double compatibility = 0.0;
    double symmetry = 0.0;
    double roundtrip = 0.0;
};

EntropyPairReport verify_entropy_pair(const System& sys, const std::vector<Vec>& samples,
                                      double fd_step = 1e-6);

// ---------------------------------------------------------------------------
// Range of flux Jacobian eigenvalues along the entropy-variable segment
// between two admissible states, sampled at n_samples equispaced points
// (endpoints included, interior states recovered by warm-started Newton).
// Refining n -> 2n-1 keeps old sample points, so ranges are nested.

EigRange eigen_range_along_path(const System& sys, const Vec& ua, const Vec& ub,
                                int n_samples = 17);

// States along the same path, for callers that need the states themselves.
std::vector<Vec> states_along_entropy_path(const System& sys, const Vec& ua, const Vec& ub,
                                           int n_samples);

}  // namespace hyp1d
