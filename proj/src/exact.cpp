#include "hyp1d/exact.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>
#include <string>
#include <utility>

namespace hyp1d {
namespace {

constexpr double kRhTol = 1e-10;       // relative Rankine-Hugoniot residual
constexpr double kContactTol = 1e-10;  // speed match and entropy production
constexpr double kRootTol = 1e-12;     // Hugoniot root residual

void check_state(const System& sys, const Vec& u, const char* who, const char* which) {
    if (u.size() != sys.dim()) {
        throw std::invalid_argument(std::string(who) + ": " + which + " state has dimension " +
                                    std::to_string(u.size()) + ", system " + sys.name() +
                                    " needs " + std::to_string(sys.dim()));
    }
    if (!sys.admissible(u)) {
        throw std::invalid_argument(std::string(who) + ": " + which +
                                    " state is not admissible for " + sys.name());
    }
}

// Validated fit used by the shock constructors: Rankine-Hugoniot to kRhTol,
// strict entropy dissipation.
ShockFit checked_shock(const System& sys, const Vec& uL, const Vec& uR, const char* who) {
    const ShockFit fit = fit_shock(sys, uL, uR);
    if (fit.rh_residual > kRhTol) {
        throw std::runtime_error(std::string(who) +
                                 ": states are not Rankine-Hugoniot connected (residual = " +
                                 format_double(fit.rh_residual) + ")");
    }
    if (!(fit.entropy_production > 0.0)) {
        throw std::runtime_error(std::string(who) + ": the jump does not dissipate entropy " +
                                 "(production = " + format_double(fit.entropy_production) +
                                 "); expansion jumps and contacts are rejected");
    }
    return fit;
}

// Smallest distance from sigma to the spectrum of the flux Jacobian at u.
double speed_gap(const System& sys, const Vec& u, double sigma) {
    const EigRange eig = real_eigenvalues(sys.flux_jacobian(u));
    return std::min(std::abs(eig.lo - sigma), std::abs(eig.hi - sigma));
}

}  // namespace

// ---------------------------------------------------------------------------
// ExactSolution

std::vector<double> ExactSolution::breakpoints(double t) const {
    std::vector<double> xs;
    xs.reserve(discontinuities.size());
    for (const ShockLine& line : discontinuities) xs.push_back(line.position(t));
    std::sort(xs.begin(), xs.end());
    return xs;
}

// ---------------------------------------------------------------------------
// Shock fitting

ShockFit fit_shock(const System& sys, const Vec& uL, const Vec& uR) {
    check_state(sys, uL, "fit_shock", "left");
    check_state(sys, uR, "fit_shock", "right");
    const Vec du = uR - uL;
    const double den = du.dot(du);
    if (den == 0.0) throw std::invalid_argument("fit_shock: left and right states coincide");

    const Vec fl = sys.flux(uL);
    const Vec fr = sys.flux(uR);
    const Vec df = fr - fl;

    ShockFit fit;
    fit.sigma = df.dot(du) / den;
    const Vec mismatch = df - fit.sigma * du;
    const double scale = std::max({1.0, fl.norm_inf(), fr.norm_inf()});
    fit.rh_residual = mismatch.norm_inf() / scale;
    fit.entropy_production = fit.sigma * (sys.entropy(uR) - sys.entropy(uL)) -
                             (sys.entropy_flux(uR) - sys.entropy_flux(uL));
    return fit;
}

// ---------------------------------------------------------------------------
// Constructors

ExactSolution make_single_shock(SystemPtr sys, const Vec& uL, const Vec& uR, double x0) {
    const ShockFit fit = checked_shock(*sys, uL, uR, "make_single_shock");

    ExactSolution ex;
    ex.kind = ExactKind::single_shock;
    ex.system = sys;
    ex.discontinuities = {{x0, fit.sigma}};
    ex.eval = [uL, uR, x0, sigma = fit.sigma](double t, double x) {
        return x < x0 + sigma * t ? uL : uR;
    };
    return ex;
}

ExactSolution make_two_shock(SystemPtr sys, const Vec& uL, const Vec& uM, const Vec& uR,
                             double x_left, double x_right) {
    if (!(x_left < x_right)) {
        throw std::invalid_argument("make_two_shock: the left jump must start left of the right jump");
    }
    const ShockFit left = checked_shock(*sys, uL, uM, "make_two_shock");
    const ShockFit right = checked_shock(*sys, uM, uR, "make_two_shock");

    ExactSolution ex;
    ex.kind = ExactKind::two_shock;
    ex.system = sys;
    ex.discontinuities = {{x_left, left.sigma}, {x_right, right.sigma}};
    if (left.sigma > right.sigma) {
        ex.t_max = (x_right - x_left) / (left.sigma - right.sigma);
    }
    ex.eval = [uL, uM, uR, x_left, x_right, sl = left.sigma, sr = right.sigma](double t, double x) {
        if (x < x_left + sl * t) return uL;
        if (x < x_right + sr * t) return uM;
        return uR;
    };
    return ex;
}

ExactSolution make_contact(SystemPtr sys, const Vec& uL, const Vec& uR, double x0) {
    const ShockFit fit = fit_shock(*sys, uL, uR);
    if (fit.rh_residual > kRhTol) {
        throw std::runtime_error("make_contact: states are not Rankine-Hugoniot connected (residual = " +
                                 format_double(fit.rh_residual) + ")");
    }
    const double gap = std::max(speed_gap(*sys, uL, fit.sigma), speed_gap(*sys, uR, fit.sigma));
    const double speed_scale = std::max(1.0, std::abs(fit.sigma));
    if (gap > kContactTol * speed_scale) {
        throw std::runtime_error("make_contact: no characteristic family travels with the jump "
                                 "(speed gap = " + format_double(gap) + ")");
    }
    if (std::abs(fit.entropy_production) > kContactTol) {
        throw std::runtime_error("make_contact: the jump exchanges entropy (production = " +
                                 format_double(fit.entropy_production) + "); not a contact");
    }

    ExactSolution ex;
    ex.kind = ExactKind::contact;
    ex.system = sys;
    ex.discontinuities = {{x0, fit.sigma}};
    ex.eval = [uL, uR, x0, sigma = fit.sigma](double t, double x) {
        return x < x0 + sigma * t ? uL : uR;
    };
    return ex;
}

ExactSolution make_smooth_linear(SystemPtr sys, std::function<Vec(double)> profile) {
    const int n = sys->dim();
    const Vec anchor = sys->anchor();
    const Mat a = sys->flux_jacobian(anchor);

    // The construction is valid only when the Jacobian is state independent;
    // probe a few admissible neighbors of the anchor.
    std::vector<Vec> probes;
    for (int i = 0; i < n; ++i) {
        Vec p = anchor;
        p[i] += 0.1;
        probes.push_back(p);
        p[i] -= 0.2;
        probes.push_back(p);
    }
    const double scale = std::max(1.0, a.max_abs());
    for (const Vec& p : probes) {
        if (!sys->admissible(p)) continue;
        if ((sys->flux_jacobian(p) - a).max_abs() > 1e-11 * scale) {
            throw std::invalid_argument("make_smooth_linear: the flux Jacobian of " + sys->name() +
                                        " varies with the state; a linear system is required");
        }
    }

    ExactSolution ex;
    ex.kind = ExactKind::smooth_linear;
    ex.system = sys;

    if (n == 1) {
        ex.eval = [profile = std::move(profile), speed = a(0, 0)](double t, double x) {
            return profile(x - speed * t);
        };
        return ex;
    }

    // 2x2 eigen decomposition A = R diag(lo, hi) R^{-1}.
    const double tr_gap = a(0, 0) - a(1, 1);
    const double disc = tr_gap * tr_gap + 4.0 * a(0, 1) * a(1, 0);
    if (disc <= 1e-12 * scale * scale &&
        (std::abs(a(0, 1)) > 1e-12 * scale || std::abs(a(1, 0)) > 1e-12 * scale)) {
        throw std::invalid_argument("make_smooth_linear: the flux Jacobian is not diagonalizable");
    }
    const EigRange eig = real_eigenvalues(a);
    Mat r = Mat::identity(2);
    if (disc > 1e-12 * scale * scale) {
        const double lams[2] = {eig.lo, eig.hi};
        for (int k = 0; k < 2; ++k) {
            // Null vector of A - lam I; take the better-conditioned column.
            Vec v1{a(0, 1), lams[k] - a(0, 0)};
            Vec v2{lams[k] - a(1, 1), a(1, 0)};
            Vec v = v1.norm_inf() >= v2.norm_inf() ? v1 : v2;
            const double len = std::sqrt(v.dot(v));
            r(0, k) = v[0] / len;
            r(1, k) = v[1] / len;
        }
    }
    const Mat l = inverse(r);

    ex.eval = [profile = std::move(profile), r, l, eig](double t, double x) {
        const double lams[2] = {eig.lo, eig.hi};
        Vec u(2);
        for (int k = 0; k < 2; ++k) {
            const Vec p = profile(x - lams[k] * t);
            const double w = l(k, 0) * p[0] + l(k, 1) * p[1];
            u[0] += w * r(0, k);
            u[1] += w * r(1, k);
        }
        return u;
    };
    return ex;
}

// ---------------------------------------------------------------------------
// Hugoniot locus

Vec hugoniot_state(const System& sys, const Vec& uL, double first_component, int family) {
    if (sys.dim() != 2) {
        throw std::invalid_argument("hugoniot_state: needs a 2-component system, got " + sys.name());
    }
    if (family != 1 && family != 2) {
        throw std::invalid_argument("hugoniot_state: family must be 1 (slow) or 2 (fast)");
    }
    check_state(sys, uL, "hugoniot_state", "left");
    Vec probe{first_component, uL[1]};
    if (!sys.admissible(probe)) {
        throw std::invalid_argument("hugoniot_state: leading component " +
                                    format_double(first_component) + " is not admissible for " +
                                    sys.name());
    }
    const double dd = first_component - uL[0];
    if (std::abs(dd) < 1e-14 * std::max(1.0, std::abs(uL[0]))) {
        throw std::invalid_argument("hugoniot_state: the leading component must differ from the left state");
    }

    const Vec fl = sys.flux(uL);
    if (std::abs(fl[0] - uL[1]) > 1e-12 * std::max(1.0, std::abs(uL[1]))) {
        throw std::invalid_argument("hugoniot_state: " + sys.name() +
                                    " does not have the mass-flux structure f1(u) = u2");
    }

    // With f1 = u2 the jump speed at uR = (c, m) is (m - uL2) / dd, and the
    // remaining Rankine-Hugoniot relation is the scalar equation
    //   G(m) = f2(c, m) - f2(uL) - (m - uL2)^2 / dd = 0
    // with derivative dG/dm = d f2 / d m (c, m) - 2 (m - uL2) / dd.
    const double c = first_component;
    const double wl = uL[1];
    const double f2l = fl[1];
    auto g = [&](double m) {
        const Vec ur{c, m};
        const double dw = m - wl;
        return sys.flux(ur)[1] - f2l - dw * dw / dd;
    };
    auto gprime = [&](double m) {
        const Vec ur{c, m};
        return sys.flux_jacobian(ur)(1, 1) - 2.0 * (m - wl) / dd;
    };

    // Bracket the requested branch. Linearizing the locus at uL puts the slow
    // root near wl + lo * dd and the fast root near wl + hi * dd, with the
    // branch point near the mean speed; walk outward from the mean until G
    // changes sign.
    const EigRange eig = real_eigenvalues(sys.flux_jacobian(uL));
    const double guess = wl + (family == 1 ? eig.lo : eig.hi) * dd;
    const double mid = wl + 0.5 * (eig.lo + eig.hi) * dd;
    const double dir = guess >= mid ? 1.0 : -1.0;
    const double step = std::max({1.0, std::abs(guess - mid), std::abs(wl)});

    double a = mid;
    double ga = g(a);
    double b = a;
    double gb = ga;
    bool bracketed = false;
    for (int k = 0; k < 60 && !bracketed; ++k) {
        b = mid + dir * step * std::ldexp(1.0, k);
        gb = g(b);
        if ((ga <= 0.0) != (gb <= 0.0)) {
            bracketed = true;
        } else {
            a = b;
            ga = gb;
        }
    }
    if (!bracketed) {
        throw std::runtime_error("hugoniot_state: no branch-" + std::to_string(family) +
                                 " state with leading component " + format_double(c));
    }
    if (a > b) {
        std::swap(a, b);
        std::swap(ga, gb);
    }

    // Safeguarded Newton: bisect whenever the Newton step leaves the bracket.
    const double gscale = std::max(1.0, std::abs(f2l));
    double x = 0.5 * (a + b);
    for (int it = 0; it < 200; ++it) {
        const double gx = g(x);
        if ((gx <= 0.0) == (ga <= 0.0)) {
            a = x;
            ga = gx;
        } else {
            b = x;
        }
        if (std::abs(gx) <= kRootTol * gscale && b - a <= 1e-12 * std::max(1.0, std::abs(x))) break;
        const double dg = gprime(x);
        double next = dg != 0.0 ? x - gx / dg : x;
        if (!(next > a && next < b)) next = 0.5 * (a + b);
        if (next == x) break;
        x = next;
    }

    const Vec ur{c, x};
    if (!sys.admissible(ur)) {
        throw std::runtime_error("hugoniot_state: the computed state is not admissible");
    }
    const ShockFit fit = fit_shock(sys, uL, ur);
    if (fit.rh_residual > kRootTol * 10.0) {
        throw std::runtime_error("hugoniot_state: Newton stalled (residual = " +
                                 format_double(fit.rh_residual) + ")");
    }
    return ur;
}

}  // namespace hyp1d
