#include "hyp1d/cert.hpp"

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <stdexcept>
#include <string>
#include <vector>

#include "json.hpp"

namespace hyp1d {

namespace {

bool bits_equal(const Vec& a, const Vec& b) {
    if (a.size() != b.size()) return false;
    for (int i = 0; i < a.size(); ++i)
        if (a[i] != b[i]) return false;
    return true;
}

// ---------------------------------------------------------------------------
// Split-interval Gauss rules. bounds = lo < knots inside < hi; the flattened
// node/weight arrays concatenate the mapped Gauss rule of every piece.

void piece_bounds(double lo, double hi, const std::vector<double>& knots,
                  std::vector<double>& out) {
    out.clear();
    out.push_back(lo);
    for (double k : knots)
        if (k > lo && k < hi) out.push_back(k);
    std::sort(out.begin(), out.end());
    out.push_back(hi);
}

void gauss_on_pieces(const std::vector<double>& bounds, const Quadrature& rule,
                     std::vector<double>& xs, std::vector<double>& ws) {
    xs.clear();
    ws.clear();
    for (std::size_t p = 0; p + 1 < bounds.size(); ++p) {
        const double a = bounds[p], b = bounds[p + 1];
        if (!(b > a)) continue;
        const double mid = 0.5 * (a + b), half = 0.5 * (b - a);
        for (std::size_t i = 0; i < rule.nodes.size(); ++i) {
            xs.push_back(mid + half * rule.nodes[i]);
            ws.push_back(half * rule.weights[i]);
        }
    }
}

void require_support_inside(const TestFunction& phi, const Grid1D& g, const char* who) {
    if (!(phi.box.x_lo <= phi.box.x_hi) || !(phi.box.t_lo <= phi.box.t_hi))
        throw std::invalid_argument(std::string(who) + ": test function support box is empty");
    const double slack =
        1e-12 * std::max({1.0, std::abs(g.xmin), std::abs(g.xmax)});
    if (phi.box.x_lo < g.xmin - slack || phi.box.x_hi > g.xmax + slack)
        throw std::invalid_argument(
            std::string(who) + ": test function support [" + format_double(phi.box.x_lo) + ", " +
            format_double(phi.box.x_hi) + "] exceeds the grid window [" + format_double(g.xmin) +
            ", " + format_double(g.xmax) + "]");
}

void require_quad(const QuadSpec& quad, const char* who) {
    if (quad.time_nodes < 1 || quad.space_nodes < 1)
        throw std::invalid_argument(std::string(who) + ": quadrature orders must be positive");
}

// ---------------------------------------------------------------------------
// Integrand forms and per-level field adaptors. A form maps a state to the
// densities multiplying phi_t and phi_x; a level adaptor evaluates the field
// inside a cell. PC fields are flagged constant per cell so the test-function
// integrals hoist out of the state evaluation.

struct ConservedForm {
    const System& sys;
    int comps() const { return sys.dim(); }
    Vec density(const Vec& u) const { return u; }
    Vec fluxw(const Vec& u) const { return sys.flux(u); }
};

struct EntropyForm {
    const System& sys;
    int comps() const { return 1; }
    Vec density(const Vec& u) const { return Vec{sys.entropy(u)}; }
    Vec fluxw(const Vec& u) const { return Vec{sys.entropy_flux(u)}; }
};

struct PcLevel {
    const PCField& u;
    static constexpr bool cellwise_constant = true;
    const Grid1D& grid() const { return u.grid(); }
    Vec at(int j, double) const { return u.value(j); }
};

struct DgLevel {
    const DGField& u;
    static constexpr bool cellwise_constant = false;
    const Grid1D& grid() const { return u.grid(); }
    Vec at(int j, double x) const {
        const Grid1D& g = u.grid();
        return u.eval(j, 2.0 * (x - g.center(j)) / g.h);
    }
};

// Scratch buffers reused across the per-cell loop of one step term.
struct QuadScratch {
    std::vector<double> bounds, tg, tw, xg, xw;
};

// sum over the tile ([t0,t1] x cell j) clipped to phi's support of
// u phi_t + f(u) phi_x (per component of the form), added into out[].
template <class Level, class Form>
void step_term_core(const Level& lev, const Form& form, const TestFunction& phi, double t0,
                    double t1, const QuadSpec& quad, QuadScratch& scr, double* out) {
    const Grid1D& g = lev.grid();
    const double ta = std::max(t0, phi.box.t_lo), tb = std::min(t1, phi.box.t_hi);
    if (!(tb > ta)) return;
    piece_bounds(ta, tb, phi.t_splits, scr.bounds);
    gauss_on_pieces(scr.bounds, gauss_legendre(quad.time_nodes), scr.tg, scr.tw);

    const int j0 = g.locate(std::max(phi.box.x_lo, g.xmin));
    const int j1 = g.locate(std::min(phi.box.x_hi, g.xmax));
    const Quadrature& qx = gauss_legendre(quad.space_nodes);
    const int nt = static_cast<int>(scr.tg.size());
    const int nc = form.comps();

    for (int j = j0; j <= j1; ++j) {
        const double xa = std::max(g.face(j), phi.box.x_lo);
        const double xb = std::min(g.face(j + 1), phi.box.x_hi);
        if (!(xb > xa)) continue;
        piece_bounds(xa, xb, phi.x_splits, scr.bounds);
        gauss_on_pieces(scr.bounds, qx, scr.xg, scr.xw);
        if constexpr (Level::cellwise_constant) {
            double it = 0.0, ix = 0.0;
            for (std::size_t p = 0; p < scr.xg.size(); ++p) {
                const double x = scr.xg[p];
                double st = 0.0, sx = 0.0;
                for (int k = 0; k < nt; ++k) {
                    st += scr.tw[k] * phi.dt(scr.tg[k], x);
                    sx += scr.tw[k] * phi.dx(scr.tg[k], x);
                }
                it += scr.xw[p] * st;
                ix += scr.xw[p] * sx;
            }
            const Vec dens = form.density(lev.at(j, g.center(j)));
            const Vec flw = form.fluxw(lev.at(j, g.center(j)));
            for (int i = 0; i < nc; ++i) out[i] += dens[i] * it + flw[i] * ix;
        } else {
            for (std::size_t p = 0; p < scr.xg.size(); ++p) {
                const double x = scr.xg[p];
                const Vec u = lev.at(j, x);
                const Vec dens = form.density(u);
                const Vec flw = form.fluxw(u);
                double st = 0.0, sx = 0.0;
                for (int k = 0; k < nt; ++k) {
                    st += scr.tw[k] * phi.dt(scr.tg[k], x);
                    sx += scr.tw[k] * phi.dx(scr.tg[k], x);
                }
                for (int i = 0; i < nc; ++i) out[i] += scr.xw[p] * (dens[i] * st + flw[i] * sx);
            }
        }
    }
}

// int u(x) phi(t, x) dx (per component of the form), added into out[].
template <class Level, class Form>
void boundary_term_core(const Level& lev, const Form& form, const TestFunction& phi, double t,
                        const QuadSpec& quad, QuadScratch& scr, double* out) {
    if (t < phi.box.t_lo || t > phi.box.t_hi) return;
    const Grid1D& g = lev.grid();
    const int j0 = g.locate(std::max(phi.box.x_lo, g.xmin));
    const int j1 = g.locate(std::min(phi.box.x_hi, g.xmax));
    const Quadrature& qx = gauss_legendre(quad.space_nodes);
    const int nc = form.comps();

    for (int j = j0; j <= j1; ++j) {
        const double xa = std::max(g.face(j), phi.box.x_lo);
        const double xb = std::min(g.face(j + 1), phi.box.x_hi);
        if (!(xb > xa)) continue;
        piece_bounds(xa, xb, phi.x_splits, scr.bounds);
        gauss_on_pieces(scr.bounds, qx, scr.xg, scr.xw);
        if constexpr (Level::cellwise_constant) {
            double coef = 0.0;
            for (std::size_t p = 0; p < scr.xg.size(); ++p)
                coef += scr.xw[p] * phi.value(t, scr.xg[p]);
            const Vec dens = form.density(lev.at(j, g.center(j)));
            for (int i = 0; i < nc; ++i) out[i] += dens[i] * coef;
        } else {
            for (std::size_t p = 0; p < scr.xg.size(); ++p) {
                const Vec dens = form.density(lev.at(j, scr.xg[p]));
                const double w = scr.xw[p] * phi.value(t, scr.xg[p]);
                for (int i = 0; i < nc; ++i) out[i] += dens[i] * w;
            }
        }
    }
}

template <class Traj>
void require_level_range(const Traj& traj, int n, int m, const char* who) {
    if (n < 0 || m <= n || m >= static_cast<int>(traj.levels.size()))
        throw std::invalid_argument(std::string(who) + ": level range [" + std::to_string(n) +
                                    ", " + std::to_string(m) +
                                    "] needs 0 <= n < m within the stored levels (" +
                                    std::to_string(traj.levels.size()) + " stored)");
}

template <class Traj>
double sup_tv_over(const Traj& traj, int n, int m) {
    double sup = 0.0;
    for (int k = n; k <= m; ++k) sup = std::max(sup, traj.tv[static_cast<std::size_t>(k)]);
    return sup;
}

// Shared driver: per-step contributions in parallel, fixed-order reduction,
// boundary terms, normalization.
template <class Traj, class LevelAdapter, class Form>
WeakResidual residual_core(const Traj& traj, const Form& form, const TestFunction& phi, int n,
                           int m, const QuadSpec& quad, bool signed_normalization,
                           const char* who) {
    require_level_range(traj, n, m, who);
    require_quad(quad, who);
    require_support_inside(phi, traj.levels.front().grid(), who);

    const int nc = form.comps();
    const int nsteps = m - n;
    std::vector<double> contrib(static_cast<std::size_t>(nsteps) * nc, 0.0);
    parallel_chunks(nsteps, [&](std::int64_t b, std::int64_t e) {
        QuadScratch scr;
        for (std::int64_t k = b; k < e; ++k) {
            const int lev = n + static_cast<int>(k);
            step_term_core(LevelAdapter{traj.levels[static_cast<std::size_t>(lev)]}, form, phi,
                           traj.t(lev), traj.t(lev + 1), quad, scr,
                           &contrib[static_cast<std::size_t>(k) * nc]);
        }
    });

    WeakResidual res;
    res.signed_components = Vec(nc);
    for (int k = 0; k < nsteps; ++k)
        for (int i = 0; i < nc; ++i)
            res.signed_components[i] += contrib[static_cast<std::size_t>(k) * nc + i];

    QuadScratch scr;
    std::vector<double> bn(static_cast<std::size_t>(nc), 0.0), bm(static_cast<std::size_t>(nc), 0.0);
    boundary_term_core(LevelAdapter{traj.levels[static_cast<std::size_t>(n)]}, form, phi,
                       traj.t(n), quad, scr, bn.data());
    boundary_term_core(LevelAdapter{traj.levels[static_cast<std::size_t>(m)]}, form, phi,
                       traj.t(m), quad, scr, bm.data());
    for (int i = 0; i < nc; ++i)
        res.signed_components[i] += bn[static_cast<std::size_t>(i)] - bm[static_cast<std::size_t>(i)];

    res.residual = res.signed_components.norm_inf();
    res.denominator = phi.w1inf_norm * (traj.t(m) - traj.t(n)) * sup_tv_over(traj, n, m);
    const double raw = signed_normalization ? res.signed_components[0] : res.residual;
    res.normalized = res.denominator > 0.0 ? raw / res.denominator : raw;
    return res;
}

Vec entropy_vars(const System& sys, const Vec& u) { return sys.entropy_gradient(u); }

Vec path_state(const System& sys, const Vec& v, const Vec& seed, double s, const char* who) {
    try {
        return sys.from_entropy(v, seed);
    } catch (const std::exception& e) {
        throw std::runtime_error(std::string(who) +
                                 ": entropy segment leaves the admissible set at s = " +
                                 format_double(s) + " (" + e.what() + ")");
    }
}

}  // namespace

// ---------------------------------------------------------------------------
// Test functions

TestFunction make_bump(double t0, double x0, double rt, double rx, double amplitude) {
    if (!(rt > 0.0) || !(rx > 0.0))
        throw std::invalid_argument("make_bump: radii must be positive");
    auto prof = [](double s) {
        const double w = 1.0 - s * s;
        return w > 0.0 ? w * w : 0.0;
    };
    auto dprof = [](double s) {
        const double w = 1.0 - s * s;
        return w > 0.0 ? -4.0 * s * w : 0.0;
    };
    TestFunction phi;
    phi.value = [=](double t, double x) {
        return amplitude * prof((t - t0) / rt) * prof((x - x0) / rx);
    };
    phi.dt = [=](double t, double x) {
        return amplitude / rt * dprof((t - t0) / rt) * prof((x - x0) / rx);
    };
    phi.dx = [=](double t, double x) {
        return amplitude / rx * prof((t - t0) / rt) * dprof((x - x0) / rx);
    };
    phi.box = {t0 - rt, t0 + rt, x0 - rx, x0 + rx};
    // max |d/ds (1-s^2)^2| = 8 / (3 sqrt 3), attained at s = 1 / sqrt 3
    const double dmax = 8.0 / (3.0 * std::sqrt(3.0));
    phi.w1inf_norm = std::abs(amplitude) * std::max({1.0, dmax / rt, dmax / rx});
    phi.nonneg = amplitude >= 0.0;
    return phi;
}

// ---------------------------------------------------------------------------
// Lipschitz-in-time constant

namespace {

template <class Traj>
double lc_core(const Traj& traj, int n, int m) {
    require_level_range(traj, n, m, "lc_constant");
    const double num = l1_distance(traj.levels[static_cast<std::size_t>(m)],
                                   traj.levels[static_cast<std::size_t>(n)]);
    const double sup = sup_tv_over(traj, n, m);
    if (sup == 0.0) {
        if (num > 0.0)
            throw std::logic_error(
                "lc_constant: levels moved while every level has zero variation; a conservative "
                "scheme cannot do this (L1 change = " +
                format_double(num) + ")");
        return 0.0;
    }
    return num / ((traj.t(m) - traj.t(n)) * sup);
}

}  // namespace

double lc_constant(const Trajectory& traj, int n, int m) { return lc_core(traj, n, m); }
double lc_constant(const DgTrajectory& traj, int n, int m) { return lc_core(traj, n, m); }

// ---------------------------------------------------------------------------
// Weak residuals and their building blocks

WeakResidual wc_residual(const System& sys, const Trajectory& traj, const TestFunction& phi,
                         int n, int m, const QuadSpec& quad) {
    return residual_core<Trajectory, PcLevel>(traj, ConservedForm{sys}, phi, n, m, quad, false,
                                              "wc_residual");
}

WeakResidual wc_residual(const System& sys, const DgTrajectory& traj, const TestFunction& phi,
                         int n, int m, const QuadSpec& quad) {
    return residual_core<DgTrajectory, DgLevel>(traj, ConservedForm{sys}, phi, n, m, quad, false,
                                                "wc_residual");
}

WeakResidual wes_residual(const System& sys, const Trajectory& traj, const TestFunction& phi,
                          int n, int m, const QuadSpec& quad) {
    if (!phi.nonneg)
        throw std::invalid_argument("wes_residual: the test function must be flagged nonneg");
    return residual_core<Trajectory, PcLevel>(traj, EntropyForm{sys}, phi, n, m, quad, true,
                                              "wes_residual");
}

WeakResidual wes_residual(const System& sys, const DgTrajectory& traj, const TestFunction& phi,
                          int n, int m, const QuadSpec& quad) {
    if (!phi.nonneg)
        throw std::invalid_argument("wes_residual: the test function must be flagged nonneg");
    return residual_core<DgTrajectory, DgLevel>(traj, EntropyForm{sys}, phi, n, m, quad, true,
                                                "wes_residual");
}

namespace {

template <class LevelAdapter, class Field, class Form>
Vec step_term_one(const Field& u, const Form& form, const TestFunction& phi, double t0, double t1,
                  const QuadSpec& quad, const char* who) {
    require_quad(quad, who);
    require_support_inside(phi, u.grid(), who);
    if (!(t1 > t0)) throw std::invalid_argument(std::string(who) + ": needs t1 > t0");
    Vec out(form.comps());
    QuadScratch scr;
    double buf[kMaxComp] = {};
    step_term_core(LevelAdapter{u}, form, phi, t0, t1, quad, scr, buf);
    for (int i = 0; i < form.comps(); ++i) out[i] = buf[i];
    return out;
}

template <class LevelAdapter, class Field, class Form>
Vec boundary_term_one(const Field& u, const Form& form, const TestFunction& phi, double t,
                      const QuadSpec& quad, const char* who) {
    require_quad(quad, who);
    require_support_inside(phi, u.grid(), who);
    Vec out(form.comps());
    QuadScratch scr;
    double buf[kMaxComp] = {};
    boundary_term_core(LevelAdapter{u}, form, phi, t, quad, scr, buf);
    for (int i = 0; i < form.comps(); ++i) out[i] = buf[i];
    return out;
}

}  // namespace

Vec wc_step_term(const System& sys, const PCField& u, const TestFunction& phi, double t0,
                 double t1, const QuadSpec& quad) {
    return step_term_one<PcLevel>(u, ConservedForm{sys}, phi, t0, t1, quad, "wc_step_term");
}
Vec wc_step_term(const System& sys, const DGField& u, const TestFunction& phi, double t0,
                 double t1, const QuadSpec& quad) {
    return step_term_one<DgLevel>(u, ConservedForm{sys}, phi, t0, t1, quad, "wc_step_term");
}
namespace {

// boundary terms only read the density; the state itself works flux-free
struct StateForm {
    int dim;
    int comps() const { return dim; }
    Vec density(const Vec& u) const { return u; }
    Vec fluxw(const Vec& u) const { return u; }
};

}  // namespace

Vec wc_boundary_term(const PCField& u, const TestFunction& phi, double t, const QuadSpec& quad) {
    return boundary_term_one<PcLevel>(u, StateForm{u.dim()}, phi, t, quad, "wc_boundary_term");
}
Vec wc_boundary_term(const DGField& u, const TestFunction& phi, double t, const QuadSpec& quad) {
    return boundary_term_one<DgLevel>(u, StateForm{u.dim()}, phi, t, quad, "wc_boundary_term");
}
double wes_step_term(const System& sys, const PCField& u, const TestFunction& phi, double t0,
                     double t1, const QuadSpec& quad) {
    return step_term_one<PcLevel>(u, EntropyForm{sys}, phi, t0, t1, quad, "wes_step_term")[0];
}
double wes_step_term(const System& sys, const DGField& u, const TestFunction& phi, double t0,
                     double t1, const QuadSpec& quad) {
    return step_term_one<DgLevel>(u, EntropyForm{sys}, phi, t0, t1, quad, "wes_step_term")[0];
}
double wes_boundary_term(const System& sys, const PCField& u, const TestFunction& phi, double t,
                         const QuadSpec& quad) {
    return boundary_term_one<PcLevel>(u, EntropyForm{sys}, phi, t, quad, "wes_boundary_term")[0];
}
double wes_boundary_term(const System& sys, const DGField& u, const TestFunction& phi, double t,
                         const QuadSpec& quad) {
    return boundary_term_one<DgLevel>(u, EntropyForm{sys}, phi, t, quad, "wes_boundary_term")[0];
}

// ---------------------------------------------------------------------------
// Flux Lipschitz bound

double flux_lipschitz_bound(const NumericalFlux& flux, const PCField& u, const Vec& pad_left,
                            const Vec& pad_right, int samples) {
    if (samples < 2) throw std::invalid_argument("flux_lipschitz_bound: needs samples >= 2");
    const int nc = u.grid().cells;
    double bound = 0.0;
    for (int i = 0; i <= nc; ++i) {
        const Vec a = i == 0 ? pad_left : u.value(i - 1);
        const Vec b = i == nc ? pad_right : u.value(i);
        if (bits_equal(a, b)) continue;  // zero-jump faces contribute nothing to the L1 change
        const FrozenFlux fz = flux.freeze(a, b);
        const Vec d = b - a;
        for (int k = 0; k < samples; ++k) {
            const double s = static_cast<double>(k) / (samples - 1);
            const Vec us = a + s * d;
            bound = std::max(bound, flux.deriv_left(fz, us, b).norm1());
            bound = std::max(bound, flux.deriv_right(fz, a, us).norm1());
        }
    }
    return bound;
}

// ---------------------------------------------------------------------------
// Numerical entropy fluxes

double numerical_entropy_flux(const NumericalFlux& flux, const Vec& vl, const Vec& vr,
                              EntropyFluxSide side, int quad_nodes) {
    const System& sys = flux.sys();
    if (vl.size() != sys.dim() || vr.size() != sys.dim())
        throw std::invalid_argument("numerical_entropy_flux: entropy state dimension mismatch");
    if (quad_nodes < 1)
        throw std::invalid_argument("numerical_entropy_flux: needs quad_nodes >= 1");
    const char* who = "numerical_entropy_flux";
    const Vec ul = path_state(sys, vl, sys.entropy_seed(vl), 0.0, who);
    const Vec ur = path_state(sys, vr, ul, 1.0, who);
    const FrozenFlux fz = flux.freeze(ul, ur);
    const Vec dv = vr - vl;

    double acc = 0.0;
    const Quadrature& rule = gauss_legendre(quad_nodes);
    Vec seed = ul;
    for (std::size_t g = 0; g < rule.nodes.size(); ++g) {
        const double s = 0.5 * (rule.nodes[g] + 1.0);
        const double w = 0.5 * rule.weights[g];
        const Vec vs = vl + s * dv;
        const Vec us = path_state(sys, vs, seed, s, who);
        seed = us;
        // D Ftilde . dv = D F . H(u(s))^{-1} dv, viscosity frozen at (ul, ur)
        const Vec dw = solve(sys.entropy_hessian(us), dv);
        const Mat d = side == EntropyFluxSide::right ? flux.deriv_right(fz, ul, us)
                                                     : flux.deriv_left(fz, us, ur);
        acc += w * vs.dot(d.apply(dw));
    }
    return side == EntropyFluxSide::right ? acc + sys.entropy_flux(ul)
                                          : -acc + sys.entropy_flux(ur);
}

// ---------------------------------------------------------------------------
// Dissipation balance

DissipationBalance dissipation_balance(const NumericalFlux& flux, const PCField& from,
                                       const PCField& to, const Vec& pad_left,
                                       const Vec& pad_right, int quad_nodes) {
    const System& sys = flux.sys();
    if (!from.grid().same_as(to.grid()))
        throw std::invalid_argument("dissipation_balance: levels live on different grids");
    if (quad_nodes < 1)
        throw std::invalid_argument("dissipation_balance: needs quad_nodes >= 1");
    const char* who = "dissipation_balance";
    const int nc = from.grid().cells;
    const Quadrature& rule = gauss_legendre(quad_nodes);

    DissipationBalance bal;
    bal.antidiss.assign(static_cast<std::size_t>(nc), 0.0);
    bal.diss_left.assign(static_cast<std::size_t>(nc) + 1, 0.0);
    bal.diss_right.assign(static_cast<std::size_t>(nc) + 1, 0.0);

    std::vector<Vec> face_flux(static_cast<std::size_t>(nc) + 1);
    for (int i = 0; i <= nc; ++i) {
        const Vec a = i == 0 ? pad_left : from.value(i - 1);
        const Vec b = i == nc ? pad_right : from.value(i);
        if (bits_equal(a, b)) {
            face_flux[static_cast<std::size_t>(i)] = sys.flux(a);  // the solver's exact value
            continue;
        }
        const FrozenFlux fz = flux.freeze(a, b);
        face_flux[static_cast<std::size_t>(i)] = flux.value(fz, a, b);

        const Vec va = entropy_vars(sys, a), vb = entropy_vars(sys, b);
        const Vec dv = vb - va;
        double right_raw = 0.0, left_raw = 0.0;
        Vec seed = a;
        for (std::size_t g = 0; g < rule.nodes.size(); ++g) {
            const double s = 0.5 * (rule.nodes[g] + 1.0);
            const double w = 0.5 * rule.weights[g];
            const Vec vs = va + s * dv;
            const Vec us = path_state(sys, vs, seed, s, who);
            seed = us;
            const Vec dw = solve(sys.entropy_hessian(us), dv);
            right_raw += w * s * dv.dot(flux.deriv_right(fz, a, us).apply(dw));
            left_raw += w * (1.0 - s) * dv.dot(flux.deriv_left(fz, us, b).apply(dw));
        }
        bal.diss_right[static_cast<std::size_t>(i)] = -right_raw;
        bal.diss_left[static_cast<std::size_t>(i)] = left_raw;
    }

    for (int j = 0; j < nc; ++j) {
        const Vec dgrad = entropy_vars(sys, to.value(j)) - entropy_vars(sys, from.value(j));
        bal.antidiss[static_cast<std::size_t>(j)] =
            dgrad.dot(face_flux[static_cast<std::size_t>(j) + 1] -
                      face_flux[static_cast<std::size_t>(j)]);
    }

    double net = 0.0;
    for (int j = 0; j < nc; ++j) net += bal.antidiss[static_cast<std::size_t>(j)];
    for (int i = 0; i <= nc; ++i)
        net += bal.diss_left[static_cast<std::size_t>(i)] +
               bal.diss_right[static_cast<std::size_t>(i)];
    bal.net = net;
    return bal;
}

DissipationBalance dissipation_balance(const NumericalFlux& flux, const Trajectory& traj, int n,
                                       int quad_nodes) {
    require_level_range(traj, n, n + 1, "dissipation_balance");
    const PCField& u0 = traj.levels.front();
    const Vec pad_left = u0.value(0);
    const Vec pad_right = u0.value(u0.grid().cells - 1);
    return dissipation_balance(flux, traj.levels[static_cast<std::size_t>(n)],
                               traj.levels[static_cast<std::size_t>(n) + 1], pad_left, pad_right,
                               quad_nodes);
}

// ---------------------------------------------------------------------------
// Oscillation profiles

namespace {

void add_face_jumps(std::vector<double>& osc, int nc,
                    const std::function<double(int)>& jump_at_face, bool with_pads) {
    for (int i = 1; i < nc; ++i) {
        const double j = jump_at_face(i);
        osc[static_cast<std::size_t>(i) - 1] += j;
        osc[static_cast<std::size_t>(i)] += j;
    }
    if (with_pads) {
        osc[0] += jump_at_face(0);
        osc[static_cast<std::size_t>(nc) - 1] += jump_at_face(nc);
    }
}

std::vector<double> pc_osc(const PCField& u, const Vec* pl, const Vec* pr) {
    const int nc = u.grid().cells;
    std::vector<double> osc(static_cast<std::size_t>(nc), 0.0);
    auto jump = [&](int i) {
        const Vec a = i == 0 ? *pl : u.value(i - 1);
        const Vec b = i == nc ? *pr : u.value(i);
        return (b - a).norm1();
    };
    add_face_jumps(osc, nc, jump, pl != nullptr);
    return osc;
}

std::vector<double> dg_osc(const DGField& u, const Vec* pl, const Vec* pr) {
    const int nc = u.grid().cells;
    std::vector<double> osc(static_cast<std::size_t>(nc), 0.0);
    // |u_x|_{L1(I_j)} = int_{-1}^1 |sum_m c_m P_m'(xi)|_1 dxi; the h/2 cell
    // Jacobian cancels the 2/h derivative chain factor.
    const Quadrature& rule = gauss_legendre(u.degree() + 1);
    for (int j = 0; j < nc; ++j) {
        double acc = 0.0;
        for (std::size_t g = 0; g < rule.nodes.size(); ++g) {
            Vec du(u.dim());
            for (int m = 1; m <= u.degree(); ++m) {
                const double pd = legendre_deriv(m, rule.nodes[g]);
                const Vec c = u.coeff(j, m);
                for (int i = 0; i < u.dim(); ++i) du[i] += pd * c[i];
            }
            acc += rule.weights[g] * du.norm1();
        }
        osc[static_cast<std::size_t>(j)] = acc;
    }
    auto jump = [&](int i) {
        const Vec a = i == 0 ? *pl : u.trace_right(i - 1);
        const Vec b = i == nc ? *pr : u.trace_left(i);
        return (b - a).norm1();
    };
    add_face_jumps(osc, nc, jump, pl != nullptr);
    return osc;
}

}  // namespace

std::vector<double> oscillation_profile(const PCField& u) { return pc_osc(u, nullptr, nullptr); }
std::vector<double> oscillation_profile(const PCField& u, const Vec& pad_left,
                                        const Vec& pad_right) {
    return pc_osc(u, &pad_left, &pad_right);
}
std::vector<double> oscillation_profile(const DGField& u) { return dg_osc(u, nullptr, nullptr); }
std::vector<double> oscillation_profile(const DGField& u, const Vec& pad_left,
                                        const Vec& pad_right) {
    return dg_osc(u, &pad_left, &pad_right);
}

// ---------------------------------------------------------------------------
// Shock curves

double ShockCurve::position(double time) const {
    if (t.empty()) return 0.0;
    if (time <= t.front()) return x.front();
    if (time >= t.back()) return x.back();
    const auto it = std::upper_bound(t.begin(), t.end(), time);
    const std::size_t k = static_cast<std::size_t>(it - t.begin());
    const double w = (time - t[k - 1]) / (t[k] - t[k - 1]);
    return x[k - 1] + w * (x[k] - x[k - 1]);
}

double ShockCurve::slope() const {
    const std::size_t n = t.size();
    if (n < 2) return 0.0;
    double tbar = 0.0, xbar = 0.0;
    for (std::size_t i = 0; i < n; ++i) {
        tbar += t[i];
        xbar += x[i];
    }
    tbar /= static_cast<double>(n);
    xbar /= static_cast<double>(n);
    double num = 0.0, den = 0.0;
    for (std::size_t i = 0; i < n; ++i) {
        num += (t[i] - tbar) * (x[i] - xbar);
        den += (t[i] - tbar) * (t[i] - tbar);
    }
    return den > 0.0 ? num / den : 0.0;
}

ShockTracker::ShockTracker(const Grid1D& grid, double jump_factor, int min_lifetime)
    : grid_(grid), min_lifetime_(min_lifetime) {
    if (!(jump_factor > 0.0))
        throw std::invalid_argument("ShockTracker: jump factor must be positive");
    if (min_lifetime < 1) throw std::invalid_argument("ShockTracker: min lifetime must be >= 1");
    tube_radius_ = std::cbrt(grid.h * grid.h);
    threshold_ = jump_factor * tube_radius_;
}

// Cells whose local oscillation exceeds the threshold; adjacent runs merge
// into oscillation-weighted fronts. Cell oscillation rather than the bare
// face jump keeps a front visible while it crosses a cell interior, where a
// piecewise-linear field carries it as a steep slope with tiny trace jumps.
void ShockTracker::feed(double t, const std::vector<double>& osc) {
    if (static_cast<int>(osc.size()) != grid_.cells)
        throw std::invalid_argument("ShockTracker: oscillation profile does not match the grid");
    if (!times_.empty() && !(t > times_.back()))
        throw std::invalid_argument("ShockTracker: levels must arrive in increasing time order");
    std::vector<double> fronts;
    double wsum = 0.0, wxsum = 0.0;
    int prev = -2;
    auto flush = [&] {
        if (wsum > 0.0) fronts.push_back(wxsum / wsum);
        wsum = wxsum = 0.0;
    };
    for (int j = 0; j < grid_.cells; ++j) {
        if (!(osc[j] > threshold_)) continue;
        if (j != prev + 1) flush();
        wsum += osc[j];
        wxsum += osc[j] * grid_.center(j);
        prev = j;
    }
    flush();
    times_.push_back(t);
    fronts_.push_back(std::move(fronts));
}

ShockCurveSet ShockTracker::finish(double link_tol) const {
    ShockCurveSet set;
    set.tube_radius = tube_radius_;

    struct Track {
        std::vector<double> t, x;
    };
    std::vector<Track> tracks;
    std::vector<std::size_t> active;  // tracks extended at the previous level
    for (std::size_t n = 0; n < times_.size(); ++n) {
        const double tn = times_[n];
        const std::vector<double>& fronts = fronts_[n];

        // greedy nearest matching of last positions to fronts
        struct Cand {
            double dist;
            std::size_t a, f;
        };
        std::vector<Cand> cands;
        for (std::size_t a = 0; a < active.size(); ++a)
            for (std::size_t f = 0; f < fronts.size(); ++f) {
                const double d = std::abs(tracks[active[a]].x.back() - fronts[f]);
                if (d <= link_tol) cands.push_back({d, a, f});
            }
        std::sort(cands.begin(), cands.end(), [](const Cand& p, const Cand& q) {
            if (p.dist != q.dist) return p.dist < q.dist;
            if (p.a != q.a) return p.a < q.a;
            return p.f < q.f;
        });
        std::vector<bool> a_used(active.size(), false), f_used(fronts.size(), false);
        std::vector<std::size_t> next_active;
        for (const Cand& c : cands) {
            if (a_used[c.a] || f_used[c.f]) continue;
            a_used[c.a] = f_used[c.f] = true;
            Track& tr = tracks[active[c.a]];
            tr.t.push_back(tn);
            tr.x.push_back(fronts[c.f]);
            next_active.push_back(active[c.a]);
        }
        for (std::size_t f = 0; f < fronts.size(); ++f) {
            if (f_used[f]) continue;
            tracks.push_back({{tn}, {fronts[f]}});
            next_active.push_back(tracks.size() - 1);
        }
        std::sort(next_active.begin(), next_active.end());
        active = std::move(next_active);
    }

    for (const Track& tr : tracks) {
        if (static_cast<int>(tr.t.size()) < min_lifetime_) continue;
        ShockCurve c;
        c.t = tr.t;
        c.x = tr.x;
        for (std::size_t i = 1; i < c.t.size(); ++i)
            c.lipschitz = std::max(c.lipschitz,
                                   std::abs(c.x[i] - c.x[i - 1]) / (c.t[i] - c.t[i - 1]));
        set.curves.push_back(std::move(c));
    }
    return set;
}

namespace {

template <class Traj, class LevelOsc>
ShockCurveSet detect_core(const Traj& traj, double jump_factor, int min_lifetime,
                          LevelOsc&& osc_of) {
    if (traj.levels.empty())
        throw std::invalid_argument("detect_shock_curves: trajectory has no stored levels");
    const Grid1D& g = traj.levels.front().grid();
    ShockTracker tracker(g, jump_factor, min_lifetime);
    for (std::size_t n = 0; n < traj.levels.size(); ++n)
        tracker.feed(traj.t(static_cast<int>(n)), osc_of(traj.levels[n]));
    return tracker.finish(traj.max_speed() * traj.tau + g.h);
}

}  // namespace

ShockCurveSet detect_shock_curves(const Trajectory& traj, double jump_factor, int min_lifetime) {
    if (traj.levels.empty())
        throw std::invalid_argument("detect_shock_curves: trajectory has no stored levels");
    const PCField& u0 = traj.levels.front();
    const Vec pl = u0.value(0), pr = u0.value(u0.grid().cells - 1);
    return detect_core(traj, jump_factor, min_lifetime,
                       [&](const PCField& u) { return oscillation_profile(u, pl, pr); });
}

ShockCurveSet detect_shock_curves(const DgTrajectory& traj, double jump_factor,
                                  int min_lifetime) {
    return detect_core(traj, jump_factor, min_lifetime, [&](const DGField& u) {
        return oscillation_profile(u, traj.pad_left, traj.pad_right);
    });
}

// ---------------------------------------------------------------------------
// BV certificate

namespace {

template <class Traj, class OscOf>
BvReport bv_core(const Traj& traj, const ShockCurveSet& curves, double m_tube, double k_osc,
                 double tv_bound, OscOf&& osc_of) {
    if (traj.levels.empty())
        throw std::invalid_argument("bv_certificate: trajectory has no stored levels");
    if (!(m_tube >= 0.0) || !(k_osc >= 0.0))
        throw std::invalid_argument("bv_certificate: constants must be nonnegative");
    const Grid1D& g = traj.levels.front().grid();

    BvReport rep;
    rep.sup_tv = traj.sup_tv();
    rep.tv_ok = rep.sup_tv <= tv_bound;
    const double tube = m_tube * curves.tube_radius;
    const double budget = k_osc * g.h;

    std::vector<double> pos;
    for (std::size_t n = 0; n < traj.levels.size(); ++n) {
        const double tn = traj.t(static_cast<int>(n));
        pos.clear();
        for (const ShockCurve& c : curves.curves)
            if (!c.t.empty() && c.alive(tn)) pos.push_back(c.position(tn));
        const std::vector<double> osc = osc_of(traj.levels[n]);
        for (int j = 0; j < g.cells; ++j) {
            const double xj = g.center(j);
            double dist = std::numeric_limits<double>::infinity();
            for (double p : pos) dist = std::min(dist, std::abs(xj - p));
            if (dist <= tube) continue;
            const double o = osc[static_cast<std::size_t>(j)];
            rep.max_outside_osc = std::max(rep.max_outside_osc, o);
            if (o > budget)
                rep.violations.push_back({static_cast<int>(n), j, o, budget});
        }
    }
    return rep;
}

}  // namespace

BvReport bv_certificate(const Trajectory& traj, const ShockCurveSet& curves, double m_tube,
                        double k_osc, double tv_bound) {
    if (traj.levels.empty())
        throw std::invalid_argument("bv_certificate: trajectory has no stored levels");
    const PCField& u0 = traj.levels.front();
    const Vec pl = u0.value(0);
    const Vec pr = u0.value(u0.grid().cells - 1);
    return bv_core(traj, curves, m_tube, k_osc, tv_bound,
                   [&](const PCField& u) { return oscillation_profile(u, pl, pr); });
}

BvReport bv_certificate(const DgTrajectory& traj, const ShockCurveSet& curves, double m_tube,
                        double k_osc, double tv_bound) {
    return bv_core(traj, curves, m_tube, k_osc, tv_bound, [&](const DGField& u) {
        return oscillation_profile(u, traj.pad_left, traj.pad_right);
    });
}

// ---------------------------------------------------------------------------
// Reports

std::string report_json(const CertificationReport& rep) {
    nlohmann::ordered_json j;
    j["lc"]["constant"] = rep.lc;
    j["wc"]["residual"] = rep.wc_residual;
    j["wc"]["normalized"] = rep.wc_normalized;
    j["wes"]["signed"] = rep.wes_signed;
    j["wes"]["normalized"] = rep.wes_normalized;
    j["entropy_flux"]["identity_gap"] = rep.entropy_flux_identity;
    j["bv"]["sup_tv"] = rep.bv_sup_tv;
    j["bv"]["flagged_cells"] = rep.bv_flagged;
    j["bv"]["max_outside_oscillation"] = rep.bv_max_outside_osc;
    j["cfl"]["margin"] = rep.cfl_margin;
    return j.dump(2) + "\n";
}

std::string violations_csv(const std::vector<BvViolation>& violations, const Grid1D& grid,
                           double tau) {
    std::string out = "n,t_n,j,x_j,quantity,threshold\n";
    for (const BvViolation& v : violations) {
        out += std::to_string(v.level);
        out += ',';
        out += format_double(v.level * tau);
        out += ',';
        out += std::to_string(v.cell);
        out += ',';
        out += format_double(grid.center(v.cell));
        out += ',';
        out += format_double(v.value);
        out += ',';
        out += format_double(v.threshold);
        out += '\n';
    }
    return out;
}

}  // namespace hyp1d
