#include "hyp1d/fv.hpp"

#include <algorithm>
#include <bit>
#include <cmath>
#include <limits>
#include <stdexcept>
#include <string>
#include <utility>

#include "hyp1d/system.hpp"

namespace hyp1d {

namespace {

bool bits_equal(const Vec& a, const Vec& b) {
    if (a.size() != b.size()) return false;
    for (int i = 0; i < a.size(); ++i) {
        if (std::bit_cast<std::uint64_t>(a[i]) != std::bit_cast<std::uint64_t>(b[i])) return false;
    }
    return true;
}

// Fold the |eig| range of e into [mn, mx]. A range straddling zero has
// minimal modulus zero, which cfl_timestep later rejects.
void absorb_abs(const EigRange& e, double& mn, double& mx) {
    double alo, ahi;
    if (e.lo >= 0.0) {
        alo = e.lo;
        ahi = e.hi;
    } else if (e.hi <= 0.0) {
        alo = -e.hi;
        ahi = -e.lo;
    } else {
        alo = 0.0;
        ahi = std::max(-e.lo, e.hi);
    }
    mn = std::min(mn, alo);
    mx = std::max(mx, ahi);
}

}  // namespace

// ---------------------------------------------------------------------------
// Box

bool Box::contains(const Vec& u, double tol) const {
    if (u.size() != dim()) throw std::invalid_argument("Box::contains: dimension mismatch");
    for (int i = 0; i < dim(); ++i) {
        if (u[i] < lo[i] - tol || u[i] > hi[i] + tol) return false;
    }
    return true;
}

Vec Box::corner(int mask) const {
    Vec c(dim());
    for (int i = 0; i < dim(); ++i) c[i] = ((mask >> i) & 1) ? hi[i] : lo[i];
    return c;
}

Box Box::inflated(double factor) const {
    if (!(factor >= 0.0)) throw std::invalid_argument("Box::inflated: factor must be nonnegative");
    Box b{Vec(dim()), Vec(dim())};
    for (int i = 0; i < dim(); ++i) {
        const double c = 0.5 * (lo[i] + hi[i]);
        const double half = 0.5 * (hi[i] - lo[i]) * factor;
        b.lo[i] = c - half;
        b.hi[i] = c + half;
    }
    return b;
}

Box Box::covering(const std::vector<Vec>& states) {
    if (states.empty()) throw std::invalid_argument("Box::covering: no states");
    Box b{states[0], states[0]};
    for (const Vec& u : states) {
        if (u.size() != b.dim()) throw std::invalid_argument("Box::covering: mixed dimensions");
        for (int i = 0; i < b.dim(); ++i) {
            b.lo[i] = std::min(b.lo[i], u[i]);
            b.hi[i] = std::max(b.hi[i], u[i]);
        }
    }
    return b;
}

Box Box::covering(const PCField& u) {
    Box b{u.value(0), u.value(0)};
    for (int j = 1; j < u.grid().cells; ++j) {
        const Vec v = u.value(j);
        for (int i = 0; i < b.dim(); ++i) {
            b.lo[i] = std::min(b.lo[i], v[i]);
            b.hi[i] = std::max(b.hi[i], v[i]);
        }
    }
    return b;
}

// ---------------------------------------------------------------------------
// Timestep bound

TimestepBound cfl_timestep(const CFLParams& p, double h) {
    if (!(h > 0.0)) throw std::invalid_argument("cfl_timestep: h must be positive");
    if (!(p.safety > 0.0) || p.safety > 1.0)
        throw std::invalid_argument("cfl_timestep: safety must lie in (0, 1]");
    if (!(p.hess_min > 0.0) || p.hess_min > p.hess_max)
        throw std::invalid_argument("cfl_timestep: entropy Hessian bounds must satisfy 0 < min <= max");
    if (p.flux_min_left > p.flux_max_left || p.flux_min_right > p.flux_max_right)
        throw std::invalid_argument("cfl_timestep: flux eigenvalue bounds must satisfy min <= max");
    if (!(p.max_speed > 0.0)) throw std::invalid_argument("cfl_timestep: max_speed must be positive");
    if (!(p.flux_min_left > 0.0) || !(p.flux_min_right > 0.0))
        throw std::runtime_error(
            "cfl_timestep: a flux Jacobian eigenvalue bound vanishes on this hull; the flux has no "
            "uniform dissipation there (use rusanov or hll_fix)");

    const double alpha_root = p.hess_min / p.hess_max;
    const double alpha = alpha_root * alpha_root;
    const double fmax = std::max(p.flux_max_left, p.flux_max_right);
    const double beta = std::min(p.flux_min_left, p.flux_min_right) / (fmax * fmax);

    TimestepBound b;
    b.sharp = p.safety * h * 0.25 * alpha * beta;
    b.transport = p.safety * h / p.max_speed;
    b.tau = std::min(b.sharp, b.transport);
    return b;
}

CFLParams estimate_cfl_params(const NumericalFlux& flux, const Box& hull, int n_pairs,
                              std::uint64_t seed, double safety) {
    const System& sys = flux.sys();
    const int d = flux.dim();
    if (hull.dim() != d) throw std::invalid_argument("estimate_cfl_params: hull dimension mismatch");
    if (n_pairs < 1) throw std::invalid_argument("estimate_cfl_params: need at least one pair");
    for (int i = 0; i < d; ++i) {
        if (!(hull.lo[i] <= hull.hi[i]))
            throw std::invalid_argument("estimate_cfl_params: hull is empty");
    }

    std::vector<Vec> corners;
    for (int mask = 0; mask < hull.corner_count(); ++mask) {
        Vec c = hull.corner(mask);
        if (!sys.admissible(c))
            throw std::runtime_error("estimate_cfl_params: hull corner inadmissible for " +
                                     sys.name());
        corners.push_back(c);
    }

    Rng rng(seed);
    auto random_state = [&] {
        Vec u(d);
        for (int i = 0; i < d; ++i) u[i] = rng.uniform(hull.lo[i], hull.hi[i]);
        return u;
    };

    std::vector<std::pair<Vec, Vec>> pairs;
    for (std::size_t i = 0; i < corners.size(); ++i) {
        for (std::size_t j = i + 1; j < corners.size(); ++j) {
            pairs.emplace_back(corners[i], corners[j]);
        }
    }
    for (int i = 0; i < n_pairs; ++i) {
        Vec a = random_state();
        Vec b = random_state();
        if (!sys.admissible(a) || !sys.admissible(b))
            throw std::runtime_error("estimate_cfl_params: sampled hull state inadmissible for " +
                                     sys.name());
        pairs.emplace_back(std::move(a), std::move(b));
    }

    CFLParams p;
    p.safety = safety;

    // Worst pair by path wave speed; its frozen data fixes the viscosity for
    // the Jacobian scan below.
    FrozenFlux worst{};
    bool have_worst = false;
    for (const auto& [a, b] : pairs) {
        const FrozenFlux fz = flux.freeze(a, b);
        p.max_speed = std::max(p.max_speed, flux.speed_bound(fz));
        if (!have_worst || fz.lambda_hat > worst.lambda_hat) {
            worst = fz;
            have_worst = true;
        }
    }

    double hmin = std::numeric_limits<double>::infinity();
    double hmax = -hmin;
    double lmin_l = hmin, lmax_l = -hmin;
    double lmin_r = hmin, lmax_r = -hmin;

    auto absorb_state = [&](const Vec& x) {
        const EigRange he = symmetric_eigenvalues(sys.entropy_hessian(x));
        hmin = std::min(hmin, he.lo);
        hmax = std::max(hmax, he.hi);
        absorb_abs(real_eigenvalues(flux.deriv_left(worst, x, x)), lmin_l, lmax_l);
        absorb_abs(real_eigenvalues(flux.deriv_right(worst, x, x)), lmin_r, lmax_r);
    };

    for (const Vec& c : corners) absorb_state(c);
    constexpr int kPathPoints = 9;
    for (const auto& [a, b] : pairs) {
        for (const Vec& x : states_along_entropy_path(sys, a, b, kPathPoints)) absorb_state(x);
    }

    p.hess_min = hmin;
    p.hess_max = hmax;
    p.flux_min_left = lmin_l;
    p.flux_max_left = lmax_l;
    p.flux_min_right = lmin_r;
    p.flux_max_right = lmax_r;
    return p;
}

RunLength steps_for_time(double tau_bound, double T) {
    if (!(tau_bound > 0.0)) throw std::invalid_argument("steps_for_time: tau bound must be positive");
    if (!(T > 0.0)) throw std::invalid_argument("steps_for_time: T must be positive");
    const double r = T / tau_bound;
    if (r > 1e9) throw std::invalid_argument("steps_for_time: more than 1e9 steps");
    const int n = std::max(1, static_cast<int>(std::ceil(r * (1.0 - 1e-12))));
    return {T / n, n};
}

// ---------------------------------------------------------------------------
// Stepping

void fv_step(const NumericalFlux& flux, const PCField& in, const Vec& pad_left,
             const Vec& pad_right, double tau, PCField& out, FvStepStats* stats) {
    const Grid1D& g = in.grid();
    const int n = g.cells;
    const int d = in.dim();
    if (d != flux.dim()) throw std::invalid_argument("fv_step: field dimension does not match the flux");
    if (pad_left.size() != d || pad_right.size() != d)
        throw std::invalid_argument("fv_step: pad dimension mismatch");
    if (!(tau > 0.0)) throw std::invalid_argument("fv_step: tau must be positive");
    if (&out == &in) throw std::invalid_argument("fv_step: out must not alias in");
    if (!out.grid().same_as(g) || out.dim() != d)
        throw std::invalid_argument("fv_step: out field shape mismatch");

    const System& sys = flux.sys();
    std::vector<Vec> face(static_cast<std::size_t>(n) + 1, Vec(d));
    std::vector<double> speed(stats ? face.size() : 0, 0.0);
    std::vector<double> jac(stats ? face.size() : 0, 0.0);
    std::vector<unsigned char> active(stats ? face.size() : 0, 0);

    parallel_chunks(n + 1, [&](std::int64_t b, std::int64_t e) {
        for (std::int64_t jj = b; jj < e; ++jj) {
            const int j = static_cast<int>(jj);
            const Vec ul = (j == 0) ? pad_left : in.value(j - 1);
            const Vec ur = (j == n) ? pad_right : in.value(j);
            if (bits_equal(ul, ur)) {
                face[jj] = sys.flux(ul);
                continue;
            }
            const FrozenFlux fz = flux.freeze(ul, ur);
            face[jj] = flux.value(fz, ul, ur);
            if (stats) {
                active[jj] = 1;
                speed[jj] = flux.speed_bound(fz);
                // Lipschitz data for the per-step L1 bound: D^l along the
                // straight p-segment (q at ur), D^r along the q-segment.
                const Vec mid = 0.5 * (ul + ur);
                double m = 0.0;
                for (const Vec* x : {&ul, &mid, &ur}) {
                    m = std::max(m, flux.deriv_left(fz, *x, ur).norm1());
                    m = std::max(m, flux.deriv_right(fz, ul, *x).norm1());
                }
                jac[jj] = m;
            }
        }
    });

    const double lam = tau / g.h;
    parallel_chunks(n, [&](std::int64_t b, std::int64_t e) {
        for (std::int64_t j = b; j < e; ++j) {
            const std::size_t f = static_cast<std::size_t>(j);
            out.set(static_cast<int>(j), in.value(static_cast<int>(j)) - lam * (face[f + 1] - face[f]));
        }
    });

    for (int j = 0; j < n; ++j) {
        if (!sys.admissible(out.value(j)))
            throw std::runtime_error("fv_step: cell " + std::to_string(j) +
                                     " left the admissible set of " + sys.name() +
                                     " after the update");
    }

    if (stats) {
        *stats = FvStepStats{};
        for (std::size_t j = 0; j < face.size(); ++j) {
            if (!active[j]) continue;
            stats->active_faces += 1;
            stats->max_speed = std::max(stats->max_speed, speed[j]);
            stats->max_jac_norm = std::max(stats->max_jac_norm, jac[j]);
        }
        double l1 = 0.0;
        for (int j = 0; j < n; ++j) l1 += (out.value(j) - in.value(j)).norm1();
        stats->l1_change = g.h * l1;
    }
}

PCField fv_step(const NumericalFlux& flux, const PCField& in, double tau) {
    PCField out(in.grid(), in.dim());
    fv_step(flux, in, in.value(0), in.value(in.grid().cells - 1), tau, out, nullptr);
    return out;
}

// ---------------------------------------------------------------------------
// Trajectories

double Trajectory::max_speed() const {
    double m = 0.0;
    for (const FvStepStats& s : steps) m = std::max(m, s.max_speed);
    return m;
}

double Trajectory::max_jac_norm() const {
    double m = 0.0;
    for (const FvStepStats& s : steps) m = std::max(m, s.max_jac_norm);
    return m;
}

double Trajectory::sup_tv() const {
    double m = 0.0;
    for (double v : tv) m = std::max(m, v);
    return m;
}

Trajectory fv_run(const NumericalFlux& flux, const PCField& u0, double tau, int n_steps,
                  const FvRunOptions& opt) {
    if (n_steps < 0) throw std::invalid_argument("fv_run: negative step count");
    const Grid1D& g = u0.grid();
    if (g.cells < 2) throw std::invalid_argument("fv_run: need at least two cells for pads");

    const Vec pad_left = u0.value(0);
    const Vec pad_right = u0.value(g.cells - 1);
    const double scale = std::max({1.0, pad_left.norm_inf(), pad_right.norm_inf()});

    Trajectory tr;
    tr.system_id = flux.sys().name();
    tr.flux_id = flux.name();
    tr.scheme_id = "fv_euler";
    tr.tau = tau;
    tr.tv.push_back(total_variation(u0));
    if (tr.tv.back() > opt.tv_bound) tr.tv_exceeded = true;
    if (opt.store_levels) tr.levels.push_back(u0);
    if (opt.on_level) opt.on_level(0, u0);

    PCField cur = u0;
    PCField nxt(g, u0.dim());
    for (int s = 1; s <= n_steps; ++s) {
        FvStepStats st;
        fv_step(flux, cur, pad_left, pad_right, tau, nxt, &st);
        const double drift = std::max((nxt.value(0) - pad_left).norm_inf(),
                                      (nxt.value(g.cells - 1) - pad_right).norm_inf()) /
                             scale;
        tr.boundary_drift = std::max(tr.boundary_drift, drift);
        if (drift > opt.pad_tolerance)
            throw std::runtime_error("fv_run: far-field drift " + format_double(drift) +
                                     " at step " + std::to_string(s) +
                                     "; a wave reached the window boundary");
        tr.steps.push_back(st);
        tr.tv.push_back(total_variation(nxt));
        if (tr.tv.back() > opt.tv_bound) tr.tv_exceeded = true;
        if (opt.store_levels) tr.levels.push_back(nxt);
        if (opt.on_level) opt.on_level(s, nxt);
        std::swap(cur, nxt);
    }
    return tr;
}

}  // namespace hyp1d
