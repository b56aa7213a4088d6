#include "hyp1d/dg.hpp"

#include <algorithm>
#include <bit>
#include <cmath>
#include <cstdint>
#include <stdexcept>
#include <utility>

namespace hyp1d {

namespace {

bool bits_equal(const Vec& a, const Vec& b) {
    for (int i = 0; i < a.size(); ++i)
        if (std::bit_cast<std::uint64_t>(a[i]) != std::bit_cast<std::uint64_t>(b[i]))
            return false;
    return true;
}

double minmod3(double a, double b, double c) {
    if (a > 0.0 && b > 0.0 && c > 0.0) return std::min({a, b, c});
    if (a < 0.0 && b < 0.0 && c < 0.0) return std::max({a, b, c});
    return 0.0;
}

// Sample set for slope suprema: the derivative of a degree <= 2 element is
// affine in xi, so including both endpoints makes the sampled sup exact.
const std::vector<double>& slope_sample_points() {
    static const std::vector<double> pts = [] {
        std::vector<double> p{-1.0};
        const Quadrature& q = gauss_legendre(4);
        p.insert(p.end(), q.nodes.begin(), q.nodes.end());
        p.push_back(0.0);
        p.push_back(1.0);
        return p;
    }();
    return pts;
}

// Per-component sup over the sample points of |du/dx| on cell j.
void cell_slope_sup(const DGField& u, int j, std::array<double, kMaxComp>& sup) {
    sup.fill(0.0);
    const int k = u.degree();
    if (k == 0) return;
    const int d = u.dim();
    const double two_h = 2.0 / u.grid().h;
    for (const double pt : slope_sample_points()) {
        Vec s(d);
        for (int m = 1; m <= k; ++m) {
            const Vec cm = u.coeff(j, m);
            const double dp = legendre_deriv(m, pt);
            for (int i = 0; i < d; ++i) s[i] += dp * cm[i];
        }
        for (int i = 0; i < d; ++i) sup[i] = std::max(sup[i], two_h * std::abs(s[i]));
    }
}

// ---------------------------------------------------------------------------
// Limiters

class IdentityLimiter final : public Limiter {
public:
    std::string name() const override { return "identity"; }
    double slope_constant() const override { return 1.0; }
    DGField apply(const DGField& in) const override { return in; }
};

class ZeroSlopeLimiter final : public Limiter {
public:
    std::string name() const override { return "zero_slope"; }
    double slope_constant() const override { return 0.0; }
    DGField apply(const DGField& in) const override {
        DGField out(in.grid(), in.dim(), in.degree());
        for (int j = 0; j < in.grid().cells; ++j) out.set_coeff(j, 0, in.mean(j));
        return out;
    }
};

class MinmodTvbLimiter final : public Limiter {
public:
    explicit MinmodTvbLimiter(double m) : m_(m) {}

    std::string name() const override { return "minmod_tvb"; }
    double slope_constant() const override { return 1.0; }

    DGField apply(const DGField& in) const override {
        DGField out = in;
        const int k = in.degree();
        if (k == 0) return out;
        const int n = in.grid().cells;
        const int d = in.dim();
        const double h = in.grid().h;
        const double thresh = m_ * h * h;
        for (int j = 0; j < n; ++j) {
            const Vec c1 = in.coeff(j, 1);
            const Vec mj = in.mean(j);
            Vec dp(d), dm(d);
            if (j + 1 < n) dp = in.mean(j + 1) - mj;
            if (j > 0) dm = mj - in.mean(j - 1);
            Vec c1w = c1;
            std::array<bool, kMaxComp> chg{};
            bool any = false;
            for (int i = 0; i < d; ++i) {
                if (std::abs(c1[i]) <= thresh) continue;
                const double t = minmod3(c1[i], dp[i], dm[i]);
                if (t == c1[i]) continue;
                c1w[i] = t;
                chg[i] = true;
                any = true;
            }
            if (!any) continue;
            out.set_coeff(j, 1, c1w);
            for (int m = 2; m <= k; ++m) {
                Vec cm = in.coeff(j, m);
                for (int i = 0; i < d; ++i)
                    if (chg[i]) cm[i] = 0.0;
                out.set_coeff(j, m, cm);
            }
        }
        return out;
    }

private:
    double m_;
};

}  // namespace

LimiterPtr make_limiter(const std::string& kind, const ParamMap& params) {
    auto reject_unknown = [&](std::initializer_list<const char*> allowed) {
        for (const auto& [key, value] : params) {
            bool ok = false;
            for (const char* a : allowed)
                if (key == a) ok = true;
            if (!ok)
                throw std::invalid_argument("make_limiter(" + kind + "): unknown param '" + key + "'");
        }
    };
    if (kind == "identity") {
        reject_unknown({});
        return std::make_shared<IdentityLimiter>();
    }
    if (kind == "zero_slope") {
        reject_unknown({});
        return std::make_shared<ZeroSlopeLimiter>();
    }
    if (kind == "minmod_tvb") {
        reject_unknown({"m"});
        double m = 50.0;
        if (auto it = params.find("m"); it != params.end()) m = it->second;
        if (!(m >= 0.0))
            throw std::invalid_argument("make_limiter(minmod_tvb): m must be >= 0");
        return std::make_shared<MinmodTvbLimiter>(m);
    }
    throw std::invalid_argument("make_limiter: unknown kind '" + kind + "'");
}

LimiterReport verify_limiter(const Limiter& lim, const std::vector<DGField>& samples) {
    LimiterReport rep;
    for (const DGField& u : samples) {
        const DGField v = lim.apply(u);
        if (!v.grid().same_as(u.grid()) || v.dim() != u.dim() || v.degree() != u.degree())
            throw std::logic_error("verify_limiter: " + lim.name() + " changed the field shape");
        std::array<double, kMaxComp> su, sv;
        for (int j = 0; j < u.grid().cells; ++j) {
            const Vec mu = u.mean(j);
            const Vec mv = v.mean(j);
            for (int i = 0; i < u.dim(); ++i) {
                const double defect = std::abs(mv[i] - mu[i]) / std::max(1.0, std::abs(mu[i]));
                rep.max_mean_defect = std::max(rep.max_mean_defect, defect);
            }
            cell_slope_sup(u, j, su);
            cell_slope_sup(v, j, sv);
            for (int i = 0; i < u.dim(); ++i) {
                if (su[i] == 0.0) {
                    if (sv[i] > 0.0)
                        rep.max_slope_ratio = std::numeric_limits<double>::infinity();
                } else {
                    rep.max_slope_ratio = std::max(rep.max_slope_ratio, sv[i] / su[i]);
                }
            }
        }
    }
    return rep;
}

DGField apply_limiter(const Limiter& lim, const DGField& in) {
    DGField out = lim.apply(in);
#ifndef NDEBUG
    const LimiterReport rep = verify_limiter(lim, {in});
    if (rep.max_mean_defect > 1e-12)
        throw std::logic_error("apply_limiter: " + lim.name() + " moved a cell mean");
    if (rep.max_slope_ratio > lim.slope_constant() * (1.0 + 1e-9))
        throw std::logic_error("apply_limiter: " + lim.name() + " broke its slope bound");
#endif
    return out;
}

// ---------------------------------------------------------------------------
// Workspace and timestep

DgWorkspace make_dg_workspace(int degree) {
    if (degree < 0 || degree > 4)
        throw std::invalid_argument("make_dg_workspace: degree must be in [0, 4]");
    DgWorkspace ws;
    ws.degree = degree;
    ws.quad = gauss_legendre((3 * degree + 3) / 2);
    const int nq = static_cast<int>(ws.quad.nodes.size());
    ws.basis.assign(nq, {});
    ws.basis_deriv.assign(nq, {});
    for (int q = 0; q < nq; ++q) {
        for (int m = 0; m <= degree; ++m) {
            ws.basis[q][m] = legendre(m, ws.quad.nodes[q]);
            ws.basis_deriv[q][m] = legendre_deriv(m, ws.quad.nodes[q]);
        }
    }
    return ws;
}

TimestepBound dg_timestep(const CFLParams& p, double h, int degree) {
    if (degree < 0 || degree > 4)
        throw std::invalid_argument("dg_timestep: degree must be in [0, 4]");
    TimestepBound b = cfl_timestep(p, h);
    const double scale = 2.0 * degree + 1.0;
    b.tau /= scale;
    b.sharp /= scale;
    b.transport /= scale;
    return b;
}

// ---------------------------------------------------------------------------
// Steps

DGField dg_euler_step(const NumericalFlux& flux, const DGField& in, const Vec& pad_left,
                      const Vec& pad_right, double tau, const DgWorkspace& ws,
                      DgStepStats* stats) {
    const Grid1D& g = in.grid();
    const int n = g.cells;
    const int d = in.dim();
    const int k = in.degree();
    if (d != flux.dim())
        throw std::invalid_argument("dg_euler_step: field dimension does not match the flux");
    if (pad_left.size() != d || pad_right.size() != d)
        throw std::invalid_argument("dg_euler_step: pad dimension mismatch");
    if (!(tau > 0.0)) throw std::invalid_argument("dg_euler_step: tau must be positive");
    if (ws.degree != k) throw std::invalid_argument("dg_euler_step: workspace degree mismatch");

    const System& sys = flux.sys();
    const int nq = static_cast<int>(ws.quad.nodes.size());

    // Traces once per cell; the face data must be admissible.
    std::vector<Vec> tl(n, Vec(d)), tr(n, Vec(d));
    std::vector<unsigned char> bad_trace(n, 0);
    parallel_chunks(n, [&](std::int64_t b, std::int64_t e) {
        for (std::int64_t j = b; j < e; ++j) {
            const int jc = static_cast<int>(j);
            tl[j] = in.trace_left(jc);
            tr[j] = in.trace_right(jc);
            if (!sys.admissible(tl[j]) || !sys.admissible(tr[j])) bad_trace[j] = 1;
        }
    });
    for (int j = 0; j < n; ++j)
        if (bad_trace[j])
            throw std::runtime_error("dg_euler_step: cell " + std::to_string(j) +
                                     " has a trace outside the admissible set of " + sys.name());

    // Face fluxes. Activity feeds both the stats and the constant-cell skip.
    std::vector<Vec> face(static_cast<std::size_t>(n) + 1, Vec(d));
    std::vector<double> speed(stats ? face.size() : 0, 0.0);
    std::vector<unsigned char> active(face.size(), 0);
    parallel_chunks(n + 1, [&](std::int64_t b, std::int64_t e) {
        for (std::int64_t jj = b; jj < e; ++jj) {
            const int j = static_cast<int>(jj);
            const Vec& ul = (j == 0) ? pad_left : tr[j - 1];
            const Vec& ur = (j == n) ? pad_right : tl[j];
            if (bits_equal(ul, ur)) {
                face[jj] = sys.flux(ul);
                continue;
            }
            const FrozenFlux fz = flux.freeze(ul, ur);
            face[jj] = flux.value(fz, ul, ur);
            active[jj] = 1;
            if (stats) speed[jj] = flux.speed_bound(fz);
        }
    });

    const double lam = tau / g.h;
    DGField out(g, d, k);
    std::vector<unsigned char> bad_quad(n, 0);
    parallel_chunks(n, [&](std::int64_t b, std::int64_t e) {
        for (std::int64_t jj = b; jj < e; ++jj) {
            const int j = static_cast<int>(jj);
            std::array<Vec, 5> cs;
            for (int m = 0; m <= k; ++m) cs[m] = in.coeff(j, m);

            // A constant cell between two skipped faces is an exact fixed
            // point; copy it bitwise instead of integrating rounding noise.
            bool skip = !active[jj] && !active[jj + 1];
            for (int m = 1; skip && m <= k; ++m)
                for (int i = 0; i < d; ++i)
                    if (cs[m][i] != 0.0) {
                        skip = false;
                        break;
                    }
            if (skip) {
                for (int m = 0; m <= k; ++m) out.set_coeff(j, m, cs[m]);
                continue;
            }

            // Volume integrals vol[m] = sum_q w_q f(u(xi_q)) P_m'(xi_q).
            // The 2/h from d/dx and the h/2 from the cell measure cancel.
            std::array<Vec, 5> vol;
            for (int m = 1; m <= k; ++m) vol[m] = Vec(d);
            if (k > 0) {
                for (int q = 0; q < nq; ++q) {
                    Vec uq(d);
                    for (int m = 0; m <= k; ++m) {
                        const double pm = ws.basis[q][m];
                        for (int i = 0; i < d; ++i) uq[i] += pm * cs[m][i];
                    }
                    if (!sys.admissible(uq)) {
                        bad_quad[j] = 1;
                        break;
                    }
                    const Vec fq = sys.flux(uq);
                    const double w = ws.quad.weights[q];
                    for (int m = 1; m <= k; ++m) {
                        const double wd = w * ws.basis_deriv[q][m];
                        for (int i = 0; i < d; ++i) vol[m][i] += wd * fq[i];
                    }
                }
                if (bad_quad[j]) continue;
            }

            const Vec& fp = face[jj + 1];
            const Vec& fm = face[jj];
            for (int m = 0; m <= k; ++m) {
                const double lm = lam * (2 * m + 1);
                const double pm = (m % 2 == 0) ? 1.0 : -1.0;
                Vec cn(d);
                for (int i = 0; i < d; ++i) {
                    const double v = (m == 0) ? 0.0 : vol[m][i];
                    cn[i] = cs[m][i] + lm * ((v - fp[i]) + pm * fm[i]);
                }
                out.set_coeff(j, m, cn);
            }
        }
    });
    for (int j = 0; j < n; ++j)
        if (bad_quad[j])
            throw std::runtime_error("dg_euler_step: cell " + std::to_string(j) +
                                     " evaluates outside the admissible set of " + sys.name() +
                                     " at a quadrature node");

    if (stats) {
        *stats = DgStepStats{};
        for (std::size_t jj = 0; jj < face.size(); ++jj) {
            if (!active[jj]) continue;
            stats->active_faces += 1;
            stats->max_speed = std::max(stats->max_speed, speed[jj]);
        }
    }
    return out;
}

DGField rkdg2_step(const NumericalFlux& flux, const Limiter& lim, const DGField& in,
                   const Vec& pad_left, const Vec& pad_right, double tau,
                   const DgWorkspace& ws, DgStepStats* stats) {
    DgStepStats s1, s2;
    const DGField ut = apply_limiter(lim, in);
    const DGField u1 = dg_euler_step(flux, ut, pad_left, pad_right, tau, ws, stats ? &s1 : nullptr);
    const DGField ut1 = apply_limiter(lim, u1);
    const DGField u2 = dg_euler_step(flux, ut1, pad_left, pad_right, tau, ws, stats ? &s2 : nullptr);

    DGField out(in.grid(), in.dim(), in.degree());
    const double* a = ut.raw();
    const double* b = u2.raw();
    double* o = out.raw();
    const std::size_t len = static_cast<std::size_t>(in.grid().cells) * in.cell_stride();
    for (std::size_t i = 0; i < len; ++i) o[i] = 0.5 * a[i] + 0.5 * b[i];

    if (stats) {
        stats->max_speed = std::max(s1.max_speed, s2.max_speed);
        stats->active_faces = std::max(s1.active_faces, s2.active_faces);
    }
    return out;
}

// ---------------------------------------------------------------------------
// Runs

double DgTrajectory::max_speed() const {
    double m = 0.0;
    for (const DgStepStats& s : steps) m = std::max(m, s.max_speed);
    return m;
}

double DgTrajectory::sup_tv() const {
    double m = 0.0;
    for (double v : tv) m = std::max(m, v);
    return m;
}

double DgTrajectory::max_sup_slope() const {
    double m = 0.0;
    for (double v : sup_slope) m = std::max(m, v);
    return m;
}

DgTrajectory dg_run(const NumericalFlux& flux, const Limiter& lim, const DGField& u0,
                    double tau, int n_steps, const DgRunOptions& opt) {
    const Grid1D& g = u0.grid();
    const int n = g.cells;
    const int d = u0.dim();
    if (n < 2) throw std::invalid_argument("dg_run: need at least 2 cells");
    if (d != flux.dim())
        throw std::invalid_argument("dg_run: field dimension does not match the flux");
    if (!(tau > 0.0)) throw std::invalid_argument("dg_run: tau must be positive");
    if (n_steps < 0) throw std::invalid_argument("dg_run: negative step count");

    DgTrajectory tr;
    tr.system_id = flux.sys().name();
    tr.flux_id = flux.name();
    tr.scheme_id = "rkdg2";
    tr.limiter_id = lim.name();
    tr.degree = u0.degree();
    tr.tau = tau;
    tr.pad_left = u0.mean(0);
    tr.pad_right = u0.mean(n - 1);

    double scale = 1.0;
    for (int i = 0; i < d; ++i)
        scale = std::max({scale, std::abs(tr.pad_left[i]), std::abs(tr.pad_right[i])});

    const DgWorkspace ws = make_dg_workspace(u0.degree());

    const auto record = [&](const DGField& u, int level) {
        tr.tv.push_back(total_variation(u));
        if (tr.tv.back() > opt.tv_bound) tr.tv_exceeded = true;
        tr.sup_slope.push_back(max_abs_slope(u));
        if (tr.sup_slope.back() > opt.slope_ceiling) tr.slope_exceeded = true;
        if (opt.store_levels) tr.levels.push_back(u);
        if (opt.on_level) opt.on_level(level, u);
    };

    DGField cur = apply_limiter(lim, u0);
    record(cur, 0);

    for (int s = 0; s < n_steps; ++s) {
        DgStepStats st;
        DGField nxt =
            apply_limiter(lim, rkdg2_step(flux, lim, cur, tr.pad_left, tr.pad_right, tau, ws, &st));

        const Vec ml = nxt.mean(0);
        const Vec mr = nxt.mean(n - 1);
        double drift = 0.0;
        for (int i = 0; i < d; ++i)
            drift = std::max({drift, std::abs(ml[i] - tr.pad_left[i]),
                              std::abs(mr[i] - tr.pad_right[i])});
        drift /= scale;
        tr.boundary_drift = std::max(tr.boundary_drift, drift);
        if (drift > opt.pad_tolerance)
            throw std::runtime_error("dg_run: far-field drift " + format_double(drift) +
                                     " at step " + std::to_string(s) +
                                     "; a wave reached the window boundary");

        tr.steps.push_back(st);
        record(nxt, s + 1);
        cur = std::move(nxt);
    }
    return tr;
}

// ---------------------------------------------------------------------------
// Diagnostics

double max_abs_slope(const DGField& u) {
    if (u.degree() == 0) return 0.0;
    double best = 0.0;
    std::array<double, kMaxComp> sup;
    for (int j = 0; j < u.grid().cells; ++j) {
        cell_slope_sup(u, j, sup);
        for (int i = 0; i < u.dim(); ++i) best = std::max(best, sup[i]);
    }
    return best;
}

double dg_oscillation_constant(const DgTrajectory& tr) {
    if (tr.levels.size() < 2) return 0.0;
    const Grid1D& g = tr.levels.front().grid();
    const int n = g.cells;
    const int d = tr.levels.front().dim();
    const int k = tr.levels.front().degree();
    if (tr.pad_left.size() != d || tr.pad_right.size() != d)
        throw std::invalid_argument("dg_oscillation_constant: trajectory pads missing");
    const double rsh = std::sqrt(g.h);
    const Quadrature& quad = gauss_legendre(8);

    double best = 0.0;
    for (std::size_t lev = 0; lev + 1 < tr.levels.size(); ++lev) {
        const DGField& a = tr.levels[lev];
        const DGField& b = tr.levels[lev + 1];
        for (int j = 0; j < n; ++j) {
            // |b - a|_{L2(I_j)} by orthogonality: h sum_m |db_m|^2 / (2m+1).
            double num2 = 0.0;
            for (int m = 0; m <= k; ++m) {
                const Vec dc = b.coeff(j, m) - a.coeff(j, m);
                num2 += dc.dot(dc) / (2 * m + 1);
            }
            const double num = std::sqrt(g.h * num2);

            // |a_x|_{L1(I_j)}: the 2/h of d/dx cancels the h/2 cell measure.
            double slope_l1 = 0.0;
            for (std::size_t q = 0; q < quad.nodes.size(); ++q) {
                Vec s(d);
                for (int m = 1; m <= k; ++m)
                    s += legendre_deriv(m, quad.nodes[q]) * a.coeff(j, m);
                slope_l1 += quad.weights[q] * s.norm1();
            }

            const Vec jump_l =
                a.trace_left(j) - (j > 0 ? a.trace_right(j - 1) : tr.pad_left);
            const Vec jump_r =
                (j + 1 < n ? a.trace_left(j + 1) : tr.pad_right) - a.trace_right(j);

            const double den =
                tr.tau * (slope_l1 + jump_l.norm1() + jump_r.norm1()) / rsh;
            if (den == 0.0) continue;
            best = std::max(best, num / den);
        }
    }
    return best;
}

}  // namespace hyp1d
