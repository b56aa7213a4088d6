#include "hyp1d/flux.hpp"

#include <cmath>
#include <limits>
#include <stdexcept>

namespace hyp1d {

NumericalFlux::NumericalFlux(SystemPtr sys, int path_samples)
    : system_(std::move(sys)), path_samples_(path_samples) {
    if (!system_) throw std::invalid_argument("NumericalFlux: null system");
    if (path_samples_ < 2) throw std::invalid_argument("NumericalFlux: path_samples < 2");
}

FrozenFlux NumericalFlux::freeze(const Vec& a, const Vec& b) const {
    FrozenFlux fz;
    const EigRange r = eigen_range_along_path(*system_, a, b, path_samples_);
    fz.s_minus = r.lo;
    fz.s_plus = r.hi;
    fz.lambda_hat = std::max(std::abs(r.lo), std::abs(r.hi));
    fz.branch = classify(fz.s_minus, fz.s_plus);
    return fz;
}

namespace {

// ---------------------------------------------------------------------------

class RusanovFlux final : public NumericalFlux {
public:
    RusanovFlux(SystemPtr sys, double mu, int path_samples)
        : NumericalFlux(std::move(sys), path_samples), mu_(mu) {
        if (!(mu_ > 1.0)) throw std::invalid_argument("rusanov: mu must exceed 1");
    }

    std::string name() const override { return "rusanov"; }

    Vec value(const FrozenFlux& fz, const Vec& p, const Vec& q) const override {
        return 0.5 * (sys().flux(p) + sys().flux(q)) + (0.5 * mu_ * fz.lambda_hat) * (p - q);
    }

    Mat deriv_left(const FrozenFlux& fz, const Vec& p, const Vec&) const override {
        return 0.5 * sys().flux_jacobian(p) + Mat::identity(dim(), 0.5 * mu_ * fz.lambda_hat);
    }

    Mat deriv_right(const FrozenFlux& fz, const Vec&, const Vec& q) const override {
        return 0.5 * sys().flux_jacobian(q) - Mat::identity(dim(), 0.5 * mu_ * fz.lambda_hat);
    }

    double speed_bound(const FrozenFlux& fz) const override {
        return 0.5 * (mu_ + 1.0) * fz.lambda_hat;
    }

private:
    double mu_;
};

// ---------------------------------------------------------------------------
// Branches: 1 fully right-moving (s- >= 0), 2 middle, 3 fully left-moving.

class HllFlux final : public NumericalFlux {
public:
    HllFlux(SystemPtr sys, int path_samples) : NumericalFlux(std::move(sys), path_samples) {}

    std::string name() const override { return "hll"; }

    Vec value(const FrozenFlux& fz, const Vec& p, const Vec& q) const override {
        switch (fz.branch) {
            case 1:
                return sys().flux(p);
            case 3:
                return sys().flux(q);
            default: {
                const double sm = fz.s_minus, sp = fz.s_plus;
                return (1.0 / (sp - sm)) *
                       (sp * sys().flux(p) - sm * sys().flux(q) + (sp * sm) * (q - p));
            }
        }
    }

    Mat deriv_left(const FrozenFlux& fz, const Vec& p, const Vec&) const override {
        switch (fz.branch) {
            case 1:
                return sys().flux_jacobian(p);
            case 3:
                return Mat(dim());
            default: {
                const double sm = fz.s_minus, sp = fz.s_plus;
                return (sp / (sp - sm)) *
                       (sys().flux_jacobian(p) - Mat::identity(dim(), sm));
            }
        }
    }

    Mat deriv_right(const FrozenFlux& fz, const Vec&, const Vec& q) const override {
        switch (fz.branch) {
            case 1:
                return Mat(dim());
            case 3:
                return sys().flux_jacobian(q);
            default: {
                const double sm = fz.s_minus, sp = fz.s_plus;
                return (sm / (sp - sm)) *
                       (Mat::identity(dim(), sp) - sys().flux_jacobian(q));
            }
        }
    }

    double speed_bound(const FrozenFlux& fz) const override { return fz.lambda_hat; }

protected:
    int classify(double s_minus, double s_plus) const override {
        if (s_minus >= 0.0) return 1;
        if (s_plus >= 0.0) return 2;
        return 3;
    }
};

// ---------------------------------------------------------------------------
// hll with the wave speeds pushed delta away from zero. Five cases keyed on
// where (s-, s+) sits relative to {-delta, 0, delta}; within each case the
// formula is the hll middle flux with effective speeds
//   case 2: (-delta shifted to) (-delta, s+ + delta) -> written out below
//   case 3: (s- - delta, s+ + delta)
// so every case keeps a strictly dissipative pair of speeds.

class HllFixFlux final : public NumericalFlux {
public:
    HllFixFlux(SystemPtr sys, double delta, int path_samples)
        : NumericalFlux(std::move(sys), path_samples), delta_(delta) {
        if (!(delta_ > 0.0)) throw std::invalid_argument("hll_fix: delta must be positive");
    }

    std::string name() const override { return "hll_fix"; }

    double delta() const { return delta_; }

    Vec value(const FrozenFlux& fz, const Vec& p, const Vec& q) const override {
        const double sm = fz.s_minus, sp = fz.s_plus, d = delta_;
        switch (fz.branch) {
            case 1:
                return sys().flux(p);
            case 2:
                return (1.0 / (sp + 2.0 * d)) *
                       ((sp + d) * sys().flux(p) + d * sys().flux(q) +
                        ((sp + d) * d) * (p - q));
            case 3:
                return (1.0 / (sp - sm + 2.0 * d)) *
                       ((sp + d) * sys().flux(p) - (sm - d) * sys().flux(q) +
                        ((sp + d) * (sm - d)) * (q - p));
            case 4:
                return (1.0 / (2.0 * d - sm)) *
                       (d * sys().flux(p) - (sm - d) * sys().flux(q) -
                        (d * (sm - d)) * (p - q));
            default:
                return sys().flux(q);
        }
    }

    Mat deriv_left(const FrozenFlux& fz, const Vec& p, const Vec&) const override {
        const double sm = fz.s_minus, sp = fz.s_plus, d = delta_;
        const Mat df = sys().flux_jacobian(p);
        switch (fz.branch) {
            case 1:
                return df;
            case 2:
                return ((sp + d) / (sp + 2.0 * d)) * (df + Mat::identity(dim(), d));
            case 3:
                return ((sp + d) / (sp - sm + 2.0 * d)) * (df - Mat::identity(dim(), sm - d));
            case 4:
                return (d / (2.0 * d - sm)) * (df - Mat::identity(dim(), sm - d));
            default:
                return Mat(dim());
        }
    }

    Mat deriv_right(const FrozenFlux& fz, const Vec&, const Vec& q) const override {
        const double sm = fz.s_minus, sp = fz.s_plus, d = delta_;
        const Mat df = sys().flux_jacobian(q);
        switch (fz.branch) {
            case 1:
                return Mat(dim());
            case 2:
                return (d / (sp + 2.0 * d)) * (df - Mat::identity(dim(), sp + d));
            case 3:
                return ((sm - d) / (sp - sm + 2.0 * d)) * (Mat::identity(dim(), sp + d) - df);
            case 4:
                return ((d - sm) / (2.0 * d - sm)) * (df - Mat::identity(dim(), d));
            default:
                return df;
        }
    }

    double speed_bound(const FrozenFlux& fz) const override { return fz.lambda_hat + delta_; }

protected:
    int classify(double s_minus, double s_plus) const override {
        if (s_minus >= delta_) return 1;
        if (s_minus >= 0.0) return 2;
        if (s_plus >= 0.0) return 3;
        if (s_plus > -delta_) return 4;
        return 5;
    }

private:
    double delta_;
};

int path_samples_param(const ParamMap& params) {
    auto it = params.find("path_samples");
    if (it == params.end()) return 17;
    const int n = static_cast<int>(it->second);
    if (n < 2 || static_cast<double>(n) != it->second)
        throw std::invalid_argument("make_flux: path_samples must be an integer >= 2");
    return n;
}

void reject_unknown(const ParamMap& params, std::initializer_list<const char*> allowed,
                    const std::string& kind) {
    for (const auto& [key, value] : params) {
        bool ok = key == "path_samples";
        for (const char* a : allowed)
            if (key == a) ok = true;
        if (!ok) throw std::invalid_argument("make_flux(" + kind + "): unknown param '" + key + "'");
        (void)value;
    }
}

}  // namespace

FluxPtr make_flux(const std::string& kind, SystemPtr sys, const ParamMap& params) {
    const int ps = path_samples_param(params);
    if (kind == "rusanov") {
        reject_unknown(params, {"mu"}, kind);
        const double mu = params.count("mu") ? params.at("mu") : 3.0;
        return std::make_shared<RusanovFlux>(std::move(sys), mu, ps);
    }
    if (kind == "hll") {
        reject_unknown(params, {}, kind);
        return std::make_shared<HllFlux>(std::move(sys), ps);
    }
    if (kind == "hll_fix") {
        reject_unknown(params, {"delta"}, kind);
        if (!params.count("delta")) throw std::invalid_argument("hll_fix: delta is required");
        return std::make_shared<HllFixFlux>(std::move(sys), params.at("delta"), ps);
    }
    throw std::invalid_argument("make_flux: unknown kind '" + kind +
                                "' (builtins: rusanov, hll, hll_fix)");
}

// ---------------------------------------------------------------------------

double check_consistency(const NumericalFlux& flux, const std::vector<Vec>& states) {
    double worst = 0.0;
    for (const Vec& u : states) {
        const Vec fu = flux.sys().flux(u);
        const Vec fl = flux.value(flux.freeze(u, u), u, u);
        worst = std::max(worst, (fl - fu).norm_inf());
    }
    return worst;
}

double check_flux_jacobians(const NumericalFlux& flux,
                            const std::vector<std::array<Vec, 4>>& tuples, double step) {
    double worst = 0.0;
    const int n = flux.dim();
    for (const auto& t : tuples) {
        const FrozenFlux fz = flux.freeze(t[0], t[1]);
        const Vec& p = t[2];
        const Vec& q = t[3];
        const Mat dl = flux.deriv_left(fz, p, q);
        const Mat dr = flux.deriv_right(fz, p, q);
        const double scale = std::max({1.0, dl.max_abs(), dr.max_abs()});
        for (int j = 0; j < n; ++j) {
            Vec pp = p, pm = p, qp = q, qm = q;
            pp[j] += step;
            pm[j] -= step;
            qp[j] += step;
            qm[j] -= step;
            const Vec dcol_l = (1.0 / (2.0 * step)) * (flux.value(fz, pp, q) - flux.value(fz, pm, q));
            const Vec dcol_r = (1.0 / (2.0 * step)) * (flux.value(fz, p, qp) - flux.value(fz, p, qm));
            for (int i = 0; i < n; ++i) {
                worst = std::max(worst, std::abs(dcol_l[i] - dl(i, j)) / scale);
                worst = std::max(worst, std::abs(dcol_r[i] - dr(i, j)) / scale);
            }
        }
    }
    return worst;
}

double check_second_order_consistency(const NumericalFlux& flux,
                                      const std::vector<std::pair<Vec, Vec>>& pairs,
                                      int points_per_pair) {
    double worst = 0.0;
    for (const auto& [p, q] : pairs) {
        const FrozenFlux fz = flux.freeze(p, q);
        const auto path = states_along_entropy_path(flux.sys(), p, q, points_per_pair);
        for (const Vec& x : path) {
            const Mat sum = flux.deriv_left(fz, x, q) + flux.deriv_right(fz, p, x);
            worst = std::max(worst, (sum - flux.sys().flux_jacobian(x)).max_abs());
        }
    }
    return worst;
}

MonotonicityReport check_monotonicity(const NumericalFlux& flux,
                                      const std::vector<std::pair<Vec, Vec>>& pairs,
                                      int points_per_pair) {
    MonotonicityReport rep;
    rep.min_left_eig = std::numeric_limits<double>::infinity();
    rep.max_right_eig = -std::numeric_limits<double>::infinity();
    for (const auto& [p, q] : pairs) {
        const FrozenFlux fz = flux.freeze(p, q);
        const auto path = states_along_entropy_path(flux.sys(), p, q, points_per_pair);
        for (const Vec& x : path) {
            const Mat hinv = inverse(flux.sys().entropy_hessian(x));
            const Mat left = flux.deriv_left(fz, x, q).matmul(hinv);
            const Mat right = flux.deriv_right(fz, p, x).matmul(hinv);
            rep.min_left_eig = std::min(rep.min_left_eig, symmetric_eigenvalues(left).lo);
            rep.max_right_eig = std::max(rep.max_right_eig, symmetric_eigenvalues(right).hi);
            rep.asymmetry = std::max({rep.asymmetry, (left - left.transposed()).max_abs(),
                                      (right - right.transposed()).max_abs()});
        }
    }
    return rep;
}

}  // namespace hyp1d
