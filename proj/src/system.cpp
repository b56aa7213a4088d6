#include "hyp1d/system.hpp"

#include <cmath>
#include <limits>
#include <stdexcept>

namespace hyp1d {

namespace {

void require_keys(const ParamMap& params, std::initializer_list<const char*> allowed,
                  const std::string& sys_name) {
    for (const auto& [key, value] : params) {
        bool ok = false;
        for (const char* a : allowed)
            if (key == a) ok = true;
        if (!ok) throw std::invalid_argument(sys_name + ": unknown parameter '" + key + "'");
        (void)value;
    }
}

double get_or(const ParamMap& params, const std::string& key, double fallback) {
    auto it = params.find(key);
    return it == params.end() ? fallback : it->second;
}

bool finite(const Vec& u) {
    for (int i = 0; i < u.size(); ++i)
        if (!std::isfinite(u[i])) return false;
    return true;
}

// ---------------------------------------------------------------------------

class Burgers final : public System {
public:
    Burgers() : System("burgers", 1) {}

    Vec flux(const Vec& u) const override { return Vec{0.5 * u[0] * u[0]}; }

    Mat flux_jacobian(const Vec& u) const override {
        Mat a(1);
        a(0, 0) = u[0];
        return a;
    }

    double entropy(const Vec& u) const override { return 0.5 * u[0] * u[0]; }
    double entropy_flux(const Vec& u) const override { return u[0] * u[0] * u[0] / 3.0; }
    Vec entropy_gradient(const Vec& u) const override { return u; }
    Mat entropy_hessian(const Vec&) const override { return Mat::identity(1); }
    bool admissible(const Vec& u) const override { return finite(u); }
    Vec anchor() const override { return Vec{0.0}; }
    Vec entropy_seed(const Vec& v) const override { return v; }  // v(u) = u
};

class Linear2 final : public System {
public:
    explicit Linear2(const ParamMap& params) : System("linear2", 2), a_(2) {
        require_keys(params, {"a11", "a12", "a21", "a22"}, "linear2");
        a_(0, 0) = get_or(params, "a11", 0.0);
        a_(0, 1) = get_or(params, "a12", 1.0);
        a_(1, 0) = get_or(params, "a21", 1.0);
        a_(1, 1) = get_or(params, "a22", 0.0);
        // quadratic entropy |u|^2/2 is compatible only when A is symmetric
        if (a_(0, 1) != a_(1, 0))
            throw std::invalid_argument("linear2: matrix must be symmetric (a12 == a21)");
    }

    const Mat& matrix() const { return a_; }

    Vec flux(const Vec& u) const override { return a_.apply(u); }
    Mat flux_jacobian(const Vec&) const override { return a_; }
    double entropy(const Vec& u) const override { return 0.5 * u.dot(u); }
    double entropy_flux(const Vec& u) const override { return 0.5 * u.dot(a_.apply(u)); }
    Vec entropy_gradient(const Vec& u) const override { return u; }
    Mat entropy_hessian(const Vec&) const override { return Mat::identity(2); }
    bool admissible(const Vec& u) const override { return finite(u); }
    Vec anchor() const override { return Vec{0.0, 0.0}; }
    Vec entropy_seed(const Vec& v) const override { return v; }  // v(u) = u

private:
    Mat a_;
};

// u = (d, w): depth and discharge, pressure g d^2 / 2.
class ShallowWater final : public System {
public:
    explicit ShallowWater(const ParamMap& params) : System("shallow_water", 2) {
        require_keys(params, {"g", "d_min"}, "shallow_water");
        g_ = get_or(params, "g", 1.0);
        d_min_ = get_or(params, "d_min", 1e-8);
        if (!(g_ > 0.0)) throw std::invalid_argument("shallow_water: g must be positive");
        if (!(d_min_ > 0.0)) throw std::invalid_argument("shallow_water: d_min must be positive");
    }

    Vec flux(const Vec& u) const override {
        const double d = u[0], w = u[1];
        return Vec{w, w * w / d + 0.5 * g_ * d * d};
    }

    Mat flux_jacobian(const Vec& u) const override {
        const double d = u[0], w = u[1];
        Mat a(2);
        a(0, 1) = 1.0;
        a(1, 0) = g_ * d - (w / d) * (w / d);
        a(1, 1) = 2.0 * w / d;
        return a;
    }

    double entropy(const Vec& u) const override {
        const double d = u[0], w = u[1];
        return 0.5 * w * w / d + 0.5 * g_ * d * d;
    }

    double entropy_flux(const Vec& u) const override {
        const double d = u[0], w = u[1];
        return 0.5 * w * w * w / (d * d) + g_ * d * w;
    }

    Vec entropy_gradient(const Vec& u) const override {
        const double d = u[0], w = u[1];
        return Vec{g_ * d - 0.5 * (w / d) * (w / d), w / d};
    }

    Mat entropy_hessian(const Vec& u) const override {
        const double d = u[0], w = u[1];
        Mat h(2);
        h(0, 0) = w * w / (d * d * d) + g_;
        h(0, 1) = -w / (d * d);
        h(1, 0) = h(0, 1);
        h(1, 1) = 1.0 / d;
        return h;
    }

    bool admissible(const Vec& u) const override { return finite(u) && u[0] >= d_min_; }
    Vec anchor() const override { return Vec{1.0, 0.0}; }

    // v1 = g d - (w/d)^2 / 2, v2 = w/d invert in closed form
    Vec entropy_seed(const Vec& v) const override {
        const double d = (v[0] + 0.5 * v[1] * v[1]) / g_;
        if (!(d >= d_min_) || !std::isfinite(d)) return anchor();
        return Vec{d, d * v[1]};
    }

private:
    double g_;
    double d_min_;
};

// u = (rho, m): density and momentum, pressure a^2 rho.
class IsothermalEuler final : public System {
public:
    explicit IsothermalEuler(const ParamMap& params) : System("isothermal_euler", 2) {
        require_keys(params, {"a", "rho_min"}, "isothermal_euler");
        a_ = get_or(params, "a", 1.0);
        rho_min_ = get_or(params, "rho_min", 1e-8);
        if (!(a_ > 0.0)) throw std::invalid_argument("isothermal_euler: a must be positive");
        if (!(rho_min_ > 0.0))
            throw std::invalid_argument("isothermal_euler: rho_min must be positive");
    }

    Vec flux(const Vec& u) const override {
        const double rho = u[0], m = u[1];
        return Vec{m, m * m / rho + a_ * a_ * rho};
    }

    Mat flux_jacobian(const Vec& u) const override {
        const double rho = u[0], m = u[1];
        Mat a(2);
        a(0, 1) = 1.0;
        a(1, 0) = a_ * a_ - (m / rho) * (m / rho);
        a(1, 1) = 2.0 * m / rho;
        return a;
    }

    double entropy(const Vec& u) const override {
        const double rho = u[0], m = u[1];
        return 0.5 * m * m / rho + a_ * a_ * rho * std::log(rho);
    }

    double entropy_flux(const Vec& u) const override {
        const double rho = u[0], m = u[1];
        return 0.5 * m * m * m / (rho * rho) + a_ * a_ * m * (std::log(rho) + 1.0);
    }

    Vec entropy_gradient(const Vec& u) const override {
        const double rho = u[0], m = u[1];
        return Vec{a_ * a_ * (std::log(rho) + 1.0) - 0.5 * (m / rho) * (m / rho), m / rho};
    }

    Mat entropy_hessian(const Vec& u) const override {
        const double rho = u[0], m = u[1];
        Mat h(2);
        h(0, 0) = m * m / (rho * rho * rho) + a_ * a_ / rho;
        h(0, 1) = -m / (rho * rho);
        h(1, 0) = h(0, 1);
        h(1, 1) = 1.0 / rho;
        return h;
    }

    bool admissible(const Vec& u) const override { return finite(u) && u[0] >= rho_min_; }
    Vec anchor() const override { return Vec{1.0, 0.0}; }

    // v1 = a^2 (log rho + 1) - (m/rho)^2 / 2, v2 = m/rho invert in closed form
    Vec entropy_seed(const Vec& v) const override {
        const double rho = std::exp((v[0] + 0.5 * v[1] * v[1]) / (a_ * a_) - 1.0);
        if (!(rho >= rho_min_) || !std::isfinite(rho)) return anchor();
        return Vec{rho, rho * v[1]};
    }

private:
    double a_;
    double rho_min_;
};

}  // namespace

// ---------------------------------------------------------------------------

Vec System::from_entropy(const Vec& v) const {
    Vec seed = entropy_seed(v);
    if (!admissible(seed)) seed = anchor();
    return from_entropy(v, seed);
}

Vec System::from_entropy(const Vec& v, const Vec& seed) const {
    if (!admissible(seed)) throw std::invalid_argument(name() + ".from_entropy: seed inadmissible");
    const double tol = 1e-12 * (1.0 + v.norm_inf());
    Vec u = seed;
    double phi = entropy(u) - v.dot(u);
    for (int it = 0; it < 50; ++it) {
        const Vec g = entropy_gradient(u) - v;
        const double gnorm = g.norm_inf();
        if (gnorm <= tol) return u;
        const Vec d = solve(entropy_hessian(u), g);  // Newton step is -d
        const double slope = -g.dot(d);              // derivative of phi along -d, negative
        double t = 1.0;
        bool accepted = false;
        while (t >= 1e-10) {
            const Vec trial = u - t * d;
            if (admissible(trial)) {
                const double phi_trial = entropy(trial) - v.dot(trial);
                // Armijo on phi, or a plain gradient-norm decrease: the latter
                // keeps Newton moving once phi differences sit below rounding.
                const bool armijo = phi_trial <= phi + 1e-4 * t * slope + 1e-15 * (1.0 + std::abs(phi));
                const bool shrink =
                    (entropy_gradient(trial) - v).norm_inf() <= (1.0 - 0.25 * t) * gnorm;
                if (armijo || shrink) {
                    u = trial;
                    phi = phi_trial;
                    accepted = true;
                    break;
                }
            }
            t *= 0.5;
        }
        if (!accepted)
            throw std::runtime_error(name() + ".from_entropy: stalled, entropy state (" +
                                     format_double(v[0]) +
                                     (v.size() > 1 ? ", " + format_double(v[1]) : "") +
                                     ") likely outside the admissible image");
    }
    throw std::runtime_error(name() + ".from_entropy: no convergence in 50 iterations");
}

SystemPtr make_system(const std::string& name, const ParamMap& params) {
    if (name == "burgers") {
        require_keys(params, {}, "burgers");
        return std::make_shared<Burgers>();
    }
    if (name == "linear2") return std::make_shared<Linear2>(params);
    if (name == "shallow_water") return std::make_shared<ShallowWater>(params);
    if (name == "isothermal_euler") return std::make_shared<IsothermalEuler>(params);
    throw std::invalid_argument(
        "make_system: unknown system '" + name +
        "' (builtins: burgers, linear2, shallow_water, isothermal_euler)");
}

// ---------------------------------------------------------------------------

EntropyPairReport verify_entropy_pair(const System& sys, const std::vector<Vec>& samples,
                                      double fd_step) {
    EntropyPairReport rep;
    const int n = sys.dim();
    for (const Vec& u : samples) {
        if (!sys.admissible(u))
            throw std::invalid_argument("verify_entropy_pair: inadmissible sample");
        const Mat df = sys.flux_jacobian(u);
        const Vec lhs = df.apply_left(sys.entropy_gradient(u));
        for (int i = 0; i < n; ++i) {
            Vec up = u, um = u;
            up[i] += fd_step;
            um[i] -= fd_step;
            const double dq = (sys.entropy_flux(up) - sys.entropy_flux(um)) / (2.0 * fd_step);
            rep.compatibility = std::max(rep.compatibility, std::abs(lhs[i] - dq));
        }
        const Mat h = sys.entropy_hessian(u);
        const Mat sym = h.matmul(df) - df.transposed().matmul(h);
        rep.symmetry = std::max(rep.symmetry, sym.max_abs());
        const Vec back = sys.from_entropy(sys.to_entropy(u));
        rep.roundtrip = std::max(rep.roundtrip, (back - u).norm_inf());
    }
    return rep;
}

std::vector<Vec> states_along_entropy_path(const System& sys, const Vec& ua, const Vec& ub,
                                           int n_samples) {
    if (n_samples < 2) throw std::invalid_argument("states_along_entropy_path: need >= 2 samples");
    if (!sys.admissible(ua) || !sys.admissible(ub))
        throw std::invalid_argument("states_along_entropy_path: inadmissible endpoint");
    const Vec va = sys.to_entropy(ua);
    const Vec vb = sys.to_entropy(ub);
    std::vector<Vec> out;
    out.reserve(static_cast<std::size_t>(n_samples));
    out.push_back(ua);
    Vec prev = ua;
    for (int i = 1; i + 1 < n_samples; ++i) {
        const double s = static_cast<double>(i) / (n_samples - 1);
        const Vec v = (1.0 - s) * va + s * vb;
        // closed-form seed where the system has one, else march from the
        // previous path point
        Vec seed = sys.entropy_seed(v);
        if (!sys.admissible(seed)) seed = prev;
        prev = sys.from_entropy(v, seed);
        out.push_back(prev);
    }
    out.push_back(ub);
    return out;
}

EigRange eigen_range_along_path(const System& sys, const Vec& ua, const Vec& ub, int n_samples) {
    const auto states = states_along_entropy_path(sys, ua, ub, n_samples);
    EigRange r{std::numeric_limits<double>::infinity(), -std::numeric_limits<double>::infinity()};
    for (const Vec& u : states) {
        const EigRange e = real_eigenvalues(sys.flux_jacobian(u));
        r.lo = std::min(r.lo, e.lo);
        r.hi = std::max(r.hi, e.hi);
    }
    return r;
}

}  // namespace hyp1d
