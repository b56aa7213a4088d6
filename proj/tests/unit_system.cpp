#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>
#include <vector>

#include "hyp1d/system.hpp"

using namespace hyp1d;

namespace {

std::vector<Vec> sample_box(int n, const Vec& lo, const Vec& hi, int count, std::uint64_t seed) {
    Rng rng(seed);
    std::vector<Vec> out;
    for (int k = 0; k < count; ++k) {
        Vec u(n);
        for (int i = 0; i < n; ++i) u[i] = rng.uniform(lo[i], hi[i]);
        out.push_back(u);
    }
    return out;
}

}  // namespace

TEST_CASE("factory rejects bad input") {
    CHECK_THROWS(make_system("euler"));
    CHECK_THROWS(make_system("burgers", {{"g", 1.0}}));
    CHECK_THROWS(make_system("linear2", {{"a12", 1.0}, {"a21", 0.5}}));
    CHECK_THROWS(make_system("shallow_water", {{"g", -1.0}}));
    CHECK_THROWS(make_system("shallow_water", {{"gravity", 9.81}}));
    CHECK_THROWS(make_system("isothermal_euler", {{"a", 0.0}}));
}

TEST_CASE("burgers closed forms") {
    auto sys = make_system("burgers");
    CHECK(sys->dim() == 1);
    const Vec u{2.0};
    CHECK(sys->flux(u)[0] == doctest::Approx(2.0));
    CHECK(sys->flux_jacobian(u)(0, 0) == doctest::Approx(2.0));
    CHECK(sys->entropy(u) == doctest::Approx(2.0));
    CHECK(sys->entropy_flux(u) == doctest::Approx(8.0 / 3.0));
    CHECK(sys->entropy_gradient(u)[0] == doctest::Approx(2.0));
    CHECK(sys->entropy_hessian(u)(0, 0) == doctest::Approx(1.0));
    // entropy variable map is the identity, so the inverse is exact
    CHECK(sys->from_entropy(Vec{2.0})[0] == doctest::Approx(2.0).epsilon(1e-14));
}

TEST_CASE("shallow water closed forms at (d,w)=(2,1), g=1") {
    auto sys = make_system("shallow_water", {{"g", 1.0}});
    const Vec u{2.0, 1.0};
    const Vec f = sys->flux(u);
    CHECK(f[0] == doctest::Approx(1.0));
    CHECK(f[1] == doctest::Approx(0.5 + 2.0));
    const Mat df = sys->flux_jacobian(u);
    CHECK(df(0, 0) == doctest::Approx(0.0));
    CHECK(df(0, 1) == doctest::Approx(1.0));
    CHECK(df(1, 0) == doctest::Approx(2.0 - 0.25));
    CHECK(df(1, 1) == doctest::Approx(1.0));
    CHECK(sys->entropy(u) == doctest::Approx(0.25 + 2.0));
    CHECK(sys->entropy_flux(u) == doctest::Approx(0.125 + 2.0));
    const Vec v = sys->entropy_gradient(u);
    CHECK(v[0] == doctest::Approx(1.875));
    CHECK(v[1] == doctest::Approx(0.5));
    // eigenvalues are w/d -+ sqrt(g d)
    const EigRange e = real_eigenvalues(df);
    CHECK(e.lo == doctest::Approx(0.5 - std::sqrt(2.0)));
    CHECK(e.hi == doctest::Approx(0.5 + std::sqrt(2.0)));
    CHECK_FALSE(sys->admissible(Vec{-0.5, 0.0}));
}

TEST_CASE("isothermal euler closed forms at (rho,m)=(2,1), a=1") {
    auto sys = make_system("isothermal_euler", {{"a", 1.0}});
    const Vec u{2.0, 1.0};
    const Vec f = sys->flux(u);
    CHECK(f[0] == doctest::Approx(1.0));
    CHECK(f[1] == doctest::Approx(2.5));
    CHECK(sys->entropy(u) == doctest::Approx(0.25 + 2.0 * std::log(2.0)));
    CHECK(sys->entropy_flux(u) == doctest::Approx(0.125 + std::log(2.0) + 1.0));
    const Vec v = sys->entropy_gradient(u);
    CHECK(v[0] == doctest::Approx(std::log(2.0) + 1.0 - 0.125));
    CHECK(v[1] == doctest::Approx(0.5));
    const EigRange e = real_eigenvalues(sys->flux_jacobian(u));
    CHECK(e.lo == doctest::Approx(-0.5));
    CHECK(e.hi == doctest::Approx(1.5));
}

TEST_CASE("entropy pair residuals over random admissible samples") {
    struct Case {
        SystemPtr sys;
        Vec lo, hi;
    };
    // boxes cover the experiment hulls; corners keep |q| small enough that
    // central-difference cancellation stays clear of the 1e-8 gate
    const std::vector<Case> cases = {
        {make_system("burgers"), Vec{-2.0}, Vec{2.0}},
        {make_system("linear2"), Vec{-2.0, -2.0}, Vec{2.0, 2.0}},
        {make_system("shallow_water", {{"g", 1.0}}), Vec{0.25, -1.6}, Vec{2.5, 1.6}},
        {make_system("isothermal_euler", {{"a", 1.5}}), Vec{0.25, -1.6}, Vec{2.5, 1.6}},
    };
    for (const auto& c : cases) {
        CAPTURE(c.sys->name());
        const auto samples = sample_box(c.sys->dim(), c.lo, c.hi, 50, 2024);
        const EntropyPairReport rep = verify_entropy_pair(*c.sys, samples, 1e-6);
        CHECK(rep.compatibility <= 1e-8);
        CHECK(rep.symmetry <= 1e-12);
        CHECK(rep.roundtrip <= 1e-10);
    }
}

TEST_CASE("analytic hessian matches second differences of the gradient") {
    // central differences of grad(eta) converge at second order in the step
    auto sys = make_system("shallow_water", {{"g", 1.3}});
    const Vec u{1.3, 0.4};
    auto fd_error = [&](double step) {
        const Mat h = sys->entropy_hessian(u);
        double worst = 0.0;
        for (int j = 0; j < 2; ++j) {
            Vec up = u, um = u;
            up[j] += step;
            um[j] -= step;
            const Vec col = (1.0 / (2.0 * step)) *
                            (sys->entropy_gradient(up) - sys->entropy_gradient(um));
            for (int i = 0; i < 2; ++i) worst = std::max(worst, std::abs(col[i] - h(i, j)));
        }
        return worst;
    };
    const double e3 = fd_error(1e-3);
    const double e4 = fd_error(1e-4);
    CHECK(e3 < 1e-4);
    CHECK(e4 < e3 / 50.0);  // second order: a 10x finer step buys about 100x
}

TEST_CASE("from_entropy edge behavior") {
    auto sys = make_system("shallow_water");
    CHECK_THROWS(sys->from_entropy(Vec{1.0, 0.0}, Vec{-1.0, 0.0}));
    // near-vacuum roundtrip still converges
    const Vec u{0.05, 0.01};
    const Vec back = sys->from_entropy(sys->to_entropy(u));
    CHECK((back - u).norm_inf() <= 1e-9);
}

TEST_CASE("hessian conditioning degrades monotonically toward vacuum") {
    auto sys = make_system("isothermal_euler", {{"a", 1.0}});
    double prev = 0.0;
    for (int k = 0; k <= 6; ++k) {
        const double rho = std::pow(2.0, -k);
        const Mat h = sys->entropy_hessian(Vec{rho, 0.1});
        const EigRange e = symmetric_eigenvalues(h);
        const double cond = e.hi / e.lo;
        CHECK(e.lo > 0.0);
        if (k > 0) CHECK(cond > prev);
        prev = cond;
    }
}

TEST_CASE("eigen range along entropy segments") {
    auto burgers = make_system("burgers");
    const EigRange r = eigen_range_along_path(*burgers, Vec{0.0}, Vec{1.0}, 17);
    CHECK(r.lo == doctest::Approx(0.0));
    CHECK(r.hi == doctest::Approx(1.0));

    // path endpoints are passed through untouched
    auto sw = make_system("shallow_water");
    const Vec ua{2.0, 0.3}, ub{0.7, -0.4};
    const auto pts = states_along_entropy_path(*sw, ua, ub, 9);
    CHECK(pts.front()[0] == ua[0]);
    CHECK(pts.front()[1] == ua[1]);
    CHECK(pts.back()[0] == ub[0]);
    CHECK(pts.back()[1] == ub[1]);

    // refining n -> 2n-1 keeps old nodes, so ranges are nested
    const EigRange c = eigen_range_along_path(*sw, ua, ub, 17);
    const EigRange f = eigen_range_along_path(*sw, ua, ub, 33);
    CHECK(f.lo <= c.lo + 1e-12);
    CHECK(f.hi >= c.hi - 1e-12);

    // linear2 paths always see exactly the constant spectrum
    auto lin = make_system("linear2");
    const EigRange rl = eigen_range_along_path(*lin, Vec{1.0, 0.5}, Vec{-0.3, 2.0}, 5);
    CHECK(rl.lo == doctest::Approx(-1.0));
    CHECK(rl.hi == doctest::Approx(1.0));
}
