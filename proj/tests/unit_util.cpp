#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cstdlib>
#include <vector>

#include "hyp1d/util.hpp"

using namespace hyp1d;

TEST_CASE("vec arithmetic and norms") {
    Vec a{1.0, -2.0};
    Vec b{0.5, 4.0};
    CHECK((a + b)[0] == doctest::Approx(1.5));
    CHECK((a - b)[1] == doctest::Approx(-6.0));
    CHECK((2.0 * a)[1] == doctest::Approx(-4.0));
    CHECK(a.dot(b) == doctest::Approx(0.5 - 8.0));
    CHECK(a.norm1() == doctest::Approx(3.0));
    CHECK(a.norm_inf() == doctest::Approx(2.0));
    CHECK_THROWS(Vec(5));
}

TEST_CASE("mat products, solve, inverse") {
    Mat a(2);
    a(0, 0) = 2.0;
    a(0, 1) = 1.0;
    a(1, 0) = -1.0;
    a(1, 1) = 3.0;
    const Vec x{1.0, 2.0};
    const Vec ax = a.apply(x);
    CHECK(ax[0] == doctest::Approx(4.0));
    CHECK(ax[1] == doctest::Approx(5.0));
    const Vec xa = a.apply_left(x);
    CHECK(xa[0] == doctest::Approx(0.0));
    CHECK(xa[1] == doctest::Approx(7.0));

    const Vec sol = solve(a, ax);
    CHECK(sol[0] == doctest::Approx(1.0));
    CHECK(sol[1] == doctest::Approx(2.0));

    const Mat id = inverse(a).matmul(a);
    CHECK(id(0, 0) == doctest::Approx(1.0));
    CHECK(id(0, 1) == doctest::Approx(0.0).epsilon(1e-12));
    CHECK(id(1, 0) == doctest::Approx(0.0).epsilon(1e-12));
    CHECK(id(1, 1) == doctest::Approx(1.0));

    // induced l1 norm is the max absolute column sum
    CHECK(a.norm1() == doctest::Approx(4.0));

    Mat sing(2);
    sing(0, 0) = 1.0;
    sing(0, 1) = 2.0;
    sing(1, 0) = 2.0;
    sing(1, 1) = 4.0;
    CHECK_THROWS(solve(sing, x));
}

TEST_CASE("eigenvalues of 2x2 matrices") {
    Mat swap(2);
    swap(0, 1) = 1.0;
    swap(1, 0) = 1.0;
    const EigRange e = real_eigenvalues(swap);
    CHECK(e.lo == doctest::Approx(-1.0));
    CHECK(e.hi == doctest::Approx(1.0));

    Mat rot(2);
    rot(0, 1) = -1.0;
    rot(1, 0) = 1.0;
    CHECK_THROWS(real_eigenvalues(rot));  // spectrum is +-i

    // symmetric part of rot vanishes
    const EigRange s = symmetric_eigenvalues(rot);
    CHECK(s.lo == doctest::Approx(0.0));
    CHECK(s.hi == doctest::Approx(0.0));

    Mat tri(2);
    tri(0, 0) = 3.0;
    tri(0, 1) = 5.0;
    tri(1, 1) = -2.0;
    const EigRange t = real_eigenvalues(tri);
    CHECK(t.lo == doctest::Approx(-2.0));
    CHECK(t.hi == doctest::Approx(3.0));
}

TEST_CASE("rng is deterministic and stays in range") {
    Rng r1(42), r2(42);
    for (int i = 0; i < 1000; ++i) {
        const double x = r1.uniform();
        CHECK(x == r2.uniform());
        CHECK(x >= 0.0);
        CHECK(x < 1.0);
    }
    Rng r3(43);
    CHECK(Rng(42).uniform() != r3.uniform());
    Rng box(7);
    for (int i = 0; i < 100; ++i) {
        const double x = box.uniform(-2.0, 5.0);
        CHECK(x >= -2.0);
        CHECK(x < 5.0);
    }
}

TEST_CASE("parallel chunks cover the range once, any worker count") {
    const std::int64_t n = 10000;
    std::vector<int> hits(static_cast<std::size_t>(n), 0);
    auto body = [&](std::int64_t b, std::int64_t e) {
        for (std::int64_t i = b; i < e; ++i) hits[static_cast<std::size_t>(i)] += 1;
    };

    setenv("HYP1D_WORKERS", "1", 1);
    parallel_chunks(n, body);
    setenv("HYP1D_WORKERS", "4", 1);
    parallel_chunks(n, body);
    unsetenv("HYP1D_WORKERS");

    for (std::int64_t i = 0; i < n; ++i) CHECK(hits[static_cast<std::size_t>(i)] == 2);
}

TEST_CASE("chunk decomposition is independent of worker count") {
    // per-chunk partial sums must land in the same slots regardless of workers
    const std::int64_t n = 5000;
    auto partials = [&](int workers) {
        setenv("HYP1D_WORKERS", std::to_string(workers).c_str(), 1);
        std::vector<double> acc(64, 0.0);
        parallel_chunks(n, [&](std::int64_t b, std::int64_t e) {
            double s = 0.0;
            for (std::int64_t i = b; i < e; ++i) s += 1.0 / (1.0 + static_cast<double>(i));
            acc[static_cast<std::size_t>(b / 1024)] = s;
        });
        unsetenv("HYP1D_WORKERS");
        return acc;
    };
    const auto a1 = partials(1);
    const auto a3 = partials(3);
    for (std::size_t i = 0; i < a1.size(); ++i) CHECK(a1[i] == a3[i]);
}

TEST_CASE("format_double round-trips exactly") {
    const double cases[] = {0.1,       1.0 / 3.0, -0.0,    0.0,     1e-300,
                            1e300,     3.5,       -2.125,  1.0,     123456789.123456789,
                            5e-324,    0x1.fffffffffffffp1023};
    for (double x : cases) {
        const std::string s = format_double(x);
        const double back = std::strtod(s.c_str(), nullptr);
        CHECK(back == x);
    }
    CHECK(format_double(0.5) == "0.5");
}
