#pragma once

// Small fixed-capacity vector/matrix math for state space work (n <= 4),
// a deterministic RNG, chunked parallel loops, and round-trip double text.

#include <array>
#include <cstdint>
#include <functional>
#include <initializer_list>
#include <string>

namespace hyp1d {

inline constexpr int kMaxComp = 4;

// ---------------------------------------------------------------------------
// Vec: dense vector with runtime size <= kMaxComp, value semantics.

class Vec {
public:
    Vec() = default;
    explicit Vec(int n, double fill = 0.0);
    Vec(std::initializer_list<double> xs);

    int size() const { return n_; }
    double& operator[](int i) { return a_[static_cast<std::size_t>(i)]; }
    double operator[](int i) const { return a_[static_cast<std::size_t>(i)]; }

    Vec& operator+=(const Vec& o);
    Vec& operator-=(const Vec& o);
    Vec& operator*=(double s);

    double dot(const Vec& o) const;
    double norm1() const;
    double norm_inf() const;

private:
    std::array<double, kMaxComp> a_{};
    int n_ = 0;
};

Vec operator+(Vec a, const Vec& b);
Vec operator-(Vec a, const Vec& b);
Vec operator*(double s, Vec a);
Vec operator*(Vec a, double s);

// ---------------------------------------------------------------------------
// Mat: dense row-major matrix with runtime size <= kMaxComp x kMaxComp.

class Mat {
public:
    Mat() = default;
    explicit Mat(int n, double fill = 0.0);

    static Mat identity(int n, double scale = 1.0);

    int size() const { return n_; }
    double& operator()(int i, int j) { return a_[static_cast<std::size_t>(i * kMaxComp + j)]; }
    double operator()(int i, int j) const { return a_[static_cast<std::size_t>(i * kMaxComp + j)]; }

    Mat& operator+=(const Mat& o);
    Mat& operator-=(const Mat& o);
    Mat& operator*=(double s);

    Mat transposed() const;
    Vec apply(const Vec& x) const;        // A x
    Vec apply_left(const Vec& x) const;   // x^T A, returned as a vector
    Mat matmul(const Mat& o) const;

    double norm1() const;      // induced l1 norm: max absolute column sum
    double max_abs() const;    // entrywise max |a_ij|

private:
    std::array<double, kMaxComp * kMaxComp> a_{};
    int n_ = 0;
};

Mat operator+(Mat a, const Mat& b);
Mat operator-(Mat a, const Mat& b);
Mat operator*(double s, Mat a);

// Closed-form solves and spectra for n in {1, 2}; errors for larger n or
// singular/complex cases.
Vec solve(const Mat& a, const Vec& rhs);
Mat inverse(const Mat& a);

struct EigRange {
    double lo = 0.0;
    double hi = 0.0;
};

// Eigenvalues of a (possibly nonsymmetric) matrix with real spectrum;
// errors if the 2x2 discriminant is negative beyond rounding noise.
EigRange real_eigenvalues(const Mat& a);

// Eigenvalues of the symmetric part (A + A^T)/2; always real.
EigRange symmetric_eigenvalues(const Mat& a);

// ---------------------------------------------------------------------------
// Rng: mt19937_64 with an explicit bits-to-double map so streams are
// identical across standard libraries.

class Rng {
public:
    explicit Rng(std::uint64_t seed);
    ~Rng();
    Rng(const Rng&) = delete;
    Rng& operator=(const Rng&) = delete;

    double uniform();                         // [0, 1)
    double uniform(double lo, double hi);
    std::uint64_t bits();

private:
    struct Impl;
    Impl* impl_;
};

// ---------------------------------------------------------------------------
// Deterministic parallelism. Loops are split into fixed-size chunks so the
// work decomposition (and thus every reduction written per chunk) does not
// depend on the worker count. HYP1D_WORKERS overrides the thread count.

int max_workers();

// body(begin, end) over disjoint chunks covering [0, n).
void parallel_chunks(std::int64_t n, const std::function<void(std::int64_t, std::int64_t)>& body);

// ---------------------------------------------------------------------------
// Shortest round-trip decimal text for a double (to_chars based).
std::string format_double(double x);

}  // namespace hyp1d
