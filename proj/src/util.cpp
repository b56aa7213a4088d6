#include "hyp1d/util.hpp"

#include <atomic>
#include <charconv>
#include <cmath>
#include <cstdlib>
#include <random>
#include <stdexcept>
#include <thread>
#include <vector>

namespace hyp1d {

// ---------------------------------------------------------------------------
// Vec

Vec::Vec(int n, double fill) : n_(n) {
    if (n < 0 || n > kMaxComp) throw std::invalid_argument("Vec: size out of range");
    for (int i = 0; i < n; ++i) a_[static_cast<std::size_t>(i)] = fill;
}

Vec::Vec(std::initializer_list<double> xs) : n_(static_cast<int>(xs.size())) {
    if (n_ > kMaxComp) throw std::invalid_argument("Vec: too many entries");
    int i = 0;
    for (double x : xs) a_[static_cast<std::size_t>(i++)] = x;
}

Vec& Vec::operator+=(const Vec& o) {
    for (int i = 0; i < n_; ++i) (*this)[i] += o[i];
    return *this;
}

Vec& Vec::operator-=(const Vec& o) {
    for (int i = 0; i < n_; ++i) (*this)[i] -= o[i];
    return *this;
}

Vec& Vec::operator*=(double s) {
    for (int i = 0; i < n_; ++i) (*this)[i] *= s;
    return *this;
}

double Vec::dot(const Vec& o) const {
    double s = 0.0;
    for (int i = 0; i < n_; ++i) s += (*this)[i] * o[i];
    return s;
}

double Vec::norm1() const {
    double s = 0.0;
    for (int i = 0; i < n_; ++i) s += std::abs((*this)[i]);
    return s;
}

double Vec::norm_inf() const {
    double s = 0.0;
    for (int i = 0; i < n_; ++i) s = std::max(s, std::abs((*this)[i]));
    return s;
}

Vec operator+(Vec a, const Vec& b) { return a += b; }
Vec operator-(Vec a, const Vec& b) { return a -= b; }
Vec operator*(double s, Vec a) { return a *= s; }
Vec operator*(Vec a, double s) { return a *= s; }

// ---------------------------------------------------------------------------
// Mat

Mat::Mat(int n, double fill) : n_(n) {
    if (n < 0 || n > kMaxComp) throw std::invalid_argument("Mat: size out of range");
    for (int i = 0; i < n; ++i)
        for (int j = 0; j < n; ++j) (*this)(i, j) = fill;
}

Mat Mat::identity(int n, double scale) {
    Mat m(n);
    for (int i = 0; i < n; ++i) m(i, i) = scale;
    return m;
}

Mat& Mat::operator+=(const Mat& o) {
    for (int i = 0; i < n_; ++i)
        for (int j = 0; j < n_; ++j) (*this)(i, j) += o(i, j);
    return *this;
}

Mat& Mat::operator-=(const Mat& o) {
    for (int i = 0; i < n_; ++i)
        for (int j = 0; j < n_; ++j) (*this)(i, j) -= o(i, j);
    return *this;
}

Mat& Mat::operator*=(double s) {
    for (int i = 0; i < n_; ++i)
        for (int j = 0; j < n_; ++j) (*this)(i, j) *= s;
    return *this;
}

Mat Mat::transposed() const {
    Mat t(n_);
    for (int i = 0; i < n_; ++i)
        for (int j = 0; j < n_; ++j) t(j, i) = (*this)(i, j);
    return t;
}

Vec Mat::apply(const Vec& x) const {
    Vec y(n_);
    for (int i = 0; i < n_; ++i) {
        double s = 0.0;
        for (int j = 0; j < n_; ++j) s += (*this)(i, j) * x[j];
        y[i] = s;
    }
    return y;
}

Vec Mat::apply_left(const Vec& x) const {
    Vec y(n_);
    for (int j = 0; j < n_; ++j) {
        double s = 0.0;
        for (int i = 0; i < n_; ++i) s += x[i] * (*this)(i, j);
        y[j] = s;
    }
    return y;
}

Mat Mat::matmul(const Mat& o) const {
    Mat r(n_);
    for (int i = 0; i < n_; ++i)
        for (int k = 0; k < n_; ++k) {
            double aik = (*this)(i, k);
            for (int j = 0; j < n_; ++j) r(i, j) += aik * o(k, j);
        }
    return r;
}

double Mat::norm1() const {
    double best = 0.0;
    for (int j = 0; j < n_; ++j) {
        double s = 0.0;
        for (int i = 0; i < n_; ++i) s += std::abs((*this)(i, j));
        best = std::max(best, s);
    }
    return best;
}

double Mat::max_abs() const {
    double best = 0.0;
    for (int i = 0; i < n_; ++i)
        for (int j = 0; j < n_; ++j) best = std::max(best, std::abs((*this)(i, j)));
    return best;
}

Mat operator+(Mat a, const Mat& b) { return a += b; }
Mat operator-(Mat a, const Mat& b) { return a -= b; }
Mat operator*(double s, Mat a) { return a *= s; }

Vec solve(const Mat& a, const Vec& rhs) {
    const int n = a.size();
    if (n == 1) {
        if (a(0, 0) == 0.0) throw std::runtime_error("solve: singular 1x1 matrix");
        return Vec{rhs[0] / a(0, 0)};
    }
    if (n == 2) {
        const double det = a(0, 0) * a(1, 1) - a(0, 1) * a(1, 0);
        if (det == 0.0) throw std::runtime_error("solve: singular 2x2 matrix");
        return Vec{(a(1, 1) * rhs[0] - a(0, 1) * rhs[1]) / det,
                   (a(0, 0) * rhs[1] - a(1, 0) * rhs[0]) / det};
    }
    throw std::invalid_argument("solve: only n <= 2 supported");
}

Mat inverse(const Mat& a) {
    const int n = a.size();
    if (n == 1) {
        if (a(0, 0) == 0.0) throw std::runtime_error("inverse: singular 1x1 matrix");
        Mat m(1);
        m(0, 0) = 1.0 / a(0, 0);
        return m;
    }
    if (n == 2) {
        const double det = a(0, 0) * a(1, 1) - a(0, 1) * a(1, 0);
        if (det == 0.0) throw std::runtime_error("inverse: singular 2x2 matrix");
        Mat m(2);
        m(0, 0) = a(1, 1) / det;
        m(0, 1) = -a(0, 1) / det;
        m(1, 0) = -a(1, 0) / det;
        m(1, 1) = a(0, 0) / det;
        return m;
    }
    throw std::invalid_argument("inverse: only n <= 2 supported");
}

EigRange real_eigenvalues(const Mat& a) {
    const int n = a.size();
    if (n == 1) return {a(0, 0), a(0, 0)};
    if (n == 2) {
        const double tr = a(0, 0) + a(1, 1);
        const double det = a(0, 0) * a(1, 1) - a(0, 1) * a(1, 0);
        double disc = tr * tr - 4.0 * det;
        // tolerate rounding noise around a repeated eigenvalue
        const double scale = std::max(1.0, a.max_abs());
        if (disc < 0.0) {
            if (disc > -1e-12 * scale * scale)
                disc = 0.0;
            else
                throw std::runtime_error("real_eigenvalues: complex spectrum");
        }
        const double r = std::sqrt(disc);
        return {0.5 * (tr - r), 0.5 * (tr + r)};
    }
    throw std::invalid_argument("real_eigenvalues: only n <= 2 supported");
}

EigRange symmetric_eigenvalues(const Mat& a) {
    const int n = a.size();
    if (n == 1) return {a(0, 0), a(0, 0)};
    if (n == 2) {
        const double s01 = 0.5 * (a(0, 1) + a(1, 0));
        const double tr = a(0, 0) + a(1, 1);
        const double d = a(0, 0) - a(1, 1);
        const double r = std::sqrt(d * d + 4.0 * s01 * s01);
        return {0.5 * (tr - r), 0.5 * (tr + r)};
    }
    throw std::invalid_argument("symmetric_eigenvalues: only n <= 2 supported");
}

// ---------------------------------------------------------------------------
// Rng

struct Rng::Impl {
    std::mt19937_64 eng;
};

Rng::Rng(std::uint64_t seed) : impl_(new Impl{std::mt19937_64(seed)}) {}

Rng::~Rng() { delete impl_; }

std::uint64_t Rng::bits() { return impl_->eng(); }

double Rng::uniform() {
    // top 53 bits, exact dyadic scaling: identical on every platform
    return static_cast<double>(impl_->eng() >> 11) * 0x1.0p-53;
}

double Rng::uniform(double lo, double hi) { return lo + (hi - lo) * uniform(); }

// ---------------------------------------------------------------------------
// Parallel loops

int max_workers() {
    if (const char* env = std::getenv("HYP1D_WORKERS")) {
        const int w = std::atoi(env);
        if (w >= 1) return w;
    }
    const unsigned hc = std::thread::hardware_concurrency();
    return hc == 0 ? 1 : static_cast<int>(hc);
}

void parallel_chunks(std::int64_t n, const std::function<void(std::int64_t, std::int64_t)>& body) {
    if (n <= 0) return;
    constexpr std::int64_t kChunk = 1024;  // fixed so the decomposition is worker-independent
    const int workers = max_workers();
    const std::int64_t chunks = (n + kChunk - 1) / kChunk;
    if (workers == 1 || chunks == 1) {
        for (std::int64_t c = 0; c < chunks; ++c) {
            const std::int64_t b = c * kChunk;
            body(b, std::min(n, b + kChunk));
        }
        return;
    }
    std::atomic<std::int64_t> next{0};
    auto run = [&] {
        for (;;) {
            const std::int64_t c = next.fetch_add(1);
            if (c >= chunks) break;
            const std::int64_t b = c * kChunk;
            body(b, std::min(n, b + kChunk));
        }
    };
    std::vector<std::thread> pool;
    const int spawn = static_cast<int>(std::min<std::int64_t>(workers, chunks)) - 1;
    pool.reserve(static_cast<std::size_t>(spawn));
    for (int t = 0; t < spawn; ++t) pool.emplace_back(run);
    run();
    for (auto& th : pool) th.join();
}

// ---------------------------------------------------------------------------

std::string format_double(double x) {
    std::array<char, 64> buf;
    const auto res = std::to_chars(buf.data(), buf.data() + buf.size(), x);
    return std::string(buf.data(), res.ptr);
}

}  // namespace hyp1d
