#include "hyp1d/grid.hpp"

#include <algorithm>
#include <cmath>
#include <map>
#include <mutex>
#include <stdexcept>

namespace hyp1d {

Grid1D::Grid1D(double xmin_, double xmax_, int cells_)
    : xmin(xmin_), xmax(xmax_), cells(cells_) {
    if (!(xmax > xmin)) throw std::invalid_argument("Grid1D: xmax must exceed xmin");
    if (cells < 1) throw std::invalid_argument("Grid1D: need at least one cell");
    h = (xmax - xmin) / cells;
}

int Grid1D::locate(double x) const {
    const int j = static_cast<int>(std::floor((x - xmin) / h));
    return std::clamp(j, 0, cells - 1);
}

// ---------------------------------------------------------------------------
// Legendre polynomials and Gauss rules

double legendre(int m, double x) {
    if (m == 0) return 1.0;
    double pm1 = 1.0, p = x;
    for (int n = 1; n < m; ++n) {
        const double next = ((2.0 * n + 1.0) * x * p - n * pm1) / (n + 1.0);
        pm1 = p;
        p = next;
    }
    return p;
}

double legendre_deriv(int m, double x) {
    // P'_{n+1} = P'_{n-1} + (2n+1) P_n
    if (m == 0) return 0.0;
    double dm1 = 0.0, d = 1.0;     // P'_0, P'_1
    double pm1 = 1.0, p = x;       // P_0, P_1
    for (int n = 1; n < m; ++n) {
        const double dnext = dm1 + (2.0 * n + 1.0) * p;
        const double pnext = ((2.0 * n + 1.0) * x * p - n * pm1) / (n + 1.0);
        dm1 = d;
        d = dnext;
        pm1 = p;
        p = pnext;
    }
    return d;
}

const Quadrature& gauss_legendre(int n) {
    if (n < 1 || n > 64) throw std::invalid_argument("gauss_legendre: order out of range");
    static std::map<int, Quadrature> cache;
    static std::mutex mu;
    std::lock_guard<std::mutex> lock(mu);
    auto it = cache.find(n);
    if (it != cache.end()) return it->second;

    Quadrature q;
    q.nodes.resize(static_cast<std::size_t>(n));
    q.weights.resize(static_cast<std::size_t>(n));
    for (int i = 0; i < n; ++i) {
        // Chebyshev guess, then Newton on P_n
        double x = std::cos(M_PI * (i + 0.75) / (n + 0.5));
        for (int it2 = 0; it2 < 100; ++it2) {
            const double f = legendre(n, x);
            const double df = legendre_deriv(n, x);
            const double dx = f / df;
            x -= dx;
            if (std::abs(dx) < 1e-15) break;
        }
        const double dp = legendre_deriv(n, x);
        q.nodes[static_cast<std::size_t>(i)] = x;
        q.weights[static_cast<std::size_t>(i)] = 2.0 / ((1.0 - x * x) * dp * dp);
    }
    std::sort(q.nodes.begin(), q.nodes.end());
    // weights are symmetric; recompute in sorted order to keep pairing
    for (int i = 0; i < n; ++i) {
        const double x = q.nodes[static_cast<std::size_t>(i)];
        const double dp = legendre_deriv(n, x);
        q.weights[static_cast<std::size_t>(i)] = 2.0 / ((1.0 - x * x) * dp * dp);
    }
    return cache.emplace(n, std::move(q)).first->second;
}

// ---------------------------------------------------------------------------
// PCField

PCField::PCField(const Grid1D& grid, int dim)
    : grid_(grid), dim_(dim), data_(static_cast<std::size_t>(grid.cells) * dim, 0.0) {
    if (dim < 1 || dim > kMaxComp) throw std::invalid_argument("PCField: bad dim");
}

Vec PCField::value(int j) const {
    Vec u(dim_);
    const double* p = data_.data() + static_cast<std::size_t>(j) * dim_;
    for (int c = 0; c < dim_; ++c) u[c] = p[c];
    return u;
}

void PCField::set(int j, const Vec& u) {
    double* p = data_.data() + static_cast<std::size_t>(j) * dim_;
    for (int c = 0; c < dim_; ++c) p[c] = u[c];
}

// ---------------------------------------------------------------------------
// DGField

DGField::DGField(const Grid1D& grid, int dim, int degree)
    : grid_(grid),
      dim_(dim),
      degree_(degree),
      data_(static_cast<std::size_t>(grid.cells) * (degree + 1) * dim, 0.0) {
    if (dim < 1 || dim > kMaxComp) throw std::invalid_argument("DGField: bad dim");
    if (degree < 0 || degree > 4) throw std::invalid_argument("DGField: bad degree");
}

Vec DGField::coeff(int j, int m) const {
    Vec c(dim_);
    const double* p = data_.data() + (static_cast<std::size_t>(j) * (degree_ + 1) + m) * dim_;
    for (int i = 0; i < dim_; ++i) c[i] = p[i];
    return c;
}

void DGField::set_coeff(int j, int m, const Vec& c) {
    double* p = data_.data() + (static_cast<std::size_t>(j) * (degree_ + 1) + m) * dim_;
    for (int i = 0; i < dim_; ++i) p[i] = c[i];
}

Vec DGField::eval(int j, double xi) const {
    Vec u(dim_);
    for (int m = 0; m <= degree_; ++m) {
        const double pm = legendre(m, xi);
        const double* p = data_.data() + (static_cast<std::size_t>(j) * (degree_ + 1) + m) * dim_;
        for (int i = 0; i < dim_; ++i) u[i] += pm * p[i];
    }
    return u;
}

Vec DGField::trace_left(int j) const {
    // P_m(-1) = (-1)^m
    Vec u(dim_);
    for (int m = 0; m <= degree_; ++m) {
        const double sgn = (m % 2 == 0) ? 1.0 : -1.0;
        const double* p = data_.data() + (static_cast<std::size_t>(j) * (degree_ + 1) + m) * dim_;
        for (int i = 0; i < dim_; ++i) u[i] += sgn * p[i];
    }
    return u;
}

Vec DGField::trace_right(int j) const {
    // P_m(+1) = 1
    Vec u(dim_);
    for (int m = 0; m <= degree_; ++m) {
        const double* p = data_.data() + (static_cast<std::size_t>(j) * (degree_ + 1) + m) * dim_;
        for (int i = 0; i < dim_; ++i) u[i] += p[i];
    }
    return u;
}

// ---------------------------------------------------------------------------
// Projections

PCField project_means(const Grid1D& grid, int dim, const std::function<Vec(double)>& f) {
    PCField out(grid, dim);
    const Quadrature& q = gauss_legendre(6);
    for (int j = 0; j < grid.cells; ++j) {
        Vec avg(dim);
        for (std::size_t i = 0; i < q.nodes.size(); ++i) {
            const double x = grid.center(j) + 0.5 * grid.h * q.nodes[i];
            avg += (0.5 * q.weights[i]) * f(x);
        }
        out.set(j, avg);
    }
    return out;
}

DGField l2_project(const Grid1D& grid, int dim, int degree, const std::function<Vec(double)>& f) {
    DGField out(grid, dim, degree);
    const Quadrature& q = gauss_legendre(std::max(6, degree + 2));
    for (int j = 0; j < grid.cells; ++j) {
        std::vector<Vec> fx(q.nodes.size());
        for (std::size_t i = 0; i < q.nodes.size(); ++i)
            fx[i] = f(grid.center(j) + 0.5 * grid.h * q.nodes[i]);
        for (int m = 0; m <= degree; ++m) {
            Vec cm(dim);
            for (std::size_t i = 0; i < q.nodes.size(); ++i)
                cm += (0.5 * (2.0 * m + 1.0) * q.weights[i] * legendre(m, q.nodes[i])) * fx[i];
            out.set_coeff(j, m, cm);
        }
    }
    return out;
}

// ---------------------------------------------------------------------------
// Total variation

double total_variation(const PCField& u) {
    double tv = 0.0;
    for (int j = 0; j + 1 < u.grid().cells; ++j) tv += (u.value(j + 1) - u.value(j)).norm1();
    return tv;
}

double total_variation(const DGField& u) {
    const Quadrature& q = gauss_legendre(8);
    double tv = 0.0;
    for (int j = 0; j < u.grid().cells; ++j) {
        // interior variation: integral of |u'(xi)| dxi (h cancels)
        for (std::size_t i = 0; i < q.nodes.size(); ++i) {
            Vec du(u.dim());
            for (int m = 1; m <= u.degree(); ++m)
                du += legendre_deriv(m, q.nodes[i]) * u.coeff(j, m);
            tv += q.weights[i] * du.norm1();
        }
        if (j + 1 < u.grid().cells) tv += (u.trace_left(j + 1) - u.trace_right(j)).norm1();
    }
    return tv;
}

// ---------------------------------------------------------------------------
// L1 distances

double l1_distance(const PCField& a, const PCField& b) {
    if (!a.grid().same_as(b.grid()) || a.dim() != b.dim())
        throw std::invalid_argument("l1_distance: incompatible fields");
    double s = 0.0;
    for (int j = 0; j < a.grid().cells; ++j) s += (a.value(j) - b.value(j)).norm1();
    return s * a.grid().h;
}

double l1_distance(const DGField& a, const DGField& b) {
    if (!a.grid().same_as(b.grid()) || a.dim() != b.dim() || a.degree() != b.degree())
        throw std::invalid_argument("l1_distance: incompatible fields");
    // four panels per cell keep kinks of |a - b| cheap; a sign change at the
    // cell center (the common symmetric case) lands exactly on a boundary
    const Quadrature& q = gauss_legendre(6);
    double s = 0.0;
    for (int j = 0; j < a.grid().cells; ++j)
        for (int p = 0; p < 4; ++p) {
            const double lo = -1.0 + 0.5 * p;
            for (std::size_t i = 0; i < q.nodes.size(); ++i) {
                const double xi = lo + 0.25 * (q.nodes[i] + 1.0);
                s += 0.25 * q.weights[i] * (a.eval(j, xi) - b.eval(j, xi)).norm1();
            }
        }
    return s * 0.5 * a.grid().h;
}

namespace {

// integral of |field - f| over [xa, xb] inside cell j; the interval is split
// into four panels so kinks of the absolute value cost little accuracy
template <class EvalFn>
double l1_panel(const EvalFn& field_at, const std::function<Vec(double)>& f, double xa,
                double xb) {
    const Quadrature& q = gauss_legendre(6);
    double s = 0.0;
    const int panels = 4;
    for (int p = 0; p < panels; ++p) {
        const double a = xa + (xb - xa) * p / panels;
        const double b = xa + (xb - xa) * (p + 1) / panels;
        for (std::size_t i = 0; i < q.nodes.size(); ++i) {
            const double x = 0.5 * (a + b) + 0.5 * (b - a) * q.nodes[i];
            s += 0.5 * (b - a) * q.weights[i] * (field_at(x) - f(x)).norm1();
        }
    }
    return s;
}

template <class EvalFn>
double l1_against(const Grid1D& grid, const EvalFn& field_at,
                  const std::function<Vec(double)>& f, std::vector<double> brk) {
    std::sort(brk.begin(), brk.end());
    double s = 0.0;
    for (int j = 0; j < grid.cells; ++j) {
        const double xa = grid.face(j), xb = grid.face(j + 1);
        double left = xa;
        for (double b : brk)
            if (b > xa && b < xb) {
                s += l1_panel(field_at, f, left, b);
                left = b;
            }
        s += l1_panel(field_at, f, left, xb);
    }
    return s;
}

}  // namespace

double l1_distance(const PCField& a, const std::function<Vec(double)>& f,
                   const std::vector<double>& breakpoints) {
    return l1_against(
        a.grid(), [&](double x) { return a.value(a.grid().locate(x)); }, f, breakpoints);
}

double l1_distance(const DGField& a, const std::function<Vec(double)>& f,
                   const std::vector<double>& breakpoints) {
    return l1_against(
        a.grid(),
        [&](double x) {
            const int j = a.grid().locate(x);
            const double xi = 2.0 * (x - a.grid().center(j)) / a.grid().h;
            return a.eval(j, std::clamp(xi, -1.0, 1.0));
        },
        f, breakpoints);
}

}  // namespace hyp1d
