#pragma once

// Uniform 1D grids, piecewise-constant and modal Legendre DG fields,
// Gauss-Legendre quadrature, projections, total variation, L1 distances.

#include <functional>
#include <vector>

#include "hyp1d/util.hpp"

namespace hyp1d {

struct Grid1D {
    Grid1D(double xmin, double xmax, int cells);

    double xmin = 0.0;
    double xmax = 1.0;
    int cells = 1;
    double h = 1.0;

    double face(int j) const { return xmin + j * h; }            // left face of cell j
    double center(int j) const { return xmin + (j + 0.5) * h; }
    int locate(double x) const;                                  // clamped cell index
    bool same_as(const Grid1D& o) const {
        return xmin == o.xmin && xmax == o.xmax && cells == o.cells;
    }
};

// ---------------------------------------------------------------------------
// Gauss-Legendre quadrature on [-1, 1]. Nodes by Newton iteration on P_n,
// cached per order; thread safe.

struct Quadrature {
    std::vector<double> nodes;
    std::vector<double> weights;
};

const Quadrature& gauss_legendre(int n);

double legendre(int m, double x);
double legendre_deriv(int m, double x);

// ---------------------------------------------------------------------------
// PCField: one state vector per cell.

class PCField {
public:
    PCField(const Grid1D& grid, int dim);

    const Grid1D& grid() const { return grid_; }
    int dim() const { return dim_; }

    Vec value(int j) const;
    void set(int j, const Vec& u);

    double* raw() { return data_.data(); }
    const double* raw() const { return data_.data(); }

private:
    Grid1D grid_;
    int dim_;
    std::vector<double> data_;
};

// ---------------------------------------------------------------------------
// DGField: modal Legendre coefficients per cell, degree k. On the reference
// cell xi in [-1, 1]: u(xi) = sum_m c_m P_m(xi), cell mean is c_0, and
// |P_m|^2 averaged over the cell is 1/(2m+1).

class DGField {
public:
    DGField(const Grid1D& grid, int dim, int degree);

    const Grid1D& grid() const { return grid_; }
    int dim() const { return dim_; }
    int degree() const { return degree_; }

    Vec coeff(int j, int m) const;
    void set_coeff(int j, int m, const Vec& c);

    Vec eval(int j, double xi) const;
    Vec mean(int j) const { return coeff(j, 0); }
    Vec trace_left(int j) const;   // xi = -1
    Vec trace_right(int j) const;  // xi = +1

    double* raw() { return data_.data(); }
    const double* raw() const { return data_.data(); }
    int cell_stride() const { return (degree_ + 1) * dim_; }

private:
    Grid1D grid_;
    int dim_;
    int degree_;
    std::vector<double> data_;
};

// ---------------------------------------------------------------------------
// Projections. l2_project uses enough Gauss nodes to keep the projection
// error dominated by the truncated modes.

PCField project_means(const Grid1D& grid, int dim, const std::function<Vec(double)>& f);
DGField l2_project(const Grid1D& grid, int dim, int degree, const std::function<Vec(double)>& f);

// ---------------------------------------------------------------------------
// Total variation (l1 over components; interior faces only). For DG fields
// the cell-interior slope contribution is integrated by quadrature.

double total_variation(const PCField& u);
double total_variation(const DGField& u);

// L1 distances on a common grid.
double l1_distance(const PCField& a, const PCField& b);
double l1_distance(const DGField& a, const DGField& b);

// L1 distance to a reference function, integrating exactly across the given
// breakpoints (each cell is split there, then subdivided for the kinks of
// the absolute value).
double l1_distance(const PCField& a, const std::function<Vec(double)>& f,
                   const std::vector<double>& breakpoints = {});
double l1_distance(const DGField& a, const std::function<Vec(double)>& f,
                   const std::vector<double>& breakpoints = {});

}  // namespace hyp1d
