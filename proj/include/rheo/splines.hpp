// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <array>
#include <cmath>
#include <numbers>
#include <stdexcept>
#include <vector>

// C^2 cubic B-spline bases on uniform 1D grids, clamped (open knot vector,
// cells+3 dofs) or periodic (wrapped uniform knots, cells dofs). Both kinds
// run through the same de Boor recursion on an explicit knot vector; the
// periodic case wraps the basis index modulo the dof count.

namespace rheo {

// Gauss-Legendre nodes and weights on [-1, 1], exact for degree 2n-1.
// Nodes solved by Newton iteration on the Legendre recurrence.
inline void gauss_legendre(int n, std::vector<double>& x, std::vector<double>& w) {
  if (n < 1) throw std::invalid_argument("gauss_legendre: n must be positive");
  x.assign(n, 0.0);
  w.assign(n, 0.0);
  for (int k = 0; k < (n + 1) / 2; ++k) {
    double xi = std::cos(std::numbers::pi * (k + 0.75) / (n + 0.5));
    double p1 = xi, p0 = 1.0, dp = 1.0;
    for (int it = 0; it < 100; ++it) {
      p0 = 1.0;
      p1 = xi;
      for (int j = 2; j <= n; ++j) {
        const double p2 = ((2 * j - 1) * xi * p1 - (j - 1) * p0) / j;
        p0 = p1;
        p1 = p2;
      }
      dp = n * (xi * p1 - p0) / (xi * xi - 1.0);
      const double dx = p1 / dp;
      xi -= dx;
      if (std::abs(dx) < 1e-15) {
        p0 = 1.0;
        p1 = xi;
        for (int j = 2; j <= n; ++j) {
          const double p2 = ((2 * j - 1) * xi * p1 - (j - 1) * p0) / j;
          p0 = p1;
          p1 = p2;
        }
        dp = n * (xi * p1 - p0) / (xi * xi - 1.0);
        break;
      }
    }
    x[k] = -xi;
    x[n - 1 - k] = xi;
    w[k] = w[n - 1 - k] = 2.0 / ((1.0 - xi * xi) * dp * dp);
  }
  if (n % 2 == 1) x[n / 2] = 0.0;
}

namespace detail {

// Values and first two derivatives of the four cubic B-splines nonzero on
// the knot span [t[span], t[span+1]]; de Boor's recursion with the standard
// derivative triangle.
inline void ders_basis_cubic(const std::vector<double>& t, int span, double x, double val[4],
                             double d1[4], double d2[4]) {
  constexpr int p = 3;
  double ndu[p + 1][p + 1], left[p + 1], right[p + 1];
  ndu[0][0] = 1.0;
  for (int j = 1; j <= p; ++j) {
    left[j] = x - t[span + 1 - j];
    right[j] = t[span + j] - x;
    double saved = 0.0;
    for (int r = 0; r < j; ++r) {
      ndu[j][r] = right[r + 1] + left[j - r];
      const double temp = ndu[r][j - 1] / ndu[j][r];
      ndu[r][j] = saved + right[r + 1] * temp;
      saved = left[j - r] * temp;
    }
    ndu[j][j] = saved;
  }
  double ders[3][p + 1];
  for (int j = 0; j <= p; ++j) ders[0][j] = ndu[j][p];
  for (int r = 0; r <= p; ++r) {
    double a[2][p + 1] = {};
    int s1 = 0, s2 = 1;
    a[0][0] = 1.0;
    for (int k = 1; k <= 2; ++k) {
      double dv = 0.0;
      const int rk = r - k, pk = p - k;
      if (r >= k) {
        a[s2][0] = a[s1][0] / ndu[pk + 1][rk];
        dv = a[s2][0] * ndu[rk][pk];
      }
      const int j1 = rk >= -1 ? 1 : -rk;
      const int j2 = r - 1 <= pk ? k - 1 : p - r;
      for (int j = j1; j <= j2; ++j) {
        a[s2][j] = (a[s1][j] - a[s1][j - 1]) / ndu[pk + 1][rk + j];
        dv += a[s2][j] * ndu[rk + j][pk];
      }
      if (r <= pk) {
        a[s2][k] = -a[s1][k - 1] / ndu[pk + 1][r];
        dv += a[s2][k] * ndu[r][pk];
      }
      ders[k][r] = dv;
      std::swap(s1, s2);
    }
  }
  for (int j = 0; j <= p; ++j) {
    val[j] = ders[0][j];
    d1[j] = p * ders[1][j];
    d2[j] = p * (p - 1) * ders[2][j];
  }
}

}  // namespace detail

struct SplineAxis {
  double length = 1.0;
  int cells = 2;
  bool periodic = false;
  int ndof = 0;               // cells+3 clamped, cells periodic
  std::vector<double> knots;  // explicit knot vector (extended for periodic)

  double h() const { return length / cells; }
};

inline SplineAxis make_axis(double length, int cells, bool periodic) {
  if (length <= 0.0) throw std::invalid_argument("make_axis: length must be positive");
  if (cells < 2) throw std::invalid_argument("make_axis: need at least 2 cells");
  if (periodic && cells < 4)
    throw std::invalid_argument("make_axis: periodic axes need at least 4 cells");
  SplineAxis ax;
  ax.length = length;
  ax.cells = cells;
  ax.periodic = periodic;
  const double h = length / cells;
  if (periodic) {
    ax.ndof = cells;
    ax.knots.resize(cells + 7);
    for (int j = 0; j < cells + 7; ++j) ax.knots[j] = (j - 3) * h;
  } else {
    ax.ndof = cells + 3;
    ax.knots.resize(cells + 7);
    for (int j = 0; j < cells + 7; ++j) {
      const int i = std::max(0, std::min(cells, j - 3));
      ax.knots[j] = i * h;
    }
  }
  return ax;
}

// Nonzero basis functions on cell c evaluated at x in that cell: global dof
// indices and values/derivatives.
inline void axis_basis(const SplineAxis& ax, int cell, double x, int dof[4], double val[4],
                       double d1[4], double d2[4]) {
  detail::ders_basis_cubic(ax.knots, cell + 3, x, val, d1, d2);
  for (int j = 0; j < 4; ++j) {
    const int i = cell + j;
    dof[j] = ax.periodic ? i % ax.cells : i;
  }
}

// Cell containing x; x wrapped into [0, length) for periodic axes, clamped
// to the domain otherwise.
inline int axis_locate(const SplineAxis& ax, double& x) {
  if (ax.periodic) {
    x -= ax.length * std::floor(x / ax.length);
    if (x >= ax.length) x = 0.0;  // guards the fmod edge case
  } else {
    x = std::max(0.0, std::min(ax.length, x));
  }
  int c = static_cast<int>(std::floor(x / ax.h()));
  return std::max(0, std::min(ax.cells - 1, c));
}

// Greville abscissae of a clamped axis: interpolation points at which the
// coefficient vector (xi_i) reproduces the linear function x exactly.
inline std::vector<double> greville(const SplineAxis& ax) {
  if (ax.periodic) throw std::invalid_argument("greville: clamped axes only");
  std::vector<double> g(ax.ndof);
  for (int i = 0; i < ax.ndof; ++i)
    g[i] = (ax.knots[i + 1] + ax.knots[i + 2] + ax.knots[i + 3]) / 3.0;
  return g;
}

}  // namespace rheo
