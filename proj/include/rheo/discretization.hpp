// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <array>
#include <fstream>
#include <functional>
#include <iomanip>
#include <memory>
#include <sstream>
#include <string>
#include <vector>

#include "rheo/linalg.hpp"
#include "rheo/splines.hpp"
#include "rheo/tensor.hpp"

// Tensor-product cubic B-spline discretization on a box [0,L_0] x ... with
// per-axis clamped or periodic ends, plus Gauss quadrature tables, scalar
// field evaluation up to second derivatives, L2 projection, and the plain
// text state dump format.

namespace rheo {

template <int d>
struct Grid {
  std::array<double, d> lengths{};
  std::array<int, d> cells{};
  std::array<bool, d> periodic{};
};

template <int d>
class Basis {
  static_assert(d == 2 || d == 3);

 public:
  static constexpr int nloc = d == 2 ? 16 : 64;  // 4^d local scalar dofs per cell

  struct ShapeSet {
    std::array<int, nloc> dof;
    std::array<double, nloc> val;
    std::array<Vec<d>, nloc> grad;
    std::array<Mat<d>, nloc> hess;
  };

  explicit Basis(const Grid<d>& grid, int gauss = 4) : grid_(grid), nq1_(gauss) {
    std::vector<double> gx, gw;
    gauss_legendre(gauss, gx, gw);
    ndof_ = 1;
    ncells_ = 1;
    for (int k = 0; k < d; ++k) {
      AxisTable& t = tab_[k];
      t.ax = make_axis(grid.lengths[k], grid.cells[k], grid.periodic[k]);
      t.ref_w = gw;
      const double h = t.ax.h();
      t.qx.resize(static_cast<std::size_t>(t.ax.cells) * gauss);
      t.val.resize(t.qx.size());
      t.d1.resize(t.qx.size());
      t.d2.resize(t.qx.size());
      t.dofs.resize(t.ax.cells);
      for (int c = 0; c < t.ax.cells; ++c) {
        double dummy_val[4], dummy_d1[4], dummy_d2[4];
        int dof[4];
        axis_basis(t.ax, c, (c + 0.5) * h, dof, dummy_val, dummy_d1, dummy_d2);
        for (int j = 0; j < 4; ++j) t.dofs[c][j] = dof[j];
        for (int g = 0; g < gauss; ++g) {
          const std::size_t idx = static_cast<std::size_t>(c) * gauss + g;
          const double x = (c + 0.5 * (1.0 + gx[g])) * h;
          t.qx[idx] = x;
          axis_basis(t.ax, c, x, dof, t.val[idx].data(), t.d1[idx].data(), t.d2[idx].data());
        }
      }
      ndof_ *= t.ax.ndof;
      ncells_ *= t.ax.cells;
    }
  }

  const Grid<d>& grid() const { return grid_; }
  int ndof() const { return ndof_; }
  long ncells() const { return ncells_; }
  int nq_cell() const {
    int n = 1;
    for (int k = 0; k < d; ++k) n *= nq1_;
    return n;
  }
  const SplineAxis& axis(int k) const { return tab_[k].ax; }

  std::array<int, d> cell_multi(long cell) const {
    std::array<int, d> c{};
    for (int k = d - 1; k >= 0; --k) {
      c[k] = static_cast<int>(cell % tab_[k].ax.cells);
      cell /= tab_[k].ax.cells;
    }
    return c;
  }

  double cell_volume() const {
    double v = 1.0;
    for (int k = 0; k < d; ++k) v *= tab_[k].ax.h();
    return v;
  }

  double weight(int q) const {
    double w = 1.0;
    for (int k = d - 1; k >= 0; --k) {
      w *= tab_[k].ref_w[q % nq1_] * 0.5 * tab_[k].ax.h();
      q /= nq1_;
    }
    return w;
  }

  Vec<d> qpoint(long cell, int q) const {
    const auto c = cell_multi(cell);
    std::array<int, d> g = qdigits(q);
    Vec<d> x;
    for (int k = 0; k < d; ++k)
      x[k] = tab_[k].qx[static_cast<std::size_t>(c[k]) * nq1_ + g[k]];
    return x;
  }

  void shape_at(long cell, int q, ShapeSet& s) const {
    const auto c = cell_multi(cell);
    const auto g = qdigits(q);
    std::array<const double*, d> va, da, dda;
    std::array<const int*, d> dfs;
    for (int k = 0; k < d; ++k) {
      const std::size_t idx = static_cast<std::size_t>(c[k]) * nq1_ + g[k];
      va[k] = tab_[k].val[idx].data();
      da[k] = tab_[k].d1[idx].data();
      dda[k] = tab_[k].d2[idx].data();
      dfs[k] = tab_[k].dofs[c[k]].data();
    }
    combine(va, da, dda, dfs, s);
  }

  // value, gradient and hessian of a scalar coefficient field at x
  void eval_all(const double* coef, Vec<d> x, double* value, Vec<d>* grad, Mat<d>* hess) const {
    std::array<std::array<double, 4>, d> va, da, dda;
    std::array<std::array<int, 4>, d> dfs;
    for (int k = 0; k < d; ++k) {
      double xk = x[k];
      const int c = axis_locate(tab_[k].ax, xk);
      axis_basis(tab_[k].ax, c, xk, dfs[k].data(), va[k].data(), da[k].data(), dda[k].data());
    }
    ShapeSet s;
    std::array<const double*, d> pva, pda, pdda;
    std::array<const int*, d> pdfs;
    for (int k = 0; k < d; ++k) {
      pva[k] = va[k].data();
      pda[k] = da[k].data();
      pdda[k] = dda[k].data();
      pdfs[k] = dfs[k].data();
    }
    combine(pva, pda, pdda, pdfs, s);
    if (value) *value = 0.0;
    if (grad) *grad = Vec<d>{};
    if (hess) *hess = Mat<d>{};
    for (int j = 0; j < nloc; ++j) {
      const double cj = coef[s.dof[j]];
      if (value) *value += cj * s.val[j];
      if (grad)
        for (int a = 0; a < d; ++a) (*grad)[a] += cj * s.grad[j][a];
      if (hess)
        for (int a = 0; a < d; ++a)
          for (int b = 0; b < d; ++b) (*hess)(a, b) += cj * s.hess[j](a, b);
    }
  }

  double eval(const double* coef, const Vec<d>& x) const {
    double v;
    eval_all(coef, x, &v, nullptr, nullptr);
    return v;
  }

  // L2 projection of f onto the spline space (mass matrix LU cached)
  std::vector<double> project_scalar(const std::function<double(const Vec<d>&)>& f) const {
    ensure_mass_lu();
    std::vector<double> rhs(ndof_, 0.0);
    ShapeSet s;
    for (long cell = 0; cell < ncells_; ++cell)
      for (int q = 0; q < nq_cell(); ++q) {
        shape_at(cell, q, s);
        const double w = weight(q);
        const double fx = f(qpoint(cell, q));
        for (int j = 0; j < nloc; ++j) rhs[s.dof[j]] += w * fx * s.val[j];
      }
    mass_lu_->solve(rhs);
    return rhs;
  }

  // --- boundary faces (clamped axes only) ---

  long nfcells(int axis) const {
    long n = 1;
    for (int k = 0; k < d; ++k)
      if (k != axis) n *= tab_[k].ax.cells;
    return n;
  }

  int nq_face() const {
    int n = 1;
    for (int k = 0; k < d - 1; ++k) n *= nq1_;
    return n;
  }

  double face_weight(int axis, int fq) const {
    double w = 1.0;
    for (int k = d - 1; k >= 0; --k) {
      if (k == axis) continue;
      w *= tab_[k].ref_w[fq % nq1_] * 0.5 * tab_[k].ax.h();
      fq /= nq1_;
    }
    return w;
  }

  Vec<d> face_qpoint(int axis, int side, long fcell, int fq) const {
    Vec<d> x;
    x[axis] = side == 0 ? 0.0 : tab_[axis].ax.length;
    auto c = face_cell_multi(axis, fcell);
    auto g = face_qdigits(axis, fq);
    for (int k = 0; k < d; ++k) {
      if (k == axis) continue;
      x[k] = tab_[k].qx[static_cast<std::size_t>(c[k]) * nq1_ + g[k]];
    }
    return x;
  }

  void face_shape_at(int axis, int side, long fcell, int fq, ShapeSet& s) const {
    auto c = face_cell_multi(axis, fcell);
    auto g = face_qdigits(axis, fq);
    c[axis] = side == 0 ? 0 : tab_[axis].ax.cells - 1;

    std::array<std::array<double, 4>, d> bva{}, bda{}, bdda{};
    std::array<std::array<int, 4>, d> bdfs{};
    std::array<const double*, d> va, da, dda;
    std::array<const int*, d> dfs;
    for (int k = 0; k < d; ++k) {
      if (k == axis) {
        const double xb = side == 0 ? 0.0 : tab_[k].ax.length;
        axis_basis(tab_[k].ax, c[k], xb, bdfs[k].data(), bva[k].data(), bda[k].data(),
                   bdda[k].data());
        va[k] = bva[k].data();
        da[k] = bda[k].data();
        dda[k] = bdda[k].data();
        dfs[k] = bdfs[k].data();
      } else {
        const std::size_t idx = static_cast<std::size_t>(c[k]) * nq1_ + g[k];
        va[k] = tab_[k].val[idx].data();
        da[k] = tab_[k].d1[idx].data();
        dda[k] = tab_[k].d2[idx].data();
        dfs[k] = tab_[k].dofs[c[k]].data();
      }
    }
    combine(va, da, dda, dfs, s);
  }

  // scalar dofs whose basis functions are nonzero on the face x_axis = 0 or L
  std::vector<int> edge_dofs(int axis, int side) const {
    std::vector<int> out;
    const int fixed = side == 0 ? 0 : tab_[axis].ax.ndof - 1;
    std::array<int, d> idx{};
    for (;;) {
      idx[axis] = fixed;
      out.push_back(scalar_index(idx));
      int k = d - 1;
      for (; k >= 0; --k) {
        if (k == axis) continue;
        if (++idx[k] < tab_[k].ax.ndof) break;
        idx[k] = 0;
      }
      if (k < 0) break;
    }
    return out;
  }

  int scalar_index(const std::array<int, d>& idx) const {
    int r = 0;
    for (int k = 0; k < d; ++k) r = r * tab_[k].ax.ndof + idx[k];
    return r;
  }

 private:
  struct AxisTable {
    SplineAxis ax;
    std::vector<double> ref_w;
    std::vector<double> qx;
    std::vector<std::array<double, 4>> val, d1, d2;
    std::vector<std::array<int, 4>> dofs;
  };

  std::array<int, d> qdigits(int q) const {
    std::array<int, d> g{};
    for (int k = d - 1; k >= 0; --k) {
      g[k] = q % nq1_;
      q /= nq1_;
    }
    return g;
  }

  std::array<int, d> face_cell_multi(int axis, long fcell) const {
    std::array<int, d> c{};
    for (int k = d - 1; k >= 0; --k) {
      if (k == axis) continue;
      c[k] = static_cast<int>(fcell % tab_[k].ax.cells);
      fcell /= tab_[k].ax.cells;
    }
    return c;
  }

  std::array<int, d> face_qdigits(int axis, int fq) const {
    std::array<int, d> g{};
    for (int k = d - 1; k >= 0; --k) {
      if (k == axis) continue;
      g[k] = fq % nq1_;
      fq /= nq1_;
    }
    return g;
  }

  void combine(const std::array<const double*, d>& va, const std::array<const double*, d>& da,
               const std::array<const double*, d>& dda, const std::array<const int*, d>& dfs,
               ShapeSet& s) const {
    std::array<int, d> j{};
    for (int n = 0; n < nloc; ++n) {
      std::array<int, d> gi{};
      for (int k = 0; k < d; ++k) gi[k] = dfs[k][j[k]];
      s.dof[n] = scalar_index(gi);
      double v = 1.0;
      for (int k = 0; k < d; ++k) v *= va[k][j[k]];
      s.val[n] = v;
      for (int a = 0; a < d; ++a) {
        double gv = 1.0;
        for (int k = 0; k < d; ++k) gv *= (k == a) ? da[k][j[k]] : va[k][j[k]];
        s.grad[n][a] = gv;
        for (int b = a; b < d; ++b) {
          double hv = 1.0;
          if (a == b) {
            for (int k = 0; k < d; ++k) hv *= (k == a) ? dda[k][j[k]] : va[k][j[k]];
          } else {
            for (int k = 0; k < d; ++k)
              hv *= (k == a || k == b) ? da[k][j[k]] : va[k][j[k]];
          }
          s.hess[n](a, b) = hv;
          s.hess[n](b, a) = hv;
        }
      }
      for (int k = d - 1; k >= 0; --k) {
        if (++j[k] < 4) break;
        j[k] = 0;
      }
    }
  }

  void ensure_mass_lu() const {
    if (mass_lu_) return;
    std::vector<double> m(static_cast<std::size_t>(ndof_) * ndof_, 0.0);
    ShapeSet s;
    for (long cell = 0; cell < ncells_; ++cell)
      for (int q = 0; q < nq_cell(); ++q) {
        shape_at(cell, q, s);
        const double w = weight(q);
        for (int a = 0; a < nloc; ++a)
          for (int b = 0; b < nloc; ++b)
            m[static_cast<std::size_t>(s.dof[a]) * ndof_ + s.dof[b]] += w * s.val[a] * s.val[b];
      }
    mass_lu_ = std::make_shared<DenseLU>(std::move(m), ndof_);
  }

  Grid<d> grid_;
  int nq1_;
  std::array<AxisTable, d> tab_;
  int ndof_ = 0;
  long ncells_ = 0;
  mutable std::shared_ptr<DenseLU> mass_lu_;
};

// --- evolving state and its dump format ---------------------------------

// Displacement u = y - id, velocity v = u-dot, inelastic strain P. Each
// component is one scalar coefficient vector; storing the displacement keeps
// periodic axes exact (the identity map itself is not periodic).
template <int d>
struct State {
  double time = 0.0;
  std::vector<double> u, v, P;  // [comp * ndof + i], P row-major in (r, c)

  double* u_comp(int c, int ndof) { return u.data() + static_cast<std::size_t>(c) * ndof; }
  double* P_comp(int r, int c, int ndof) {
    return P.data() + static_cast<std::size_t>(r * d + c) * ndof;
  }
  const double* u_comp(int c, int ndof) const {
    return u.data() + static_cast<std::size_t>(c) * ndof;
  }
  const double* v_comp(int c, int ndof) const {
    return v.data() + static_cast<std::size_t>(c) * ndof;
  }
  const double* P_comp(int r, int c, int ndof) const {
    return P.data() + static_cast<std::size_t>(r * d + c) * ndof;
  }
};

template <int d>
State<d> make_state(const Basis<d>& basis) {
  State<d> s;
  const int n = basis.ndof();
  s.u.assign(static_cast<std::size_t>(d) * n, 0.0);
  s.v.assign(static_cast<std::size_t>(d) * n, 0.0);
  s.P.assign(static_cast<std::size_t>(d) * d * n, 0.0);
  for (int r = 0; r < d; ++r)
    for (int i = 0; i < n; ++i) s.P[static_cast<std::size_t>(r * d + r) * n + i] = 1.0;
  return s;
}

namespace detail {
inline std::string fmt16(double x) {
  std::ostringstream os;
  os << std::scientific << std::setprecision(16) << x;
  return os.str();
}
}  // namespace detail

template <int d>
void write_state(std::ostream& os, const Grid<d>& grid, const State<d>& state, int ndof) {
  os << "rheo-state 1\n";
  os << "dim " << d << "\n";
  for (int k = 0; k < d; ++k)
    os << "axis " << detail::fmt16(grid.lengths[k]) << " " << grid.cells[k] << " "
       << (grid.periodic[k] ? "periodic" : "clamped") << "\n";
  os << "time " << detail::fmt16(state.time) << "\n";
  os << "rows " << ndof << "\n";
  os << "u v P\n";
  for (int i = 0; i < ndof; ++i) {
    bool first = true;
    for (int c = 0; c < d; ++c, first = false)
      os << (first ? "" : " ") << detail::fmt16(state.u[static_cast<std::size_t>(c) * ndof + i]);
    for (int c = 0; c < d; ++c)
      os << " " << detail::fmt16(state.v[static_cast<std::size_t>(c) * ndof + i]);
    for (int rc = 0; rc < d * d; ++rc)
      os << " " << detail::fmt16(state.P[static_cast<std::size_t>(rc) * ndof + i]);
    os << "\n";
  }
}

template <int d>
void write_state_file(const std::string& path, const Grid<d>& grid, const State<d>& state,
                      int ndof) {
  std::ofstream os(path);
  if (!os) throw std::runtime_error("cannot open for writing: " + path);
  write_state(os, grid, state, ndof);
}

template <int d>
void read_state(std::istream& is, Grid<d>& grid, State<d>& state) {
  std::string tag;
  int version = 0;
  is >> tag >> version;
  if (tag != "rheo-state" || version != 1) throw std::runtime_error("bad state header");
  int dim = 0;
  is >> tag >> dim;
  if (tag != "dim" || dim != d) throw std::runtime_error("state dimension mismatch");
  for (int k = 0; k < d; ++k) {
    std::string kind;
    is >> tag >> grid.lengths[k] >> grid.cells[k] >> kind;
    if (tag != "axis" || (kind != "periodic" && kind != "clamped"))
      throw std::runtime_error("bad axis line in state");
    grid.periodic[k] = kind == "periodic";
  }
  is >> tag >> state.time;
  if (tag != "time") throw std::runtime_error("bad time line in state");
  int rows = 0;
  is >> tag >> rows;
  if (tag != "rows" || rows <= 0) throw std::runtime_error("bad rows line in state");
  std::string f1, f2, f3;
  is >> f1 >> f2 >> f3;
  if (f1 != "u" || f2 != "v" || f3 != "P") throw std::runtime_error("bad field list in state");
  state.u.assign(static_cast<std::size_t>(d) * rows, 0.0);
  state.v.assign(static_cast<std::size_t>(d) * rows, 0.0);
  state.P.assign(static_cast<std::size_t>(d) * d * rows, 0.0);
  for (int i = 0; i < rows; ++i) {
    for (int c = 0; c < d; ++c) is >> state.u[static_cast<std::size_t>(c) * rows + i];
    for (int c = 0; c < d; ++c) is >> state.v[static_cast<std::size_t>(c) * rows + i];
    for (int rc = 0; rc < d * d; ++rc) is >> state.P[static_cast<std::size_t>(rc) * rows + i];
  }
  if (!is) throw std::runtime_error("truncated state file");
}

template <int d>
void read_state_file(const std::string& path, Grid<d>& grid, State<d>& state) {
  std::ifstream is(path);
  if (!is) throw std::runtime_error("cannot open state file: " + path);
  read_state(is, grid, state);
}

}  // namespace rheo
