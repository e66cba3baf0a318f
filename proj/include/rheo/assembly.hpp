// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <algorithm>
#include <functional>
#include <map>
#include <thread>
#include <vector>

#include "rheo/discretization.hpp"
#include "rheo/weakform.hpp"

// Galerkin assembly of the backward Euler step. Unknowns per step are the
// displacement and inelastic strain coefficients z = [u, P]; the velocity is
// recovered as (u_new - u_old)/dt. All rates entering the integrands are
// backward differences, all densities are evaluated at the new time.
//
// Determinism: cell contributions are computed independently (optionally on
// several threads) and reduced strictly in cell order, so results are
// bitwise identical for any thread count.

namespace rheo {

template <int d>
struct LoadSpec {
  struct Traction {
    int axis = 0;
    int side = 0;  // 0: x_axis = 0, 1: x_axis = L
    Vec<d> value{};
  };
  Vec<d> body_force{};
  std::vector<Traction> tractions;
  double t_ramp = 0.0;  // loads scale linearly from 0 to full over [0, t_ramp]

  double profile(double t) const {
    return t_ramp <= 0.0 ? 1.0 : std::clamp(t / t_ramp, 0.0, 1.0);
  }
};

template <int d>
struct DirichletSpec {
  struct Clamp {
    int axis = 0;
    int side = 0;
    int comp = 0;    // displacement component held on that face
    double value = 0.0;
  };
  std::vector<Clamp> clamps;
  double t_ramp = 0.0;

  double profile(double t) const {
    return t_ramp <= 0.0 ? 1.0 : std::clamp(t / t_ramp, 0.0, 1.0);
  }
};

template <int d>
struct DetMinima {
  double det_P = 0.0;
  double det_grad_y = 0.0;
  double det_f_el = 0.0;
  double min() const { return std::min(det_P, std::min(det_grad_y, det_f_el)); }
};

struct EnergyParts {
  double kinetic = 0.0, elastic = 0.0, constraint = 0.0, gradient = 0.0;
  double stored() const { return kinetic + elastic + constraint + gradient; }
};

struct DissipationIncrement {
  double kv = 0.0, m = 0.0, h = 0.0;
  double total() const { return kv + m + h; }
};

namespace detail {

// runs fn(lo, hi) over a partition of [0, n) on nthreads threads
inline void parallel_ranges(long n, int nthreads,
                            const std::function<void(long, long)>& fn) {
  nthreads = static_cast<int>(std::max<long>(1, std::min<long>(nthreads, n)));
  if (nthreads == 1) {
    fn(0, n);
    return;
  }
  std::vector<std::thread> pool;
  const long chunk = (n + nthreads - 1) / nthreads;
  for (int t = 0; t < nthreads; ++t) {
    const long lo = t * chunk, hi = std::min(n, lo + chunk);
    if (lo >= hi) break;
    pool.emplace_back(fn, lo, hi);
  }
  for (auto& th : pool) th.join();
}

}  // namespace detail

template <int d>
class Assembler {
 public:
  static constexpr int nloc = Basis<d>::nloc;
  static constexpr int ncomp = d + d * d;  // unknown components: u then P row-major
  static constexpr int nlocal = nloc * ncomp;

  Assembler(const Basis<d>& basis, MaterialParams p, LoadSpec<d> loads, DirichletSpec<d> bc,
            int nthreads = 1)
      : basis_(&basis), p_(p), loads_(std::move(loads)), bc_(std::move(bc)),
        nthreads_(std::max(1, nthreads)) {
    // constrained u rows, last clamp wins where faces share corner dofs
    std::map<int, double> rows;
    for (const auto& c : bc_.clamps)
      for (int i : basis.edge_dofs(c.axis, c.side)) rows[c.comp * basis.ndof() + i] = c.value;
    constrained_.assign(rows.begin(), rows.end());
  }

  const Basis<d>& basis() const { return *basis_; }
  const MaterialParams& params() const { return p_; }
  const DirichletSpec<d>& dirichlet() const { return bc_; }
  int nunknowns() const { return ncomp * basis_->ndof(); }
  const std::vector<std::pair<int, double>>& constrained_rows() const { return constrained_; }

  std::vector<double> pack(const State<d>& s) const {
    const int n = basis_->ndof();
    std::vector<double> z(nunknowns());
    std::copy(s.u.begin(), s.u.end(), z.begin());
    std::copy(s.P.begin(), s.P.end(), z.begin() + static_cast<std::size_t>(d) * n);
    return z;
  }

  State<d> unpack(const std::vector<double>& z, const State<d>& old, double dt,
                  double t_new) const {
    const int n = basis_->ndof();
    State<d> s;
    s.time = t_new;
    s.u.assign(z.begin(), z.begin() + static_cast<std::size_t>(d) * n);
    s.P.assign(z.begin() + static_cast<std::size_t>(d) * n, z.end());
    s.v.resize(s.u.size());
    for (std::size_t i = 0; i < s.u.size(); ++i) s.v[i] = (s.u[i] - old.u[i]) / dt;
    return s;
  }

  // external load pairing (body force and tractions) at time t; nonzero only
  // on u rows
  std::vector<double> load_vector(double t) const {
    const int n = basis_->ndof();
    std::vector<double> l(nunknowns(), 0.0);
    const double scale = loads_.profile(t);
    typename Basis<d>::ShapeSet s;
    bool any_body = false;
    for (int c = 0; c < d; ++c) any_body = any_body || loads_.body_force[c] != 0.0;
    if (any_body) {
      for (long cell = 0; cell < basis_->ncells(); ++cell)
        for (int q = 0; q < basis_->nq_cell(); ++q) {
          basis_->shape_at(cell, q, s);
          const double w = basis_->weight(q);
          for (int a = 0; a < nloc; ++a)
            for (int c = 0; c < d; ++c)
              l[c * n + s.dof[a]] += w * scale * loads_.body_force[c] * s.val[a];
        }
    }
    for (const auto& tr : loads_.tractions) {
      for (long fc = 0; fc < basis_->nfcells(tr.axis); ++fc)
        for (int q = 0; q < basis_->nq_face(); ++q) {
          basis_->face_shape_at(tr.axis, tr.side, fc, q, s);
          const double w = basis_->face_weight(tr.axis, q);
          for (int a = 0; a < nloc; ++a)
            for (int c = 0; c < d; ++c)
              l[c * n + s.dof[a]] += w * scale * tr.value[c] * s.val[a];
        }
    }
    return l;
  }

  // residual of the implicit step equation: internal + inertia - loads, with
  // constrained u rows replaced by (z_row - target) when apply_bc is set
  void residual(const State<d>& old, const std::vector<double>& z, double t_new, double dt,
                std::vector<double>& r, bool apply_bc = true) const {
    const long nc = basis_->ncells();
    std::vector<double> buf(static_cast<std::size_t>(nc) * nlocal);
    detail::parallel_ranges(nc, nthreads_, [&](long lo, long hi) {
      for (long cell = lo; cell < hi; ++cell)
        cell_residual(cell, old, z.data(), dt, &buf[static_cast<std::size_t>(cell) * nlocal]);
    });
    r.assign(nunknowns(), 0.0);
    const int n = basis_->ndof();
    typename Basis<d>::ShapeSet s;
    for (long cell = 0; cell < nc; ++cell) {
      basis_->shape_at(cell, 0, s);  // dofs are q-independent
      const double* rl = &buf[static_cast<std::size_t>(cell) * nlocal];
      for (int comp = 0; comp < ncomp; ++comp)
        for (int a = 0; a < nloc; ++a) r[comp * n + s.dof[a]] += rl[comp * nloc + a];
    }
    const auto l = load_vector(t_new);
    for (int i = 0; i < nunknowns(); ++i) r[i] -= l[i];
    if (apply_bc) {
      const double scale = bc_.profile(t_new);
      for (const auto& [row, base] : constrained_) r[row] = z[row] - base * scale;
    }
  }

  // dense Jacobian by cell-local forward differences: perturbing one local
  // coefficient only changes that cell's contribution. The load vector does
  // not depend on the unknowns, so t_new never enters.
  void jacobian_fd(const State<d>& old, const std::vector<double>& z, double /*t_new*/,
                   double dt, std::vector<double>& jac) const {
    const int N = nunknowns();
    const int n = basis_->ndof();
    const long nc = basis_->ncells();
    jac.assign(static_cast<std::size_t>(N) * N, 0.0);
    // per-cell dense blocks, reduced in cell order afterwards
    std::vector<double> blocks(static_cast<std::size_t>(nc) * nlocal * nlocal);
    detail::parallel_ranges(nc, nthreads_, [&](long lo, long hi) {
      std::vector<double> zl(z);
      std::vector<double> r0(nlocal), r1(nlocal);
      typename Basis<d>::ShapeSet s;
      for (long cell = lo; cell < hi; ++cell) {
        basis_->shape_at(cell, 0, s);
        cell_residual(cell, old, zl.data(), dt, r0.data());
        double* blk = &blocks[static_cast<std::size_t>(cell) * nlocal * nlocal];
        for (int comp = 0; comp < ncomp; ++comp)
          for (int a = 0; a < nloc; ++a) {
            const int col = comp * n + s.dof[a];
            const double save = zl[col];
            const double h = 1e-7 * (1.0 + std::abs(save));
            zl[col] = save + h;
            cell_residual(cell, old, zl.data(), dt, r1.data());
            zl[col] = save;
            const int jloc = comp * nloc + a;
            for (int i = 0; i < nlocal; ++i) blk[static_cast<std::size_t>(i) * nlocal + jloc] =
                (r1[i] - r0[i]) / h;
          }
      }
    });
    typename Basis<d>::ShapeSet s;
    for (long cell = 0; cell < nc; ++cell) {
      basis_->shape_at(cell, 0, s);
      const double* blk = &blocks[static_cast<std::size_t>(cell) * nlocal * nlocal];
      for (int ci = 0; ci < ncomp; ++ci)
        for (int a = 0; a < nloc; ++a) {
          const long row = ci * n + s.dof[a];
          for (int cj = 0; cj < ncomp; ++cj)
            for (int b = 0; b < nloc; ++b) {
              const long col = cj * n + s.dof[b];
              jac[row * N + col] +=
                  blk[static_cast<std::size_t>(ci * nloc + a) * nlocal + cj * nloc + b];
            }
        }
    }
    for (const auto& [row, base] : constrained_) {
      (void)base;
      for (int j = 0; j < N; ++j) jac[static_cast<std::size_t>(row) * N + j] = 0.0;
      jac[static_cast<std::size_t>(row) * N + row] = 1.0;
    }
  }

  // --- diagnostics at coefficient states -----------------------------------

  DetMinima<d> det_minima(const std::vector<double>& z) const {
    const int n = basis_->ndof();
    DetMinima<d> m;
    m.det_P = m.det_grad_y = m.det_f_el = 1e300;
    typename Basis<d>::ShapeSet s;
    for (long cell = 0; cell < basis_->ncells(); ++cell)
      for (int q = 0; q < basis_->nq_cell(); ++q) {
        basis_->shape_at(cell, q, s);
        Mat<d> grad_y = identity<d>();
        Mat<d> P{};
        for (int a = 0; a < nloc; ++a) {
          for (int c = 0; c < d; ++c) {
            const double cu = z[c * n + s.dof[a]];
            for (int j = 0; j < d; ++j) grad_y(c, j) += cu * s.grad[a][j];
          }
          for (int rc = 0; rc < d * d; ++rc)
            P(rc / d, rc % d) += z[(d + rc) * n + s.dof[a]] * s.val[a];
        }
        const double dp = det(P), dy = det(grad_y);
        m.det_P = std::min(m.det_P, dp);
        m.det_grad_y = std::min(m.det_grad_y, dy);
        if (dp > 0.0) m.det_f_el = std::min(m.det_f_el, dy / dp);
      }
    return m;
  }

  EnergyParts energies(const State<d>& st) const {
    EnergyParts e;
    typename Basis<d>::ShapeSet s;
    for (long cell = 0; cell < basis_->ncells(); ++cell)
      for (int q = 0; q < basis_->nq_cell(); ++q) {
        basis_->shape_at(cell, q, s);
        const double w = basis_->weight(q);
        QuadState<d> qs;
        Vec<d> v{};
        gather_fields(s, st, qs, &v);
        const Mat<d> ip = inverse(qs.P);
        e.kinetic += w * 0.5 * p_.rho * dot(v, v);
        e.elastic += w * fe_eval(qs.grad_y * ip, p_);
        e.constraint += w * fh_eval(qs.P, p_);
        e.gradient += w * fg_eval(rheo::detail::grad_f_el(qs, ip), p_);
      }
    return e;
  }

  // dissipated energy over one step with backward-difference rates:
  // dt * int (nu_m |P-dot|^2 + nu_h |grad2 P-dot|^2 + nu_kv |C_el-dot|^2)
  DissipationIncrement dissipation_increment(const State<d>& old_st, const State<d>& new_st,
                                             double dt) const {
    DissipationIncrement out;
    typename Basis<d>::ShapeSet s;
    for (long cell = 0; cell < basis_->ncells(); ++cell)
      for (int q = 0; q < basis_->nq_cell(); ++q) {
        basis_->shape_at(cell, q, s);
        const double w = basis_->weight(q);
        QuadState<d> qs;
        gather_step_fields(s, old_st, new_st, dt, qs);
        out.m += w * dt * p_.nu_m * norm2(qs.rate_P);
        out.h += w * dt * p_.nu_h * norm2(qs.rate_grad2_P);
        out.kv += w * dt * p_.nu_kv *
                  norm2(cel_rate(qs.grad_y, qs.rate_grad_y, qs.P, qs.rate_P));
      }
    return out;
  }

  // work done on the body over one step: loads at the new time paired with
  // the displacement increment, plus the reaction forces on constrained rows
  // (the unconstrained momentum residual there) paired with their motion
  double work_increment(const State<d>& old_st, const State<d>& new_st, double t_new,
                        double dt) const {
    const int n = basis_->ndof();
    const auto z = pack(new_st);
    const auto l = load_vector(t_new);
    double w = 0.0;
    for (int c = 0; c < d; ++c)
      for (int i = 0; i < n; ++i) {
        const int row = c * n + i;
        w += l[row] * (new_st.u[row] - old_st.u[row]);
      }
    if (!constrained_.empty()) {
      std::vector<double> r;
      residual(old_st, z, t_new, dt, r, /*apply_bc=*/false);
      // r = internal + inertia - loads; the load part of these rows is
      // already counted by the sum above, so adding r keeps each term once
      for (const auto& [row, base] : constrained_) {
        (void)base;
        w += r[row] * (new_st.u[row] - old_st.u[row]);
      }
    }
    return w;
  }

  // volume residual contribution of one cell for all local test dofs
  void cell_residual(long cell, const State<d>& old_st, const double* z, double dt,
                     double* rloc) const {
    const int n = basis_->ndof();
    typename Basis<d>::ShapeSet s;
    for (int i = 0; i < nlocal; ++i) rloc[i] = 0.0;
    for (int q = 0; q < basis_->nq_cell(); ++q) {
      basis_->shape_at(cell, q, s);
      const double w = basis_->weight(q);

      QuadState<d> qs;
      Vec<d> u_new{}, u_old{}, v_old{};
      qs.grad_y = identity<d>();
      for (int a = 0; a < nloc; ++a) {
        const int dof = s.dof[a];
        for (int c = 0; c < d; ++c) {
          const double zu = z[c * n + dof];
          const double uo = old_st.u[static_cast<std::size_t>(c) * n + dof];
          const double vo = old_st.v[static_cast<std::size_t>(c) * n + dof];
          u_new[c] += zu * s.val[a];
          u_old[c] += uo * s.val[a];
          v_old[c] += vo * s.val[a];
          const double du = (zu - uo) / dt;
          for (int j = 0; j < d; ++j) {
            qs.grad_y(c, j) += zu * s.grad[a][j];
            qs.rate_grad_y(c, j) += du * s.grad[a][j];
            for (int k = 0; k < d; ++k) qs.grad2_y(c, j, k) += zu * s.hess[a](j, k);
          }
        }
        for (int rc = 0; rc < d * d; ++rc) {
          const int r = rc / d, c = rc % d;
          const double zp = z[(d + rc) * n + dof];
          const double po = old_st.P[static_cast<std::size_t>(rc) * n + dof];
          const double dp = (zp - po) / dt;
          qs.P(r, c) += zp * s.val[a];
          qs.rate_P(r, c) += dp * s.val[a];
          for (int j = 0; j < d; ++j) {
            qs.grad_P(r, c, j) += zp * s.grad[a][j];
            for (int k = 0; k < d; ++k) {
              qs.grad2_P(r, c, j, k) += zp * s.hess[a](j, k);
              qs.rate_grad2_P(r, c, j, k) += dp * s.hess[a](j, k);
            }
          }
        }
      }

      const AssemblyForces<d> af = assembly_forces(qs, p_);
      Vec<d> inertia{};
      if (p_.rho > 0.0)
        for (int c = 0; c < d; ++c)
          inertia[c] = p_.rho * ((u_new[c] - u_old[c]) / dt - v_old[c]) / dt;

      for (int a = 0; a < nloc; ++a) {
        for (int c = 0; c < d; ++c) {
          double acc = inertia[c] * s.val[a];
          for (int j = 0; j < d; ++j) {
            acc += af.stress(c, j) * s.grad[a][j];
            for (int k = 0; k < d; ++k) acc += af.stress_hyper(c, j, k) * s.hess[a](j, k);
          }
          rloc[c * nloc + a] += w * acc;
        }
        for (int rc = 0; rc < d * d; ++rc) {
          const int r = rc / d, c = rc % d;
          double acc = af.flow(r, c) * s.val[a];
          for (int k = 0; k < d; ++k) acc += af.flow_grad(r, c, k) * s.grad[a][k];
          for (int k = 0; k < d; ++k)
            for (int l = 0; l < d; ++l) acc += af.visc_h(r, c, k, l) * s.hess[a](k, l);
          rloc[(d + rc) * nloc + a] += w * acc;
        }
      }
    }
  }

 private:
  // fields of a single state (no rates); v optional
  void gather_fields(const typename Basis<d>::ShapeSet& s, const State<d>& st, QuadState<d>& qs,
                     Vec<d>* v) const {
    const int n = basis_->ndof();
    qs = QuadState<d>{};
    qs.grad_y = identity<d>();
    if (v) *v = Vec<d>{};
    for (int a = 0; a < nloc; ++a) {
      const int dof = s.dof[a];
      for (int c = 0; c < d; ++c) {
        const double cu = st.u[static_cast<std::size_t>(c) * n + dof];
        if (v) (*v)[c] += st.v[static_cast<std::size_t>(c) * n + dof] * s.val[a];
        for (int j = 0; j < d; ++j) {
          qs.grad_y(c, j) += cu * s.grad[a][j];
          for (int k = 0; k < d; ++k) qs.grad2_y(c, j, k) += cu * s.hess[a](j, k);
        }
      }
      for (int rc = 0; rc < d * d; ++rc) {
        const double cp = st.P[static_cast<std::size_t>(rc) * n + dof];
        qs.P(rc / d, rc % d) += cp * s.val[a];
        for (int j = 0; j < d; ++j) qs.grad_P(rc / d, rc % d, j) += cp * s.grad[a][j];
      }
    }
  }

  // fields at the new state with backward-difference rates
  void gather_step_fields(const typename Basis<d>::ShapeSet& s, const State<d>& old_st,
                          const State<d>& new_st, double dt, QuadState<d>& qs) const {
    const int n = basis_->ndof();
    qs = QuadState<d>{};
    qs.grad_y = identity<d>();
    for (int a = 0; a < nloc; ++a) {
      const int dof = s.dof[a];
      for (int c = 0; c < d; ++c) {
        const double cu = new_st.u[static_cast<std::size_t>(c) * n + dof];
        const double du = (cu - old_st.u[static_cast<std::size_t>(c) * n + dof]) / dt;
        for (int j = 0; j < d; ++j) {
          qs.grad_y(c, j) += cu * s.grad[a][j];
          qs.rate_grad_y(c, j) += du * s.grad[a][j];
        }
      }
      for (int rc = 0; rc < d * d; ++rc) {
        const double cp = new_st.P[static_cast<std::size_t>(rc) * n + dof];
        const double dp = (cp - old_st.P[static_cast<std::size_t>(rc) * n + dof]) / dt;
        qs.P(rc / d, rc % d) += cp * s.val[a];
        qs.rate_P(rc / d, rc % d) += dp * s.val[a];
        for (int j = 0; j < d; ++j)
          for (int k = 0; k < d; ++k)
            qs.rate_grad2_P(rc / d, rc % d, j, k) += dp * s.hess[a](j, k);
      }
    }
  }

  const Basis<d>* basis_;
  MaterialParams p_;
  LoadSpec<d> loads_;
  DirichletSpec<d> bc_;
  int nthreads_;
  std::vector<std::pair<int, double>> constrained_;
};

}  // namespace rheo
