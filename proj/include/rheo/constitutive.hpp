// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <cmath>
#include <stdexcept>
#include <string>

#include "rheo/params.hpp"
#include "rheo/tensor.hpp"

// Pointwise constitutive laws of the viscoelastic creep model:
//
//   F_E(F)  = (mu/2) (|F|^2 - d - 2 ln det F) + eps_b ((1/det F - 1)_+)^{r_el}
//   F_H(P)  = delta (1 + ((1/det P - 1)_+)^{s_h}) + (det P - 1)^2 / (2 delta)
//   F_G(G)  = eps_g |G|^{p_g}
//
// F_E penalizes elastic compression (finite energy requires det F > 0), F_H is
// a mollified incompressibility constraint on the inelastic strain with a
// det -> 0+ blow-up, and F_G regularizes gradients of the *elastic* strain.
// The elastic metric is C_el = P^{-T} grad_y^T grad_y P^{-1} = F_el^T F_el and
// its rate drives the Kelvin-Voigt stress Sigma = nu_kv * C_el-dot.

namespace rheo {

struct NonPositiveDeterminant : std::runtime_error {
  NonPositiveDeterminant(const char* which_field, double det_value)
      : std::runtime_error(std::string("non-positive determinant in ") + which_field + ": " +
                           std::to_string(det_value)),
        field(which_field),
        value(det_value) {}
  const char* field;
  double value;
};

// Everything the weak-form integrands need at one quadrature point.
// Gradients are spatial: (grad_P)_ijk = d_k P_ij, (grad2_P)_ijkl = d_k d_l P_ij.
template <int d>
struct QuadState {
  Mat<d> grad_y;        // deformation gradient
  Ten3<d> grad2_y;      // second gradient of the deformation
  Mat<d> P;             // inelastic strain
  Ten3<d> grad_P;       // first gradient of P
  Ten4<d> grad2_P;      // second gradient of P
  Mat<d> rate_grad_y;   // gradient of the velocity
  Mat<d> rate_P;        // inelastic strain rate
  Ten4<d> rate_grad2_P; // second gradient of the inelastic strain rate
};

// Cumulative energy accounting along a trajectory. The stored contributions
// (kinetic/elastic/constraint/gradient) are instantaneous and nonnegative; the
// dissipated_* and external_work entries accumulate from the start of the run.
struct EnergyBreakdown {
  double kinetic = 0.0;
  double elastic = 0.0;
  double constraint = 0.0;
  double gradient = 0.0;
  double dissipated_kv = 0.0;
  double dissipated_m = 0.0;
  double dissipated_h = 0.0;
  double external_work = 0.0;

  double stored() const { return kinetic + elastic + constraint + gradient; }
  double dissipated() const { return dissipated_kv + dissipated_m + dissipated_h; }
};

inline double positive_part(double x) { return x > 0.0 ? x : 0.0; }

// --- elastic energy ------------------------------------------------------

template <int d>
inline double fe_eval(const Mat<d>& f, const MaterialParams& p) {
  const double j = det(f);
  if (j <= 0.0) throw NonPositiveDeterminant("F_el", j);
  const double c = positive_part(1.0 / j - 1.0);
  return 0.5 * p.mu * (norm2(f) - d - 2.0 * std::log(j)) + p.eps_b * std::pow(c, p.r_el);
}

template <int d>
inline Mat<d> fe_dF(const Mat<d>& f, const MaterialParams& p) {
  const double j = det(f);
  if (j <= 0.0) throw NonPositiveDeterminant("F_el", j);
  const Mat<d> fit = transpose(inverse(f));
  Mat<d> r = p.mu * (f - fit);
  const double c = positive_part(1.0 / j - 1.0);
  if (c > 0.0) r += (-p.eps_b * p.r_el * std::pow(c, p.r_el - 1.0) / j) * fit;
  return r;
}

// --- inelastic volume constraint ------------------------------------------

template <int d>
inline double fh_eval(const Mat<d>& P, const MaterialParams& p) {
  const double j = det(P);
  if (j <= 0.0) throw NonPositiveDeterminant("P", j);
  const double c = positive_part(1.0 / j - 1.0);
  const double s = j - 1.0;
  return p.delta * (1.0 + std::pow(c, static_cast<double>(p.s_h))) + s * s / (2.0 * p.delta);
}

template <int d>
inline Mat<d> fh_dP(const Mat<d>& P, const MaterialParams& p) {
  const double j = det(P);
  if (j <= 0.0) throw NonPositiveDeterminant("P", j);
  const double c = positive_part(1.0 / j - 1.0);
  double g = (j - 1.0) / p.delta;
  if (c > 0.0) g -= p.delta * p.s_h * std::pow(c, static_cast<double>(p.s_h - 1)) / (j * j);
  return g * cofactor(P);
}

// --- elastic strain-gradient energy ----------------------------------------

template <int d>
inline double fg_eval(const Ten3<d>& g, const MaterialParams& p) {
  return p.eps_g * std::pow(norm2(g), 0.5 * p.p_g);
}

template <int d>
inline Ten3<d> fg_dG(const Ten3<d>& g, const MaterialParams& p) {
  const double n2 = norm2(g);
  if (n2 == 0.0) return Ten3<d>{};  // p_g > 2 makes the derivative vanish at 0
  return (p.eps_g * p.p_g * std::pow(n2, 0.5 * p.p_g - 1.0)) * g;
}

// --- elastic metric and its rate --------------------------------------------

template <int d>
inline Mat<d> cel(const Mat<d>& grad_y, const Mat<d>& P) {
  const Mat<d> f_el = grad_y * inverse(P);
  return transpose(f_el) * f_el;
}

// Time derivative of C_el along (grad_y-dot, P-dot):
//   C_el-dot = P^{-T}(grad_ydot^T grad_y + grad_y^T grad_ydot) P^{-1}
//              - 2 sym(C_el P-dot P^{-1})
template <int d>
inline Mat<d> cel_rate(const Mat<d>& grad_y, const Mat<d>& rate_grad_y, const Mat<d>& P,
                       const Mat<d>& rate_P) {
  const Mat<d> ip = inverse(P);
  const Mat<d> ipt = transpose(ip);
  const Mat<d> m = transpose(rate_grad_y) * grad_y;
  const Mat<d> term1 = ipt * (m + transpose(m)) * ip;
  const Mat<d> x = (ipt * (transpose(grad_y) * grad_y) * ip) * (rate_P * ip);
  return term1 - (x + transpose(x));
}

template <int d>
inline Mat<d> sigma_kv(const QuadState<d>& q, const MaterialParams& p) {
  return p.nu_kv * cel_rate(q.grad_y, q.rate_grad_y, q.P, q.rate_P);
}

// Instantaneous dissipation potential density
//   R = (nu_m/2)|P-dot|^2 + (nu_h/2)|grad2 P-dot|^2 + (nu_kv/2)|C_el-dot|^2.
// The corresponding heating rate is 2 R (R is quadratic in the rates).
template <int d>
inline double dissipation_density(const QuadState<d>& q, const MaterialParams& p) {
  const Mat<d> cd = cel_rate(q.grad_y, q.rate_grad_y, q.P, q.rate_P);
  return 0.5 * p.nu_m * norm2(q.rate_P) + 0.5 * p.nu_h * norm2(q.rate_grad2_P) +
         0.5 * p.nu_kv * norm2(cd);
}

}  // namespace rheo
