// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <cmath>
#include <stdexcept>
#include <string>
#include <vector>

#include "rheo/splines.hpp"
#include "rheo/tensor.hpp"

// Shear-stripe study: a slab |x2| <= ell carries the prescribed glide
//
//   P(t, x2) = I + t g'(x2) e1 (x) e2,   g(+-ell) = +-1,
//
// with rigid elasticity (F_el = I, grad y = P). Every candidate gradient
// penalty (kappa/2)|argument|^2 is then available in closed form, so the
// growth of each penalty along the motion can be audited exactly: a penalty
// that grows without bound on this stripe acts as spurious time hardening,
// since the material state (a steady slip band) is not hardening at all.

namespace rheo {

struct SlipProfile {
  enum class Kind { Linear, Tanh };
  Kind kind = Kind::Linear;
  double ell = 1.0;    // stripe half-width
  double width = 0.2;  // tanh transition scale (unused for Linear)

  // normalized slip shape g with g(+-ell) = +-1
  double g(double x2) const {
    return kind == Kind::Linear ? x2 / ell : std::tanh(x2 / width) / std::tanh(ell / width);
  }
  double dg(double x2) const {
    if (kind == Kind::Linear) return 1.0 / ell;
    const double th = std::tanh(x2 / width);
    return (1.0 - th * th) / (width * std::tanh(ell / width));
  }
  double d2g(double x2) const {
    if (kind == Kind::Linear) return 0.0;
    const double th = std::tanh(x2 / width);
    return -2.0 * th * (1.0 - th * th) / (width * width * std::tanh(ell / width));
  }
};

inline SlipProfile linear_profile(double ell) {
  if (!(ell > 0.0)) throw std::invalid_argument("linear_profile: ell must be positive");
  return {SlipProfile::Kind::Linear, ell, 0.0};
}

inline SlipProfile tanh_profile(double ell, double width) {
  if (!(ell > 0.0)) throw std::invalid_argument("tanh_profile: ell must be positive");
  if (!(width > 0.0)) throw std::invalid_argument("tanh_profile: width must be positive");
  return {SlipProfile::Kind::Tanh, ell, width};
}

enum class RegularizerKind {
  StandardGradP,  // grad P
  PushForward,    // P^-T grad P
  MetricTensor,   // grad(P^T P)
  CurlP,          // row-wise curl of P
  PCurlP,         // P times the row-wise curl of P
  GradFel,        // grad F_el
  GradPdot,       // grad of the rate of P
};

inline const std::vector<RegularizerKind>& all_regularizer_kinds() {
  static const std::vector<RegularizerKind> kinds = {
      RegularizerKind::StandardGradP, RegularizerKind::PushForward,
      RegularizerKind::MetricTensor,  RegularizerKind::CurlP,
      RegularizerKind::PCurlP,        RegularizerKind::GradFel,
      RegularizerKind::GradPdot,
  };
  return kinds;
}

inline std::string to_string(RegularizerKind kind) {
  switch (kind) {
    case RegularizerKind::StandardGradP: return "standard_grad_p";
    case RegularizerKind::PushForward: return "push_forward";
    case RegularizerKind::MetricTensor: return "metric_tensor";
    case RegularizerKind::CurlP: return "curl_p";
    case RegularizerKind::PCurlP: return "p_curl_p";
    case RegularizerKind::GradFel: return "grad_f_el";
    case RegularizerKind::GradPdot: return "grad_p_dot";
  }
  throw std::invalid_argument("to_string: unknown RegularizerKind");
}

// P(t, x2): unit upper-triangular, so det P = 1 exactly for all inputs
inline Mat<2> plastic_strain_stripe(const SlipProfile& pr, double t, double x2) {
  Mat<2> P = identity<2>();
  P(0, 1) = t * pr.dg(x2);
  return P;
}

// density (kappa/2)|argument|^2 of one penalty at (t, x2). The stripe has no
// x1 dependence and a constant first column, so the row-wise curl of P
// vanishes identically, and F_el = I makes grad F_el vanish; both are
// returned as exact zeros.
inline double regularizer_density(RegularizerKind kind, const SlipProfile& pr, double t,
                                  double x2, double kappa) {
  const double slip = t * pr.dg(x2);    // P_12
  const double dslip = t * pr.d2g(x2);  // (grad P)_{1,2,2}, the only entry of grad P
  switch (kind) {
    case RegularizerKind::StandardGradP:
      return 0.5 * kappa * dslip * dslip;
    case RegularizerKind::PushForward:
      // P^-T grad P: (1,2,2) = dslip, (2,2,2) = -slip * dslip
      return 0.5 * kappa * dslip * dslip * (1.0 + slip * slip);
    case RegularizerKind::MetricTensor:
      // grad(P^T P): (1,2,2) = (2,1,2) = dslip, (2,2,2) = 2 slip * dslip
      return 0.5 * kappa * (2.0 + 4.0 * slip * slip) * dslip * dslip;
    case RegularizerKind::CurlP:
    case RegularizerKind::PCurlP:
    case RegularizerKind::GradFel:
      return 0.0;
    case RegularizerKind::GradPdot:
      // rate of P is g'(x2) e1 (x) e2, so its gradient has the lone entry
      // g''(x2) at (1,2,2), independent of t
      return 0.5 * kappa * pr.d2g(x2) * pr.d2g(x2);
  }
  throw std::invalid_argument("regularizer_density: unknown RegularizerKind");
}

// integral of the density across the stripe by one Gauss rule on [-ell, ell]
inline double stripe_energy(RegularizerKind kind, const SlipProfile& pr, double t, double kappa,
                            int quad_points = 64) {
  if (quad_points < 16) throw std::invalid_argument("stripe_energy: need at least 16 points");
  std::vector<double> x, w;
  gauss_legendre(quad_points, x, w);
  double e = 0.0;
  for (int q = 0; q < quad_points; ++q)
    e += pr.ell * w[q] * regularizer_density(kind, pr, t, pr.ell * x[q], kappa);
  return e;
}

// stripe average of the rate of P: the lone entry (1,2) equals
// (g(ell) - g(-ell)) / (2 ell) = 1/ell for any admissible profile and any t
inline Mat<2> mean_rate_gradient(const SlipProfile& pr, double /*t*/) {
  Mat<2> m{};
  m(0, 1) = (pr.g(pr.ell) - pr.g(-pr.ell)) / (2.0 * pr.ell);
  return m;
}

// stripe average of the slip gradient P_12: t/ell by the same telescoping
inline double mean_slip_gradient(const SlipProfile& pr, double t) {
  return t * (pr.g(pr.ell) - pr.g(-pr.ell)) / (2.0 * pr.ell);
}

enum class Growth { Vanishes, Bounded, Grows };

inline std::string to_string(Growth g) {
  switch (g) {
    case Growth::Vanishes: return "vanishes";
    case Growth::Bounded: return "bounded";
    case Growth::Grows: return "grows";
  }
  throw std::invalid_argument("to_string: unknown Growth");
}

struct AuditEntry {
  SlipProfile profile;
  RegularizerKind kind = RegularizerKind::StandardGradP;
  std::vector<double> energy;    // one value per t_grid point
  double max_energy = 0.0;       // over the whole grid
  double trailing_drift = 0.0;   // (max - min)/max over the trailing decade
  double exponent = 0.0;         // log-log least-squares slope, trailing decade
  Growth growth = Growth::Vanishes;
};

struct AuditReport {
  std::vector<double> t_grid;
  std::vector<AuditEntry> entries;  // profiles x kinds, kinds fastest
};

namespace detail {

// least-squares slope of log E against log t over the given points
inline double loglog_slope(const std::vector<double>& t, const std::vector<double>& e) {
  double sx = 0.0, sy = 0.0, sxx = 0.0, sxy = 0.0;
  const int n = static_cast<int>(t.size());
  for (int i = 0; i < n; ++i) {
    const double x = std::log(t[i]), y = std::log(e[i]);
    sx += x;
    sy += y;
    sxx += x * x;
    sxy += x * y;
  }
  return (n * sxy - sx * sy) / (n * sxx - sx * sx);
}

}  // namespace detail

// evaluates every (profile, kind) energy on t_grid and classifies its growth:
// "vanishes" when the energy never exceeds 1e-12, "bounded" when the relative
// drift over the trailing decade stays within 1e-3, otherwise "grows" with
// the fitted trailing-decade exponent
inline AuditReport audit(const std::vector<SlipProfile>& profiles,
                         const std::vector<RegularizerKind>& kinds,
                         const std::vector<double>& t_grid, double kappa,
                         int quad_points = 64) {
  if (t_grid.size() < 3) throw std::invalid_argument("audit: t_grid too short");
  for (std::size_t i = 0; i + 1 < t_grid.size(); ++i)
    if (!(t_grid[i] < t_grid[i + 1]))
      throw std::invalid_argument("audit: t_grid must be strictly increasing");
  if (!(t_grid.front() > 0.0)) throw std::invalid_argument("audit: t_grid must be positive");

  AuditReport rep;
  rep.t_grid = t_grid;
  const double t_tail = 0.1 * t_grid.back();
  for (const auto& pr : profiles)
    for (const auto kind : kinds) {
      AuditEntry ent;
      ent.profile = pr;
      ent.kind = kind;
      ent.energy.reserve(t_grid.size());
      for (const double t : t_grid)
        ent.energy.push_back(stripe_energy(kind, pr, t, kappa, quad_points));
      std::vector<double> tt, te;
      double tail_min = 0.0, tail_max = 0.0;
      for (std::size_t i = 0; i < t_grid.size(); ++i) {
        ent.max_energy = std::max(ent.max_energy, ent.energy[i]);
        if (t_grid[i] >= t_tail) {
          if (tt.empty()) tail_min = tail_max = ent.energy[i];
          tail_min = std::min(tail_min, ent.energy[i]);
          tail_max = std::max(tail_max, ent.energy[i]);
          tt.push_back(t_grid[i]);
          te.push_back(ent.energy[i]);
        }
      }
      ent.trailing_drift = tail_max > 0.0 ? (tail_max - tail_min) / tail_max : 0.0;
      if (ent.max_energy <= 1e-12) {
        ent.growth = Growth::Vanishes;
      } else if (ent.trailing_drift <= 1e-3) {
        ent.growth = Growth::Bounded;
      } else {
        ent.growth = Growth::Grows;
        ent.exponent = detail::loglog_slope(tt, te);
      }
      rep.entries.push_back(std::move(ent));
    }
  return rep;
}

}  // namespace rheo
