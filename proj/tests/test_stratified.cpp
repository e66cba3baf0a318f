// SPDX-License-Identifier: Apache-2.0
#include <catch2/catch_amalgamated.hpp>
#include <cmath>
#include <set>

#include "rheo/stratified.hpp"

using namespace rheo;

namespace {

// gradient of the stripe strain by central differences in x2; the stripe has
// no x1 dependence, so that slot is exactly zero
Ten3<2> grad_stripe_fd(const SlipProfile& pr, double t, double x2, double h) {
  const Mat<2> pp = plastic_strain_stripe(pr, t, x2 + h);
  const Mat<2> pm = plastic_strain_stripe(pr, t, x2 - h);
  Ten3<2> g{};
  for (int i = 0; i < 2; ++i)
    for (int j = 0; j < 2; ++j) g(i, j, 1) = (pp(i, j) - pm(i, j)) / (2.0 * h);
  return g;
}

template <typename F>
double adaptive_simpson(const F& f, double a, double b, double fa, double fm, double fb,
                        double whole, double tol, int depth) {
  const double m = 0.5 * (a + b);
  const double lm = 0.5 * (a + m), rm = 0.5 * (m + b);
  const double flm = f(lm), frm = f(rm);
  const double left = (m - a) / 6.0 * (fa + 4.0 * flm + fm);
  const double right = (b - m) / 6.0 * (fm + 4.0 * frm + fb);
  if (depth <= 0 || std::abs(left + right - whole) <= 15.0 * tol)
    return left + right + (left + right - whole) / 15.0;
  return adaptive_simpson(f, a, m, fa, flm, fm, left, 0.5 * tol, depth - 1) +
         adaptive_simpson(f, m, b, fm, frm, fb, right, 0.5 * tol, depth - 1);
}

template <typename F>
double integrate(const F& f, double a, double b, double tol) {
  const double m = 0.5 * (a + b);
  const double fa = f(a), fm = f(m), fb = f(b);
  const double whole = (b - a) / 6.0 * (fa + 4.0 * fm + fb);
  return adaptive_simpson(f, a, b, fa, fm, fb, whole, tol, 40);
}

}  // namespace

TEST_CASE("stripe strain is unit upper triangular with unit determinant") {
  const SlipProfile lin = linear_profile(1.5), tnh = tanh_profile(1.0, 0.2);
  for (const auto& pr : {lin, tnh})
    for (double t : {0.0, 0.7, 31.0})
      for (double x2 : {-0.9, -0.2, 0.0, 0.4, 0.99}) {
        const Mat<2> P = plastic_strain_stripe(pr, t, x2 * pr.ell);
        CHECK(P(0, 0) == 1.0);
        CHECK(P(1, 1) == 1.0);
        CHECK(P(1, 0) == 0.0);
        CHECK(det(P) == 1.0);
      }
  const Mat<2> P0 = plastic_strain_stripe(tnh, 0.0, 0.3);
  CHECK(norm2(P0 - identity<2>()) == 0.0);
  // the linear profile slides uniformly: P_12 = t/ell everywhere
  CHECK(plastic_strain_stripe(lin, 3.0, -0.7)(0, 1) == Catch::Approx(2.0).epsilon(1e-15));
}

TEST_CASE("profile derivatives agree with finite differences of g") {
  const double h = 1e-6;
  for (const auto& pr : {linear_profile(2.0), tanh_profile(1.0, 0.25)})
    for (double x2 : {-0.8, -0.3, 0.05, 0.5, 0.9}) {
      const double x = x2 * pr.ell;
      const double dg_fd = (pr.g(x + h) - pr.g(x - h)) / (2.0 * h);
      const double d2g_fd = (pr.dg(x + h) - pr.dg(x - h)) / (2.0 * h);
      CHECK(pr.dg(x) == Catch::Approx(dg_fd).margin(1e-8));
      CHECK(pr.d2g(x) == Catch::Approx(d2g_fd).margin(1e-7));
    }
}

TEST_CASE("densities match generic tensor algebra on the finite-difference gradient") {
  const SlipProfile pr = tanh_profile(1.0, 0.2);
  const double kappa = 0.37, h = 1e-5;
  for (double t : {0.5, 3.0, 40.0})
    for (double x2 : {-0.6, -0.11, 0.09, 0.45}) {
      const Mat<2> P = plastic_strain_stripe(pr, t, x2);
      const Ten3<2> g = grad_stripe_fd(pr, t, x2, h);
      const double scale = 1.0 + norm2(g) * (1.0 + t * t);

      // standard: the argument is grad P itself
      CHECK(regularizer_density(RegularizerKind::StandardGradP, pr, t, x2, kappa) ==
            Catch::Approx(0.5 * kappa * norm2(g)).margin(1e-7 * scale));

      // push forward: first leg pulled back, arg_ijk = (P^-1)_mi (grad P)_mjk
      const Mat<2> ip = inverse(P);
      Ten3<2> pf{};
      for (int i = 0; i < 2; ++i)
        for (int j = 0; j < 2; ++j)
          for (int k = 0; k < 2; ++k)
            for (int m = 0; m < 2; ++m) pf(i, j, k) += ip(m, i) * g(m, j, k);
      CHECK(regularizer_density(RegularizerKind::PushForward, pr, t, x2, kappa) ==
            Catch::Approx(0.5 * kappa * norm2(pf)).margin(1e-7 * scale));

      // metric: gradient of P^T P by direct finite differences
      const Mat<2> cp = transpose(plastic_strain_stripe(pr, t, x2 + h)) *
                        plastic_strain_stripe(pr, t, x2 + h);
      const Mat<2> cm = transpose(plastic_strain_stripe(pr, t, x2 - h)) *
                        plastic_strain_stripe(pr, t, x2 - h);
      double metric2 = 0.0;
      for (int i = 0; i < 2; ++i)
        for (int j = 0; j < 2; ++j) {
          const double dij = (cp(i, j) - cm(i, j)) / (2.0 * h);
          metric2 += dij * dij;
        }
      CHECK(regularizer_density(RegularizerKind::MetricTensor, pr, t, x2, kappa) ==
            Catch::Approx(0.5 * kappa * metric2).margin(1e-6 * scale));

      // row-wise curl of P: curl_i = d_1 P_i2 - d_2 P_i1; the stripe has no
      // x1 dependence and a constant first column, so both terms vanish
      for (int i = 0; i < 2; ++i) {
        const double curl_i = 0.0 - g(i, 0, 1);
        CHECK(curl_i == 0.0);
      }
      CHECK(regularizer_density(RegularizerKind::CurlP, pr, t, x2, kappa) == 0.0);
      CHECK(regularizer_density(RegularizerKind::PCurlP, pr, t, x2, kappa) == 0.0);
      CHECK(regularizer_density(RegularizerKind::GradFel, pr, t, x2, kappa) == 0.0);

      // rate gradient: nested differences in t then x2
      const double ht = 1e-4;
      Ten3<2> gr{};
      {
        const Ten3<2> gp = grad_stripe_fd(pr, t + ht, x2, h);
        const Ten3<2> gm = grad_stripe_fd(pr, t - ht, x2, h);
        for (int i = 0; i < 2; ++i)
          for (int j = 0; j < 2; ++j)
            for (int k = 0; k < 2; ++k) gr(i, j, k) = (gp(i, j, k) - gm(i, j, k)) / (2.0 * ht);
      }
      CHECK(regularizer_density(RegularizerKind::GradPdot, pr, t, x2, kappa) ==
            Catch::Approx(0.5 * kappa * norm2(gr)).margin(1e-6));
    }
}

TEST_CASE("densities match symbolic differentiation of the slip shape") {
  // independent closed form: g'' of the normalized tanh shape by hand
  const double ell = 1.0, w = 0.2, kappa = 2.0;
  const SlipProfile pr = tanh_profile(ell, w);
  for (double t : {1.0, 10.0})
    for (double x2 : {-0.4, 0.15}) {
      const double th = std::tanh(x2 / w);
      const double sech2 = 1.0 - th * th;
      const double d2g = -2.0 * th * sech2 / (w * w * std::tanh(ell / w));
      const double want = 0.5 * kappa * t * t * d2g * d2g;
      CHECK(regularizer_density(RegularizerKind::StandardGradP, pr, t, x2, kappa) ==
            Catch::Approx(want).epsilon(1e-13));
    }
}

TEST_CASE("stripe energy matches adaptive quadrature") {
  const SlipProfile pr = tanh_profile(1.0, 0.2);
  const double kappa = 1.0, t = 3.0;
  const double gauss = stripe_energy(RegularizerKind::StandardGradP, pr, t, kappa, 64);
  const double adaptive = integrate(
      [&](double x2) {
        return regularizer_density(RegularizerKind::StandardGradP, pr, t, x2, kappa);
      },
      -pr.ell, pr.ell, 1e-13);
  CHECK(gauss == Catch::Approx(adaptive).epsilon(1e-8));
  // and the separable structure: E(t) = t^2 E(1)
  const double e1 = stripe_energy(RegularizerKind::StandardGradP, pr, 1.0, kappa, 64);
  CHECK(gauss == Catch::Approx(t * t * e1).epsilon(1e-13));
  // quadrature refinement is converged
  CHECK(gauss ==
        Catch::Approx(stripe_energy(RegularizerKind::StandardGradP, pr, t, kappa, 128))
            .epsilon(1e-10));
}

TEST_CASE("density is linear in kappa and metric dominates standard") {
  const SlipProfile pr = tanh_profile(1.0, 0.3);
  for (const auto kind : all_regularizer_kinds())
    for (double t : {0.2, 8.0})
      for (double x2 : {-0.5, 0.25}) {
        const double d1 = regularizer_density(kind, pr, t, x2, 0.7);
        const double d2 = regularizer_density(kind, pr, t, x2, 1.4);
        CHECK(d2 == 2.0 * d1);
      }
  for (double t : {0.0, 1.0, 50.0})
    for (double x2 : {-0.9, -0.2, 0.3, 0.8}) {
      const double std_d = regularizer_density(RegularizerKind::StandardGradP, pr, t, x2, 1.0);
      const double met_d = regularizer_density(RegularizerKind::MetricTensor, pr, t, x2, 1.0);
      CHECK(met_d >= std_d);
    }
}

TEST_CASE("stripe means are exact for both profiles") {
  for (const auto& pr : {linear_profile(1.0), linear_profile(2.0), tanh_profile(0.5, 0.1),
                         tanh_profile(2.0, 0.4)})
    for (double t : {0.1, 3.0, 100.0}) {
      const Mat<2> m = mean_rate_gradient(pr, t);
      CHECK(m(0, 1) == 1.0 / pr.ell);
      CHECK(m(0, 0) == 0.0);
      CHECK(m(1, 0) == 0.0);
      CHECK(m(1, 1) == 0.0);
      CHECK(mean_slip_gradient(pr, t) == t * (1.0 / pr.ell));
    }
  CHECK(mean_slip_gradient(tanh_profile(1.0, 0.2), 3.0) == 3.0);
  CHECK(mean_slip_gradient(tanh_profile(1.0, 0.2), 0.0) == 0.0);
  // quadrature confirms the telescoped mean for the tanh shape
  const SlipProfile pr = tanh_profile(1.0, 0.2);
  const double quad = integrate([&](double x2) { return pr.dg(x2); }, -1.0, 1.0, 1e-13) / 2.0;
  CHECK(quad == Catch::Approx(1.0).epsilon(1e-12));
}

TEST_CASE("audit classifies growth, boundedness, and exact vanishing") {
  std::vector<double> t_grid;
  for (int i = 0; i <= 48; ++i) t_grid.push_back(std::pow(10.0, -0.5 + 2.5 * i / 48.0));
  const auto rep = audit({tanh_profile(1.0, 0.2), linear_profile(1.0)},
                         all_regularizer_kinds(), t_grid, 1.0);
  REQUIRE(rep.entries.size() == 14);

  auto find = [&](std::size_t prof, RegularizerKind k) -> const AuditEntry& {
    for (const auto& e : rep.entries)
      if (e.kind == k &&
          e.profile.kind == (prof == 0 ? SlipProfile::Kind::Tanh : SlipProfile::Kind::Linear))
        return e;
    FAIL("entry not found");
    return rep.entries.front();
  };

  // tanh stripe: plain gradient grows quadratically, pulled-back and metric
  // versions quartically; curl penalties and grad F_el vanish identically;
  // the rate penalty is constant
  CHECK(find(0, RegularizerKind::StandardGradP).growth == Growth::Grows);
  CHECK(find(0, RegularizerKind::StandardGradP).exponent ==
        Catch::Approx(2.0).margin(0.05));
  CHECK(find(0, RegularizerKind::PushForward).growth == Growth::Grows);
  CHECK(find(0, RegularizerKind::PushForward).exponent == Catch::Approx(4.0).margin(0.10));
  CHECK(find(0, RegularizerKind::MetricTensor).growth == Growth::Grows);
  CHECK(find(0, RegularizerKind::MetricTensor).exponent == Catch::Approx(4.0).margin(0.10));
  CHECK(find(0, RegularizerKind::CurlP).growth == Growth::Vanishes);
  CHECK(find(0, RegularizerKind::PCurlP).growth == Growth::Vanishes);
  CHECK(find(0, RegularizerKind::GradFel).growth == Growth::Vanishes);
  CHECK(find(0, RegularizerKind::CurlP).max_energy == 0.0);
  CHECK(find(0, RegularizerKind::GradPdot).growth == Growth::Bounded);
  CHECK(find(0, RegularizerKind::GradPdot).trailing_drift <= 1e-12);
  CHECK(find(0, RegularizerKind::GradPdot).max_energy > 0.0);

  // uniform slip: every penalty vanishes, so the hardening verdict is a
  // property of the profile, not of time alone
  for (const auto kind : all_regularizer_kinds()) {
    CHECK(find(1, kind).growth == Growth::Vanishes);
    CHECK(find(1, kind).max_energy == 0.0);
  }

  // the verdicts do not depend on the penalty coefficient
  const auto rep_small = audit({tanh_profile(1.0, 0.2)}, all_regularizer_kinds(), t_grid, 1e-3);
  for (std::size_t i = 0; i < rep_small.entries.size(); ++i) {
    CHECK(rep_small.entries[i].growth == rep.entries[i].growth);
    if (rep.entries[i].growth == Growth::Grows)
      CHECK(rep_small.entries[i].exponent == Catch::Approx(rep.entries[i].exponent).margin(1e-9));
  }
}

TEST_CASE("construction and audit inputs are validated") {
  CHECK_THROWS_AS(linear_profile(0.0), std::invalid_argument);
  CHECK_THROWS_AS(linear_profile(-1.0), std::invalid_argument);
  CHECK_THROWS_AS(tanh_profile(1.0, 0.0), std::invalid_argument);
  CHECK_THROWS_AS(stripe_energy(RegularizerKind::StandardGradP, linear_profile(1.0), 1.0, 1.0, 8),
                  std::invalid_argument);
  CHECK_THROWS_AS(audit({linear_profile(1.0)}, all_regularizer_kinds(), {1.0, 2.0}, 1.0),
                  std::invalid_argument);
  CHECK_THROWS_AS(audit({linear_profile(1.0)}, all_regularizer_kinds(), {1.0, 3.0, 2.0}, 1.0),
                  std::invalid_argument);
  CHECK_THROWS_AS(audit({linear_profile(1.0)}, all_regularizer_kinds(), {0.0, 1.0, 2.0}, 1.0),
                  std::invalid_argument);
  std::set<std::string> names;
  for (const auto kind : all_regularizer_kinds()) names.insert(to_string(kind));
  CHECK(names.size() == 7);
}
