// SPDX-License-Identifier: Apache-2.0
#include <catch2/catch_amalgamated.hpp>

#include "helpers.hpp"
#include "rheo/constitutive.hpp"

using namespace rheo;
using rheotest::Rng;

namespace {

template <int d, typename F>
Mat<d> central_fd_mat(F&& density, const Mat<d>& at, double h) {
  Mat<d> g;
  for (int i = 0; i < d; ++i)
    for (int j = 0; j < d; ++j) {
      Mat<d> p = at, m = at;
      p(i, j) += h;
      m(i, j) -= h;
      g(i, j) = (density(p) - density(m)) / (2.0 * h);
    }
  return g;
}

}  // namespace

TEST_CASE("elastic energy is zero and stress-free at the reference") {
  MaterialParams p;
  REQUIRE(fe_eval(identity<2>(), p) == Catch::Approx(0.0).margin(1e-15));
  REQUIRE(fe_eval(identity<3>(), p) == Catch::Approx(0.0).margin(1e-15));
  REQUIRE(frobenius(fe_dF(identity<2>(), p)) < 1e-15);
  REQUIRE(frobenius(fe_dF(identity<3>(), p)) < 1e-15);
}

TEST_CASE("elastic energy closed-form value at a volume-preserving stretch") {
  MaterialParams p;
  p.mu = 1.0;
  Mat<2> f;
  f(0, 0) = 2.0;
  f(1, 1) = 0.5;
  // |F|^2 = 4.25, det F = 1, so F_E = (4.25 - 2)/2; the compression barrier is inactive.
  REQUIRE(fe_eval(f, p) == Catch::Approx(1.125).epsilon(1e-14));
}

TEST_CASE("elastic stress matches finite differences") {
  MaterialParams p;
  Rng rng(11);
  for (int trial = 0; trial < 25; ++trial) {
    const Mat<2> f = rheotest::random_invertible<2>(rng, 0.5, 0.4);
    const double h = 1e-6 * (1.0 + frobenius(f));
    const Mat<2> fd =
        central_fd_mat<2>([&p](const Mat<2>& x) { return fe_eval(x, p); }, f, h);
    const Mat<2> an = fe_dF(f, p);
    REQUIRE(rheotest::max_abs_diff(an, fd) < 1e-6 * std::max(1.0, frobenius(an)));
  }
  for (int trial = 0; trial < 25; ++trial) {
    const Mat<3> f = rheotest::random_invertible<3>(rng, 0.4, 0.4);
    const double h = 1e-6 * (1.0 + frobenius(f));
    const Mat<3> fd =
        central_fd_mat<3>([&p](const Mat<3>& x) { return fe_eval(x, p); }, f, h);
    const Mat<3> an = fe_dF(f, p);
    REQUIRE(rheotest::max_abs_diff(an, fd) < 1e-6 * std::max(1.0, frobenius(an)));
  }
}

TEST_CASE("compression barrier activates and blows up") {
  MaterialParams p;
  REQUIRE(fe_eval(0.1 * identity<2>(), p) > fe_eval(0.2 * identity<2>(), p));
  REQUIRE(fe_eval(0.05 * identity<2>(), p) > 1e12);

  Mat<2> collapsed;  // det == 0
  collapsed(0, 0) = 1.0;
  REQUIRE_THROWS_AS(fe_eval(collapsed, p), NonPositiveDeterminant);
  REQUIRE_THROWS_AS(fe_dF(collapsed, p), NonPositiveDeterminant);
}

TEST_CASE("constraint energy reference value and stationarity") {
  MaterialParams p;
  REQUIRE(fh_eval(identity<2>(), p) == Catch::Approx(p.delta).epsilon(1e-14));
  REQUIRE(frobenius(fh_dP(identity<2>(), p)) < 1e-15);
  REQUIRE(frobenius(fh_dP(identity<3>(), p)) < 1e-15);

  Mat<2> stretched;
  stretched(0, 0) = 2.0;
  stretched(1, 1) = 1.0;
  // det = 2: F_H = delta + 1/(2 delta) with delta = 0.01.
  REQUIRE(fh_eval(stretched, p) == Catch::Approx(50.01).epsilon(1e-14));

  // Blow-up toward det -> 0+ and rejection of non-positive determinants.
  REQUIRE(fh_eval(0.01 * identity<2>(), p) > 1e10);
  Mat<2> degenerate;
  degenerate(0, 1) = 1.0;
  REQUIRE_THROWS_AS(fh_eval(degenerate, p), NonPositiveDeterminant);
}

TEST_CASE("constraint force matches finite differences") {
  MaterialParams p;
  Rng rng(13);
  for (int trial = 0; trial < 40; ++trial) {
    // Random P with det in (0.3, 3) so both branches of F_H get sampled.
    const Mat<2> P = rheotest::random_invertible<2>(rng, 0.6, 0.3);
    if (det(P) > 3.0) continue;
    const double h = 1e-6 * (1.0 + frobenius(P));
    const Mat<2> fd =
        central_fd_mat<2>([&p](const Mat<2>& x) { return fh_eval(x, p); }, P, h);
    const Mat<2> an = fh_dP(P, p);
    REQUIRE(rheotest::max_abs_diff(an, fd) < 1e-6 * std::max(1.0, frobenius(an)));
  }
}

TEST_CASE("strain-gradient energy value, derivative, and monotonicity") {
  MaterialParams p;
  p.eps_g = 1.0;
  p.p_g = 3.0;

  Ten3<2> g;
  g(0, 1, 1) = 2.0;
  REQUIRE(fg_eval(g, p) == Catch::Approx(8.0).epsilon(1e-14));  // |G|^3

  REQUIRE(frobenius(fg_dG(Ten3<2>{}, p)) == 0.0);

  Rng rng(17);
  for (int trial = 0; trial < 30; ++trial) {
    const Ten3<2> x = rheotest::random_ten3<2>(rng);
    const double h = 1e-6 * (1.0 + frobenius(x));
    Ten3<2> fd;
    for (int i = 0; i < 2; ++i)
      for (int j = 0; j < 2; ++j)
        for (int k = 0; k < 2; ++k) {
          Ten3<2> xp = x, xm = x;
          xp(i, j, k) += h;
          xm(i, j, k) -= h;
          fd(i, j, k) = (fg_eval(xp, p) - fg_eval(xm, p)) / (2.0 * h);
        }
    REQUIRE(rheotest::max_abs_diff(fg_dG(x, p), fd) < 1e-6);
  }

  // Monotonicity with p_g-growth: (DF_G(G) - DF_G(G~)) . (G - G~) >= c |G - G~|^{p_g}.
  double min_ratio = 1e300;
  for (int trial = 0; trial < 100; ++trial) {
    const Ten3<2> a = rheotest::random_ten3<2>(rng, 2.0);
    const Ten3<2> b = rheotest::random_ten3<2>(rng, 2.0);
    const Ten3<2> diff = a - b;
    const double gap = contract33(fg_dG(a, p) - fg_dG(b, p), diff);
    const double denom = std::pow(norm2(diff), 0.5 * p.p_g);
    if (denom > 1e-12) min_ratio = std::min(min_ratio, gap / denom);
  }
  REQUIRE(min_ratio > 0.05);
}

TEST_CASE("elastic metric and its rate") {
  Rng rng(19);
  for (int trial = 0; trial < 25; ++trial) {
    const Mat<2> gy = rheotest::random_invertible<2>(rng);
    const Mat<2> P = rheotest::random_invertible<2>(rng);
    const Mat<2> c = cel(gy, P);
    REQUIRE(rheotest::max_abs_diff(c, transpose(c)) < 1e-14);

    const Mat<2> f_el = gy * inverse(P);
    REQUIRE(rheotest::max_abs_diff(c, transpose(f_el) * f_el) < 1e-14);

    // Rate formula against a central difference of the metric itself.
    const Mat<2> vy = rheotest::random_mat<2>(rng);
    const Mat<2> vP = rheotest::random_mat<2>(rng);
    const double h = 1e-6;
    const Mat<2> fd =
        (1.0 / (2.0 * h)) * (cel<2>(gy + h * vy, P + h * vP) - cel<2>(gy - h * vy, P - h * vP));
    const Mat<2> an = cel_rate(gy, vy, P, vP);
    REQUIRE(rheotest::max_abs_diff(an, fd) < 1e-6 * std::max(1.0, frobenius(an)));
  }
  REQUIRE(rheotest::max_abs_diff(cel(identity<3>(), identity<3>()), identity<3>()) == 0.0);
}

TEST_CASE("dissipation density closed-form value") {
  MaterialParams p;  // nu_m = 1, nu_kv = 1, nu_h = 0.01
  QuadState<2> q;
  q.grad_y = identity<2>();
  q.P = identity<2>();
  q.rate_P(0, 0) = 1.0;
  // C_el-dot = -2 sym(E11) here, so R = nu_m/2 + (nu_kv/2) * 4.
  REQUIRE(dissipation_density(q, p) == Catch::Approx(2.5).epsilon(1e-14));

  const Mat<2> skv = sigma_kv(q, p);
  Mat<2> expected;
  expected(0, 0) = -2.0;
  REQUIRE(rheotest::max_abs_diff(skv, expected) < 1e-14);
}

TEST_CASE("parameter validation") {
  MaterialParams p;
  REQUIRE(validate_params(p, 2).empty());

  SECTION("reference 3d set") {
    MaterialParams q;
    q.p_g = 4.0;   // in (3, 6)
    q.r_el = 13.0; // needs > 12
    q.s_h = 7;     // needs > 6
    REQUIRE(validate_params(q, 3).empty());

    q.r_el = 12.0;
    REQUIRE(validate_params(q, 3).size() == 1);
    q.r_el = 13.0;
    q.s_h = 6;
    REQUIRE(validate_params(q, 3).size() == 1);
  }

  SECTION("2d exponent coupling uses 2* = 2 p_g") {
    MaterialParams q;
    q.s_h = 3;  // needs > 2 p_g / (p_g - 1) = 3 at p_g = 3
    REQUIRE_FALSE(validate_params(q, 2).empty());
    q.s_h = 4;
    REQUIRE(validate_params(q, 2).empty());

    q.p_g = 2.0;  // must exceed d
    REQUIRE_FALSE(validate_params(q, 2).empty());
  }

  SECTION("positivity") {
    MaterialParams q;
    q.nu_h = 0.0;
    REQUIRE(validate_params(q, 2).size() == 1);
    q.nu_h = 0.01;
    q.rho = -1.0;
    REQUIRE(validate_params(q, 2).size() == 1);
  }
}
