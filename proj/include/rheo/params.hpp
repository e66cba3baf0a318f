// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <string>
#include <vector>

namespace rheo {

// Material and regularization parameters. Defaults are the reference 2d set;
// every field is dimensionless after the usual nondimensionalization.
struct MaterialParams {
  double rho = 1.0;     // mass density; 0 is admissible for quasi-static runs
  double nu_m = 1.0;    // viscosity on the inelastic strain rate
  double nu_h = 0.01;   // hyperviscosity on second gradients of the inelastic rate
  double nu_kv = 1.0;   // Kelvin-Voigt viscosity on the elastic metric rate
  double mu = 1.0;      // elastic shear modulus
  double eps_b = 0.1;   // elastic compression barrier coefficient
  double r_el = 7.0;    // elastic compression barrier exponent
  double delta = 0.01;  // inelastic volume constraint mollification
  int s_h = 4;          // inelastic compression barrier exponent (integer >= 3)
  double eps_g = 0.01;  // elastic strain-gradient energy coefficient
  double p_g = 3.0;     // strain-gradient growth exponent

  bool operator==(const MaterialParams&) const = default;
};

// Critical Sobolev exponent used by the admissibility conditions. For d == 3
// this is the usual 2* = 6. For d == 2 the embedding exponent is formally
// infinite; by convention this library uses 2* := 2 * p_g, which keeps every
// admissibility inequality finite and scales with the chosen gradient growth.
inline double sobolev_star(int d, double p_g) { return d == 3 ? 6.0 : 2.0 * p_g; }

// Checks coercivity/integrability conditions and positivity. Returns one
// human-readable message per violated condition; empty means admissible.
inline std::vector<std::string> validate_params(const MaterialParams& p, int d) {
  std::vector<std::string> bad;
  auto fail = [&bad](const std::string& msg) { bad.push_back(msg); };

  if (!(d == 2 || d == 3)) fail("dimension must be 2 or 3, got " + std::to_string(d));
  if (!(p.rho >= 0.0)) fail("rho must be >= 0");
  if (!(p.nu_m > 0.0)) fail("nu_m must be > 0");
  if (!(p.nu_h > 0.0)) fail("nu_h must be > 0");
  if (!(p.nu_kv > 0.0)) fail("nu_kv must be > 0");
  if (!(p.mu > 0.0)) fail("mu must be > 0");
  if (!(p.eps_b > 0.0)) fail("eps_b must be > 0");
  if (!(p.delta > 0.0)) fail("delta must be > 0");
  if (!(p.eps_g > 0.0)) fail("eps_g must be > 0");

  if (d != 2 && d != 3) return bad;
  const double two_star = sobolev_star(d, p.p_g);

  if (!(p.p_g > d && p.p_g < two_star)) {
    fail("p_g must lie in (d, 2*) = (" + std::to_string(d) + ", " + std::to_string(two_star) +
         "), got " + std::to_string(p.p_g));
  } else {
    const double r_min = p.p_g * d / (p.p_g - d);
    if (!(p.r_el > r_min))
      fail("r_el must exceed p_g*d/(p_g - d) = " + std::to_string(r_min) + ", got " +
           std::to_string(p.r_el));
  }

  if (p.s_h < 3) fail("s_h must be an integer >= 3, got " + std::to_string(p.s_h));
  if (two_star > d) {
    const double s_min = two_star * d / (two_star - d);
    if (!(static_cast<double>(p.s_h) > s_min))
      fail("s_h must exceed 2*_*d/(2* - d) = " + std::to_string(s_min) + ", got " +
           std::to_string(p.s_h));
  }

  return bad;
}

}  // namespace rheo
