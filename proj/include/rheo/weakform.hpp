// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <cstdint>
#include <random>

#include "rheo/constitutive.hpp"

// Galerkin integrands of the coupled evolution, pointwise at a quadrature
// state. With F_el = grad_y P^{-1}, Sigma = nu_kv C_el-dot, and test fields
// (ytilde, Ptilde):
//
// momentum:  DF_E(F_el) : (grad ytilde P^{-1})
//          + Sigma : D_{grad ydot} C_el-dot [grad ytilde]
//          + DF_G(grad F_el) . grad(grad ytilde P^{-1})
//
// flow:      nu_m P-dot : Ptilde + nu_h grad2 P-dot :: grad2 Ptilde
//          + [grad_y^T DF_E(F_el) : D(P^{-1}) + DF_H(P)] : Ptilde
//          + Sigma : D_{P-dot} C_el-dot [Ptilde]
//          + DF_G(grad F_el) . grad(grad_y (D(P^{-1}) : Ptilde))
//
// The Kelvin-Voigt pairings are evaluated through the directional derivative
// of C_el-dot itself, which makes the energy-closure identity
//   momentum_kv(grad ydot) + flow_kv(P-dot) = nu_kv |C_el-dot|^2
// hold to round-off by construction. Inertia and external loads live in the
// assembler, not here.

namespace rheo {

// The pointwise first-order forces; hyperstress contributions enter
// momentum and flow through different pairings of the same tensor.
template <int d>
struct DrivingForces {
  Mat<d> stress_1;     // paired with grad ytilde (reduces to DF_E(F_el) P^{-T} for Sigma = 0)
  Ten3<d> hyperstress; // DF_G(grad F_el)
  Mat<d> flow_force;   // paired with Ptilde (zeroth-order part)
  Ten3<d> flow_hyper;  // hyperstress as it enters the flow equation
};

// Fully reduced, test-independent pairing tensors for assembly:
//   momentum row = stress : grad N + stress_hyper . grad2 N
//   flow row     = flow : N + flow_grad . grad N + visc_h :: grad2 N
// where N runs over the (vector/matrix valued) basis test functions.
template <int d>
struct AssemblyForces {
  Mat<d> stress;
  Ten3<d> stress_hyper;
  Mat<d> flow;
  Ten3<d> flow_grad;
  Ten4<d> visc_h;
};

namespace detail {

template <int d>
inline Mat<d> slice3(const Ten3<d>& b, int k) {
  Mat<d> r;
  for (int i = 0; i < d; ++i)
    for (int j = 0; j < d; ++j) r(i, j) = b(i, j, k);
  return r;
}

// grad(P^{-1}) from grad(P): slice_k = -P^{-1} (d_k P) P^{-1}.
template <int d>
inline Ten3<d> grad_inverse(const Mat<d>& ip, const Ten3<d>& grad_P) {
  Ten3<d> r;
  for (int k = 0; k < d; ++k) {
    const Mat<d> s = -1.0 * (ip * slice3(grad_P, k) * ip);
    for (int i = 0; i < d; ++i)
      for (int j = 0; j < d; ++j) r(i, j, k) = s(i, j);
  }
  return r;
}

// grad(A Ahat) for a matrix field product, (grad X)_ijk = d_k X_ij:
// grad(A Ahat) = (Ahat^T (grad A)^T)^t + A grad Ahat.
template <int d>
inline Ten3<d> grad_of_product(const Mat<d>& a, const Ten3<d>& grad_a, const Mat<d>& ahat,
                               const Ten3<d>& grad_ahat) {
  return t3_transpose12(mat_ten3(transpose(ahat), t3_transpose12(grad_a))) +
         mat_ten3(a, grad_ahat);
}

// grad(F_el) = grad(grad_y P^{-1}).
template <int d>
inline Ten3<d> grad_f_el(const QuadState<d>& q, const Mat<d>& ip) {
  return grad_of_product(q.grad_y, q.grad2_y, ip, grad_inverse(ip, q.grad_P));
}

}  // namespace detail

// --- integrand pieces ---------------------------------------------------

// d/dtau [ F_E + F_G ](y + tau ytilde) |_{tau=0}
template <int d>
inline double momentum_energetic_integrand(const QuadState<d>& q, const Mat<d>& test_grad_y,
                                           const Ten3<d>& test_grad2_y, const MaterialParams& p) {
  const Mat<d> ip = inverse(q.P);
  const Mat<d> f_el = q.grad_y * ip;
  const Ten3<d> grad_ip = detail::grad_inverse(ip, q.grad_P);
  const Ten3<d> h = fg_dG(detail::grad_f_el(q, ip), p);
  const Ten3<d> grad_test_f = detail::grad_of_product(test_grad_y, test_grad2_y, ip, grad_ip);
  return contract22(fe_dF(f_el, p), test_grad_y * ip) + contract33(h, grad_test_f);
}

// Sigma : D_{grad ydot} C_el-dot [grad ytilde]
template <int d>
inline double momentum_kv_integrand(const QuadState<d>& q, const Mat<d>& test_grad_y,
                                    const MaterialParams& p) {
  const Mat<d> sigma = sigma_kv(q, p);
  return contract22(sigma, cel_rate(q.grad_y, test_grad_y, q.P, Mat<d>{}));
}

template <int d>
inline double momentum_integrand(const QuadState<d>& q, const Mat<d>& test_grad_y,
                                 const Ten3<d>& test_grad2_y, const MaterialParams& p) {
  return momentum_energetic_integrand(q, test_grad_y, test_grad2_y, p) +
         momentum_kv_integrand(q, test_grad_y, p);
}

// d/dtau [ F_E + F_H + F_G ](P + tau Ptilde) |_{tau=0}
template <int d>
inline double flow_energetic_integrand(const QuadState<d>& q, const Mat<d>& test_P,
                                       const Ten3<d>& test_grad_P, const MaterialParams& p) {
  const Mat<d> ip = inverse(q.P);
  const Mat<d> ipt = transpose(ip);
  const Mat<d> f_el = q.grad_y * ip;
  const Ten3<d> grad_ip = detail::grad_inverse(ip, q.grad_P);
  const Ten3<d> h = fg_dG(detail::grad_f_el(q, ip), p);

  const Mat<d> dfe = fe_dF(f_el, p);
  const double fe_term = contract22(-1.0 * (ipt * (transpose(q.grad_y) * dfe) * ipt), test_P);
  const double fh_term = contract22(fh_dP(q.P, p), test_P);

  // B = D(P^{-1})[Ptilde] = -P^{-1} Ptilde P^{-1} and its gradient, then
  // d/dtau grad F_el = (B^T (grad grad_y)^T)^t + grad_y grad B.
  const Mat<d> b = -1.0 * (ip * test_P * ip);
  Ten3<d> grad_b;
  for (int k = 0; k < d; ++k) {
    const Mat<d> gip_k = detail::slice3(grad_ip, k);
    const Mat<d> s = -1.0 * (gip_k * test_P * ip + ip * detail::slice3(test_grad_P, k) * ip +
                             ip * test_P * gip_k);
    for (int i = 0; i < d; ++i)
      for (int j = 0; j < d; ++j) grad_b(i, j, k) = s(i, j);
  }
  const Ten3<d> dgrad_f = detail::grad_of_product(q.grad_y, q.grad2_y, b, grad_b);
  return fe_term + fh_term + contract33(h, dgrad_f);
}

// Sigma : D_{P-dot} C_el-dot [Ptilde]
template <int d>
inline double flow_kv_integrand(const QuadState<d>& q, const Mat<d>& test_P,
                                const MaterialParams& p) {
  const Mat<d> sigma = sigma_kv(q, p);
  return contract22(sigma, cel_rate(q.grad_y, Mat<d>{}, q.P, test_P));
}

// nu_m P-dot : Ptilde + nu_h grad2 P-dot :: grad2 Ptilde
template <int d>
inline double flow_viscous_integrand(const QuadState<d>& q, const Mat<d>& test_P,
                                     const Ten4<d>& test_grad2_P, const MaterialParams& p) {
  return p.nu_m * contract22(q.rate_P, test_P) +
         p.nu_h * contract44(q.rate_grad2_P, test_grad2_P);
}

template <int d>
inline double flow_integrand(const QuadState<d>& q, const Mat<d>& test_P,
                             const Ten3<d>& test_grad_P, const Ten4<d>& test_grad2_P,
                             const MaterialParams& p) {
  return flow_viscous_integrand(q, test_P, test_grad2_P, p) +
         flow_energetic_integrand(q, test_P, test_grad_P, p) + flow_kv_integrand(q, test_P, p);
}

// --- reduced pointwise forces -----------------------------------------------

template <int d>
inline DrivingForces<d> driving_forces(const QuadState<d>& q, const MaterialParams& p) {
  const Mat<d> ip = inverse(q.P);
  const Mat<d> ipt = transpose(ip);
  const Mat<d> f_el = q.grad_y * ip;
  const Mat<d> c_el = transpose(f_el) * f_el;
  const Mat<d> sigma = p.nu_kv * cel_rate(q.grad_y, q.rate_grad_y, q.P, q.rate_P);
  const Mat<d> dfe = fe_dF(f_el, p);

  DrivingForces<d> out;
  out.stress_1 = dfe * ipt + 2.0 * (f_el * sigma * ipt);
  out.hyperstress = fg_dG(detail::grad_f_el(q, ip), p);
  out.flow_force = -1.0 * (ipt * (transpose(q.grad_y) * dfe) * ipt) + fh_dP(q.P, p) -
                   2.0 * (c_el * sigma * ipt);
  out.flow_hyper = out.hyperstress;
  return out;
}

// Expands the hyperstress pairings into test-independent tensors so assembly
// can pair each basis function in O(d^2) flops. Agrees with the *_integrand
// functions for every admissible test direction.
template <int d>
inline AssemblyForces<d> assembly_forces(const QuadState<d>& q, const MaterialParams& p) {
  const Mat<d> ip = inverse(q.P);
  const Mat<d> ipt = transpose(ip);
  const Mat<d> f_el = q.grad_y * ip;
  const Mat<d> c_el = transpose(f_el) * f_el;
  const Mat<d> sigma = p.nu_kv * cel_rate(q.grad_y, q.rate_grad_y, q.P, q.rate_P);
  const Mat<d> dfe = fe_dF(f_el, p);
  const Ten3<d> grad_ip = detail::grad_inverse(ip, q.grad_P);
  const Ten3<d> h = fg_dG(detail::grad_f_el(q, ip), p);

  AssemblyForces<d> out;

  // Momentum. grad(grad ytilde P^{-1}) splits into a grad2-test part, handled
  // by stress_hyper = H contracted with P^{-T} on the middle index, and a
  // grad-test part absorbed into the first-order stress.
  Mat<d> m1;
  for (int i = 0; i < d; ++i)
    for (int m = 0; m < d; ++m) {
      double s = 0.0;
      for (int j = 0; j < d; ++j)
        for (int k = 0; k < d; ++k) s += h(i, j, k) * grad_ip(m, j, k);
      m1(i, m) = s;
    }
  out.stress = dfe * ipt + 2.0 * (f_el * sigma * ipt) + m1;
  out.stress_hyper = ten3_mid_mat(h, ipt);

  // Flow. grad(grad_y D(P^{-1})[Ptilde]) expands into a value-test part
  // (a1 + a2 + a3) and a grad-test part (flow_grad).
  const Ten3<d> h2 = mat_ten3(transpose(q.grad_y), h);
  Mat<d> g1;
  for (int m = 0; m < d; ++m)
    for (int j = 0; j < d; ++j) {
      double s = 0.0;
      for (int i = 0; i < d; ++i)
        for (int k = 0; k < d; ++k) s += h(i, j, k) * q.grad2_y(i, m, k);
      g1(m, j) = s;
    }
  const Mat<d> a1 = -1.0 * (ipt * g1 * ipt);

  Mat<d> a2, a3;
  Ten3<d> k3;
  for (int k = 0; k < d; ++k) {
    const Mat<d> w_k = ip * detail::slice3(q.grad_P, k) * ip;
    const Mat<d> h2_k = detail::slice3(h2, k);
    a2 += transpose(w_k) * h2_k * ipt;
    a3 += ipt * h2_k * transpose(w_k);
    const Mat<d> kk = -1.0 * (ipt * h2_k * ipt);
    for (int i = 0; i < d; ++i)
      for (int j = 0; j < d; ++j) k3(i, j, k) = kk(i, j);
  }

  out.flow = p.nu_m * q.rate_P - 1.0 * (ipt * (transpose(q.grad_y) * dfe) * ipt) +
             fh_dP(q.P, p) - 2.0 * (c_el * sigma * ipt) + a1 + a2 + a3;
  out.flow_grad = k3;
  out.visc_h = p.nu_h * q.rate_grad2_P;
  return out;
}

// --- randomized derivative verification ---------------------------------

struct FdCheckReport {
  double err_momentum = 0.0;  // energetic momentum pairing vs FD of F_E + F_G
  double err_flow = 0.0;      // energetic flow pairing vs FD of F_E + F_H + F_G
  double err_kv_stress = 0.0; // KV momentum pairing vs FD of the dissipation density
  double err_kv_flow = 0.0;   // KV flow pairing vs FD of the dissipation density
  int trials = 0;

  double max_err() const {
    return std::max(std::max(err_momentum, err_flow), std::max(err_kv_stress, err_kv_flow));
  }
};

namespace detail {

class Rng {
 public:
  explicit Rng(std::uint64_t seed) : eng_(seed) {}
  double uniform(double lo = -1.0, double hi = 1.0) {
    const double u = static_cast<double>(eng_() >> 11) * 0x1.0p-53;
    return lo + (hi - lo) * u;
  }

 private:
  std::mt19937_64 eng_;
};

template <int d>
Mat<d> rand_mat(Rng& rng, double s) {
  Mat<d> r;
  for (int i = 0; i < d; ++i)
    for (int j = 0; j < d; ++j) r(i, j) = s * rng.uniform();
  return r;
}

template <int d>
Ten3<d> rand_ten3(Rng& rng, double s) {
  Ten3<d> r;
  for (int i = 0; i < d; ++i)
    for (int j = 0; j < d; ++j)
      for (int k = 0; k < d; ++k) r(i, j, k) = s * rng.uniform();
  return r;
}

template <int d>
Ten4<d> rand_ten4_sym(Rng& rng, double s) {
  Ten4<d> r;  // symmetric in the derivative pair (k, l)
  for (int i = 0; i < d; ++i)
    for (int j = 0; j < d; ++j)
      for (int k = 0; k < d; ++k)
        for (int l = k; l < d; ++l) r(i, j, k, l) = r(i, j, l, k) = s * rng.uniform();
  return r;
}

template <int d>
Ten3<d> rand_ten3_symjk(Rng& rng, double s) {
  Ten3<d> r;  // symmetric in the derivative pair (j, k): admissible second gradient
  for (int i = 0; i < d; ++i)
    for (int j = 0; j < d; ++j)
      for (int k = j; k < d; ++k) r(i, j, k) = r(i, k, j) = s * rng.uniform();
  return r;
}

template <int d>
Mat<d> rand_invertible(Rng& rng, double spread, double min_det) {
  for (;;) {
    Mat<d> m = identity<d>() + rand_mat<d>(rng, spread);
    if (det(m) >= min_det) return m;
  }
}

template <int d>
QuadState<d> rand_state(Rng& rng) {
  QuadState<d> q;
  q.grad_y = rand_invertible<d>(rng, 0.4, 0.3);
  q.grad2_y = rand_ten3_symjk<d>(rng, 0.5);
  q.P = rand_invertible<d>(rng, 0.4, 0.3);
  q.grad_P = rand_ten3<d>(rng, 0.5);
  q.grad2_P = rand_ten4_sym<d>(rng, 0.5);
  q.rate_grad_y = rand_mat<d>(rng, 1.0);
  q.rate_P = rand_mat<d>(rng, 1.0);
  q.rate_grad2_P = rand_ten4_sym<d>(rng, 1.0);
  return q;
}

inline double rel_gap(double analytic, double fd) {
  const double scale = std::max(std::abs(analytic), std::abs(fd));
  return scale < 1e-10 ? std::abs(analytic - fd) : std::abs(analytic - fd) / scale;
}

template <int d>
FdCheckReport fd_check_dim(std::uint64_t seed, int trials) {
  Rng rng(seed);
  const MaterialParams p;
  FdCheckReport rep;
  rep.trials = trials;

  for (int t = 0; t < trials; ++t) {
    const QuadState<d> q = rand_state<d>(rng);
    const Mat<d> tgy = rand_mat<d>(rng, 1.0);
    const Ten3<d> tg2y = rand_ten3_symjk<d>(rng, 1.0);
    const Mat<d> tP = rand_mat<d>(rng, 1.0);
    const Ten3<d> tgP = rand_ten3<d>(rng, 1.0);

    // Energetic momentum pairing: vary (grad_y, grad2_y) along the test field.
    {
      const double h =
          1e-6 * (1.0 + std::sqrt(norm2(q.grad_y) + norm2(q.grad2_y)));
      auto phi = [&](double tau) {
        QuadState<d> s = q;
        s.grad_y = q.grad_y + tau * tgy;
        s.grad2_y = q.grad2_y + tau * tg2y;
        const Mat<d> ip = inverse(s.P);
        return fe_eval(s.grad_y * ip, p) + fg_eval(detail::grad_f_el(s, ip), p);
      };
      const double fd = (phi(h) - phi(-h)) / (2.0 * h);
      const double an = momentum_energetic_integrand(q, tgy, tg2y, p);
      rep.err_momentum = std::max(rep.err_momentum, rel_gap(an, fd));
    }

    // Energetic flow pairing: vary (P, grad_P) along the test field.
    {
      const double h = 1e-6 * (1.0 + std::sqrt(norm2(q.P) + norm2(q.grad_P)));
      auto phi = [&](double tau) {
        QuadState<d> s = q;
        s.P = q.P + tau * tP;
        s.grad_P = q.grad_P + tau * tgP;
        const Mat<d> ip = inverse(s.P);
        return fe_eval(s.grad_y * ip, p) + fh_eval(s.P, p) +
               fg_eval(detail::grad_f_el(s, ip), p);
      };
      const double fd = (phi(h) - phi(-h)) / (2.0 * h);
      const double an = flow_energetic_integrand(q, tP, tgP, p);
      rep.err_flow = std::max(rep.err_flow, rel_gap(an, fd));
    }

    // KV stress pairing: vary the velocity gradient in the dissipation density.
    {
      const double h = 1e-6 * (1.0 + frobenius(q.rate_grad_y));
      auto r_of = [&](double tau) {
        QuadState<d> s = q;
        s.rate_grad_y = q.rate_grad_y + tau * tgy;
        return dissipation_density(s, p);
      };
      const double fd = (r_of(h) - r_of(-h)) / (2.0 * h);
      const double an = momentum_kv_integrand(q, tgy, p);
      rep.err_kv_stress = std::max(rep.err_kv_stress, rel_gap(an, fd));
    }

    // KV flow pairing: vary the inelastic rate in the dissipation density
    // (the nu_m part of R is removed since it is not part of the KV coupling).
    {
      const double h = 1e-6 * (1.0 + frobenius(q.rate_P));
      auto r_of = [&](double tau) {
        QuadState<d> s = q;
        s.rate_P = q.rate_P + tau * tP;
        return dissipation_density(s, p) - 0.5 * p.nu_m * norm2(s.rate_P);
      };
      const double fd = (r_of(h) - r_of(-h)) / (2.0 * h);
      const double an = flow_kv_integrand(q, tP, p);
      rep.err_kv_flow = std::max(rep.err_kv_flow, rel_gap(an, fd));
    }
  }
  return rep;
}

}  // namespace detail

// Randomized verification of all four derivative families against central
// finite differences of the energy/dissipation densities.
inline FdCheckReport fd_check_all(std::uint64_t seed, int trials, int dim) {
  return dim == 3 ? detail::fd_check_dim<3>(seed, trials)
                  : detail::fd_check_dim<2>(seed, trials);
}

}  // namespace rheo
