// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <cmath>
#include <stdexcept>

// Fixed-size dense tensors in spatial dimension d in {2,3}, stack-allocated.
// Index conventions for the contraction products follow the continuum-mechanics
// usage in the rest of the library:
//   A:B      = A_ij B_ij
//   B . C    = B_ijk C_ijk                (3-tensors)
//   (C:A)_ij = C_ijkl A_kl                (4-tensor applied to a matrix)
//   (B:A)_i  = B_ijk A_jk
//   (BA)_ijk = B_ijm A_mk,  (MB)_ijk = M_im B_mjk
// Gradients of matrix fields are 3-tensors with (grad A)_ijk = d_k A_ij; second
// gradients of matrix fields are 4-tensors with (grad2 A)_ijkl = d_k d_l A_ij.

namespace rheo {

struct SingularMatrix : std::runtime_error {
  explicit SingularMatrix(double det_value)
      : std::runtime_error("matrix inversion: |det| below singular tolerance"),
        det(det_value) {}
  double det;
};

template <int d>
struct Vec {
  static_assert(d == 2 || d == 3, "spatial dimension must be 2 or 3");
  double v[d]{};

  double& operator[](int i) { return v[i]; }
  double operator[](int i) const { return v[i]; }
};

template <int d>
struct Mat {
  static_assert(d == 2 || d == 3, "spatial dimension must be 2 or 3");
  double v[d][d]{};

  double& operator()(int i, int j) { return v[i][j]; }
  double operator()(int i, int j) const { return v[i][j]; }
};

template <int d>
struct Ten3 {
  static_assert(d == 2 || d == 3, "spatial dimension must be 2 or 3");
  double v[d][d][d]{};

  double& operator()(int i, int j, int k) { return v[i][j][k]; }
  double operator()(int i, int j, int k) const { return v[i][j][k]; }
};

template <int d>
struct Ten4 {
  static_assert(d == 2 || d == 3, "spatial dimension must be 2 or 3");
  double v[d][d][d][d]{};

  double& operator()(int i, int j, int k, int l) { return v[i][j][k][l]; }
  double operator()(int i, int j, int k, int l) const { return v[i][j][k][l]; }
};

// --- element-wise arithmetic -------------------------------------------------

template <int d>
inline Vec<d> operator+(const Vec<d>& a, const Vec<d>& b) {
  Vec<d> r;
  for (int i = 0; i < d; ++i) r[i] = a[i] + b[i];
  return r;
}

template <int d>
inline Vec<d> operator-(const Vec<d>& a, const Vec<d>& b) {
  Vec<d> r;
  for (int i = 0; i < d; ++i) r[i] = a[i] - b[i];
  return r;
}

template <int d>
inline Vec<d> operator*(double s, const Vec<d>& a) {
  Vec<d> r;
  for (int i = 0; i < d; ++i) r[i] = s * a[i];
  return r;
}

template <int d>
inline Mat<d> operator+(const Mat<d>& a, const Mat<d>& b) {
  Mat<d> r;
  for (int i = 0; i < d; ++i)
    for (int j = 0; j < d; ++j) r(i, j) = a(i, j) + b(i, j);
  return r;
}

template <int d>
inline Mat<d> operator-(const Mat<d>& a, const Mat<d>& b) {
  Mat<d> r;
  for (int i = 0; i < d; ++i)
    for (int j = 0; j < d; ++j) r(i, j) = a(i, j) - b(i, j);
  return r;
}

template <int d>
inline Mat<d> operator*(double s, const Mat<d>& a) {
  Mat<d> r;
  for (int i = 0; i < d; ++i)
    for (int j = 0; j < d; ++j) r(i, j) = s * a(i, j);
  return r;
}

template <int d>
inline Mat<d>& operator+=(Mat<d>& a, const Mat<d>& b) {
  for (int i = 0; i < d; ++i)
    for (int j = 0; j < d; ++j) a(i, j) += b(i, j);
  return a;
}

template <int d>
inline Ten3<d> operator+(const Ten3<d>& a, const Ten3<d>& b) {
  Ten3<d> r;
  for (int i = 0; i < d; ++i)
    for (int j = 0; j < d; ++j)
      for (int k = 0; k < d; ++k) r(i, j, k) = a(i, j, k) + b(i, j, k);
  return r;
}

template <int d>
inline Ten3<d> operator-(const Ten3<d>& a, const Ten3<d>& b) {
  Ten3<d> r;
  for (int i = 0; i < d; ++i)
    for (int j = 0; j < d; ++j)
      for (int k = 0; k < d; ++k) r(i, j, k) = a(i, j, k) - b(i, j, k);
  return r;
}

template <int d>
inline Ten3<d> operator*(double s, const Ten3<d>& a) {
  Ten3<d> r;
  for (int i = 0; i < d; ++i)
    for (int j = 0; j < d; ++j)
      for (int k = 0; k < d; ++k) r(i, j, k) = s * a(i, j, k);
  return r;
}

template <int d>
inline Ten3<d>& operator+=(Ten3<d>& a, const Ten3<d>& b) {
  for (int i = 0; i < d; ++i)
    for (int j = 0; j < d; ++j)
      for (int k = 0; k < d; ++k) a(i, j, k) += b(i, j, k);
  return a;
}

template <int d>
inline Ten4<d> operator+(const Ten4<d>& a, const Ten4<d>& b) {
  Ten4<d> r;
  for (int i = 0; i < d; ++i)
    for (int j = 0; j < d; ++j)
      for (int k = 0; k < d; ++k)
        for (int l = 0; l < d; ++l) r(i, j, k, l) = a(i, j, k, l) + b(i, j, k, l);
  return r;
}

template <int d>
inline Ten4<d> operator-(const Ten4<d>& a, const Ten4<d>& b) {
  Ten4<d> r;
  for (int i = 0; i < d; ++i)
    for (int j = 0; j < d; ++j)
      for (int k = 0; k < d; ++k)
        for (int l = 0; l < d; ++l) r(i, j, k, l) = a(i, j, k, l) - b(i, j, k, l);
  return r;
}

template <int d>
inline Ten4<d> operator*(double s, const Ten4<d>& a) {
  Ten4<d> r;
  for (int i = 0; i < d; ++i)
    for (int j = 0; j < d; ++j)
      for (int k = 0; k < d; ++k)
        for (int l = 0; l < d; ++l) r(i, j, k, l) = s * a(i, j, k, l);
  return r;
}

// --- basic linear algebra ----------------------------------------------------

template <int d>
inline Mat<d> identity() {
  Mat<d> r;
  for (int i = 0; i < d; ++i) r(i, i) = 1.0;
  return r;
}

template <int d>
inline Mat<d> transpose(const Mat<d>& a) {
  Mat<d> r;
  for (int i = 0; i < d; ++i)
    for (int j = 0; j < d; ++j) r(i, j) = a(j, i);
  return r;
}

template <int d>
inline Mat<d> sym(const Mat<d>& a) {
  Mat<d> r;
  for (int i = 0; i < d; ++i)
    for (int j = 0; j < d; ++j) r(i, j) = 0.5 * (a(i, j) + a(j, i));
  return r;
}

template <int d>
inline double trace(const Mat<d>& a) {
  double t = 0.0;
  for (int i = 0; i < d; ++i) t += a(i, i);
  return t;
}

template <int d>
inline Mat<d> operator*(const Mat<d>& a, const Mat<d>& b) {
  Mat<d> r;
  for (int i = 0; i < d; ++i)
    for (int j = 0; j < d; ++j) {
      double s = 0.0;
      for (int m = 0; m < d; ++m) s += a(i, m) * b(m, j);
      r(i, j) = s;
    }
  return r;
}

template <int d>
inline Vec<d> operator*(const Mat<d>& a, const Vec<d>& x) {
  Vec<d> r;
  for (int i = 0; i < d; ++i) {
    double s = 0.0;
    for (int j = 0; j < d; ++j) s += a(i, j) * x[j];
    r[i] = s;
  }
  return r;
}

template <int d>
inline double dot(const Vec<d>& a, const Vec<d>& b) {
  double s = 0.0;
  for (int i = 0; i < d; ++i) s += a[i] * b[i];
  return s;
}

// --- contractions ------------------------------------------------------------

template <int d>
inline double contract22(const Mat<d>& a, const Mat<d>& b) {
  double s = 0.0;
  for (int i = 0; i < d; ++i)
    for (int j = 0; j < d; ++j) s += a(i, j) * b(i, j);
  return s;
}

template <int d>
inline double contract33(const Ten3<d>& a, const Ten3<d>& b) {
  double s = 0.0;
  for (int i = 0; i < d; ++i)
    for (int j = 0; j < d; ++j)
      for (int k = 0; k < d; ++k) s += a(i, j, k) * b(i, j, k);
  return s;
}

template <int d>
inline double contract44(const Ten4<d>& a, const Ten4<d>& b) {
  double s = 0.0;
  for (int i = 0; i < d; ++i)
    for (int j = 0; j < d; ++j)
      for (int k = 0; k < d; ++k)
        for (int l = 0; l < d; ++l) s += a(i, j, k, l) * b(i, j, k, l);
  return s;
}

// (C:A)_ij = C_ijkl A_kl
template <int d>
inline Mat<d> contract42(const Ten4<d>& c, const Mat<d>& a) {
  Mat<d> r;
  for (int i = 0; i < d; ++i)
    for (int j = 0; j < d; ++j) {
      double s = 0.0;
      for (int k = 0; k < d; ++k)
        for (int l = 0; l < d; ++l) s += c(i, j, k, l) * a(k, l);
      r(i, j) = s;
    }
  return r;
}

// (A:C)_kl = A_ij C_ijkl; contraction against the leading index pair.
template <int d>
inline Mat<d> contract24(const Mat<d>& a, const Ten4<d>& c) {
  Mat<d> r;
  for (int k = 0; k < d; ++k)
    for (int l = 0; l < d; ++l) {
      double s = 0.0;
      for (int i = 0; i < d; ++i)
        for (int j = 0; j < d; ++j) s += a(i, j) * c(i, j, k, l);
      r(k, l) = s;
    }
  return r;
}

// (B:A)_i = B_ijk A_jk
template <int d>
inline Vec<d> contract32(const Ten3<d>& b, const Mat<d>& a) {
  Vec<d> r;
  for (int i = 0; i < d; ++i) {
    double s = 0.0;
    for (int j = 0; j < d; ++j)
      for (int k = 0; k < d; ++k) s += b(i, j, k) * a(j, k);
    r[i] = s;
  }
  return r;
}

// (C:B)_ijk = C_ijmn B_mnk
template <int d>
inline Ten3<d> contract43(const Ten4<d>& c, const Ten3<d>& b) {
  Ten3<d> r;
  for (int i = 0; i < d; ++i)
    for (int j = 0; j < d; ++j)
      for (int k = 0; k < d; ++k) {
        double s = 0.0;
        for (int m = 0; m < d; ++m)
          for (int n = 0; n < d; ++n) s += c(i, j, m, n) * b(m, n, k);
        r(i, j, k) = s;
      }
  return r;
}

// --- index permutations and one-sided products -------------------------------

// C^t swaps the leading index pair: (C^t)_ijkl = C_jikl.
template <int d>
inline Ten4<d> apply4t(const Ten4<d>& c) {
  Ten4<d> r;
  for (int i = 0; i < d; ++i)
    for (int j = 0; j < d; ++j)
      for (int k = 0; k < d; ++k)
        for (int l = 0; l < d; ++l) r(i, j, k, l) = c(j, i, k, l);
  return r;
}

// (B^t)_ijk = B_jik
template <int d>
inline Ten3<d> t3_transpose12(const Ten3<d>& b) {
  Ten3<d> r;
  for (int i = 0; i < d; ++i)
    for (int j = 0; j < d; ++j)
      for (int k = 0; k < d; ++k) r(i, j, k) = b(j, i, k);
  return r;
}

// (MB)_ijk = M_im B_mjk
template <int d>
inline Ten3<d> mat_ten3(const Mat<d>& m, const Ten3<d>& b) {
  Ten3<d> r;
  for (int i = 0; i < d; ++i)
    for (int j = 0; j < d; ++j)
      for (int k = 0; k < d; ++k) {
        double s = 0.0;
        for (int p = 0; p < d; ++p) s += m(i, p) * b(p, j, k);
        r(i, j, k) = s;
      }
  return r;
}

// (BM)_ijk = B_ijm M_mk
template <int d>
inline Ten3<d> ten3_mat(const Ten3<d>& b, const Mat<d>& m) {
  Ten3<d> r;
  for (int i = 0; i < d; ++i)
    for (int j = 0; j < d; ++j)
      for (int k = 0; k < d; ++k) {
        double s = 0.0;
        for (int p = 0; p < d; ++p) s += b(i, j, p) * m(p, k);
        r(i, j, k) = s;
      }
  return r;
}

// Contraction on the middle index: result_imk = B_ijk M_jm.
template <int d>
inline Ten3<d> ten3_mid_mat(const Ten3<d>& b, const Mat<d>& m) {
  Ten3<d> r;
  for (int i = 0; i < d; ++i)
    for (int m2 = 0; m2 < d; ++m2)
      for (int k = 0; k < d; ++k) {
        double s = 0.0;
        for (int j = 0; j < d; ++j) s += b(i, j, k) * m(j, m2);
        r(i, m2, k) = s;
      }
  return r;
}

// --- norms -------------------------------------------------------------------

template <int d>
inline double norm2(const Vec<d>& a) { return dot(a, a); }
template <int d>
inline double norm2(const Mat<d>& a) { return contract22(a, a); }
template <int d>
inline double norm2(const Ten3<d>& a) { return contract33(a, a); }
template <int d>
inline double norm2(const Ten4<d>& a) { return contract44(a, a); }

template <int d>
inline double frobenius(const Mat<d>& a) { return std::sqrt(norm2(a)); }
template <int d>
inline double frobenius(const Ten3<d>& a) { return std::sqrt(norm2(a)); }
template <int d>
inline double frobenius(const Ten4<d>& a) { return std::sqrt(norm2(a)); }

// --- determinant, cofactor, inverse ------------------------------------------

template <int d>
inline double det(const Mat<d>& a) {
  if constexpr (d == 2) {
    return a(0, 0) * a(1, 1) - a(0, 1) * a(1, 0);
  } else {
    return a(0, 0) * (a(1, 1) * a(2, 2) - a(1, 2) * a(2, 1)) -
           a(0, 1) * (a(1, 0) * a(2, 2) - a(1, 2) * a(2, 0)) +
           a(0, 2) * (a(1, 0) * a(2, 1) - a(1, 1) * a(2, 0));
  }
}

// Cofactor matrix with Cof(A)_ij = d det(A) / d A_ij, i.e. Cof(A) = det(A) A^{-T}
// for invertible A; cofactor(A)^T / det(A) = inverse(A).
template <int d>
inline Mat<d> cofactor(const Mat<d>& a) {
  Mat<d> r;
  if constexpr (d == 2) {
    r(0, 0) = a(1, 1);
    r(0, 1) = -a(1, 0);
    r(1, 0) = -a(0, 1);
    r(1, 1) = a(0, 0);
  } else {
    r(0, 0) = a(1, 1) * a(2, 2) - a(1, 2) * a(2, 1);
    r(0, 1) = a(1, 2) * a(2, 0) - a(1, 0) * a(2, 2);
    r(0, 2) = a(1, 0) * a(2, 1) - a(1, 1) * a(2, 0);
    r(1, 0) = a(0, 2) * a(2, 1) - a(0, 1) * a(2, 2);
    r(1, 1) = a(0, 0) * a(2, 2) - a(0, 2) * a(2, 0);
    r(1, 2) = a(0, 1) * a(2, 0) - a(0, 0) * a(2, 1);
    r(2, 0) = a(0, 1) * a(1, 2) - a(0, 2) * a(1, 1);
    r(2, 1) = a(0, 2) * a(1, 0) - a(0, 0) * a(1, 2);
    r(2, 2) = a(0, 0) * a(1, 1) - a(0, 1) * a(1, 0);
  }
  return r;
}

inline constexpr double singular_rel_tol = 1e-14;

// Throws SingularMatrix when |det A| < 1e-14 * max(1, |A|_F).
template <int d>
inline Mat<d> inverse(const Mat<d>& a) {
  const double ja = det(a);
  if (std::abs(ja) < singular_rel_tol * std::max(1.0, frobenius(a))) throw SingularMatrix(ja);
  return (1.0 / ja) * transpose(cofactor(a));
}

// --- derivatives of the inversion map ----------------------------------------

// Directional derivative of A -> A^{-1}: D(A^{-1})[H] = -A^{-1} H A^{-1}.
template <int d>
inline Mat<d> dinv_dir(const Mat<d>& a, const Mat<d>& h) {
  const Mat<d> ai = inverse(a);
  return -1.0 * (ai * h * ai);
}

// Directional derivative of A -> A^{-T}: D(A^{-T})[H] = -A^{-T} H^T A^{-T}.
template <int d>
inline Mat<d> dinvT_dir(const Mat<d>& a, const Mat<d>& h) {
  const Mat<d> ait = transpose(inverse(a));
  return -1.0 * (ait * transpose(h) * ait);
}

// Full derivative of inversion as a 4-tensor: D_ijkl = d(A^{-1})_ij / dA_kl
// = -(A^{-1})_ik (A^{-1})_lj; contract42(dinv_tensor(A), H) == dinv_dir(A, H).
template <int d>
inline Ten4<d> dinv_tensor(const Mat<d>& a) {
  const Mat<d> ai = inverse(a);
  Ten4<d> r;
  for (int i = 0; i < d; ++i)
    for (int j = 0; j < d; ++j)
      for (int k = 0; k < d; ++k)
        for (int l = 0; l < d; ++l) r(i, j, k, l) = -ai(i, k) * ai(l, j);
  return r;
}

}  // namespace rheo
