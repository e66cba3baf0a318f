// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <cmath>
#include <random>

#include "rheo/tensor.hpp"

// Shared helpers for the test suite. Random draws go through mt19937_64 with
// explicit seeds and a fixed bits-to-double mapping so every platform produces
// the same sequences.

namespace rheotest {

class Rng {
 public:
  explicit Rng(unsigned long long seed) : eng_(seed) {}

  // Uniform in [lo, hi) from the top 53 bits of the generator.
  double uniform(double lo = -1.0, double hi = 1.0) {
    const double u = static_cast<double>(eng_() >> 11) * 0x1.0p-53;
    return lo + (hi - lo) * u;
  }

 private:
  std::mt19937_64 eng_;
};

template <int d>
rheo::Vec<d> random_vec(Rng& rng, double scale = 1.0) {
  rheo::Vec<d> r;
  for (int i = 0; i < d; ++i) r[i] = scale * rng.uniform();
  return r;
}

template <int d>
rheo::Mat<d> random_mat(Rng& rng, double scale = 1.0) {
  rheo::Mat<d> r;
  for (int i = 0; i < d; ++i)
    for (int j = 0; j < d; ++j) r(i, j) = scale * rng.uniform();
  return r;
}

template <int d>
rheo::Ten3<d> random_ten3(Rng& rng, double scale = 1.0) {
  rheo::Ten3<d> r;
  for (int i = 0; i < d; ++i)
    for (int j = 0; j < d; ++j)
      for (int k = 0; k < d; ++k) r(i, j, k) = scale * rng.uniform();
  return r;
}

template <int d>
rheo::Ten4<d> random_ten4(Rng& rng, double scale = 1.0) {
  rheo::Ten4<d> r;
  for (int i = 0; i < d; ++i)
    for (int j = 0; j < d; ++j)
      for (int k = 0; k < d; ++k)
        for (int l = 0; l < d; ++l) r(i, j, k, l) = scale * rng.uniform();
  return r;
}

// Perturbation of the identity with det bounded away from zero; used wherever a
// state must be admissible (invertible deformation or plastic strain).
template <int d>
rheo::Mat<d> random_invertible(Rng& rng, double spread = 0.4, double min_det = 0.3) {
  for (;;) {
    rheo::Mat<d> m = rheo::identity<d>() + random_mat<d>(rng, spread);
    if (rheo::det(m) >= min_det) return m;
  }
}

template <int d>
double max_abs_diff(const rheo::Mat<d>& a, const rheo::Mat<d>& b) {
  double m = 0.0;
  for (int i = 0; i < d; ++i)
    for (int j = 0; j < d; ++j) m = std::max(m, std::abs(a(i, j) - b(i, j)));
  return m;
}

template <int d>
double max_abs_diff(const rheo::Ten3<d>& a, const rheo::Ten3<d>& b) {
  double m = 0.0;
  for (int i = 0; i < d; ++i)
    for (int j = 0; j < d; ++j)
      for (int k = 0; k < d; ++k) m = std::max(m, std::abs(a(i, j, k) - b(i, j, k)));
  return m;
}

}  // namespace rheotest
