// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <cmath>
#include <stdexcept>
#include <vector>

namespace rheo {

// Dense LU factorization with partial pivoting, row-major storage. Small
// systems only (mass matrices, implicit-step Jacobians); deterministic by
// construction since the elimination order is fixed.
class DenseLU {
 public:
  DenseLU(std::vector<double> a, int n) : a_(std::move(a)), piv_(n), n_(n) {
    if (static_cast<long>(a_.size()) != static_cast<long>(n) * n)
      throw std::invalid_argument("DenseLU: matrix size mismatch");
    for (int k = 0; k < n_; ++k) {
      int p = k;
      double best = std::abs(a_[k * n_ + k]);
      for (int i = k + 1; i < n_; ++i) {
        const double v = std::abs(a_[i * n_ + k]);
        if (v > best) {
          best = v;
          p = i;
        }
      }
      piv_[k] = p;
      if (best == 0.0) throw std::runtime_error("DenseLU: singular matrix");
      if (p != k)
        for (int j = 0; j < n_; ++j) std::swap(a_[k * n_ + j], a_[p * n_ + j]);
      const double inv = 1.0 / a_[k * n_ + k];
      for (int i = k + 1; i < n_; ++i) {
        const double m = a_[i * n_ + k] * inv;
        a_[i * n_ + k] = m;
        if (m != 0.0)
          for (int j = k + 1; j < n_; ++j) a_[i * n_ + j] -= m * a_[k * n_ + j];
      }
    }
  }

  // solves A x = b in place. Forward substitution is left-looking: entry k
  // is finalized right after its own pivot swap, so the progressively
  // applied permutation matches the row ordering of the stored factors.
  void solve(std::vector<double>& b) const {
    if (static_cast<int>(b.size()) != n_) throw std::invalid_argument("DenseLU: rhs size mismatch");
    for (int k = 0; k < n_; ++k) {
      if (piv_[k] != k) std::swap(b[k], b[piv_[k]]);
      double sum = b[k];
      for (int j = 0; j < k; ++j) sum -= a_[k * n_ + j] * b[j];
      b[k] = sum;
    }
    for (int k = n_ - 1; k >= 0; --k) {
      for (int j = k + 1; j < n_; ++j) b[k] -= a_[k * n_ + j] * b[j];
      b[k] /= a_[k * n_ + k];
    }
  }

  int size() const { return n_; }

 private:
  std::vector<double> a_;
  std::vector<int> piv_;
  int n_;
};

}  // namespace rheo
