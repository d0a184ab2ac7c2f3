// Copyright 2026 The sigrank authors
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//     http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

#ifndef SIGRANK_SPD_HPP
#define SIGRANK_SPD_HPP

#include <cmath>
#include <cstddef>
#include <string>
#include <vector>

#include "sigrank/errors.hpp"
#include "sigrank/matrix.hpp"
#include "sigrank/symmetric_eigen.hpp"

namespace sigrank {

// Eigenvalue clamping bookkeeping, surfaced through metric diagnostics.
struct SpdDiagnostics {
  int clamped = 0;
  double lambda_min = 0.0;
  double lambda_max = 0.0;
};

// Relative clamping floor: 1e-8 of the average eigenvalue (trace/dim).
// Absolute floors misbehave across feature scales.
inline double default_clamp_eps(const SymMatrix& m) {
  const double avg = m.trace() / double(m.dim());
  return avg > 0.0 ? 1e-8 * avg : 0.0;
}

// Lower-triangular Cholesky factor with the solve routines the divergences need.
class CholeskyFactor {
 public:
  explicit CholeskyFactor(Matrix lower) : l_(std::move(lower)) {}

  const Matrix& lower() const { return l_; }
  std::size_t dim() const { return l_.rows(); }

  double log_det() const {
    double s = 0.0;
    for (std::size_t i = 0; i < dim(); ++i) s += std::log(l_(i, i));
    return 2.0 * s;
  }

  // Solve L y = b in place.
  void forward_solve(std::vector<double>& b) const {
    const std::size_t n = dim();
    for (std::size_t i = 0; i < n; ++i) {
      double s = b[i];
      const double* row = l_.row_ptr(i);
      for (std::size_t k = 0; k < i; ++k) s -= row[k] * b[k];
      b[i] = s / row[i];
    }
  }

  // Solve L^T x = b in place.
  void backward_solve(std::vector<double>& b) const {
    const std::size_t n = dim();
    for (std::size_t i = n; i-- > 0;) {
      double s = b[i];
      for (std::size_t k = i + 1; k < n; ++k) s -= l_(k, i) * b[k];
      b[i] = s / l_(i, i);
    }
  }

  // Solve (L L^T) x = b.
  std::vector<double> solve(std::vector<double> b) const {
    forward_solve(b);
    backward_solve(b);
    return b;
  }

  // X = (L L^T)^{-1} B, column by column.
  Matrix solve_matrix(const Matrix& b) const {
    const std::size_t n = dim();
    Matrix x(n, b.cols());
    std::vector<double> col(n);
    for (std::size_t j = 0; j < b.cols(); ++j) {
      for (std::size_t i = 0; i < n; ++i) col[i] = b(i, j);
      forward_solve(col);
      backward_solve(col);
      for (std::size_t i = 0; i < n; ++i) x(i, j) = col[i];
    }
    return x;
  }

  // W = L^{-1} B.
  Matrix whiten(const Matrix& b) const {
    const std::size_t n = dim();
    Matrix w(n, b.cols());
    std::vector<double> col(n);
    for (std::size_t j = 0; j < b.cols(); ++j) {
      for (std::size_t i = 0; i < n; ++i) col[i] = b(i, j);
      forward_solve(col);
      for (std::size_t i = 0; i < n; ++i) w(i, j) = col[i];
    }
    return w;
  }

  // Rough condition estimate from the pivot spread; good enough for diagnostics.
  double condition_proxy() const {
    double lo = l_(0, 0), hi = l_(0, 0);
    for (std::size_t i = 1; i < dim(); ++i) {
      lo = std::min(lo, l_(i, i));
      hi = std::max(hi, l_(i, i));
    }
    const double r = hi / lo;
    return r * r;
  }

 private:
  Matrix l_;
};

inline CholeskyFactor cholesky(const SymMatrix& m) {
  const std::size_t n = m.dim();
  Matrix l(n, n);
  for (std::size_t j = 0; j < n; ++j) {
    double diag = m(j, j);
    for (std::size_t k = 0; k < j; ++k) diag -= l(j, k) * l(j, k);
    if (!(diag > 0.0))
      throw NotPositiveDefiniteError(
          "cholesky: non-positive pivot at index " + std::to_string(j), j);
    const double ljj = std::sqrt(diag);
    l(j, j) = ljj;
    for (std::size_t i = j + 1; i < n; ++i) {
      double s = m(i, j);
      for (std::size_t k = 0; k < j; ++k) s -= l(i, k) * l(j, k);
      l(i, j) = s / ljj;
    }
  }
  return CholeskyFactor(std::move(l));
}

inline double log_det(const SymMatrix& m) { return cholesky(m).log_det(); }

namespace detail {

// Shared spectral-function core: Q f(clamp(lambda)) Q^T.
template <typename F>
SymMatrix spectral_map(const SymMatrix& m, double eps, F&& f, SpdDiagnostics* diag) {
  EigenPair ep = eigh(m);
  SpdDiagnostics d;
  d.lambda_min = ep.eigenvalues.back();
  d.lambda_max = ep.eigenvalues.front();
  std::vector<double> mapped(ep.eigenvalues.size());
  for (std::size_t i = 0; i < ep.eigenvalues.size(); ++i) {
    double lambda = ep.eigenvalues[i];
    if (lambda < eps) {
      lambda = eps;
      ++d.clamped;
    }
    mapped[i] = f(lambda);
  }
  if (diag) *diag = d;
  return congruence_diag(ep.eigenvectors, mapped);
}

}  // namespace detail

inline SymMatrix spd_sqrt(const SymMatrix& m, double eps, SpdDiagnostics* diag = nullptr) {
  return detail::spectral_map(m, eps, [](double x) { return std::sqrt(x); }, diag);
}

inline SymMatrix spd_inv_sqrt(const SymMatrix& m, double eps, SpdDiagnostics* diag = nullptr) {
  return detail::spectral_map(m, eps, [](double x) { return 1.0 / std::sqrt(x); }, diag);
}

// Clamp eigenvalues below eps up to eps. Returns the input untouched when it
// already satisfies lambda_min >= eps, which makes the repair idempotent.
inline SymMatrix spd_repair(const SymMatrix& m, double eps, SpdDiagnostics* diag = nullptr) {
  EigenPair ep = eigh(m);
  SpdDiagnostics d;
  d.lambda_min = ep.eigenvalues.back();
  d.lambda_max = ep.eigenvalues.front();
  if (d.lambda_min >= eps) {
    if (diag) *diag = d;
    return m;
  }
  std::vector<double> clamped(ep.eigenvalues.size());
  for (std::size_t i = 0; i < ep.eigenvalues.size(); ++i) {
    clamped[i] = ep.eigenvalues[i];
    if (clamped[i] < eps) {
      clamped[i] = eps;
      ++d.clamped;
    }
  }
  if (diag) *diag = d;
  return congruence_diag(ep.eigenvectors, clamped);
}

}  // namespace sigrank

#endif  // SIGRANK_SPD_HPP
