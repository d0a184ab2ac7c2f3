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

#ifndef SIGRANK_SYMMETRIC_EIGEN_HPP
#define SIGRANK_SYMMETRIC_EIGEN_HPP

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <limits>
#include <numeric>
#include <vector>

#include "sigrank/errors.hpp"
#include "sigrank/matrix.hpp"

namespace sigrank {

// Eigenvalues sorted descending; eigenvectors are the columns of an
// orthonormal matrix, sign-fixed so the largest-magnitude component of each
// column is positive.
struct EigenPair {
  std::vector<double> eigenvalues;
  Matrix eigenvectors;
};

namespace detail {

// Cyclic Jacobi with threshold schedule. High relative accuracy on small
// matrices, which is where almost all metric evaluations live.
inline void jacobi_eigen(Matrix& a, std::vector<double>& d, Matrix* v) {
  const std::size_t n = a.rows();
  if (v) *v = Matrix::identity(n);
  std::vector<double> b(n), z(n, 0.0);
  for (std::size_t p = 0; p < n; ++p) b[p] = d[p] = a(p, p);

  constexpr int kMaxSweeps = 60;
  double sm = 0.0;
  for (int sweep = 1; sweep <= kMaxSweeps; ++sweep) {
    sm = 0.0;
    for (std::size_t p = 0; p + 1 < n; ++p)
      for (std::size_t q = p + 1; q < n; ++q) sm += std::fabs(a(p, q));
    if (sm == 0.0) return;
    const double tresh = (sweep < 4) ? 0.2 * sm / double(n * n) : 0.0;
    for (std::size_t p = 0; p + 1 < n; ++p) {
      for (std::size_t q = p + 1; q < n; ++q) {
        const double g = 100.0 * std::fabs(a(p, q));
        if (sweep > 4 && std::fabs(d[p]) + g == std::fabs(d[p]) &&
            std::fabs(d[q]) + g == std::fabs(d[q])) {
          a(p, q) = 0.0;
        } else if (std::fabs(a(p, q)) > tresh) {
          double h = d[q] - d[p];
          double t;
          if (std::fabs(h) + g == std::fabs(h)) {
            t = a(p, q) / h;
          } else {
            const double theta = 0.5 * h / a(p, q);
            t = 1.0 / (std::fabs(theta) + std::sqrt(1.0 + theta * theta));
            if (theta < 0.0) t = -t;
          }
          const double c = 1.0 / std::sqrt(1.0 + t * t);
          const double s = t * c;
          const double tau = s / (1.0 + c);
          h = t * a(p, q);
          z[p] -= h;
          z[q] += h;
          d[p] -= h;
          d[q] += h;
          a(p, q) = 0.0;
          auto rotate = [&](double& x, double& y) {
            const double gx = x;
            const double hy = y;
            x = gx - s * (hy + gx * tau);
            y = hy + s * (gx - hy * tau);
          };
          for (std::size_t j = 0; j < p; ++j) rotate(a(j, p), a(j, q));
          for (std::size_t j = p + 1; j < q; ++j) rotate(a(p, j), a(j, q));
          for (std::size_t j = q + 1; j < n; ++j) rotate(a(p, j), a(q, j));
          if (v)
            for (std::size_t j = 0; j < n; ++j) rotate((*v)(j, p), (*v)(j, q));
        }
      }
    }
    for (std::size_t p = 0; p < n; ++p) {
      b[p] += z[p];
      d[p] = b[p];
      z[p] = 0.0;
    }
  }
  throw NoConvergenceError("jacobi eigensolver: no convergence after 60 sweeps", sm);
}

// Householder reduction to tridiagonal form (EISPACK tred2). On exit d holds
// the diagonal, e the subdiagonal, and z the accumulated transform when
// with_vectors is set.
inline void householder_tridiag(Matrix& z, std::vector<double>& d, std::vector<double>& e,
                                bool with_vectors) {
  const std::size_t n = z.rows();
  for (std::size_t i = n - 1; i > 0; --i) {
    const std::size_t l = i - 1;
    double h = 0.0, scale = 0.0;
    if (l > 0) {
      for (std::size_t k = 0; k < i; ++k) scale += std::fabs(z(i, k));
      if (scale == 0.0) {
        e[i] = z(i, l);
      } else {
        for (std::size_t k = 0; k < i; ++k) {
          z(i, k) /= scale;
          h += z(i, k) * z(i, k);
        }
        double f = z(i, l);
        double g = (f >= 0.0) ? -std::sqrt(h) : std::sqrt(h);
        e[i] = scale * g;
        h -= f * g;
        z(i, l) = f - g;
        f = 0.0;
        for (std::size_t j = 0; j < i; ++j) {
          if (with_vectors) z(j, i) = z(i, j) / h;
          g = 0.0;
          for (std::size_t k = 0; k <= j; ++k) g += z(j, k) * z(i, k);
          for (std::size_t k = j + 1; k < i; ++k) g += z(k, j) * z(i, k);
          e[j] = g / h;
          f += e[j] * z(i, j);
        }
        const double hh = f / (h + h);
        for (std::size_t j = 0; j < i; ++j) {
          f = z(i, j);
          e[j] = g = e[j] - hh * f;
          for (std::size_t k = 0; k <= j; ++k) z(j, k) -= f * e[k] + g * z(i, k);
        }
      }
    } else {
      e[i] = z(i, l);
    }
    d[i] = h;
  }
  if (with_vectors) d[0] = 0.0;
  e[0] = 0.0;
  for (std::size_t i = 0; i < n; ++i) {
    if (with_vectors) {
      if (d[i] != 0.0) {
        for (std::size_t j = 0; j < i; ++j) {
          double g = 0.0;
          for (std::size_t k = 0; k < i; ++k) g += z(i, k) * z(k, j);
          for (std::size_t k = 0; k < i; ++k) z(k, j) -= g * z(k, i);
        }
      }
      d[i] = z(i, i);
      z(i, i) = 1.0;
      for (std::size_t j = 0; j < i; ++j) z(j, i) = z(i, j) = 0.0;
    } else {
      d[i] = z(i, i);
    }
  }
}

// QL iteration with implicit shifts on a tridiagonal matrix (EISPACK tql2).
inline void tridiag_ql(std::vector<double>& d, std::vector<double>& e, Matrix* z) {
  const std::size_t n = d.size();
  const double eps = std::numeric_limits<double>::epsilon();
  for (std::size_t i = 1; i < n; ++i) e[i - 1] = e[i];
  e[n - 1] = 0.0;
  for (std::size_t l = 0; l < n; ++l) {
    int iter = 0;
    std::size_t m;
    do {
      for (m = l; m + 1 < n; ++m) {
        const double dd = std::fabs(d[m]) + std::fabs(d[m + 1]);
        if (std::fabs(e[m]) <= eps * dd) break;
      }
      if (m != l) {
        if (iter++ == 50)
          throw NoConvergenceError("ql eigensolver: no convergence after 50 iterations",
                                   std::fabs(e[l]));
        double g = (d[l + 1] - d[l]) / (2.0 * e[l]);
        double r = std::hypot(g, 1.0);
        g = d[m] - d[l] + e[l] / (g + std::copysign(r, g));
        double s = 1.0, c = 1.0, p = 0.0;
        std::size_t i = m;
        bool underflow = false;
        while (i > l) {
          --i;
          double f = s * e[i];
          const double b = c * e[i];
          r = std::hypot(f, g);
          e[i + 1] = r;
          if (r == 0.0) {
            d[i + 1] -= p;
            e[m] = 0.0;
            underflow = true;
            break;
          }
          s = f / r;
          c = g / r;
          g = d[i + 1] - p;
          r = (d[i] - g) * s + 2.0 * c * b;
          p = s * r;
          d[i + 1] = g + p;
          g = c * r - b;
          if (z) {
            for (std::size_t k = 0; k < n; ++k) {
              f = (*z)(k, i + 1);
              (*z)(k, i + 1) = s * (*z)(k, i) + c * f;
              (*z)(k, i) = c * (*z)(k, i) - s * f;
            }
          }
        }
        if (underflow && i > l) continue;
        d[l] -= p;
        e[l] = g;
        e[m] = 0.0;
      }
    } while (m != l);
  }
}

// Sort descending and fix column signs so results are deterministic.
inline void order_spectrum(std::vector<double>& d, Matrix* v) {
  const std::size_t n = d.size();
  std::vector<std::size_t> order(n);
  std::iota(order.begin(), order.end(), 0);
  std::stable_sort(order.begin(), order.end(),
                   [&](std::size_t a, std::size_t b) { return d[a] > d[b]; });
  std::vector<double> ds(n);
  for (std::size_t k = 0; k < n; ++k) ds[k] = d[order[k]];
  d = std::move(ds);
  if (!v) return;
  Matrix sorted(n, n);
  for (std::size_t k = 0; k < n; ++k) {
    const std::size_t src = order[k];
    std::size_t arg = 0;
    double best = 0.0;
    for (std::size_t r = 0; r < n; ++r) {
      const double mag = std::fabs((*v)(r, src));
      if (mag > best) {
        best = mag;
        arg = r;
      }
    }
    const double sign = ((*v)(arg, src) < 0.0) ? -1.0 : 1.0;
    for (std::size_t r = 0; r < n; ++r) sorted(r, k) = sign * (*v)(r, src);
  }
  *v = std::move(sorted);
}

constexpr std::size_t kJacobiMaxDim = 32;

}  // namespace detail

// Full eigendecomposition of a symmetric matrix. Cyclic Jacobi up to dim 32,
// Householder tridiagonalization + QL beyond that.
inline EigenPair eigh(const SymMatrix& m) {
  const std::size_t n = m.dim();
  EigenPair out;
  out.eigenvalues.assign(n, 0.0);
  Matrix a = m.to_matrix();
  if (n <= detail::kJacobiMaxDim) {
    out.eigenvectors = Matrix(n, n);
    detail::jacobi_eigen(a, out.eigenvalues, &out.eigenvectors);
  } else {
    std::vector<double> e(n, 0.0);
    detail::householder_tridiag(a, out.eigenvalues, e, true);
    detail::tridiag_ql(out.eigenvalues, e, &a);
    out.eigenvectors = std::move(a);
  }
  detail::order_spectrum(out.eigenvalues, &out.eigenvectors);
  return out;
}

// Eigenvalues only (descending). Skips all eigenvector bookkeeping, which is
// what keeps the Riemannian and Wasserstein inner loops affordable.
inline std::vector<double> sym_eigenvalues(const SymMatrix& m) {
  const std::size_t n = m.dim();
  std::vector<double> d(n, 0.0);
  Matrix a = m.to_matrix();
  if (n <= detail::kJacobiMaxDim) {
    detail::jacobi_eigen(a, d, nullptr);
  } else {
    std::vector<double> e(n, 0.0);
    detail::householder_tridiag(a, d, e, false);
    detail::tridiag_ql(d, e, nullptr);
  }
  detail::order_spectrum(d, nullptr);
  return d;
}

}  // namespace sigrank

#endif  // SIGRANK_SYMMETRIC_EIGEN_HPP
