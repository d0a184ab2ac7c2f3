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

#ifndef SIGRANK_SMT_HPP
#define SIGRANK_SMT_HPP

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <cstdint>
#include <numeric>
#include <string>
#include <vector>

#include "sigrank/errors.hpp"
#include "sigrank/feature_matrix.hpp"
#include "sigrank/matrix.hpp"
#include "sigrank/rng.hpp"
#include "sigrank/signature.hpp"
#include "sigrank/spd.hpp"

namespace sigrank {

// One plane rotation acting on coordinate pair (i, j), i < j. The dense form
// has c at (i,i) and (j,j), -s at (i,j), s at (j,i); conjugating by it with
// theta = 0.5*atan2(2*s_ij, s_ii - s_jj) annihilates the (i, j) entry.
struct GivensRotation {
  std::size_t i = 0;
  std::size_t j = 0;
  double theta = 0.0;
};

inline Matrix rotation_matrix(const GivensRotation& r, std::size_t dim) {
  Matrix m = Matrix::identity(dim);
  const double c = std::cos(r.theta);
  const double s = std::sin(r.theta);
  m(r.i, r.i) = c;
  m(r.j, r.j) = c;
  m(r.i, r.j) = -s;
  m(r.j, r.i) = s;
  return m;
}

// In-place W <- E^T W E for the rotation above. Keeps W exactly symmetric and
// zeroes the pivot entry.
inline void apply_rotation_conjugate(Matrix& w, const GivensRotation& r) {
  const std::size_t n = w.rows();
  const std::size_t i = r.i, j = r.j;
  const double c = std::cos(r.theta);
  const double s = std::sin(r.theta);
  const double wii = w(i, i), wjj = w(j, j), wij = w(i, j);
  for (std::size_t t = 0; t < n; ++t) {
    if (t == i || t == j) continue;
    const double wit = w(i, t), wjt = w(j, t);
    const double ni = c * wit + s * wjt;
    const double nj = -s * wit + c * wjt;
    w(i, t) = ni;
    w(t, i) = ni;
    w(j, t) = nj;
    w(t, j) = nj;
  }
  w(i, i) = c * c * wii + 2.0 * c * s * wij + s * s * wjj;
  w(j, j) = s * s * wii - 2.0 * c * s * wij + c * c * wjj;
  w(i, j) = 0.0;
  w(j, i) = 0.0;
}

// Ordered Givens factorization E_hat = E_1 E_2 ... E_K with the diagonal it
// leaves behind.
struct SmtFactorization {
  std::size_t dim = 0;
  std::vector<GivensRotation> rotations;
  std::vector<double> lambda;

  std::size_t order() const { return rotations.size(); }

  // Dense E_hat; columns stay orthonormal to working precision.
  Matrix rotation_product() const {
    Matrix m = Matrix::identity(dim);
    for (const GivensRotation& r : rotations) {
      const double c = std::cos(r.theta);
      const double s = std::sin(r.theta);
      for (std::size_t t = 0; t < dim; ++t) {
        const double vi = m(t, r.i), vj = m(t, r.j);
        m(t, r.i) = c * vi + s * vj;
        m(t, r.j) = -s * vi + c * vj;
      }
    }
    return m;
  }

  // Sigma_SMT = E_hat diag(lambda) E_hat^T.
  SymMatrix covariance() const { return congruence_diag(rotation_product(), lambda); }
};

// FFT-like rotation budget used when no order is given.
inline std::size_t default_smt_order(std::size_t dim) {
  if (dim < 2) return 0;
  return std::size_t(std::llround(2.0 * double(dim) * std::log2(double(dim))));
}

namespace detail {

// Greedy pivot state: per-row running maximum of w_ij^2/(w_ii*w_jj) over
// j > i, refreshed lazily after each rotation. A full rescan after every step
// is the O(d^2) fallback the tests compare against.
struct PivotSearch {
  const Matrix& w;
  std::vector<double> best;
  std::vector<std::size_t> arg;

  explicit PivotSearch(const Matrix& m) : w(m), best(m.rows(), -1.0), arg(m.rows(), 0) {
    for (std::size_t i = 0; i < m.rows(); ++i) refresh_row(i);
  }

  double criterion(std::size_t i, std::size_t j) const {
    const double di = w(i, i), dj = w(j, j);
    if (!(di > 0.0) || !(dj > 0.0)) return -1.0;  // unscorable pair
    const double off = w(i, j);
    return off * off / (di * dj);
  }

  void refresh_row(std::size_t i) {
    best[i] = -1.0;
    arg[i] = 0;
    for (std::size_t j = i + 1; j < w.rows(); ++j) {
      const double c = criterion(i, j);
      if (c > best[i]) {
        best[i] = c;
        arg[i] = j;
      }
    }
  }

  // Called after a rotation at (p, q).
  void update_after_rotation(std::size_t p, std::size_t q) {
    for (std::size_t r = 0; r < w.rows(); ++r) {
      if (r == p || r == q) {
        refresh_row(r);
      } else if (arg[r] == p || arg[r] == q) {
        refresh_row(r);  // stored best may have decayed
      } else {
        if (r < p) {
          const double c = criterion(r, p);
          if (c > best[r]) {
            best[r] = c;
            arg[r] = p;
          }
        }
        if (r < q) {
          const double c = criterion(r, q);
          if (c > best[r]) {
            best[r] = c;
            arg[r] = q;
          }
        }
      }
    }
  }

  // Global best pair; false when nothing scorable remains.
  bool select(std::size_t& pi, std::size_t& pj, double& crit) const {
    crit = -1.0;
    for (std::size_t i = 0; i + 1 < w.rows(); ++i) {
      if (best[i] > crit) {
        crit = best[i];
        pi = i;
        pj = arg[i];
      }
    }
    return crit > 0.0;
  }

  // A nonzero off-diagonal whose pair cannot be scored because of a
  // non-positive diagonal means the input needs repair.
  bool has_unscorable_offdiag(std::size_t& oi, std::size_t& oj) const {
    for (std::size_t i = 0; i + 1 < w.rows(); ++i)
      for (std::size_t j = i + 1; j < w.rows(); ++j)
        if (w(i, j) != 0.0 && (!(w(i, i) > 0.0) || !(w(j, j) > 0.0))) {
          oi = i;
          oj = j;
          return true;
        }
    return false;
  }
};

constexpr double kPivotStop = 1e-30;  // dimensionless criterion floor

}  // namespace detail

// Greedy SMT fit: k_order steps of pick-best-pair / rotate / record. Each step
// multiplies the diagonal-product objective by (1 - w_ij^2/(w_ii*w_jj)), so
// the objective is non-increasing. Stops early once all off-diagonal mass is
// numerically gone.
inline SmtFactorization smt_fit(const SymMatrix& s, std::size_t k_order) {
  const std::size_t n = s.dim();
  SmtFactorization fact;
  fact.dim = n;
  Matrix w = s.to_matrix();
  if (n >= 2 && k_order > 0) {
    detail::PivotSearch search(w);
    fact.rotations.reserve(std::min<std::size_t>(k_order, 4 * n * n));
    for (std::size_t step = 0; step < k_order; ++step) {
      std::size_t i = 0, j = 0;
      double crit = -1.0;
      if (!search.select(i, j, crit) || crit <= detail::kPivotStop) {
        std::size_t oi = 0, oj = 0;
        if (search.has_unscorable_offdiag(oi, oj))
          throw DegenerateDiagonalError(
              "smt_fit: zero diagonal entry blocks pair (" + std::to_string(oi) + ", " +
              std::to_string(oj) + "); run spd_repair on the input first");
        break;
      }
      GivensRotation rot;
      rot.i = i;
      rot.j = j;
      rot.theta = 0.5 * std::atan2(2.0 * w(i, j), w(i, i) - w(j, j));
      apply_rotation_conjugate(w, rot);
      search.update_after_rotation(i, j);
      fact.rotations.push_back(rot);
    }
  }
  fact.lambda.resize(n);
  for (std::size_t i = 0; i < n; ++i) fact.lambda[i] = std::max(w(i, i), 0.0);
  return fact;
}

// Sigma_SMT for a feature matrix: fit on its sample covariance, reconstruct.
inline SymMatrix smt_covariance(const FeatureMatrix& f, std::size_t k_order, bool center = true) {
  const SymMatrix s = sample_covariance(f, center).cov;
  return smt_fit(s, k_order).covariance();
}

// alpha * Sigma_SMT + (1 - alpha) * S with the pieces kept around.
struct ShrunkCovariance {
  SymMatrix sigma;
  double alpha = 0.0;
  SmtFactorization factorization;
};

inline ShrunkCovariance shrink(const SymMatrix& sample, const SymMatrix& smt_sigma, double alpha) {
  if (!(alpha >= 0.0 && alpha <= 1.0))
    throw InvalidShrinkageError("shrink: alpha " + std::to_string(alpha) + " outside [0, 1]");
  if (sample.dim() != smt_sigma.dim()) throw DimMismatchError("shrink: dimension mismatch");
  SymMatrix sigma = alpha * smt_sigma + (1.0 - alpha) * sample;
  return ShrunkCovariance{std::move(sigma), alpha, SmtFactorization{}};
}

inline ShrunkCovariance shrink(const SymMatrix& sample, const SmtFactorization& fact,
                               double alpha) {
  ShrunkCovariance out = shrink(sample, fact.covariance(), alpha);
  out.factorization = fact;
  return out;
}

// Cross-validated shrinkage weight: average held-out Gaussian log-likelihood
// per grid point, argmax wins, ties go to the larger alpha.
inline double select_alpha(const FeatureMatrix& f, std::size_t k_order,
                           const std::vector<double>& grid, std::size_t folds,
                           std::uint64_t seed) {
  if (grid.empty()) throw Error("select_alpha: empty grid");
  for (double a : grid)
    if (!(a >= 0.0 && a <= 1.0))
      throw InvalidShrinkageError("select_alpha: grid value " + std::to_string(a) +
                                  " outside [0, 1]");
  if (folds < 2) throw Error("select_alpha: folds must be >= 2");
  if (grid.size() == 1) return grid[0];

  const std::size_t n = f.n_rows();
  const std::size_t d = f.n_cols();
  if (n < folds)
    throw InsufficientDataError("select_alpha: " + std::to_string(n) + " rows for " +
                                std::to_string(folds) + " folds");

  std::vector<std::size_t> idx(n);
  std::iota(idx.begin(), idx.end(), 0);
  Rng rng(seed);
  rng.shuffle(idx);

  std::vector<double> score(grid.size(), 0.0);
  for (std::size_t fold = 0; fold < folds; ++fold) {
    const std::size_t lo = fold * n / folds;
    const std::size_t hi = (fold + 1) * n / folds;
    const std::size_t train_n = n - (hi - lo);
    if (train_n < 2)
      throw InsufficientDataError("select_alpha: training fold has fewer than 2 rows");

    FeatureMatrix train(train_n, d);
    std::size_t t = 0;
    for (std::size_t i = 0; i < n; ++i) {
      if (i >= lo && i < hi) continue;
      const double* src = f.row(idx[i]);
      std::copy(src, src + d, train.row(t));
      ++t;
    }

    const GaussianSignature base = sample_covariance(train, true);
    const SymMatrix smt_sigma = smt_fit(base.cov, k_order).covariance();

    for (std::size_t g = 0; g < grid.size(); ++g) {
      const SymMatrix sigma = shrink(base.cov, smt_sigma, grid[g]).sigma;
      const SymMatrix repaired = spd_repair(sigma, default_clamp_eps(sigma));
      const CholeskyFactor chol = cholesky(repaired);
      const double log_norm =
          -0.5 * (double(d) * std::log(6.283185307179586) + chol.log_det());
      double fold_score = 0.0;
      std::vector<double> delta(d);
      for (std::size_t i = lo; i < hi; ++i) {
        const double* row = f.row(idx[i]);
        for (std::size_t j = 0; j < d; ++j) delta[j] = row[j] - base.mean[j];
        chol.forward_solve(delta);
        fold_score += log_norm - 0.5 * dot(delta, delta);
      }
      score[g] += fold_score / double(hi - lo) / double(folds);
    }
  }

  std::size_t best = 0;
  for (std::size_t g = 1; g < grid.size(); ++g) {
    if (score[g] > score[best] || (score[g] == score[best] && grid[g] > grid[best])) best = g;
  }
  return grid[best];
}

}  // namespace sigrank

#endif  // SIGRANK_SMT_HPP
