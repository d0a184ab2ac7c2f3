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

#ifndef SIGRANK_GMM_HPP
#define SIGRANK_GMM_HPP

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <cstdint>
#include <limits>
#include <numeric>
#include <string>
#include <vector>

#include "sigrank/errors.hpp"
#include "sigrank/feature_matrix.hpp"
#include "sigrank/matrix.hpp"
#include "sigrank/rng.hpp"

namespace sigrank {

// Diagonal-covariance Gaussian mixture. Weights sum to one; every variance
// sits at or above the fitting floor.
struct GmmModel {
  std::vector<double> weights;  // k
  Matrix means;                 // k x d
  Matrix diag_vars;             // k x d

  std::size_t components() const { return weights.size(); }
  std::size_t dim() const { return means.cols(); }
};

struct GmmFitOptions {
  std::size_t max_iter = 100;
  double tol = 1e-5;  // relative log-likelihood change
};

struct GmmFitStats {
  std::size_t iterations = 0;
  double final_log_likelihood = 0.0;
  std::vector<double> log_likelihood_history;
};

namespace detail {

inline double log_sum_exp(const std::vector<double>& v) {
  double m = -std::numeric_limits<double>::infinity();
  for (double x : v) m = std::max(m, x);
  if (!std::isfinite(m)) return m;
  double s = 0.0;
  for (double x : v) s += std::exp(x - m);
  return m + std::log(s);
}

// k-means++ seeding followed by a few Lloyd iterations, on a subsample.
// Produces the initial means for EM.
inline Matrix kmeans_init(const FeatureMatrix& f, std::size_t k, Rng& rng,
                          std::vector<std::size_t>& assignment_out,
                          std::vector<std::size_t>& subsample_out) {
  const std::size_t n = f.n_rows();
  const std::size_t d = f.n_cols();
  const std::size_t m = std::min(n, 10 * k);

  std::vector<std::size_t> idx(n);
  std::iota(idx.begin(), idx.end(), 0);
  rng.shuffle(idx);
  idx.resize(m);

  auto sq_dist = [&](std::size_t row, const double* center) {
    const double* r = f.row(row);
    double s = 0.0;
    for (std::size_t j = 0; j < d; ++j) {
      const double diff = r[j] - center[j];
      s += diff * diff;
    }
    return s;
  };

  Matrix centers(k, d);
  std::vector<double> best(m, std::numeric_limits<double>::infinity());
  const std::size_t first = idx[rng.index(m)];
  for (std::size_t j = 0; j < d; ++j) centers(0, j) = f.at(first, j);
  for (std::size_t c = 1; c < k; ++c) {
    double total = 0.0;
    for (std::size_t i = 0; i < m; ++i) {
      best[i] = std::min(best[i], sq_dist(idx[i], centers.row_ptr(c - 1)));
      total += best[i];
    }
    std::size_t pick = 0;
    if (total > 0.0) {
      const double u = rng.uniform() * total;
      double acc = 0.0;
      for (std::size_t i = 0; i < m; ++i) {
        acc += best[i];
        if (acc >= u) {
          pick = i;
          break;
        }
      }
    } else {
      pick = rng.index(m);
    }
    for (std::size_t j = 0; j < d; ++j) centers(c, j) = f.at(idx[pick], j);
  }

  std::vector<std::size_t> assign(m, 0);
  for (int lloyd = 0; lloyd < 5; ++lloyd) {
    for (std::size_t i = 0; i < m; ++i) {
      double bd = std::numeric_limits<double>::infinity();
      std::size_t ba = 0;
      for (std::size_t c = 0; c < k; ++c) {
        const double dd = sq_dist(idx[i], centers.row_ptr(c));
        if (dd < bd) {
          bd = dd;
          ba = c;
        }
      }
      assign[i] = ba;
    }
    Matrix sums(k, d);
    std::vector<std::size_t> counts(k, 0);
    for (std::size_t i = 0; i < m; ++i) {
      ++counts[assign[i]];
      const double* r = f.row(idx[i]);
      double* srow = sums.row_ptr(assign[i]);
      for (std::size_t j = 0; j < d; ++j) srow[j] += r[j];
    }
    for (std::size_t c = 0; c < k; ++c) {
      if (counts[c] == 0) {
        // Re-seed an empty cluster with the point farthest from its center.
        double worst = -1.0;
        std::size_t w = 0;
        for (std::size_t i = 0; i < m; ++i) {
          const double dd = sq_dist(idx[i], centers.row_ptr(assign[i]));
          if (dd > worst) {
            worst = dd;
            w = i;
          }
        }
        for (std::size_t j = 0; j < d; ++j) centers(c, j) = f.at(idx[w], j);
        assign[w] = c;
      } else {
        for (std::size_t j = 0; j < d; ++j) centers(c, j) = sums(c, j) / double(counts[c]);
      }
    }
  }
  assignment_out = std::move(assign);
  subsample_out = std::move(idx);
  return centers;
}

}  // namespace detail

// EM on a diagonal-covariance mixture. Deterministic for a given seed; the
// per-iteration log-likelihood is checked to be non-decreasing.
inline GmmModel fit_gmm(const FeatureMatrix& f, std::size_t k, std::uint64_t seed,
                        const GmmFitOptions& opts = {}, GmmFitStats* stats = nullptr) {
  const std::size_t n = f.n_rows();
  const std::size_t d = f.n_cols();
  if (k < 1 || k > n)
    throw InvalidComponentCountError("fit_gmm: component count " + std::to_string(k) +
                                     " not in [1, n_rows=" + std::to_string(n) + "]");
  f.validate_finite();

  const std::vector<double> global_var = f.column_variances();
  if (*std::max_element(global_var.begin(), global_var.end()) == 0.0)
    throw DegenerateDataError("fit_gmm: all feature rows are identical");

  std::vector<double> floor(d);
  for (std::size_t j = 0; j < d; ++j) floor[j] = std::max(1e-4 * global_var[j], 1e-12);

  Rng rng(seed);
  std::vector<std::size_t> assign, subsample;
  Matrix means = detail::kmeans_init(f, k, rng, assign, subsample);

  // Initial weights and variances from the k-means clusters.
  std::vector<double> weights(k, 0.0);
  Matrix vars(k, d);
  {
    std::vector<std::size_t> counts(k, 0);
    for (std::size_t a : assign) ++counts[a];
    Matrix sq(k, d);
    for (std::size_t i = 0; i < assign.size(); ++i) {
      const double* r = f.row(subsample[i]);
      double* vrow = sq.row_ptr(assign[i]);
      const double* mrow = means.row_ptr(assign[i]);
      for (std::size_t j = 0; j < d; ++j) {
        const double diff = r[j] - mrow[j];
        vrow[j] += diff * diff;
      }
    }
    for (std::size_t c = 0; c < k; ++c) {
      weights[c] = counts[c] > 0 ? double(counts[c]) / double(assign.size())
                                 : 1.0 / double(assign.size());
      for (std::size_t j = 0; j < d; ++j) {
        const double v = counts[c] > 0 ? sq(c, j) / double(counts[c]) : global_var[j];
        vars(c, j) = std::max(v, floor[j]);
      }
    }
    const double wsum = std::accumulate(weights.begin(), weights.end(), 0.0);
    for (double& w : weights) w /= wsum;
  }

  Matrix resp(n, k);
  std::vector<double> comp_log(k);
  double prev_ll = -std::numeric_limits<double>::infinity();
  GmmFitStats local_stats;

  for (std::size_t iter = 0; iter < opts.max_iter; ++iter) {
    // E-step in log space; 512-dim densities underflow otherwise.
    std::vector<double> log_norm(k, 0.0);
    for (std::size_t c = 0; c < k; ++c) {
      double s = 0.0;
      for (std::size_t j = 0; j < d; ++j) s += std::log(6.283185307179586 * vars(c, j));
      log_norm[c] = std::log(weights[c]) - 0.5 * s;
    }
    double ll = 0.0;
    for (std::size_t i = 0; i < n; ++i) {
      const double* r = f.row(i);
      for (std::size_t c = 0; c < k; ++c) {
        const double* mrow = means.row_ptr(c);
        const double* vrow = vars.row_ptr(c);
        double q = 0.0;
        for (std::size_t j = 0; j < d; ++j) {
          const double diff = r[j] - mrow[j];
          q += diff * diff / vrow[j];
        }
        comp_log[c] = log_norm[c] - 0.5 * q;
      }
      const double lse = detail::log_sum_exp(comp_log);
      ll += lse;
      for (std::size_t c = 0; c < k; ++c) resp(i, c) = std::exp(comp_log[c] - lse);
    }

    local_stats.log_likelihood_history.push_back(ll);
    local_stats.iterations = iter + 1;
    local_stats.final_log_likelihood = ll;
    if (iter > 0) {
      const double slack = 1e-8 * (1.0 + std::fabs(prev_ll));
      if (ll < prev_ll - slack)
        throw Error("fit_gmm: log-likelihood decreased (" + std::to_string(prev_ll) +
                    " -> " + std::to_string(ll) + ")");
      if (std::fabs(ll - prev_ll) <= opts.tol * std::max(1.0, std::fabs(prev_ll))) break;
    }
    prev_ll = ll;

    // M-step.
    for (std::size_t c = 0; c < k; ++c) {
      double nk = 0.0;
      for (std::size_t i = 0; i < n; ++i) nk += resp(i, c);
      if (nk < 1e-12) {
        weights[c] = nk / double(n);  // effectively dead component
        continue;
      }
      weights[c] = nk / double(n);
      double* mrow = means.row_ptr(c);
      std::fill(mrow, mrow + d, 0.0);
      for (std::size_t i = 0; i < n; ++i) {
        const double ric = resp(i, c);
        const double* r = f.row(i);
        for (std::size_t j = 0; j < d; ++j) mrow[j] += ric * r[j];
      }
      for (std::size_t j = 0; j < d; ++j) mrow[j] /= nk;
      double* vrow = vars.row_ptr(c);
      std::fill(vrow, vrow + d, 0.0);
      for (std::size_t i = 0; i < n; ++i) {
        const double ric = resp(i, c);
        const double* r = f.row(i);
        for (std::size_t j = 0; j < d; ++j) {
          const double diff = r[j] - mrow[j];
          vrow[j] += ric * diff * diff;
        }
      }
      for (std::size_t j = 0; j < d; ++j) vrow[j] = std::max(vrow[j] / nk, floor[j]);
    }
    const double wsum = std::accumulate(weights.begin(), weights.end(), 0.0);
    for (double& w : weights) w /= wsum;
  }

  if (stats) *stats = std::move(local_stats);
  return GmmModel{std::move(weights), std::move(means), std::move(vars)};
}

}  // namespace sigrank

#endif  // SIGRANK_GMM_HPP
