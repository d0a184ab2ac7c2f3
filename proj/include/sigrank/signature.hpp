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

#ifndef SIGRANK_SIGNATURE_HPP
#define SIGRANK_SIGNATURE_HPP

#include <cstddef>
#include <vector>

#include "sigrank/errors.hpp"
#include "sigrank/feature_matrix.hpp"
#include "sigrank/gmm.hpp"
#include "sigrank/matrix.hpp"

namespace sigrank {

enum class SignatureSource { GmmMoment, Smt, Sample };

// (mean, full covariance) summary of one item; the unit every metric compares.
struct GaussianSignature {
  std::vector<double> mean;
  SymMatrix cov;
  SignatureSource source = SignatureSource::Sample;

  std::size_t dim() const { return mean.size(); }
};

// Collapse a mixture to a single Gaussian with the same first two moments:
//   mean = sum_a w_a mu_a
//   cov  = sum_a w_a (diag(var_a) + (mu_a - mean)(mu_a - mean)^T)
// The outer-product term makes the result a full matrix even though the
// components are diagonal.
inline GaussianSignature moment_match(const GmmModel& g) {
  const std::size_t k = g.components();
  const std::size_t d = g.dim();
  std::vector<double> mean(d, 0.0);
  for (std::size_t a = 0; a < k; ++a) {
    const double* mu = g.means.row_ptr(a);
    for (std::size_t j = 0; j < d; ++j) mean[j] += g.weights[a] * mu[j];
  }
  SymMatrix cov(d);
  for (std::size_t a = 0; a < k; ++a) {
    const double w = g.weights[a];
    const double* mu = g.means.row_ptr(a);
    const double* var = g.diag_vars.row_ptr(a);
    for (std::size_t i = 0; i < d; ++i) {
      const double di = mu[i] - mean[i];
      for (std::size_t j = 0; j <= i; ++j) {
        double v = w * di * (mu[j] - mean[j]);
        if (i == j) v += w * var[i];
        cov.add(i, j, v);
      }
    }
  }
  return GaussianSignature{std::move(mean), std::move(cov), SignatureSource::GmmMoment};
}

// Sample mean and covariance. center=false gives the raw second moment
// (1/n) sum x x^T, the zero-mean convention.
inline GaussianSignature sample_covariance(const FeatureMatrix& f, bool center) {
  const std::size_t n = f.n_rows();
  const std::size_t d = f.n_cols();
  if (n < 2) throw InsufficientDataError("sample_covariance: need at least 2 rows");
  std::vector<double> mean = f.column_means();
  SymMatrix cov(d);
  std::vector<double> centered(d);
  for (std::size_t r = 0; r < n; ++r) {
    const double* row = f.row(r);
    for (std::size_t j = 0; j < d; ++j) centered[j] = center ? row[j] - mean[j] : row[j];
    for (std::size_t i = 0; i < d; ++i)
      for (std::size_t j = 0; j <= i; ++j) cov.add(i, j, centered[i] * centered[j]);
  }
  for (std::size_t i = 0; i < d; ++i)
    for (std::size_t j = 0; j <= i; ++j) cov.set(i, j, cov(i, j) / double(n));
  return GaussianSignature{std::move(mean), std::move(cov), SignatureSource::Sample};
}

}  // namespace sigrank

#endif  // SIGRANK_SIGNATURE_HPP
