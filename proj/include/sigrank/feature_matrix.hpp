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

#ifndef SIGRANK_FEATURE_MATRIX_HPP
#define SIGRANK_FEATURE_MATRIX_HPP

#include <cmath>
#include <cstddef>
#include <string>
#include <vector>

#include "sigrank/errors.hpp"

namespace sigrank {

// One item's local features: rows are locations, columns feature dimensions.
class FeatureMatrix {
 public:
  FeatureMatrix(std::size_t n_rows, std::size_t n_cols)
      : n_rows_(n_rows), n_cols_(n_cols), values_(n_rows * n_cols, 0.0) {
    if (n_rows < 1 || n_cols < 1)
      throw DimMismatchError("FeatureMatrix: n_rows and n_cols must be >= 1");
  }

  std::size_t n_rows() const { return n_rows_; }
  std::size_t n_cols() const { return n_cols_; }

  double& at(std::size_t i, std::size_t j) { return values_[i * n_cols_ + j]; }
  const double& at(std::size_t i, std::size_t j) const { return values_[i * n_cols_ + j]; }

  const double* row(std::size_t i) const { return values_.data() + i * n_cols_; }
  double* row(std::size_t i) { return values_.data() + i * n_cols_; }

  const std::vector<double>& values() const { return values_; }
  std::vector<double>& values() { return values_; }

  // Throws naming the first offending row/column.
  void validate_finite() const {
    for (std::size_t i = 0; i < n_rows_; ++i)
      for (std::size_t j = 0; j < n_cols_; ++j)
        if (!std::isfinite(at(i, j)))
          throw FormatError("non-finite feature value at row " + std::to_string(i) +
                            ", column " + std::to_string(j));
  }

  std::vector<double> column_means() const {
    std::vector<double> m(n_cols_, 0.0);
    for (std::size_t i = 0; i < n_rows_; ++i) {
      const double* r = row(i);
      for (std::size_t j = 0; j < n_cols_; ++j) m[j] += r[j];
    }
    for (double& v : m) v /= double(n_rows_);
    return m;
  }

  // Population (1/n) variances per column.
  std::vector<double> column_variances() const {
    const std::vector<double> m = column_means();
    std::vector<double> v(n_cols_, 0.0);
    for (std::size_t i = 0; i < n_rows_; ++i) {
      const double* r = row(i);
      for (std::size_t j = 0; j < n_cols_; ++j) {
        const double d = r[j] - m[j];
        v[j] += d * d;
      }
    }
    for (double& x : v) x /= double(n_rows_);
    return v;
  }

  // Optional ingestion step; off by default everywhere.
  void l2_normalize_rows() {
    for (std::size_t i = 0; i < n_rows_; ++i) {
      double* r = row(i);
      double s = 0.0;
      for (std::size_t j = 0; j < n_cols_; ++j) s += r[j] * r[j];
      s = std::sqrt(s);
      if (s > 0.0)
        for (std::size_t j = 0; j < n_cols_; ++j) r[j] /= s;
    }
  }

 private:
  std::size_t n_rows_;
  std::size_t n_cols_;
  std::vector<double> values_;
};

}  // namespace sigrank

#endif  // SIGRANK_FEATURE_MATRIX_HPP
