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

#ifndef SIGRANK_SYNTHETIC_HPP
#define SIGRANK_SYNTHETIC_HPP

#include <cmath>
#include <cstddef>
#include <cstdint>
#include <cstdio>
#include <string>
#include <vector>

#include "sigrank/errors.hpp"
#include "sigrank/feature_matrix.hpp"
#include "sigrank/matrix.hpp"
#include "sigrank/rng.hpp"

namespace sigrank {

struct LabeledFeatures {
  std::string item_id;
  std::string category;
  FeatureMatrix features;
};

struct SyntheticSpec {
  std::size_t categories = 5;
  std::size_t items_per_category = 10;
  std::size_t rows = 500;
  std::size_t dim = 16;
  double separation = 8.0;
  double anisotropy = 4.0;
  std::uint64_t seed = 7;
};

namespace detail {

// Random orientation: Gram-Schmidt on a Gaussian matrix. Fine for sampling;
// orthonormal to ~1e-14.
inline Matrix random_orthogonal(std::size_t dim, Rng& rng) {
  Matrix q(dim, dim);
  for (std::size_t j = 0; j < dim; ++j) {
    std::vector<double> col(dim);
    double norm = 0.0;
    do {
      for (std::size_t i = 0; i < dim; ++i) col[i] = rng.normal();
      for (std::size_t p = 0; p < j; ++p) {
        double proj = 0.0;
        for (std::size_t i = 0; i < dim; ++i) proj += col[i] * q(i, p);
        for (std::size_t i = 0; i < dim; ++i) col[i] -= proj * q(i, p);
      }
      norm = 0.0;
      for (double v : col) norm += v * v;
      norm = std::sqrt(norm);
    } while (norm < 1e-8);
    for (std::size_t i = 0; i < dim; ++i) q(i, j) = col[i] / norm;
  }
  return q;
}

inline std::string zero_pad(std::size_t v) {
  char buf[16];
  std::snprintf(buf, sizeof(buf), "%03zu", v);
  return buf;
}

}  // namespace detail

// Seeded source of labeled feature sets. Category c draws a ground-truth
// Gaussian: mean = separation * (random unit vector), covariance with
// eigenvalues linearly spread over [1, anisotropy] in a random orientation
// drawn per category. Items sample `rows` vectors from their category's
// Gaussian. Identical seeds give bitwise-identical output.
inline std::vector<LabeledFeatures> gen_synthetic(const SyntheticSpec& spec) {
  if (spec.categories < 1 || spec.items_per_category < 1 || spec.rows < 1 || spec.dim < 1)
    throw Error("gen_synthetic: all counts must be >= 1");
  if (spec.separation < 0.0) throw Error("gen_synthetic: separation must be >= 0");
  if (spec.anisotropy < 1.0) throw Error("gen_synthetic: anisotropy must be >= 1");

  const std::size_t d = spec.dim;
  Rng rng(spec.seed);
  std::vector<LabeledFeatures> out;
  out.reserve(spec.categories * spec.items_per_category);

  std::vector<double> scale(d, 1.0);
  for (std::size_t i = 0; i < d; ++i) {
    const double lambda =
        d > 1 ? 1.0 + (spec.anisotropy - 1.0) * double(i) / double(d - 1) : 1.0;
    scale[i] = std::sqrt(lambda);
  }

  std::vector<double> z(d);
  for (std::size_t c = 0; c < spec.categories; ++c) {
    std::vector<double> mean(d, 0.0);
    double norm = 0.0;
    for (std::size_t i = 0; i < d; ++i) {
      mean[i] = rng.normal();
      norm += mean[i] * mean[i];
    }
    norm = std::sqrt(norm);
    for (std::size_t i = 0; i < d; ++i)
      mean[i] = norm > 0.0 ? spec.separation * mean[i] / norm : 0.0;

    const Matrix q = detail::random_orthogonal(d, rng);
    const std::string cat = "cat" + detail::zero_pad(c);

    for (std::size_t item = 0; item < spec.items_per_category; ++item) {
      FeatureMatrix f(spec.rows, d);
      for (std::size_t r = 0; r < spec.rows; ++r) {
        for (std::size_t i = 0; i < d; ++i) z[i] = scale[i] * rng.normal();
        double* row = f.row(r);
        for (std::size_t i = 0; i < d; ++i) {
          double s = mean[i];
          for (std::size_t k = 0; k < d; ++k) s += q(i, k) * z[k];
          row[i] = s;
        }
      }
      out.push_back(LabeledFeatures{cat + "_item" + detail::zero_pad(item), cat, std::move(f)});
    }
  }
  return out;
}

}  // namespace sigrank

#endif  // SIGRANK_SYNTHETIC_HPP
