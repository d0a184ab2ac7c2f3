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

#ifndef SIGRANK_INDEX_HPP
#define SIGRANK_INDEX_HPP

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstddef>
#include <cstdint>
#include <functional>
#include <optional>
#include <set>
#include <string>
#include <utility>
#include <vector>

#include "sigrank/errors.hpp"
#include "sigrank/feature_matrix.hpp"
#include "sigrank/gmm.hpp"
#include "sigrank/metrics.hpp"
#include "sigrank/signature.hpp"
#include "sigrank/smt.hpp"
#include "sigrank/synthetic.hpp"

namespace sigrank {

enum class IndexMode : std::uint8_t { Sample = 0, Gmm = 1, Smt = 2 };

inline std::string_view index_mode_name(IndexMode m) {
  switch (m) {
    case IndexMode::Sample: return "sample";
    case IndexMode::Gmm: return "gmm";
    case IndexMode::Smt: return "smt";
  }
  return "unknown";
}

struct BuildConfig {
  IndexMode mode = IndexMode::Sample;
  std::size_t components = 64;  // gmm mode
  std::size_t smt_order = 0;    // smt mode; 0 means default_smt_order(dim)
  bool alpha_cv = true;         // smt mode: cross-validate the shrinkage weight
  double alpha = 0.5;           // requested fixed alpha; after a cv build, the mean selected one
  std::vector<double> alpha_grid = {0.0, 0.1, 0.2, 0.3, 0.4, 0.5, 0.6, 0.7, 0.8, 0.9, 1.0};
  std::size_t cv_folds = 3;
  double eps = kAutoEps;  // repair floor used by the metrics; negative = relative policy
  std::uint64_t seed = 0;
  bool center = true;  // centered sample covariance (false = raw second moment)
  GmmFitOptions gmm_options;
};

struct IndexEntry {
  std::string item_id;
  std::string category;
  GaussianSignature signature;
  std::optional<GmmModel> gmm;  // present iff the index was built in gmm mode
};

// Immutable after build; safe to query concurrently.
struct SignatureIndex {
  std::vector<IndexEntry> entries;
  std::size_t dim = 0;
  IndexMode mode = IndexMode::Sample;
  BuildConfig build_config;
};

struct RankedItem {
  std::string item_id;
  std::string category;
  double distance = 0.0;
};

struct RankingResult {
  std::string query_id;
  MetricKind metric = MetricKind::EuclideanMean;
  std::vector<RankedItem> ranked;       // ascending distance, ties by item_id
  double distance_seconds = 0.0;        // summed over pair evaluations
  std::size_t pair_count = 0;
};

// Signature for one item built according to the configured mode. The per-item
// seed is derived from the item id, so the result does not depend on input
// ordering. For smt builds, *alpha_used reports the shrinkage weight applied.
inline IndexEntry build_entry(const LabeledFeatures& item, const BuildConfig& config,
                              double* alpha_used = nullptr) {
  IndexEntry entry;
  entry.item_id = item.item_id;
  entry.category = item.category;
  const std::uint64_t item_seed = mix_seed(config.seed, item.item_id);
  if (alpha_used) *alpha_used = std::nan("");
  switch (config.mode) {
    case IndexMode::Sample: {
      entry.signature = sample_covariance(item.features, config.center);
      break;
    }
    case IndexMode::Gmm: {
      GmmModel model = fit_gmm(item.features, config.components, item_seed, config.gmm_options);
      entry.signature = moment_match(model);
      entry.gmm = std::move(model);
      break;
    }
    case IndexMode::Smt: {
      const GaussianSignature base = sample_covariance(item.features, config.center);
      const std::size_t order =
          config.smt_order > 0 ? config.smt_order : default_smt_order(base.dim());
      const SmtFactorization fact = smt_fit(base.cov, order);
      const double alpha =
          config.alpha_cv
              ? select_alpha(item.features, order, config.alpha_grid, config.cv_folds, item_seed)
              : config.alpha;
      if (alpha_used) *alpha_used = alpha;
      ShrunkCovariance shrunk = shrink(base.cov, fact, alpha);
      entry.signature =
          GaussianSignature{base.mean, std::move(shrunk.sigma), SignatureSource::Smt};
      break;
    }
  }
  return entry;
}

// item_id, position, total, selected alpha (NaN outside smt/cv builds)
using BuildProgress = std::function<void(const std::string&, std::size_t, std::size_t, double)>;

inline SignatureIndex build_index(const std::vector<LabeledFeatures>& items,
                                  const BuildConfig& config,
                                  const BuildProgress& progress = nullptr) {
  if (items.empty()) throw InsufficientDataError("build_index: no items");
  SignatureIndex index;
  index.mode = config.mode;
  index.build_config = config;
  index.dim = items.front().features.n_cols();

  std::set<std::string> seen;
  double alpha_sum = 0.0;
  std::size_t alpha_count = 0;
  for (std::size_t i = 0; i < items.size(); ++i) {
    const LabeledFeatures& item = items[i];
    if (!seen.insert(item.item_id).second)
      throw DuplicateItemError("build_index: duplicate item id '" + item.item_id + "'");
    if (item.features.n_cols() != index.dim)
      throw DimMismatchError("build_index: item '" + item.item_id + "' has dimension " +
                             std::to_string(item.features.n_cols()) + ", expected " +
                             std::to_string(index.dim));
    double alpha = std::nan("");
    IndexEntry entry = build_entry(item, config, &alpha);
    if (!std::isnan(alpha)) {
      alpha_sum += alpha;
      ++alpha_count;
    }
    if (progress) progress(item.item_id, i + 1, items.size(), alpha);
    index.entries.push_back(std::move(entry));
  }
  // After a cross-validated build the config records the mean selected alpha.
  if (config.mode == IndexMode::Smt && config.alpha_cv && alpha_count > 0)
    index.build_config.alpha = alpha_sum / double(alpha_count);
  return index;
}

namespace detail {

inline double signature_distance(const IndexEntry& query, const IndexEntry& entry,
                                 MetricKind kind, double eps) {
  switch (kind) {
    case MetricKind::GaussianKL:
      return kl_symmetric(query.signature, entry.signature, eps).value;
    case MetricKind::VariationalKL:
      return kl_variational_symmetric(*query.gmm, *entry.gmm).value;
    case MetricKind::Wasserstein:
      return wasserstein2(query.signature, entry.signature, eps).value;
    case MetricKind::Riemannian:
      return riemannian(query.signature, entry.signature, eps).value;
    case MetricKind::EuclideanMean:
      return euclidean_mean(query.signature, entry.signature).value;
  }
  throw Error("signature_distance: unknown metric");
}

}  // namespace detail

// Distances from the query to every entry, ascending, ties broken by item id.
// A query whose id appears in the index is excluded from its own ranking.
inline RankingResult rank(const SignatureIndex& index, const IndexEntry& query,
                          MetricKind metric) {
  if (metric_requires_gmm(metric)) {
    if (index.mode != IndexMode::Gmm || !query.gmm)
      throw IncompatibleMetricError("variational-kl requires a gmm-mode index and a gmm query");
  }
  if (query.signature.dim() != index.dim)
    throw DimMismatchError("rank: query dimension " + std::to_string(query.signature.dim()) +
                           " does not match index dimension " + std::to_string(index.dim));

  RankingResult result;
  result.query_id = query.item_id;
  result.metric = metric;
  result.ranked.reserve(index.entries.size());

  using clock = std::chrono::steady_clock;
  for (const IndexEntry& entry : index.entries) {
    if (entry.item_id == query.item_id) continue;
    const auto t0 = clock::now();
    double d = 0.0;
    try {
      d = detail::signature_distance(query, entry, metric, index.build_config.eps);
    } catch (const Error& e) {
      throw Error(std::string(e.what()) + " (while ranking item '" + entry.item_id + "')");
    }
    result.distance_seconds += std::chrono::duration<double>(clock::now() - t0).count();
    ++result.pair_count;
    result.ranked.push_back(RankedItem{entry.item_id, entry.category, d});
  }
  std::sort(result.ranked.begin(), result.ranked.end(),
            [](const RankedItem& a, const RankedItem& b) {
              if (a.distance != b.distance) return a.distance < b.distance;
              return a.item_id < b.item_id;
            });
  return result;
}

struct QueryEval {
  std::string query_id;
  std::vector<double> precision_at;  // parallel to cutoffs
  std::vector<double> ap_at;
};

struct EvalReport {
  MetricKind metric = MetricKind::EuclideanMean;
  std::vector<std::size_t> cutoffs;
  std::vector<QueryEval> per_query;
  std::vector<double> mean_precision;  // mean P@c over queries
  std::vector<double> mean_ap;         // MAP@c, interpolated AP averaged over queries
  double mean_pair_seconds = 0.0;
};

// Precision@c and AP@c per query, averaged into MAP. Relevance is exact
// category match. Cutoffs larger than the ranked list fall back to the list
// length so a one-category index scores exactly 1.
inline EvalReport evaluate(const SignatureIndex& index, const std::vector<IndexEntry>& queries,
                           MetricKind metric, const std::vector<std::size_t>& cutoffs) {
  if (queries.empty()) throw InsufficientDataError("evaluate: no queries");
  for (std::size_t c : cutoffs)
    if (c < 1) throw Error("evaluate: cutoffs must be >= 1");

  std::set<std::string> categories;
  for (const IndexEntry& e : index.entries) categories.insert(e.category);

  EvalReport report;
  report.metric = metric;
  report.cutoffs = cutoffs;
  report.mean_precision.assign(cutoffs.size(), 0.0);
  report.mean_ap.assign(cutoffs.size(), 0.0);

  double total_seconds = 0.0;
  std::size_t total_pairs = 0;
  for (const IndexEntry& query : queries) {
    if (!categories.count(query.category))
      throw UnknownCategoryError("evaluate: query '" + query.item_id + "' has category '" +
                                 query.category + "' absent from the index");
    const RankingResult ranking = rank(index, query, metric);
    total_seconds += ranking.distance_seconds;
    total_pairs += ranking.pair_count;

    const std::size_t len = ranking.ranked.size();
    std::size_t total_relevant = 0;
    for (const RankedItem& r : ranking.ranked)
      if (r.category == query.category) ++total_relevant;

    QueryEval qe;
    qe.query_id = query.item_id;
    for (std::size_t ci = 0; ci < cutoffs.size(); ++ci) {
      const std::size_t c_eff = std::min(cutoffs[ci], len);
      std::size_t hits = 0;
      double ap_sum = 0.0;
      for (std::size_t i = 0; i < c_eff; ++i) {
        if (ranking.ranked[i].category == query.category) {
          ++hits;
          ap_sum += double(hits) / double(i + 1);
        }
      }
      const double precision = c_eff > 0 ? double(hits) / double(c_eff) : 0.0;
      const std::size_t ap_denom = std::min(total_relevant, cutoffs[ci]);
      const double ap = ap_denom > 0 ? ap_sum / double(ap_denom) : 0.0;
      qe.precision_at.push_back(precision);
      qe.ap_at.push_back(ap);
      report.mean_precision[ci] += precision;
      report.mean_ap[ci] += ap;
    }
    report.per_query.push_back(std::move(qe));
  }

  const double nq = double(queries.size());
  for (std::size_t ci = 0; ci < cutoffs.size(); ++ci) {
    report.mean_precision[ci] /= nq;
    report.mean_ap[ci] /= nq;
  }
  report.mean_pair_seconds = total_pairs > 0 ? total_seconds / double(total_pairs) : 0.0;
  return report;
}

}  // namespace sigrank

#endif  // SIGRANK_INDEX_HPP
