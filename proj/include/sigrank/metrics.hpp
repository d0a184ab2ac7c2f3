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

#ifndef SIGRANK_METRICS_HPP
#define SIGRANK_METRICS_HPP

#include <cmath>
#include <cstddef>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "sigrank/errors.hpp"
#include "sigrank/gmm.hpp"
#include "sigrank/matrix.hpp"
#include "sigrank/signature.hpp"
#include "sigrank/spd.hpp"
#include "sigrank/symmetric_eigen.hpp"

namespace sigrank {

enum class MetricKind { GaussianKL, VariationalKL, Wasserstein, Riemannian, EuclideanMean };

inline std::string_view metric_name(MetricKind k) {
  switch (k) {
    case MetricKind::GaussianKL: return "gaussian-kl";
    case MetricKind::VariationalKL: return "variational-kl";
    case MetricKind::Wasserstein: return "wasserstein";
    case MetricKind::Riemannian: return "riemannian";
    case MetricKind::EuclideanMean: return "euclidean";
  }
  return "unknown";
}

inline std::optional<MetricKind> parse_metric(std::string_view name) {
  if (name == "gaussian-kl") return MetricKind::GaussianKL;
  if (name == "variational-kl") return MetricKind::VariationalKL;
  if (name == "wasserstein") return MetricKind::Wasserstein;
  if (name == "riemannian") return MetricKind::Riemannian;
  if (name == "euclidean" || name == "euclidean-mean") return MetricKind::EuclideanMean;
  return std::nullopt;
}

inline bool metric_requires_gmm(MetricKind k) { return k == MetricKind::VariationalKL; }

struct MetricDiagnostics {
  int clamped_eigenvalues = 0;
  double condition = 0.0;
  double raw_value = 0.0;  // pre-floor value where a floor applies
};

struct DistanceValue {
  double value = 0.0;
  MetricKind kind = MetricKind::EuclideanMean;
  MetricDiagnostics diagnostics;
};

// Negative eps means "use the relative per-matrix policy".
inline constexpr double kAutoEps = -1.0;

namespace detail {

inline double resolve_eps(const SymMatrix& m, double eps) {
  return eps < 0.0 ? default_clamp_eps(m) : eps;
}

inline void require_same_dim(std::size_t a, std::size_t b, const char* what) {
  if (a != b)
    throw DimMismatchError(std::string(what) + ": dimension mismatch (" + std::to_string(a) +
                           " vs " + std::to_string(b) + ")");
}

// Covariance with a usable Cholesky factor. Tries the input as-is and only
// pays for an eigenvalue repair when the factorization fails.
struct PreparedGaussian {
  SymMatrix cov;
  CholeskyFactor chol;
};

inline PreparedGaussian prepare_spd(const SymMatrix& cov, double eps, MetricDiagnostics* diag) {
  try {
    CholeskyFactor f = cholesky(cov);
    if (diag) diag->condition = std::max(diag->condition, f.condition_proxy());
    return PreparedGaussian{cov, std::move(f)};
  } catch (const NotPositiveDefiniteError&) {
    SpdDiagnostics rd;
    SymMatrix repaired = spd_repair(cov, resolve_eps(cov, eps), &rd);
    if (diag) diag->clamped_eigenvalues += rd.clamped;
    CholeskyFactor f = cholesky(repaired);  // irreparable input propagates from here
    if (diag) diag->condition = std::max(diag->condition, f.condition_proxy());
    return PreparedGaussian{std::move(repaired), std::move(f)};
  }
}

// tr(Sigma_to^{-1} Sigma_from) = ||L_to^{-1} L_from||_F^2.
inline double whitened_trace(const CholeskyFactor& to, const CholeskyFactor& from) {
  const Matrix x = to.whiten(from.lower());
  double s = 0.0;
  for (double v : x.data()) s += v * v;
  return s;
}

inline double kl_prepared(const PreparedGaussian& a, const PreparedGaussian& b,
                          const std::vector<double>& mean_a, const std::vector<double>& mean_b) {
  const std::size_t d = mean_a.size();
  std::vector<double> delta = subtract(mean_b, mean_a);
  b.chol.forward_solve(delta);
  const double quad = dot(delta, delta);
  const double value = 0.5 * (b.chol.log_det() - a.chol.log_det() - double(d) +
                              whitened_trace(b.chol, a.chol) + quad);
  return value < 0.0 ? 0.0 : value;  // analytic KL >= 0; rounding can dip barely below
}

// Closed-form KL between diagonal Gaussians, O(d). Exact for the mixture
// components, which are diagonal by construction.
inline double kl_diag(const double* mu_a, const double* var_a, const double* mu_b,
                      const double* var_b, std::size_t d) {
  double s = 0.0;
  for (std::size_t j = 0; j < d; ++j) {
    const double dm = mu_b[j] - mu_a[j];
    s += std::log(var_b[j] / var_a[j]) - 1.0 + var_a[j] / var_b[j] + dm * dm / var_b[j];
  }
  return 0.5 * s;
}

// Wasserstein and Riemannian anchor their factorizations on one operand.
// Choosing that operand by value rather than argument position makes the
// mathematically symmetric metrics bitwise symmetric.
inline bool in_canonical_order(const GaussianSignature& a, const GaussianSignature& b) {
  const double ta = a.cov.trace();
  const double tb = b.cov.trace();
  if (ta != tb) return ta < tb;
  if (a.cov.data() != b.cov.data()) return a.cov.data() < b.cov.data();
  return true;
}

}  // namespace detail

// KL(N_a || N_b) =
//   1/2 [ log|S_b|/|S_a| - d + tr(S_b^{-1} S_a) + (mu_b-mu_a)^T S_b^{-1} (mu_b-mu_a) ]
inline double kl_gaussian(const GaussianSignature& a, const GaussianSignature& b,
                          double eps = kAutoEps) {
  detail::require_same_dim(a.dim(), b.dim(), "kl_gaussian");
  const detail::PreparedGaussian pa = detail::prepare_spd(a.cov, eps, nullptr);
  const detail::PreparedGaussian pb = detail::prepare_spd(b.cov, eps, nullptr);
  return detail::kl_prepared(pa, pb, a.mean, b.mean);
}

inline DistanceValue kl_symmetric(const GaussianSignature& a, const GaussianSignature& b,
                                  double eps = kAutoEps) {
  detail::require_same_dim(a.dim(), b.dim(), "kl_symmetric");
  DistanceValue out;
  out.kind = MetricKind::GaussianKL;
  const detail::PreparedGaussian pa = detail::prepare_spd(a.cov, eps, &out.diagnostics);
  const detail::PreparedGaussian pb = detail::prepare_spd(b.cov, eps, &out.diagnostics);
  const double ab = detail::kl_prepared(pa, pb, a.mean, b.mean);
  const double ba = detail::kl_prepared(pb, pa, b.mean, a.mean);
  out.value = 0.5 * ab + 0.5 * ba;
  out.diagnostics.raw_value = out.value;
  return out;
}

// Variational mixture divergence:
//   D(a||b) = sum_x w_x log [ sum_x' w_x' e^{-KL(x||x')} / sum_y w_y e^{-KL(x||y)} ]
// evaluated with log-sum-exp. One-directional values can be negative; they are
// reported as-is.
inline double kl_variational(const GmmModel& a, const GmmModel& b) {
  detail::require_same_dim(a.dim(), b.dim(), "kl_variational");
  const std::size_t d = a.dim();
  const std::size_t ka = a.components();
  const std::size_t kb = b.components();
  std::vector<double> num(ka), den(kb);
  double total = 0.0;
  for (std::size_t x = 0; x < ka; ++x) {
    const double* mu_x = a.means.row_ptr(x);
    const double* var_x = a.diag_vars.row_ptr(x);
    for (std::size_t y = 0; y < ka; ++y)
      num[y] = std::log(a.weights[y]) -
               detail::kl_diag(mu_x, var_x, a.means.row_ptr(y), a.diag_vars.row_ptr(y), d);
    for (std::size_t y = 0; y < kb; ++y)
      den[y] = std::log(b.weights[y]) -
               detail::kl_diag(mu_x, var_x, b.means.row_ptr(y), b.diag_vars.row_ptr(y), d);
    total += a.weights[x] * (detail::log_sum_exp(num) - detail::log_sum_exp(den));
  }
  return total;
}

// Symmetrized variational KL, floored at zero for ranking; the signed average
// is kept in diagnostics.
inline DistanceValue kl_variational_symmetric(const GmmModel& a, const GmmModel& b) {
  DistanceValue out;
  out.kind = MetricKind::VariationalKL;
  const double raw = 0.5 * kl_variational(a, b) + 0.5 * kl_variational(b, a);
  out.diagnostics.raw_value = raw;
  out.value = raw < 0.0 ? 0.0 : raw;
  return out;
}

// Squared Gaussian Wasserstein-2, exactly in the printed squared form:
//   ||mu_a - mu_b||^2 + tr(S_a + S_b - 2 (S_a^{1/2} S_b S_a^{1/2})^{1/2})
// No inverse appears, so singular covariances are fine.
inline DistanceValue wasserstein2(const GaussianSignature& a, const GaussianSignature& b,
                                  double eps = kAutoEps) {
  detail::require_same_dim(a.dim(), b.dim(), "wasserstein2");
  const bool ordered = detail::in_canonical_order(a, b);
  const GaussianSignature& p = ordered ? a : b;
  const GaussianSignature& q = ordered ? b : a;
  DistanceValue out;
  out.kind = MetricKind::Wasserstein;
  SpdDiagnostics sd;
  const SymMatrix root_p = spd_sqrt(p.cov, std::max(detail::resolve_eps(p.cov, eps), 0.0), &sd);
  out.diagnostics.clamped_eigenvalues += sd.clamped;
  if (sd.lambda_max > 0.0 && sd.lambda_min > 0.0)
    out.diagnostics.condition = sd.lambda_max / sd.lambda_min;
  const Matrix rp = root_p.to_matrix();
  const SymMatrix inner = SymMatrix::from_matrix(multiply(multiply(rp, q.cov.to_matrix()), rp));
  double cross = 0.0;
  for (double lambda : sym_eigenvalues(inner)) {
    if (lambda > 0.0) cross += std::sqrt(lambda);
  }
  const double trace_term = p.cov.trace() + q.cov.trace() - 2.0 * cross;
  out.diagnostics.raw_value = trace_term;  // can round to ~-1e-12 for near-equal inputs
  const std::vector<double> delta = subtract(p.mean, q.mean);
  out.value = dot(delta, delta) + (trace_term > 0.0 ? trace_term : 0.0);
  return out;
}

struct RiemannianOptions {
  bool include_mean_term = false;  // adds ||mu_a - mu_b|| in quadrature
};

// Affine-invariant SPD geodesic distance:
//   || log(S_a^{-1/2} S_b S_a^{-1/2}) ||_F = sqrt( sum_c log^2 lambda_c )
// computed through the pencil route: lambda_c are the eigenvalues of
// L_a^{-1} S_b L_a^{-T} with L_a the Cholesky factor of S_a.
inline DistanceValue riemannian(const GaussianSignature& a, const GaussianSignature& b,
                                double eps = kAutoEps, const RiemannianOptions& opts = {}) {
  detail::require_same_dim(a.dim(), b.dim(), "riemannian");
  const bool ordered = detail::in_canonical_order(a, b);
  const GaussianSignature& p = ordered ? a : b;
  const GaussianSignature& q = ordered ? b : a;
  DistanceValue out;
  out.kind = MetricKind::Riemannian;
  const detail::PreparedGaussian pp = detail::prepare_spd(p.cov, eps, &out.diagnostics);

  auto whitened_eigenvalues = [&](const SymMatrix& cov_q) {
    const Matrix w = pp.chol.whiten(cov_q.to_matrix());
    const Matrix m = pp.chol.whiten(w.transposed());
    return sym_eigenvalues(SymMatrix::from_matrix(m));
  };

  std::vector<double> lambda = whitened_eigenvalues(q.cov);
  if (lambda.back() <= 0.0) {
    // the other covariance was not positive definite; repair and redo
    SpdDiagnostics rd;
    const SymMatrix repaired = spd_repair(q.cov, detail::resolve_eps(q.cov, eps), &rd);
    out.diagnostics.clamped_eigenvalues += rd.clamped;
    lambda = whitened_eigenvalues(repaired);
    if (lambda.back() <= 0.0)
      throw NotPositiveDefiniteError("riemannian: covariance not positive definite after repair",
                                     0);
  }
  double s = 0.0;
  for (double l : lambda) {
    const double lg = std::log(l);
    s += lg * lg;
  }
  out.diagnostics.raw_value = std::sqrt(s);
  if (opts.include_mean_term) {
    const std::vector<double> delta = subtract(p.mean, q.mean);
    s += dot(delta, delta);
  }
  out.value = std::sqrt(s);
  return out;
}

inline DistanceValue euclidean_mean(const GaussianSignature& a, const GaussianSignature& b) {
  detail::require_same_dim(a.dim(), b.dim(), "euclidean_mean");
  DistanceValue out;
  out.kind = MetricKind::EuclideanMean;
  out.value = l2_norm(subtract(a.mean, b.mean));
  out.diagnostics.raw_value = out.value;
  return out;
}

}  // namespace sigrank

#endif  // SIGRANK_METRICS_HPP
