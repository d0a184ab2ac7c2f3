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

// Command-line surface: build / query / evaluate / gen-synthetic / bench.
// Exit codes: 0 success, 1 runtime error, 2 usage error.

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdint>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <string>
#include <vector>

#include <CLI11.hpp>

#include "sigrank/sigrank.hpp"

namespace fs = std::filesystem;

namespace {

struct BuildArgs {
  std::string manifest;
  std::string out;
  bool gmm = false, smt = false, sample = false;
  std::size_t components = 64;
  std::size_t smt_order = 0;
  std::string alpha = "cv";
  double eps = sigrank::kAutoEps;
  std::uint64_t seed = 0;
  bool no_center = false;
  bool l2_normalize = false;
};

struct QueryArgs {
  std::string index;
  std::string features;
  std::string metric;
  std::size_t top = 10;
};

struct EvaluateArgs {
  std::string index;
  std::string manifest;
  std::string metric = "all";
  std::string cutoffs = "1,5,10";
};

struct GenArgs {
  std::string out;
  std::size_t categories = 5;
  std::size_t items = 10;
  std::size_t rows = 500;
  std::size_t dim = 16;
  double separation = 8.0;
  double anisotropy = 4.0;
  std::uint64_t seed = 7;
};

struct BenchArgs {
  std::string index;
  std::string metric;
  std::size_t pairs = 100;
  std::uint64_t seed = 0;
};

std::string format_sci(double v) {
  char buf[40];
  std::snprintf(buf, sizeof(buf), "%.6e", v);
  return buf;
}

std::vector<std::size_t> parse_cutoffs(const std::string& text) {
  std::vector<std::size_t> out;
  std::size_t pos = 0;
  while (pos <= text.size()) {
    const std::size_t comma = text.find(',', pos);
    const std::string tok = text.substr(pos, comma == std::string::npos ? comma : comma - pos);
    if (tok.empty()) throw sigrank::Error("cutoffs: empty entry in '" + text + "'");
    std::size_t idx = 0;
    const long v = std::stol(tok, &idx);
    if (idx != tok.size() || v < 1)
      throw sigrank::Error("cutoffs: '" + tok + "' is not a positive integer");
    out.push_back(std::size_t(v));
    if (comma == std::string::npos) break;
    pos = comma + 1;
  }
  return out;
}

std::vector<sigrank::LabeledFeatures> load_manifest_features(const fs::path& manifest,
                                                             bool l2_normalize) {
  std::vector<sigrank::LabeledFeatures> items;
  for (const sigrank::ManifestEntry& m : sigrank::read_manifest(manifest)) {
    sigrank::FeatureMatrix f = sigrank::read_dfv1(m.path);
    if (l2_normalize) f.l2_normalize_rows();
    items.push_back(sigrank::LabeledFeatures{m.item_id, m.category, std::move(f)});
  }
  return items;
}

sigrank::MetricKind metric_from_name(const std::string& name) {
  const auto kind = sigrank::parse_metric(name);
  if (!kind) throw sigrank::Error("unknown metric '" + name + "'");
  return *kind;
}

int run_build(const BuildArgs& args) {
  sigrank::BuildConfig config;
  config.mode = args.gmm ? sigrank::IndexMode::Gmm
                         : (args.smt ? sigrank::IndexMode::Smt : sigrank::IndexMode::Sample);
  config.components = args.components;
  config.smt_order = args.smt_order;
  config.eps = args.eps;
  config.seed = args.seed;
  config.center = !args.no_center;
  if (args.alpha == "cv") {
    config.alpha_cv = true;
  } else {
    config.alpha_cv = false;
    config.alpha = std::stod(args.alpha);
  }

  const std::vector<sigrank::LabeledFeatures> items =
      load_manifest_features(args.manifest, args.l2_normalize);

  const bool report_alpha = config.mode == sigrank::IndexMode::Smt && config.alpha_cv;
  sigrank::SignatureIndex index = sigrank::build_index(
      items, config,
      [&](const std::string& id, std::size_t i, std::size_t total, double alpha) {
        std::cout << "[" << i << "/" << total << "] built " << id;
        if (report_alpha && !std::isnan(alpha)) {
          char buf[32];
          std::snprintf(buf, sizeof(buf), " (alpha=%.2f)", alpha);
          std::cout << buf;
        }
        std::cout << "\n";
      });

  const fs::path out = args.out;
  try {
    sigrank::save_index(index, out);
  } catch (...) {
    std::error_code ec;
    fs::remove(out, ec);  // never leave a partial index behind
    throw;
  }
  std::cout << "index written: " << out.string() << "\n";
  std::cout << "entries: " << index.entries.size() << ", dim: " << index.dim
            << ", mode: " << sigrank::index_mode_name(index.mode) << "\n";
  if (report_alpha) {
    char buf[48];
    std::snprintf(buf, sizeof(buf), "mean selected alpha: %.3f", index.build_config.alpha);
    std::cout << buf << "\n";
  }
  return 0;
}

sigrank::IndexEntry make_query_entry(const sigrank::SignatureIndex& index, const fs::path& file,
                                     const std::string& category = "") {
  sigrank::FeatureMatrix f = sigrank::read_dfv1(file);
  const sigrank::LabeledFeatures item{file.stem().string(), category, std::move(f)};
  return sigrank::build_entry(item, index.build_config);
}

int run_query(const QueryArgs& args) {
  const sigrank::SignatureIndex index = sigrank::load_index(args.index);
  const sigrank::MetricKind metric = metric_from_name(args.metric);
  const sigrank::IndexEntry query = make_query_entry(index, args.features);
  const sigrank::RankingResult result = sigrank::rank(index, query, metric);
  const std::size_t top = std::min(args.top, result.ranked.size());
  for (std::size_t i = 0; i < top; ++i) {
    const sigrank::RankedItem& r = result.ranked[i];
    std::cout << (i + 1) << "\t" << r.item_id << "\t" << r.category << "\t"
              << format_sci(r.distance) << "\n";
  }
  return 0;
}

int run_evaluate(const EvaluateArgs& args) {
  const sigrank::SignatureIndex index = sigrank::load_index(args.index);
  const std::vector<std::size_t> cutoffs = parse_cutoffs(args.cutoffs);

  std::vector<sigrank::IndexEntry> queries;
  for (const sigrank::ManifestEntry& m : sigrank::read_manifest(args.manifest)) {
    sigrank::IndexEntry q = make_query_entry(index, m.path, m.category);
    q.item_id = m.item_id;
    queries.push_back(std::move(q));
  }
  if (queries.empty()) throw sigrank::Error("evaluate: query manifest has no records");

  std::vector<sigrank::MetricKind> metrics;
  if (args.metric == "all") {
    metrics = {sigrank::MetricKind::GaussianKL, sigrank::MetricKind::VariationalKL,
               sigrank::MetricKind::Wasserstein, sigrank::MetricKind::Riemannian,
               sigrank::MetricKind::EuclideanMean};
    if (index.mode != sigrank::IndexMode::Gmm)
      metrics.erase(metrics.begin() + 1);  // variational needs gmm signatures
  } else {
    metrics = {metric_from_name(args.metric)};
  }

  std::cout << "metric";
  for (std::size_t c : cutoffs) std::cout << "\tP@" << c;
  std::cout << "\tMAP@" << cutoffs.back() << "\ts/pair\n";
  for (sigrank::MetricKind metric : metrics) {
    const sigrank::EvalReport report = sigrank::evaluate(index, queries, metric, cutoffs);
    std::cout << sigrank::metric_name(metric);
    char buf[32];
    for (double p : report.mean_precision) {
      std::snprintf(buf, sizeof(buf), "\t%.4f", p);
      std::cout << buf;
    }
    std::snprintf(buf, sizeof(buf), "\t%.4f", report.mean_ap.back());
    std::cout << buf << "\t" << format_sci(report.mean_pair_seconds) << "\n";
  }
  return 0;
}

int run_gen(const GenArgs& args) {
  sigrank::SyntheticSpec spec;
  spec.categories = args.categories;
  spec.items_per_category = args.items;
  spec.rows = args.rows;
  spec.dim = args.dim;
  spec.separation = args.separation;
  spec.anisotropy = args.anisotropy;
  spec.seed = args.seed;

  const fs::path dir = args.out;
  fs::create_directories(dir);
  const std::vector<sigrank::LabeledFeatures> items = sigrank::gen_synthetic(spec);

  std::ofstream manifest(dir / "manifest.tsv");
  if (!manifest) throw sigrank::IoError("cannot write manifest in '" + dir.string() + "'");
  for (const sigrank::LabeledFeatures& item : items) {
    const std::string file = item.item_id + ".dfv";
    sigrank::write_dfv1(dir / file, item.features);
    manifest << item.item_id << "\t" << item.category << "\t" << file << "\n";
  }
  manifest.close();
  std::cout << "wrote " << items.size() << " items to " << dir.string() << "\n";
  return 0;
}

int run_bench(const BenchArgs& args) {
  const sigrank::SignatureIndex index = sigrank::load_index(args.index);
  if (index.entries.size() < 2) throw sigrank::Error("bench: index has fewer than 2 entries");
  const sigrank::MetricKind metric = metric_from_name(args.metric);
  if (sigrank::metric_requires_gmm(metric) && index.mode != sigrank::IndexMode::Gmm)
    throw sigrank::IncompatibleMetricError("variational-kl requires a gmm-mode index");

  sigrank::Rng rng(args.seed);
  const std::size_t n = index.entries.size();
  std::vector<std::pair<std::size_t, std::size_t>> pairs(args.pairs);
  for (auto& p : pairs) {
    p.first = rng.index(n);
    p.second = rng.index(n - 1);
    if (p.second >= p.first) ++p.second;
  }

  std::cout << "metric=" << sigrank::metric_name(metric) << " pairs=" << args.pairs
            << " seed=" << args.seed << "\n";
  std::cout << "pair sample:";
  for (std::size_t i = 0; i < std::min<std::size_t>(pairs.size(), 5); ++i)
    std::cout << " " << index.entries[pairs[i].first].item_id << "--"
              << index.entries[pairs[i].second].item_id;
  std::cout << "\n";

  using clock = std::chrono::steady_clock;
  std::vector<double> seconds;
  seconds.reserve(pairs.size());
  for (const auto& p : pairs) {
    const sigrank::IndexEntry& a = index.entries[p.first];
    const sigrank::IndexEntry& b = index.entries[p.second];
    const auto t0 = clock::now();
    (void)sigrank::detail::signature_distance(a, b, metric, index.build_config.eps);
    seconds.push_back(std::chrono::duration<double>(clock::now() - t0).count());
  }
  std::sort(seconds.begin(), seconds.end());
  double mean = 0.0;
  for (double s : seconds) mean += s;
  mean /= double(seconds.size());
  const double median = seconds[seconds.size() / 2];
  const double p95 = seconds[std::min(seconds.size() - 1, std::size_t(0.95 * seconds.size()))];
  std::cout << "mean=" << format_sci(mean) << "s median=" << format_sci(median)
            << "s p95=" << format_sci(p95) << "s\n";
  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"distribution-signature retrieval engine"};
  app.require_subcommand(1);

  const std::vector<std::string> metric_names = {"gaussian-kl", "variational-kl", "wasserstein",
                                                 "riemannian", "euclidean"};

  BuildArgs build;
  CLI::App* cmd_build = app.add_subcommand("build", "build a signature index from a manifest");
  cmd_build->add_option("manifest", build.manifest, "item_id<TAB>category<TAB>dfv-path manifest")
      ->required()
      ->check(CLI::ExistingFile);
  cmd_build->add_option("--out", build.out, "output index path")->required();
  auto* mode = cmd_build->add_option_group("mode");
  mode->add_flag("--gmm", build.gmm, "GMM signatures (moment-matched)");
  mode->add_flag("--smt", build.smt, "SMT shrunk-covariance signatures");
  mode->add_flag("--sample", build.sample, "plain sample-covariance signatures");
  mode->require_option(1);
  cmd_build->add_option("--components", build.components, "GMM component count")
      ->check(CLI::PositiveNumber)
      ->capture_default_str();
  cmd_build->add_option("--smt-order", build.smt_order,
                        "Givens rotation budget (0 = 2*d*log2(d))");
  cmd_build
      ->add_option("--alpha", build.alpha, "shrinkage weight in [0,1], or 'cv' to cross-validate")
      ->check([](const std::string& v) -> std::string {
        if (v == "cv") return {};
        try {
          std::size_t idx = 0;
          const double a = std::stod(v, &idx);
          if (idx == v.size() && a >= 0.0 && a <= 1.0) return {};
        } catch (...) {
        }
        return "must be a number in [0,1] or 'cv'";
      })
      ->capture_default_str();
  cmd_build->add_option("--eps", build.eps, "SPD repair floor (negative = relative policy)");
  cmd_build->add_option("--seed", build.seed, "build seed")->capture_default_str();
  cmd_build->add_flag("--no-center", build.no_center,
                      "use the raw second moment instead of the centered covariance");
  cmd_build->add_flag("--l2-normalize", build.l2_normalize, "l2-normalize feature rows on load");

  QueryArgs query;
  CLI::App* cmd_query = app.add_subcommand("query", "rank an index against a feature file");
  cmd_query->add_option("index", query.index, "SIDX index path")
      ->required()
      ->check(CLI::ExistingFile);
  cmd_query->add_option("features", query.features, "DFV1 query features")
      ->required()
      ->check(CLI::ExistingFile);
  cmd_query->add_option("--metric", query.metric, "distance measure")
      ->required()
      ->check(CLI::IsMember(metric_names));
  cmd_query->add_option("--top", query.top, "entries to print")
      ->check(CLI::PositiveNumber)
      ->capture_default_str();

  EvaluateArgs evaluate;
  CLI::App* cmd_eval = app.add_subcommand("evaluate", "precision/MAP over a query manifest");
  cmd_eval->add_option("index", evaluate.index, "SIDX index path")
      ->required()
      ->check(CLI::ExistingFile);
  cmd_eval->add_option("queries", evaluate.manifest, "query manifest")
      ->required()
      ->check(CLI::ExistingFile);
  {
    std::vector<std::string> with_all = metric_names;
    with_all.push_back("all");
    cmd_eval->add_option("--metric", evaluate.metric, "measure, or 'all'")
        ->check(CLI::IsMember(with_all))
        ->capture_default_str();
  }
  cmd_eval->add_option("--cutoffs", evaluate.cutoffs, "comma-separated ranking cutoffs")
      ->check([](const std::string& v) -> std::string {
        try {
          parse_cutoffs(v);
          return {};
        } catch (const std::exception& e) {
          return e.what();
        }
      })
      ->capture_default_str();

  GenArgs gen;
  CLI::App* cmd_gen = app.add_subcommand("gen-synthetic", "write a seeded synthetic dataset");
  cmd_gen->add_option("--out", gen.out, "output directory")->required();
  cmd_gen->add_option("--categories", gen.categories)->check(CLI::PositiveNumber)->capture_default_str();
  cmd_gen->add_option("--items", gen.items, "items per category")->check(CLI::PositiveNumber)->capture_default_str();
  cmd_gen->add_option("--rows", gen.rows, "feature rows per item")->check(CLI::PositiveNumber)->capture_default_str();
  cmd_gen->add_option("--dim", gen.dim, "feature dimension")->check(CLI::PositiveNumber)->capture_default_str();
  cmd_gen->add_option("--separation", gen.separation, "category mean separation")
      ->check(CLI::NonNegativeNumber)
      ->capture_default_str();
  cmd_gen->add_option("--anisotropy", gen.anisotropy, "covariance eigenvalue spread (>= 1)")
      ->check(CLI::Range(1.0, 1e12))
      ->capture_default_str();
  cmd_gen->add_option("--seed", gen.seed)->capture_default_str();

  BenchArgs bench;
  CLI::App* cmd_bench = app.add_subcommand("bench", "time a metric over sampled entry pairs");
  cmd_bench->add_option("index", bench.index, "SIDX index path")
      ->required()
      ->check(CLI::ExistingFile);
  cmd_bench->add_option("--metric", bench.metric, "distance measure")
      ->required()
      ->check(CLI::IsMember(metric_names));
  cmd_bench->add_option("--pairs", bench.pairs, "number of sampled pairs")
      ->check(CLI::PositiveNumber)
      ->capture_default_str();
  cmd_bench->add_option("--seed", bench.seed)->capture_default_str();

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp& e) {
    return app.exit(e);
  } catch (const CLI::CallForAllHelp& e) {
    return app.exit(e);
  } catch (const CLI::ParseError& e) {
    app.exit(e);
    return 2;
  }

  try {
    if (cmd_build->parsed()) return run_build(build);
    if (cmd_query->parsed()) return run_query(query);
    if (cmd_eval->parsed()) return run_evaluate(evaluate);
    if (cmd_gen->parsed()) return run_gen(gen);
    if (cmd_bench->parsed()) return run_bench(bench);
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 1;
  }
  return 0;
}
