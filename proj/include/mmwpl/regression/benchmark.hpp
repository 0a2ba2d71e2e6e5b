// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <algorithm>
#include <array>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "mmwpl/dataset.hpp"
#include "mmwpl/regression/metrics.hpp"
#include "mmwpl/regression/model.hpp"
#include "mmwpl/regression/spec.hpp"

namespace mmwpl {

struct BenchmarkEntry {
  RegressorKind kind;
  std::optional<MetricsReport> metrics;  // empty when fit or predict failed
  std::string error;
  std::optional<TrainedModel> model;
};

/// Fit every spec on train, score on test, sort by ascending test RMSE.
/// Failed models are kept, after all successful ones, with their error.
inline std::vector<BenchmarkEntry> benchmark_all(const FeatureSet& train, const FeatureSet& test,
                                                 std::span<const RegressorSpec> specs) {
  if (train.features.cols() != test.features.cols()) throw ShapeError("benchmark: train/test feature widths differ");
  std::vector<BenchmarkEntry> out;
  for (const auto& spec : specs) {
    BenchmarkEntry e{spec.kind, std::nullopt, {}, std::nullopt};
    try {
      TrainedModel m = fit(spec, train.features, train.target);
      const Vector pred = m.predict(test.features);
      if (!pred.allFinite()) throw Error("non-finite predictions");
      e.metrics = compute_metrics(std::span<const double>(test.target.data(), static_cast<std::size_t>(test.target.size())),
                                  std::span<const double>(pred.data(), static_cast<std::size_t>(pred.size())));
      e.model = std::move(m);
    } catch (const std::exception& ex) {
      e.error = ex.what();
    }
    out.push_back(std::move(e));
  }
  std::stable_sort(out.begin(), out.end(), [](const BenchmarkEntry& a, const BenchmarkEntry& b) {
    if (a.metrics && b.metrics) return a.metrics->rmse < b.metrics->rmse;
    return a.metrics.has_value() && !b.metrics.has_value();
  });
  return out;
}

inline std::vector<RegressorSpec> default_specs(std::uint64_t seed = 42) {
  std::vector<RegressorSpec> s;
  for (auto k : kAllRegressors) s.push_back(RegressorSpec::defaults(k, seed));
  return s;
}

/// A previously published result, for comparison charts only.
struct LiteratureResult {
  std::string_view citation;
  std::string_view description;
  std::optional<double> mae;
  std::optional<double> mse;
  std::optional<double> rmse;
  std::optional<double> r2;
};

/// Prior path-loss prediction studies used as reference points.
inline const std::array<LiteratureResult, 4>& literature_results() {
  static const std::array<LiteratureResult, 4> kRows{{
      {"[21]", "Popoola et al. 2018, feed-forward neural network", 4.74, 39.38, 6.27, std::nullopt},
      {"[22]", "Obeidat et al. 2018, indoor wall-correction model", std::nullopt, std::nullopt, 8.67, std::nullopt},
      {"[23]", "Sotiroudis et al. 2019, NN vs random forest (NB-IoT)", 4.28, std::nullopt, 5.60, std::nullopt},
      {"[24]", "reference [24]", 5.10, 44.51, 6.67, 0.72},
  }};
  return kRows;
}

/// Published per-model results on the NYUSIM-derived dataset, reported next
/// to this run's numbers (not a reproduction target).
struct PublishedMetrics {
  RegressorKind kind;
  double mae, mse, rmse, r2;
};

inline const std::array<PublishedMetrics, 9>& published_results() {
  static const std::array<PublishedMetrics, 9> kRows{{
      {RegressorKind::Linear, 5.061, 42.777, 6.540, 0.813},
      {RegressorKind::Robust, 5.596, 70.153, 8.375, 0.693},
      {RegressorKind::Ridge, 5.506, 48.404, 6.957, 0.788},
      {RegressorKind::Lasso, 7.827, 97.061, 9.851, 0.576},
      {RegressorKind::ElasticNet, 5.202, 43.594, 6.602, 0.809},
      {RegressorKind::Polynomial, 4.388, 33.833, 5.816, 0.852},
      {RegressorKind::Sgd, 5.414, 46.738, 6.836, 0.796},
      {RegressorKind::RandomForest, 3.485, 24.809, 4.980, 0.891},
      {RegressorKind::Svm, 6.687, 82.902, 9.105, 0.638},
  }};
  return kRows;
}

}  // namespace mmwpl
