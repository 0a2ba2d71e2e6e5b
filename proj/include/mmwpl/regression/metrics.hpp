// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <cmath>
#include <optional>
#include <span>

#include "mmwpl/error.hpp"

namespace mmwpl {

/// MAE, MSE, RMSE and R^2 of one model on one evaluation set.
struct MetricsReport {
  double mae = 0.0;
  double mse = 0.0;
  double rmse = 0.0;
  // Empty when the target has zero variance.
  std::optional<double> r2;

  double r2_value() const {
    if (!r2) throw DomainError("r2 undefined: target has zero variance");
    return *r2;
  }
};

/// Standard definitions: MAE = mean |e|, MSE = mean e^2, RMSE = sqrt(MSE),
/// R^2 = 1 - SSE / SST with SST taken about the target mean.
inline MetricsReport compute_metrics(std::span<const double> target, std::span<const double> predictions) {
  if (target.size() != predictions.size()) throw ShapeError("compute_metrics: length mismatch");
  if (target.empty()) throw DomainError("compute_metrics: empty input");
  const double n = static_cast<double>(target.size());
  double abs_sum = 0.0, sse = 0.0, mean = 0.0;
  for (std::size_t i = 0; i < target.size(); ++i) {
    const double e = target[i] - predictions[i];
    abs_sum += std::abs(e);
    sse += e * e;
    mean += target[i];
  }
  mean /= n;
  double sst = 0.0;
  for (double y : target) sst += (y - mean) * (y - mean);

  MetricsReport m;
  m.mae = abs_sum / n;
  m.mse = sse / n;
  m.rmse = std::sqrt(m.mse);
  if (sst > 0.0) m.r2 = 1.0 - sse / sst;
  return m;
}

}  // namespace mmwpl
