// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <array>
#include <cctype>
#include <cstdint>
#include <optional>
#include <string>
#include <string_view>

#include "mmwpl/error.hpp"

namespace mmwpl {

enum class RegressorKind { Linear, Robust, Ridge, Lasso, ElasticNet, Polynomial, Sgd, RandomForest, Svm };

inline constexpr std::array<RegressorKind, 9> kAllRegressors{
    RegressorKind::Linear,     RegressorKind::Robust, RegressorKind::Ridge,
    RegressorKind::Lasso,      RegressorKind::ElasticNet, RegressorKind::Polynomial,
    RegressorKind::Sgd,        RegressorKind::RandomForest, RegressorKind::Svm};

/// Short machine name used on the command line and in file names.
constexpr std::string_view kind_id(RegressorKind k) {
  switch (k) {
    case RegressorKind::Linear: return "linear";
    case RegressorKind::Robust: return "robust";
    case RegressorKind::Ridge: return "ridge";
    case RegressorKind::Lasso: return "lasso";
    case RegressorKind::ElasticNet: return "elasticnet";
    case RegressorKind::Polynomial: return "polynomial";
    case RegressorKind::Sgd: return "sgd";
    case RegressorKind::RandomForest: return "rf";
    case RegressorKind::Svm: return "svm";
  }
  return "?";
}

/// Display name used in report tables.
constexpr std::string_view kind_label(RegressorKind k) {
  switch (k) {
    case RegressorKind::Linear: return "Linear Regression";
    case RegressorKind::Robust: return "Robust Regression";
    case RegressorKind::Ridge: return "Ridge Regression";
    case RegressorKind::Lasso: return "LASSO Regression";
    case RegressorKind::ElasticNet: return "Elastic Net";
    case RegressorKind::Polynomial: return "Polynomial Regression";
    case RegressorKind::Sgd: return "SGD";
    case RegressorKind::RandomForest: return "RF Regressor";
    case RegressorKind::Svm: return "SVM Regressor";
  }
  return "?";
}

inline std::optional<RegressorKind> parse_kind(std::string_view s) {
  std::string lower;
  for (char c : s) lower += static_cast<char>(std::tolower(static_cast<unsigned char>(c)));
  for (RegressorKind k : kAllRegressors)
    if (kind_id(k) == lower) return k;
  if (lower == "randomforest" || lower == "random_forest") return RegressorKind::RandomForest;
  if (lower == "svr") return RegressorKind::Svm;
  if (lower == "elastic_net") return RegressorKind::ElasticNet;
  if (lower == "huber") return RegressorKind::Robust;
  return std::nullopt;
}

/// Hyperparameters for every kind; each kind reads only its own fields.
struct Hyperparameters {
  // Penalized linear family. Ridge minimizes ||y - Xw - b||^2 + lambda ||w||^2;
  // LASSO and elastic net minimize
  //   (1/2n) ||y - Xw - b||^2 + lambda (l1_ratio ||w||_1 + (1 - l1_ratio)/2 ||w||^2).
  double lambda = 0.0;
  double l1_ratio = 1.0;
  double tolerance = 1e-6;
  int max_iterations = 10000;

  // Robust (Huber) regression.
  double huber_delta = 1.35;

  // Polynomial expansion.
  int degree = 2;

  // SGD: eta_t = eta0 / (1 + eta0 * sgd_alpha * t), L2 penalty sgd_alpha.
  double eta0 = 0.01;
  double sgd_alpha = 1e-4;
  int epochs = 100;

  // Random forest. max_features 0 means ceil(p / 3); max_depth 0 is unlimited.
  int trees = 100;
  bool bootstrap = true;
  int max_features = 0;
  int min_samples_leaf = 2;
  int max_depth = 0;
  unsigned threads = 1;

  // SVM (epsilon-SVR, RBF kernel). gamma 0 means 1 / (p * Var(X)).
  double c = 1.0;
  double epsilon = 0.1;
  double gamma = 0.0;

  // Z-score features with training statistics before fitting.
  bool standardize = false;
};

struct RegressorSpec {
  RegressorKind kind = RegressorKind::Linear;
  Hyperparameters hp;
  std::uint64_t seed = 42;

  /// Documented defaults for each kind.
  static RegressorSpec defaults(RegressorKind kind, std::uint64_t seed = 42) {
    RegressorSpec s;
    s.kind = kind;
    s.seed = seed;
    auto& hp = s.hp;
    switch (kind) {
      case RegressorKind::Linear:
        break;
      case RegressorKind::Robust:
        hp.tolerance = 1e-8;
        hp.max_iterations = 100;
        break;
      case RegressorKind::Ridge:
        hp.lambda = 1.0;
        hp.standardize = true;
        break;
      case RegressorKind::Lasso:
        hp.lambda = 0.1;
        hp.l1_ratio = 1.0;
        hp.standardize = true;
        break;
      case RegressorKind::ElasticNet:
        hp.lambda = 0.1;
        hp.l1_ratio = 0.5;
        hp.standardize = true;
        break;
      case RegressorKind::Polynomial:
        hp.degree = 2;
        hp.standardize = true;
        break;
      case RegressorKind::Sgd:
        hp.standardize = true;
        break;
      case RegressorKind::RandomForest:
        break;
      case RegressorKind::Svm:
        hp.tolerance = 1e-3;
        hp.max_iterations = 100000;
        hp.standardize = true;
        break;
    }
    return s;
  }
};

inline void validate(const RegressorSpec& s) {
  const auto& hp = s.hp;
  if (!(hp.lambda >= 0.0)) throw DomainError("lambda must be >= 0");
  if (!(hp.l1_ratio >= 0.0 && hp.l1_ratio <= 1.0)) throw DomainError("l1_ratio must be in [0, 1]");
  if (!(hp.tolerance > 0.0)) throw DomainError("tolerance must be > 0");
  if (hp.max_iterations < 1) throw DomainError("max_iterations must be >= 1");
  if (!(hp.huber_delta > 0.0)) throw DomainError("huber_delta must be > 0");
  if (hp.degree < 1) throw DomainError("degree must be >= 1");
  if (!(hp.eta0 > 0.0) || !(hp.sgd_alpha >= 0.0) || hp.epochs < 1) throw DomainError("invalid SGD schedule");
  if (hp.trees < 1) throw DomainError("trees must be >= 1");
  if (hp.max_features < 0 || hp.min_samples_leaf < 1 || hp.max_depth < 0) throw DomainError("invalid tree limits");
  if (!(hp.c > 0.0)) throw DomainError("C must be > 0");
  if (!(hp.epsilon >= 0.0)) throw DomainError("epsilon must be >= 0");
  if (!(hp.gamma >= 0.0)) throw DomainError("gamma must be >= 0");
}

}  // namespace mmwpl
