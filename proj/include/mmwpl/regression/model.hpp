// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <cmath>
#include <fstream>
#include <optional>
#include <string>
#include <variant>

#include <json.hpp>

#include "mmwpl/dataset.hpp"
#include "mmwpl/error.hpp"
#include "mmwpl/linalg.hpp"
#include "mmwpl/regression/forest.hpp"
#include "mmwpl/regression/linear.hpp"
#include "mmwpl/regression/spec.hpp"
#include "mmwpl/regression/svr.hpp"

namespace mmwpl {

inline constexpr std::string_view kModelFormat = "mmwpl-model";
inline constexpr int kModelFormatVersion = 1;

struct PolynomialFit {
  int degree = 2;
  LinearFit linear;
};

using FittedState = std::variant<LinearFit, PolynomialFit, RandomForest, SvrModel>;

/// A fitted regressor. Immutable; predict is a pure function of the state.
class TrainedModel {
 public:
  TrainedModel(RegressorSpec spec, Eigen::Index n_features, std::optional<Standardizer> scaler, FittedState state)
      : spec_(std::move(spec)), n_features_(n_features), scaler_(std::move(scaler)), state_(std::move(state)) {}

  const RegressorSpec& spec() const { return spec_; }
  RegressorKind kind() const { return spec_.kind; }
  Eigen::Index feature_count() const { return n_features_; }
  const std::optional<Standardizer>& scaler() const { return scaler_; }
  const FittedState& state() const { return state_; }

  /// Coefficients of the linear family (expanded terms for polynomial).
  const LinearFit* linear() const {
    if (auto* l = std::get_if<LinearFit>(&state_)) return l;
    if (auto* p = std::get_if<PolynomialFit>(&state_)) return &p->linear;
    return nullptr;
  }

  Vector predict(const Matrix& features) const {
    if (features.cols() != n_features_)
      throw ShapeError("predict: model trained on " + std::to_string(n_features_) + " features, got " +
                       std::to_string(features.cols()));
    const Matrix x = scaler_ ? scaler_->apply(features) : features;
    return std::visit(
        [&](const auto& s) -> Vector {
          using T = std::decay_t<decltype(s)>;
          if constexpr (std::is_same_v<T, PolynomialFit>)
            return s.linear.predict(polynomial_expand(x, s.degree));
          else
            return s.predict(x);
        },
        state_);
  }

 private:
  RegressorSpec spec_;
  Eigen::Index n_features_;
  std::optional<Standardizer> scaler_;
  FittedState state_;
};

inline TrainedModel fit(const RegressorSpec& spec, const Matrix& features, const Vector& target) {
  validate(spec);
  if (features.rows() != target.size()) throw ShapeError("fit: feature and target row counts differ");
  if (features.rows() == 0) throw DomainError("fit: empty training set");
  if (!features.allFinite() || !target.allFinite()) throw DomainError("fit: non-finite input");
  const auto& hp = spec.hp;

  std::optional<Standardizer> scaler;
  if (hp.standardize) scaler = Standardizer::fit(features);
  const Matrix x = scaler ? scaler->apply(features) : features;

  auto make = [&](FittedState s) { return TrainedModel(spec, features.cols(), scaler, std::move(s)); };
  switch (spec.kind) {
    case RegressorKind::Linear:
      return make(fit_least_squares(x, target));
    case RegressorKind::Ridge:
      return make(fit_ridge(x, target, hp.lambda));
    case RegressorKind::Lasso:
    case RegressorKind::ElasticNet:
      return make(fit_elastic_net(x, target, hp.lambda, hp.l1_ratio, hp.tolerance, hp.max_iterations));
    case RegressorKind::Robust:
      return make(fit_huber(x, target, hp.huber_delta, hp.tolerance, hp.max_iterations));
    case RegressorKind::Polynomial:
      return make(PolynomialFit{hp.degree, fit_least_squares(polynomial_expand(x, hp.degree), target)});
    case RegressorKind::Sgd:
      return make(fit_sgd(x, target, hp.eta0, hp.sgd_alpha, hp.epochs, spec.seed));
    case RegressorKind::RandomForest: {
      ForestOptions opt;
      opt.trees = hp.trees;
      opt.bootstrap = hp.bootstrap;
      opt.threads = hp.threads;
      const int p = static_cast<int>(x.cols());
      opt.tree.max_features = hp.max_features > 0 ? hp.max_features : (p + 2) / 3;
      opt.tree.min_samples_leaf = hp.min_samples_leaf;
      opt.tree.max_depth = hp.max_depth;
      return make(fit_forest(x, target, opt, spec.seed));
    }
    case RegressorKind::Svm: {
      SvrOptions opt;
      opt.c = hp.c;
      opt.epsilon = hp.epsilon;
      opt.gamma = hp.gamma;
      opt.tolerance = hp.tolerance;
      opt.max_iterations = hp.max_iterations;
      return make(fit_svr(x, target, opt));
    }
  }
  throw DomainError("fit: unknown regressor kind");
}

inline Vector predict(const TrainedModel& model, const Matrix& features) { return model.predict(features); }

// -------------------------------------------------------- persistence ----
//
// JSON document:
//   { "format": "mmwpl-model", "version": 1, "kind": "<id>", "seed": n,
//     "features": p, "hyperparameters": {...}, "scaler": {mean, scale} | null,
//     "state": {...} }
// Doubles are written in shortest round-trip form, so a reloaded model
// reproduces predictions bit for bit. Compatibility is only promised between
// identical library versions.

namespace model_io {

using nlohmann::json;

inline json to_json(const Vector& v) { return json(std::vector<double>(v.data(), v.data() + v.size())); }

inline Vector vector_from(const json& j) {
  const auto v = j.get<std::vector<double>>();
  return Eigen::Map<const Vector>(v.data(), static_cast<Eigen::Index>(v.size()));
}

inline json to_json(const Matrix& m) {
  json rows = json::array();
  for (Eigen::Index r = 0; r < m.rows(); ++r) rows.push_back(to_json(Vector(m.row(r).transpose())));
  return json{{"rows", m.rows()}, {"cols", m.cols()}, {"data", rows}};
}

inline Matrix matrix_from(const json& j) {
  Matrix m(j.at("rows").get<Eigen::Index>(), j.at("cols").get<Eigen::Index>());
  const auto& data = j.at("data");
  for (Eigen::Index r = 0; r < m.rows(); ++r) m.row(r) = vector_from(data.at(static_cast<std::size_t>(r))).transpose();
  return m;
}

inline json to_json(const LinearFit& f) {
  return json{{"coef", to_json(f.coef)}, {"intercept", f.intercept}, {"iterations", f.iterations}};
}

inline LinearFit linear_from(const json& j) {
  LinearFit f;
  f.coef = vector_from(j.at("coef"));
  f.intercept = j.at("intercept").get<double>();
  f.iterations = j.at("iterations").get<int>();
  return f;
}

inline json to_json(const Hyperparameters& hp) {
  return json{{"lambda", hp.lambda},
              {"l1_ratio", hp.l1_ratio},
              {"tolerance", hp.tolerance},
              {"max_iterations", hp.max_iterations},
              {"huber_delta", hp.huber_delta},
              {"degree", hp.degree},
              {"eta0", hp.eta0},
              {"sgd_alpha", hp.sgd_alpha},
              {"epochs", hp.epochs},
              {"trees", hp.trees},
              {"bootstrap", hp.bootstrap},
              {"max_features", hp.max_features},
              {"min_samples_leaf", hp.min_samples_leaf},
              {"max_depth", hp.max_depth},
              {"threads", hp.threads},
              {"c", hp.c},
              {"epsilon", hp.epsilon},
              {"gamma", hp.gamma},
              {"standardize", hp.standardize}};
}

inline Hyperparameters hyperparameters_from(const json& j) {
  Hyperparameters hp;
  hp.lambda = j.at("lambda");
  hp.l1_ratio = j.at("l1_ratio");
  hp.tolerance = j.at("tolerance");
  hp.max_iterations = j.at("max_iterations");
  hp.huber_delta = j.at("huber_delta");
  hp.degree = j.at("degree");
  hp.eta0 = j.at("eta0");
  hp.sgd_alpha = j.at("sgd_alpha");
  hp.epochs = j.at("epochs");
  hp.trees = j.at("trees");
  hp.bootstrap = j.at("bootstrap");
  hp.max_features = j.at("max_features");
  hp.min_samples_leaf = j.at("min_samples_leaf");
  hp.max_depth = j.at("max_depth");
  hp.threads = j.at("threads");
  hp.c = j.at("c");
  hp.epsilon = j.at("epsilon");
  hp.gamma = j.at("gamma");
  hp.standardize = j.at("standardize");
  return hp;
}

}  // namespace model_io

inline nlohmann::json model_to_json(const TrainedModel& m) {
  using nlohmann::json;
  using namespace model_io;
  json j{{"format", kModelFormat},
         {"version", kModelFormatVersion},
         {"kind", kind_id(m.kind())},
         {"seed", m.spec().seed},
         {"features", m.feature_count()},
         {"hyperparameters", to_json(m.spec().hp)}};
  j["scaler"] = m.scaler() ? json{{"mean", to_json(m.scaler()->mean)}, {"scale", to_json(m.scaler()->scale)}}
                           : json(nullptr);
  j["state"] = std::visit(
      [](const auto& s) -> json {
        using T = std::decay_t<decltype(s)>;
        if constexpr (std::is_same_v<T, LinearFit>) {
          return to_json(s);
        } else if constexpr (std::is_same_v<T, PolynomialFit>) {
          return json{{"degree", s.degree}, {"linear", to_json(s.linear)}};
        } else if constexpr (std::is_same_v<T, RandomForest>) {
          json trees = json::array();
          for (const auto& t : s.trees) {
            json feature = json::array(), threshold = json::array(), left = json::array(), right = json::array(),
                 value = json::array();
            for (const auto& n : t.nodes) {
              feature.push_back(n.feature);
              threshold.push_back(n.threshold);
              left.push_back(n.left);
              right.push_back(n.right);
              value.push_back(n.value);
            }
            trees.push_back(
                json{{"feature", feature}, {"threshold", threshold}, {"left", left}, {"right", right}, {"value", value}});
          }
          return json{{"trees", trees}};
        } else {
          return json{{"support", to_json(s.support)}, {"dual_coef", to_json(s.dual_coef)},
                      {"rho", s.rho},                  {"gamma", s.gamma},
                      {"kkt_violation", s.kkt_violation}, {"iterations", s.iterations}};
        }
      },
      m.state());
  return j;
}

inline TrainedModel model_from_json(const nlohmann::json& j) {
  using namespace model_io;
  try {
    if (j.at("format").get<std::string>() != kModelFormat) throw ParseError("not a model file");
    if (j.at("version").get<int>() != kModelFormatVersion)
      throw ParseError("unsupported model format version " + j.at("version").dump());
    auto kind = parse_kind(j.at("kind").get<std::string>());
    if (!kind) throw ParseError("unknown model kind " + j.at("kind").dump());
    RegressorSpec spec;
    spec.kind = *kind;
    spec.seed = j.at("seed").get<std::uint64_t>();
    spec.hp = hyperparameters_from(j.at("hyperparameters"));
    std::optional<Standardizer> scaler;
    if (!j.at("scaler").is_null())
      scaler = Standardizer{vector_from(j["scaler"].at("mean")), vector_from(j["scaler"].at("scale"))};
    const auto& s = j.at("state");
    FittedState state;
    switch (*kind) {
      case RegressorKind::Polynomial:
        state = PolynomialFit{s.at("degree").get<int>(), linear_from(s.at("linear"))};
        break;
      case RegressorKind::RandomForest: {
        RandomForest forest;
        for (const auto& t : s.at("trees")) {
          RegressionTree tree;
          const auto& f = t.at("feature");
          for (std::size_t i = 0; i < f.size(); ++i)
            tree.nodes.push_back({f[i].get<int>(), t.at("threshold")[i].get<double>(), t.at("left")[i].get<int>(),
                                  t.at("right")[i].get<int>(), t.at("value")[i].get<double>()});
          forest.trees.push_back(std::move(tree));
        }
        state = std::move(forest);
        break;
      }
      case RegressorKind::Svm: {
        SvrModel svr;
        svr.support = matrix_from(s.at("support"));
        svr.dual_coef = vector_from(s.at("dual_coef"));
        svr.rho = s.at("rho");
        svr.gamma = s.at("gamma");
        svr.kkt_violation = s.at("kkt_violation");
        svr.iterations = s.at("iterations");
        state = std::move(svr);
        break;
      }
      default:
        state = linear_from(s);
    }
    return TrainedModel(spec, j.at("features").get<Eigen::Index>(), std::move(scaler), std::move(state));
  } catch (const nlohmann::json::exception& e) {
    throw ParseError(std::string("malformed model file: ") + e.what());
  }
}

inline void save_model(const TrainedModel& m, const std::string& path) {
  std::ofstream out(path);
  if (!out) throw Error("cannot open '" + path + "' for writing");
  out << model_to_json(m).dump() << '\n';
}

inline TrainedModel load_model(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw Error("cannot open '" + path + "'");
  nlohmann::json j;
  try {
    in >> j;
  } catch (const nlohmann::json::exception& e) {
    throw ParseError(std::string("malformed model file: ") + e.what());
  }
  return model_from_json(j);
}

}  // namespace mmwpl
