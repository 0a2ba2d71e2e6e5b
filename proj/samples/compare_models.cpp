// SPDX-License-Identifier: Apache-2.0
// Simulate a small dataset, fit two regressors and save the better one.
//
//   compare_models [model.json]

#include <iostream>

#include "mmwpl/mmwpl.hpp"

int main(int argc, char** argv) {
  using namespace mmwpl;
  try {
    ScenarioConfig cfg = default_scenario();
    cfg.seed = 11;
    const TabularDataset data = drop_ignored_columns(to_table(sweep_scenario(cfg)));
    const auto [train_rows, test_rows] = split(data, 0.8, 42);
    const FeatureSet train = to_features(train_rows), test = to_features(test_rows);

    auto forest = RegressorSpec::defaults(RegressorKind::RandomForest);
    forest.hp.trees = 50;
    const std::vector<RegressorSpec> specs{RegressorSpec::defaults(RegressorKind::Ridge), forest};
    const auto results = benchmark_all(train, test, specs);

    std::cout << metrics_table_text(metrics_rows(results));
    if (argc > 1 && results.front().model) {
      save_model(*results.front().model, argv[1]);
      std::cout << "saved " << kind_label(results.front().kind) << " to " << argv[1] << '\n';
    }
  } catch (const Error& e) {
    std::cerr << "error: " << e.what() << '\n';
    return 1;
  }
}
