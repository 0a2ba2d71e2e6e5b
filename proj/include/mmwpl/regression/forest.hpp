// SPDX-License-Identifier: Apache-2.0
#pragma once

// Random forest regressor: CART trees on bootstrap samples, variance
// reduction splits over a random feature subset per node.

#include <algorithm>
#include <atomic>
#include <cmath>
#include <cstdint>
#include <exception>
#include <numeric>
#include <thread>
#include <vector>

#include "mmwpl/error.hpp"
#include "mmwpl/linalg.hpp"
#include "mmwpl/random.hpp"

namespace mmwpl {

struct TreeNode {
  int feature = -1;  // -1 marks a leaf
  double threshold = 0.0;
  int left = -1;
  int right = -1;
  double value = 0.0;  // leaf prediction
};

struct RegressionTree {
  std::vector<TreeNode> nodes;

  double predict(const Eigen::Ref<const Eigen::RowVectorXd>& x) const {
    int i = 0;
    while (nodes[static_cast<std::size_t>(i)].feature >= 0) {
      const auto& n = nodes[static_cast<std::size_t>(i)];
      i = x(n.feature) <= n.threshold ? n.left : n.right;
    }
    return nodes[static_cast<std::size_t>(i)].value;
  }

  int depth() const {
    std::vector<std::pair<int, int>> stack{{0, 0}};
    int best = 0;
    while (!stack.empty()) {
      auto [i, d] = stack.back();
      stack.pop_back();
      best = std::max(best, d);
      const auto& n = nodes[static_cast<std::size_t>(i)];
      if (n.feature >= 0) {
        stack.emplace_back(n.left, d + 1);
        stack.emplace_back(n.right, d + 1);
      }
    }
    return best;
  }
};

struct TreeOptions {
  int max_features = 0;  // 0: all features
  int min_samples_leaf = 1;
  int max_depth = 0;  // 0: unlimited
};

namespace forest_detail {

struct Split {
  int feature = -1;
  double threshold = 0.0;
  double score = -1.0;
  std::size_t left_count = 0;
};

class TreeBuilder {
 public:
  TreeBuilder(const Matrix& x, const Vector& y, const TreeOptions& opt, RandomStream& rng)
      : x_(x), y_(y), opt_(opt), rng_(rng) {}

  RegressionTree build(std::vector<Eigen::Index> samples) {
    RegressionTree tree;
    tree.nodes.emplace_back();
    struct Task {
      int node;
      std::vector<Eigen::Index> samples;
      int depth;
    };
    std::vector<Task> stack;
    stack.push_back({0, std::move(samples), 0});
    while (!stack.empty()) {
      Task task = std::move(stack.back());
      stack.pop_back();
      double sum = 0.0;
      for (auto i : task.samples) sum += y_(i);
      tree.nodes[static_cast<std::size_t>(task.node)].value = sum / static_cast<double>(task.samples.size());

      const Split s = best_split(task.samples, task.depth);
      if (s.feature < 0) continue;

      std::vector<Eigen::Index> left, right;
      for (auto i : task.samples) (x_(i, s.feature) <= s.threshold ? left : right).push_back(i);
      const int l = static_cast<int>(tree.nodes.size());
      tree.nodes.emplace_back();
      tree.nodes.emplace_back();
      auto& node = tree.nodes[static_cast<std::size_t>(task.node)];
      node.feature = s.feature;
      node.threshold = s.threshold;
      node.left = l;
      node.right = l + 1;
      stack.push_back({l + 1, std::move(right), task.depth + 1});
      stack.push_back({l, std::move(left), task.depth + 1});
    }
    return tree;
  }

 private:
  // Candidate features in ascending index order; the first strictly best
  // (feature, threshold) pair in scan order wins ties.
  Split best_split(const std::vector<Eigen::Index>& samples, int depth) {
    const std::size_t n = samples.size();
    const auto min_leaf = static_cast<std::size_t>(opt_.min_samples_leaf);
    Split best;
    if (n < 2 * min_leaf) return best;
    if (opt_.max_depth > 0 && depth >= opt_.max_depth) return best;
    bool constant = true;
    for (auto i : samples)
      if (y_(i) != y_(samples[0])) {
        constant = false;
        break;
      }
    if (constant) return best;

    const int p = static_cast<int>(x_.cols());
    const int k = opt_.max_features > 0 ? std::min(opt_.max_features, p) : p;
    std::vector<int> features(static_cast<std::size_t>(p));
    std::iota(features.begin(), features.end(), 0);
    if (k < p) {
      for (int i = 0; i < k; ++i)
        std::swap(features[static_cast<std::size_t>(i)],
                  features[static_cast<std::size_t>(rng_.uniform_int(i, p - 1))]);
      features.resize(static_cast<std::size_t>(k));
      std::sort(features.begin(), features.end());
    }

    double total = 0.0;
    for (auto i : samples) total += y_(i);
    // Maximizing sumL^2/nL + sumR^2/nR is maximizing the SSE reduction.
    std::vector<std::pair<double, double>> sorted(n);
    for (int f : features) {
      for (std::size_t s = 0; s < n; ++s) sorted[s] = {x_(samples[s], f), y_(samples[s])};
      std::sort(sorted.begin(), sorted.end(),
                [](const auto& a, const auto& b) { return a.first < b.first; });
      double left_sum = 0.0;
      for (std::size_t s = 0; s + 1 < n; ++s) {
        left_sum += sorted[s].second;
        const std::size_t nl = s + 1, nr = n - nl;
        if (nl < min_leaf) continue;
        if (nr < min_leaf) break;
        if (!(sorted[s].first < sorted[s + 1].first)) continue;
        const double right_sum = total - left_sum;
        const double score =
            left_sum * left_sum / static_cast<double>(nl) + right_sum * right_sum / static_cast<double>(nr);
        if (score > best.score) {
          double thr = 0.5 * (sorted[s].first + sorted[s + 1].first);
          if (!(thr < sorted[s + 1].first)) thr = sorted[s].first;
          best = {f, thr, score, nl};
        }
      }
    }
    return best;
  }

  const Matrix& x_;
  const Vector& y_;
  TreeOptions opt_;
  RandomStream& rng_;
};

}  // namespace forest_detail

inline RegressionTree fit_tree(const Matrix& x, const Vector& y, std::vector<Eigen::Index> samples,
                               const TreeOptions& opt, RandomStream& rng) {
  if (samples.empty()) throw DomainError("fit_tree: no samples");
  return forest_detail::TreeBuilder(x, y, opt, rng).build(std::move(samples));
}

struct ForestOptions {
  int trees = 100;
  bool bootstrap = true;
  TreeOptions tree;
  unsigned threads = 1;
};

struct RandomForest {
  std::vector<RegressionTree> trees;

  Vector predict(const Matrix& x) const {
    Vector out(x.rows());
    for (Eigen::Index r = 0; r < x.rows(); ++r) {
      double s = 0.0;
      for (const auto& t : trees) s += t.predict(x.row(r));
      out(r) = s / static_cast<double>(trees.size());
    }
    return out;
  }
};

/// Tree t draws only from the stream derived from (seed, t), so the ensemble
/// is the same for any thread count.
inline RandomForest fit_forest(const Matrix& x, const Vector& y, const ForestOptions& opt, std::uint64_t seed) {
  const Eigen::Index n = x.rows();
  if (n == 0) throw DomainError("random forest: empty training set");
  RandomForest forest;
  forest.trees.resize(static_cast<std::size_t>(opt.trees));

  auto grow = [&](std::size_t t) {
    RandomStream rng(derive_seed(seed, {static_cast<std::uint64_t>(t)}));
    std::vector<Eigen::Index> samples(static_cast<std::size_t>(n));
    if (opt.bootstrap) {
      for (auto& s : samples) s = static_cast<Eigen::Index>(rng.uniform_int(0, n - 1));
    } else {
      std::iota(samples.begin(), samples.end(), Eigen::Index{0});
    }
    forest.trees[t] = fit_tree(x, y, std::move(samples), opt.tree, rng);
  };

  const unsigned threads = std::max(1u, std::min<unsigned>(opt.threads, static_cast<unsigned>(opt.trees)));
  if (threads == 1) {
    for (std::size_t t = 0; t < forest.trees.size(); ++t) grow(t);
    return forest;
  }
  std::atomic<std::size_t> next{0};
  std::vector<std::exception_ptr> errors(threads);
  std::vector<std::thread> pool;
  for (unsigned w = 0; w < threads; ++w)
    pool.emplace_back([&, w] {
      try {
        for (std::size_t t = next++; t < forest.trees.size(); t = next++) grow(t);
      } catch (...) {
        errors[w] = std::current_exception();
      }
    });
  for (auto& th : pool) th.join();
  for (auto& e : errors)
    if (e) std::rethrow_exception(e);
  return forest;
}

}  // namespace mmwpl
