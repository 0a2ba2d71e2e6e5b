// SPDX-License-Identifier: Apache-2.0
#pragma once

// Epsilon-insensitive support vector regression with an RBF kernel, solved
// in the dual by SMO with second-order working set selection.
//
// Dual over 2l variables a = (alpha, alpha*):
//   min  1/2 a'Qa + p'a   s.t.  s'a = 0,  0 <= a <= C
//   s = (+1..., -1...),  p = (eps - y, eps + y),  Q_ij = s_i s_j K(x_i, x_j)
// Prediction: f(x) = sum_i (alpha_i - alpha*_i) K(x_i, x) - rho.

#include <algorithm>
#include <cmath>
#include <limits>
#include <vector>

#include "mmwpl/error.hpp"
#include "mmwpl/linalg.hpp"

namespace mmwpl {

inline double rbf_kernel(const Eigen::Ref<const Eigen::RowVectorXd>& a, const Eigen::Ref<const Eigen::RowVectorXd>& b,
                         double gamma) {
  return std::exp(-gamma * (a - b).squaredNorm());
}

/// 1 / (p * Var(X)) over all entries of X; 1 when X has no spread.
inline double default_gamma(const Matrix& x) {
  const double mean = x.mean();
  const double var = (x.array() - mean).square().mean();
  const double p = static_cast<double>(x.cols());
  return var > 0.0 ? 1.0 / (p * var) : 1.0;
}

struct SvrModel {
  Matrix support;       // support vectors, one per row
  Vector dual_coef;     // alpha_i - alpha*_i for each support vector
  double rho = 0.0;
  double gamma = 1.0;
  double kkt_violation = 0.0;  // max violating pair gap at termination
  int iterations = 0;

  Vector predict(const Matrix& x) const {
    Vector out(x.rows());
    for (Eigen::Index r = 0; r < x.rows(); ++r) {
      double s = -rho;
      for (Eigen::Index k = 0; k < support.rows(); ++k) s += dual_coef(k) * rbf_kernel(support.row(k), x.row(r), gamma);
      out(r) = s;
    }
    return out;
  }
};

struct SvrOptions {
  double c = 1.0;
  double epsilon = 0.1;
  double gamma = 0.0;  // 0: default_gamma
  double tolerance = 1e-3;
  int max_iterations = 100000;
};

/// Largest training set for which the kernel matrix is precomputed.
inline constexpr Eigen::Index kSvrMaxRows = 20000;

inline SvrModel fit_svr(const Matrix& x, const Vector& y, const SvrOptions& opt) {
  const Eigen::Index l = x.rows();
  if (l == 0) throw DomainError("svr: empty training set");
  if (l > kSvrMaxRows) throw DomainError("svr: training set larger than " + std::to_string(kSvrMaxRows) + " rows");
  const double gamma = opt.gamma > 0.0 ? opt.gamma : default_gamma(x);
  const double c = opt.c;
  constexpr double kTau = 1e-12;

  Matrix k(l, l);
  for (Eigen::Index i = 0; i < l; ++i) {
    k(i, i) = 1.0;
    for (Eigen::Index j = 0; j < i; ++j) k(i, j) = k(j, i) = rbf_kernel(x.row(i), x.row(j), gamma);
  }

  const Eigen::Index n = 2 * l;
  std::vector<double> alpha(static_cast<std::size_t>(n), 0.0), grad(static_cast<std::size_t>(n));
  std::vector<signed char> sign(static_cast<std::size_t>(n));
  for (Eigen::Index t = 0; t < l; ++t) {
    grad[static_cast<std::size_t>(t)] = opt.epsilon - y(t);
    grad[static_cast<std::size_t>(t + l)] = opt.epsilon + y(t);
    sign[static_cast<std::size_t>(t)] = 1;
    sign[static_cast<std::size_t>(t + l)] = -1;
  }
  auto q = [&](Eigen::Index a, Eigen::Index b) {
    return sign[static_cast<std::size_t>(a)] * sign[static_cast<std::size_t>(b)] * k(a % l, b % l);
  };
  auto at = [](auto& v, Eigen::Index i) -> auto& { return v[static_cast<std::size_t>(i)]; };
  auto is_up = [&](Eigen::Index t) {
    return at(sign, t) > 0 ? at(alpha, t) < c : at(alpha, t) > 0.0;
  };
  auto is_low = [&](Eigen::Index t) {
    return at(sign, t) > 0 ? at(alpha, t) > 0.0 : at(alpha, t) < c;
  };

  SvrModel model;
  model.gamma = gamma;
  double gap = std::numeric_limits<double>::infinity();
  int iter = 0;
  for (;; ++iter) {
    // i: maximal violator in I_up.
    double gmax = -std::numeric_limits<double>::infinity();
    Eigen::Index i = -1;
    for (Eigen::Index t = 0; t < n; ++t)
      if (is_up(t) && -at(sign, t) * at(grad, t) >= gmax) {
        if (-at(sign, t) * at(grad, t) > gmax || i < 0) i = t;
        gmax = -at(sign, t) * at(grad, t);
      }
    // j: second-order choice in I_low.
    double gmax2 = -std::numeric_limits<double>::infinity();
    double best_obj = std::numeric_limits<double>::infinity();
    Eigen::Index j = -1;
    for (Eigen::Index t = 0; t < n; ++t) {
      if (!is_low(t)) continue;
      const double sg = at(sign, t) * at(grad, t);
      gmax2 = std::max(gmax2, sg);
      if (i < 0) continue;
      const double b = gmax + sg;
      if (b > 0.0) {
        double a = q(i, i) + q(t, t) - 2.0 * at(sign, i) * at(sign, t) * q(i, t);
        if (a <= 0.0) a = kTau;
        const double obj = -(b * b) / a;
        if (obj < best_obj) {
          best_obj = obj;
          j = t;
        }
      }
    }
    gap = gmax + gmax2;
    if (gap < opt.tolerance || i < 0 || j < 0) break;
    if (iter >= opt.max_iterations) throw ConvergenceError("svr SMO did not reach tolerance", iter, gap);

    const double qii = q(i, i), qjj = q(j, j), qij = q(i, j);
    const double old_i = at(alpha, i), old_j = at(alpha, j);
    double& ai = at(alpha, i);
    double& aj = at(alpha, j);
    if (at(sign, i) != at(sign, j)) {
      double quad = qii + qjj + 2.0 * qij;
      if (quad <= 0.0) quad = kTau;
      const double delta = (-at(grad, i) - at(grad, j)) / quad;
      const double diff = ai - aj;
      ai += delta;
      aj += delta;
      if (diff > 0.0) {
        if (aj < 0.0) {
          aj = 0.0;
          ai = diff;
        }
      } else if (ai < 0.0) {
        ai = 0.0;
        aj = -diff;
      }
      if (diff > 0.0) {
        if (ai > c) {
          ai = c;
          aj = c - diff;
        }
      } else if (aj > c) {
        aj = c;
        ai = c + diff;
      }
    } else {
      double quad = qii + qjj - 2.0 * qij;
      if (quad <= 0.0) quad = kTau;
      const double delta = (at(grad, i) - at(grad, j)) / quad;
      const double sum = ai + aj;
      ai -= delta;
      aj += delta;
      if (sum > c) {
        if (ai > c) {
          ai = c;
          aj = sum - c;
        }
      } else if (aj < 0.0) {
        aj = 0.0;
        ai = sum;
      }
      if (sum > c) {
        if (aj > c) {
          aj = c;
          ai = sum - c;
        }
      } else if (ai < 0.0) {
        ai = 0.0;
        aj = sum;
      }
    }
    const double di = ai - old_i, dj = aj - old_j;
    for (Eigen::Index t = 0; t < n; ++t) at(grad, t) += q(t, i) * di + q(t, j) * dj;
  }
  model.kkt_violation = std::max(gap, 0.0);
  model.iterations = iter;

  // rho: mean of s_t G_t over free variables, else midpoint of the feasible interval.
  double ub = std::numeric_limits<double>::infinity(), lb = -std::numeric_limits<double>::infinity(), sum_free = 0.0;
  int n_free = 0;
  for (Eigen::Index t = 0; t < n; ++t) {
    const double sg = at(sign, t) * at(grad, t);
    const double a = at(alpha, t);
    if (a >= c) {
      if (at(sign, t) < 0) ub = std::min(ub, sg);
      else lb = std::max(lb, sg);
    } else if (a <= 0.0) {
      if (at(sign, t) > 0) ub = std::min(ub, sg);
      else lb = std::max(lb, sg);
    } else {
      ++n_free;
      sum_free += sg;
    }
  }
  model.rho = n_free > 0 ? sum_free / n_free : 0.5 * (ub + lb);

  std::vector<Eigen::Index> sv;
  for (Eigen::Index t = 0; t < l; ++t)
    if (at(alpha, t) - at(alpha, t + l) != 0.0) sv.push_back(t);
  model.support.resize(static_cast<Eigen::Index>(sv.size()), x.cols());
  model.dual_coef.resize(static_cast<Eigen::Index>(sv.size()));
  for (std::size_t s = 0; s < sv.size(); ++s) {
    model.support.row(static_cast<Eigen::Index>(s)) = x.row(sv[s]);
    model.dual_coef(static_cast<Eigen::Index>(s)) = at(alpha, sv[s]) - at(alpha, sv[s] + l);
  }
  return model;
}

}  // namespace mmwpl
