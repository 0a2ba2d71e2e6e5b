// SPDX-License-Identifier: Apache-2.0
#pragma once

// Solvers for the linear family: ordinary and ridge least squares, elastic
// net / LASSO by cyclic coordinate descent, Huber regression by iteratively
// reweighted least squares, polynomial feature expansion and plain SGD.
// All solvers take an already preprocessed design matrix and fit an
// unpenalized intercept.

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <numeric>
#include <string>
#include <vector>

#include "mmwpl/error.hpp"
#include "mmwpl/linalg.hpp"
#include "mmwpl/random.hpp"

namespace mmwpl {

struct LinearFit {
  Vector coef;
  double intercept = 0.0;
  int iterations = 0;

  Vector predict(const Matrix& x) const { return (x * coef).array() + intercept; }
};

/// Exact least squares through column-pivoted QR of [1 X].
inline LinearFit fit_least_squares(const Matrix& x, const Vector& y) {
  const Eigen::Index n = x.rows(), p = x.cols();
  if (n < p + 1)
    throw SingularFitError("least squares needs at least " + std::to_string(p + 1) + " rows, got " + std::to_string(n));
  Matrix a(n, p + 1);
  a.col(0).setOnes();
  a.rightCols(p) = x;
  Eigen::ColPivHouseholderQR<Matrix> qr(a);
  if (qr.rank() < p + 1)
    throw SingularFitError("least squares: rank " + std::to_string(qr.rank()) + " < " + std::to_string(p + 1));
  const Vector beta = qr.solve(y);
  LinearFit f;
  f.intercept = beta(0);
  f.coef = beta.tail(p);
  return f;
}

/// Minimizes ||y - Xw - b||^2 + lambda ||w||^2 on centered data.
inline LinearFit fit_ridge(const Matrix& x, const Vector& y, double lambda) {
  if (lambda == 0.0) return fit_least_squares(x, y);
  const Eigen::RowVectorXd x_mean = x.colwise().mean();
  const double y_mean = y.mean();
  const Matrix xc = x.rowwise() - x_mean;
  const Vector yc = y.array() - y_mean;
  Matrix gram = xc.transpose() * xc;
  gram.diagonal().array() += lambda;
  Eigen::LDLT<Matrix> ldlt(gram);
  if (ldlt.info() != Eigen::Success) throw SingularFitError("ridge normal equations");
  LinearFit f;
  f.coef = ldlt.solve(xc.transpose() * yc);
  f.intercept = y_mean - x_mean.dot(f.coef);
  return f;
}

inline double soft_threshold(double z, double t) {
  if (z > t) return z - t;
  if (z < -t) return z + t;
  return 0.0;
}

/// Smallest lambda for which the LASSO solution is identically zero.
inline double lasso_lambda_max(const Matrix& x, const Vector& y, double l1_ratio = 1.0) {
  const Matrix xc = x.rowwise() - x.colwise().mean();
  const Vector yc = y.array() - y.mean();
  return (xc.transpose() * yc).cwiseAbs().maxCoeff() / (static_cast<double>(x.rows()) * l1_ratio);
}

/// Cyclic coordinate descent for
///   (1/2n) ||y - Xw - b||^2 + lambda (rho ||w||_1 + (1 - rho)/2 ||w||^2).
/// Stops when no coordinate moved more than tol * max(1, max |w|) in a sweep.
inline LinearFit fit_elastic_net(const Matrix& x, const Vector& y, double lambda, double l1_ratio, double tol,
                                 int max_sweeps) {
  const Eigen::Index n = x.rows(), p = x.cols();
  const double nd = static_cast<double>(n);
  const Eigen::RowVectorXd x_mean = x.colwise().mean();
  const double y_mean = y.mean();
  const Matrix xc = x.rowwise() - x_mean;
  Vector col_sq(p);
  for (Eigen::Index j = 0; j < p; ++j) col_sq(j) = xc.col(j).squaredNorm() / nd;

  const double l1 = lambda * l1_ratio;
  const double l2 = lambda * (1.0 - l1_ratio);
  Vector w = Vector::Zero(p);
  Vector resid = y.array() - y_mean;
  double max_change = 0.0;
  for (int sweep = 1; sweep <= max_sweeps; ++sweep) {
    max_change = 0.0;
    for (Eigen::Index j = 0; j < p; ++j) {
      const double old = w(j);
      const double denom = col_sq(j) + l2;
      double updated = 0.0;
      if (denom > 0.0) {
        const double rho = xc.col(j).dot(resid) / nd + col_sq(j) * old;
        updated = soft_threshold(rho, l1) / denom;
      }
      if (updated != old) {
        resid -= xc.col(j) * (updated - old);
        w(j) = updated;
        max_change = std::max(max_change, std::abs(updated - old));
      }
    }
    const double scale = std::max(1.0, w.size() ? w.cwiseAbs().maxCoeff() : 0.0);
    if (max_change <= tol * scale) {
      LinearFit f;
      f.coef = w;
      f.intercept = y_mean - x_mean.dot(w);
      f.iterations = sweep;
      return f;
    }
  }
  throw ConvergenceError("coordinate descent did not converge", max_sweeps, max_change);
}

/// Normalized median absolute value: a robust residual scale.
inline double mad_scale(const Vector& r) {
  std::vector<double> a(r.data(), r.data() + r.size());
  for (auto& v : a) v = std::abs(v);
  auto mid = a.begin() + static_cast<std::ptrdiff_t>(a.size() / 2);
  std::nth_element(a.begin(), mid, a.end());
  return *mid / 0.6744897501960817;
}

/// Huber regression by IRLS.
///
/// The residual scale is the normalized MAD of the current residuals,
/// re-estimated every iteration so outliers stop inflating it once the fit
/// moves off them. Residuals beyond delta * scale get weight
/// delta * scale / |r|. Stops when the coefficient change falls below
/// tol * (1 + max |beta|).
inline LinearFit fit_huber(const Matrix& x, const Vector& y, double delta, double tol, int max_iterations) {
  LinearFit f = fit_least_squares(x, y);
  const Eigen::Index n = x.rows(), p = x.cols();
  Vector resid = y - f.predict(x);
  const double floor = 1e-12 * std::max(1.0, y.cwiseAbs().maxCoeff());
  double scale = mad_scale(resid);
  if (!(scale > floor)) return f;  // (near) exact fit

  Matrix a(n, p + 1);
  a.col(0).setOnes();
  a.rightCols(p) = x;
  Vector beta(p + 1);
  beta << f.intercept, f.coef;
  double change = 0.0;
  for (int it = 1; it <= max_iterations; ++it) {
    const double cut = delta * scale;
    Vector sw(n);
    for (Eigen::Index i = 0; i < n; ++i) {
      const double r = std::abs(resid(i));
      sw(i) = std::sqrt(r <= cut ? 1.0 : cut / r);
    }
    const Matrix aw = sw.asDiagonal() * a;
    const Vector yw = sw.cwiseProduct(y);
    Eigen::ColPivHouseholderQR<Matrix> qr(aw);
    if (qr.rank() < p + 1) throw SingularFitError("huber weighted least squares");
    const Vector next = qr.solve(yw);
    change = (next - beta).cwiseAbs().maxCoeff();
    beta = next;
    resid = y - a * beta;
    if (const double s = mad_scale(resid); s > floor) scale = s;
    if (change <= tol * (1.0 + beta.cwiseAbs().maxCoeff())) {
      f.intercept = beta(0);
      f.coef = beta.tail(p);
      f.iterations = it;
      return f;
    }
  }
  throw ConvergenceError("huber IRLS did not converge", max_iterations, change);
}

/// Monomials of total degree 1..degree in the input columns, interactions
/// included, ordered by degree then lexicographically by column index.
inline std::vector<std::vector<int>> polynomial_terms(int n_features, int degree) {
  std::vector<std::vector<int>> terms;
  std::vector<int> cur;
  auto rec = [&](auto&& self, int start, int remaining) -> void {
    if (remaining == 0) {
      terms.push_back(cur);
      return;
    }
    for (int j = start; j < n_features; ++j) {
      cur.push_back(j);
      self(self, j, remaining - 1);
      cur.pop_back();
    }
  };
  for (int d = 1; d <= degree; ++d) rec(rec, 0, d);
  return terms;
}

inline Matrix polynomial_expand(const Matrix& x, int degree) {
  const auto terms = polynomial_terms(static_cast<int>(x.cols()), degree);
  Matrix out(x.rows(), static_cast<Eigen::Index>(terms.size()));
  for (std::size_t t = 0; t < terms.size(); ++t) {
    auto col = out.col(static_cast<Eigen::Index>(t));
    col.setOnes();
    for (int j : terms[t]) col.array() *= x.col(j).array();
  }
  return out;
}

// ---------------------------------------------------------------- SGD ----

/// (1/2n) sum (y - Xw - b)^2 + (alpha/2) ||w||^2
inline double sgd_objective(const Matrix& x, const Vector& y, const Vector& w, double b, double alpha) {
  const Vector r = y - ((x * w).array() + b).matrix();
  return 0.5 * r.squaredNorm() / static_cast<double>(x.rows()) + 0.5 * alpha * w.squaredNorm();
}

/// Gradient of sgd_objective; the last entry is the intercept derivative.
inline Vector sgd_gradient(const Matrix& x, const Vector& y, const Vector& w, double b, double alpha) {
  const double n = static_cast<double>(x.rows());
  const Vector r = y - ((x * w).array() + b).matrix();
  Vector g(w.size() + 1);
  g.head(w.size()) = -(x.transpose() * r) / n + alpha * w;
  g(w.size()) = -r.sum() / n;
  return g;
}

/// Per-sample SGD on squared loss with L2 penalty alpha, step
/// eta_t = eta0 / (1 + eta0 * alpha * t), sample order reshuffled each epoch.
inline LinearFit fit_sgd(const Matrix& x, const Vector& y, double eta0, double alpha, int epochs, std::uint64_t seed) {
  const Eigen::Index n = x.rows(), p = x.cols();
  if (n == 0) throw DomainError("sgd: empty training set");
  RandomStream rng(seed);
  std::vector<Eigen::Index> order(static_cast<std::size_t>(n));
  std::iota(order.begin(), order.end(), Eigen::Index{0});
  Vector w = Vector::Zero(p);
  double b = 0.0;
  double t = 0.0;
  for (int epoch = 1; epoch <= epochs; ++epoch) {
    for (std::size_t i = order.size() - 1; i > 0; --i)
      std::swap(order[i], order[static_cast<std::size_t>(rng.uniform_int(0, static_cast<std::int64_t>(i)))]);
    for (Eigen::Index i : order) {
      const double eta = eta0 / (1.0 + eta0 * alpha * t);
      const double r = y(i) - (x.row(i).dot(w) + b);
      w *= (1.0 - eta * alpha);
      w += (eta * r) * x.row(i).transpose();
      b += eta * r;
      t += 1.0;
    }
    if (!std::isfinite(b) || !w.allFinite())
      throw ConvergenceError("sgd diverged (non-finite iterate)", epoch, std::abs(b));
  }
  LinearFit f;
  f.coef = w;
  f.intercept = b;
  f.iterations = epochs;
  return f;
}

}  // namespace mmwpl
