// svback/svm.hpp

// Copyright 2026  The svback Authors
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//  http://www.apache.org/licenses/LICENSE-2.0
//
// THIS CODE IS PROVIDED *AS IS* BASIS, WITHOUT WARRANTIES OR CONDITIONS OF ANY
// KIND, EITHER EXPRESS OR IMPLIED, INCLUDING WITHOUT LIMITATION ANY IMPLIED
// WARRANTIES OR CONDITIONS OF TITLE, FITNESS FOR A PARTICULAR PURPOSE,
// MERCHANTABLITY OR NON-INFRINGEMENT.
// See the Apache 2 License for the specific language governing permissions and
// limitations under the License.

#pragma once

#include <algorithm>
#include <cmath>
#include <limits>
#include <span>
#include <vector>

#include <Eigen/Dense>

#include "svback/error.hpp"

namespace svback {

/// Inner products between training rows.  Cached in full up to
/// `max_cached_rows` rows, otherwise computed one column at a time.
class GramMatrix {
 public:
  explicit GramMatrix(const Eigen::MatrixXd& x, Eigen::Index max_cached_rows = 12000) : x_(&x) {
    if (x.rows() <= max_cached_rows) {
      cache_.noalias() = x * x.transpose();
      cached_ = true;
    }
    diag_ = x.rowwise().squaredNorm();
  }

  Eigen::Index size() const { return x_->rows(); }
  double diag(Eigen::Index i) const { return diag_[i]; }
  const Eigen::MatrixXd& rows() const { return *x_; }

  /// Column i; `scratch` backs the result when nothing is cached.
  const double* column(Eigen::Index i, Eigen::VectorXd& scratch) const {
    if (cached_) return cache_.col(i).data();
    scratch.noalias() = (*x_) * x_->row(i).transpose();
    return scratch.data();
  }

 private:
  const Eigen::MatrixXd* x_;
  Eigen::MatrixXd cache_;
  Eigen::VectorXd diag_;
  bool cached_ = false;
};

struct SvmOptions {
  double c = 1.0;          // C_reg
  double tol = 1e-6;       // bound on both KKT residual and duality gap
  long long max_iters = 0; // pair updates; 0 means max(10 * n * d, 100000)
};

/// Linear SVM f(x) = w.x + b, trained on the dual of
///   min 1/2 |w|^2 + C sum_i max(0, 1 - y_i (w.x_i + b)).
struct LinearSvm {
  Eigen::VectorXd w;
  double b = 0.0;
  double c = 1.0;
  std::vector<std::size_t> support_indices;  // ascending
  std::vector<double> dual_alphas;           // aligned with support_indices
  double kkt_residual = 0.0;                 // max violating pair gap
  double duality_gap = 0.0;
  double primal_objective = 0.0;
  double dual_objective = 0.0;               // 1/2 |w|^2 - sum alpha (minimized)
  long long iterations = 0;
  std::vector<double> objective_trace;       // dual objective after each sweep of n updates

  double decision(const Eigen::VectorXd& x) const { return w.dot(x) + b; }
};

namespace detail {

/// Interval of biases minimizing C sum hinge(y_i (f_i + b)) for fixed f.
inline std::pair<double, double> optimal_bias_interval(std::span<const double> f, std::span<const signed char> y) {
  std::vector<double> pos_kinks, neg_kinks;
  for (std::size_t i = 0; i < f.size(); ++i) (y[i] > 0 ? pos_kinks : neg_kinks).push_back(y[i] - f[i]);
  std::sort(pos_kinks.begin(), pos_kinks.end());
  std::sort(neg_kinks.begin(), neg_kinks.end());
  auto count_le = [](const std::vector<double>& v, double b) {
    return static_cast<long>(std::upper_bound(v.begin(), v.end(), b) - v.begin());
  };
  auto count_lt = [](const std::vector<double>& v, double b) {
    return static_cast<long>(std::lower_bound(v.begin(), v.end(), b) - v.begin());
  };
  const long n_pos = static_cast<long>(pos_kinks.size());
  // Right derivative / C at b: #neg(kink <= b) - #pos(kink > b).
  auto right = [&](double b) { return count_le(neg_kinks, b) - (n_pos - count_le(pos_kinks, b)); };
  // Left derivative / C at b: #neg(kink < b) - #pos(kink >= b).
  auto left = [&](double b) { return count_lt(neg_kinks, b) - (n_pos - count_lt(pos_kinks, b)); };

  std::vector<double> kinks(pos_kinks);
  kinks.insert(kinks.end(), neg_kinks.begin(), neg_kinks.end());
  std::sort(kinks.begin(), kinks.end());
  double lo = kinks.front(), hi = kinks.back();
  for (double k : kinks)
    if (right(k) >= 0) { lo = k; break; }
  for (auto it = kinks.rbegin(); it != kinks.rend(); ++it)
    if (left(*it) <= 0) { hi = *it; break; }
  return {lo, std::max(lo, hi)};
}

}  // namespace detail

/// Dual solver: SMO with second-order working-set selection.  Pair choice
/// breaks ties by lowest index, so the result depends only on the data and
/// its order.  The solve is tightened until both the KKT residual and the
/// duality gap are below opts.tol.
inline LinearSvm train_linear_svm(const GramMatrix& gram, std::span<const signed char> y, const SvmOptions& opts) {
  const Eigen::MatrixXd& x = gram.rows();
  const Eigen::Index n = x.rows();
  const Eigen::Index d = x.cols();
  if (static_cast<Eigen::Index>(y.size()) != n) fail<DataError>("train_linear_svm: label count mismatch");
  bool has_pos = false, has_neg = false;
  for (auto v : y) {
    if (v == 1) has_pos = true;
    else if (v == -1) has_neg = true;
    else fail<DataError>("train_linear_svm: labels must be +1 or -1");
  }
  if (!has_pos || !has_neg) fail<DataError>("train_linear_svm: both classes must be non-empty");
  if (!(opts.c > 0)) fail<ConfigError>("train_linear_svm: C must be positive");
  if (!(opts.tol > 0)) fail<ConfigError>("train_linear_svm: tol must be positive");

  const double C = opts.c;
  const long long max_iters = opts.max_iters > 0 ? opts.max_iters : std::max(10LL * n * std::max<Eigen::Index>(d, 1), 100000LL);
  constexpr double kTau = 1e-12;
  constexpr double kInf = std::numeric_limits<double>::infinity();

  std::vector<double> alpha(n, 0.0), grad(n, -1.0);
  Eigen::VectorXd w = Eigen::VectorXd::Zero(d);
  double alpha_sum = 0.0;
  Eigen::VectorXd scratch_i, scratch_j;

  LinearSvm out;
  out.c = C;

  auto in_up = [&](Eigen::Index t) { return y[t] > 0 ? alpha[t] < C : alpha[t] > 0; };
  auto in_low = [&](Eigen::Index t) { return y[t] > 0 ? alpha[t] > 0 : alpha[t] < C; };
  auto dual_objective = [&] { return 0.5 * w.squaredNorm() - alpha_sum; };

  // Returns the max violation m - M and the chosen pair (i, j), j < 0 if none.
  auto select = [&](Eigen::Index& i_out, Eigen::Index& j_out) {
    double gmax = -kInf;
    Eigen::Index i = -1;
    for (Eigen::Index t = 0; t < n; ++t)
      if (in_up(t) && -y[t] * grad[t] > gmax) {
        gmax = -y[t] * grad[t];
        i = t;
      }
    double gmax2 = -kInf, best = kInf;
    Eigen::Index j = -1;
    const double* ki = i >= 0 ? gram.column(i, scratch_i) : nullptr;
    for (Eigen::Index t = 0; t < n; ++t) {
      if (!in_low(t)) continue;
      const double yg = y[t] * grad[t];
      gmax2 = std::max(gmax2, yg);
      const double diff = gmax + yg;
      if (i >= 0 && diff > 0) {
        double a = gram.diag(i) + gram.diag(t) - 2.0 * ki[t];
        if (a <= 0) a = kTau;
        const double obj = -(diff * diff) / a;
        if (obj < best) {
          best = obj;
          j = t;
        }
      }
    }
    i_out = i;
    j_out = j;
    return gmax + gmax2;
  };

  auto finalize_bias = [&](std::vector<double>& f) {
    double ub = kInf, lb = -kInf, sum_free = 0.0;
    long nr_free = 0;
    for (Eigen::Index t = 0; t < n; ++t) {
      const double yg = y[t] * grad[t];
      if (alpha[t] >= C) {
        if (y[t] < 0) ub = std::min(ub, yg);
        else lb = std::max(lb, yg);
      } else if (alpha[t] <= 0) {
        if (y[t] > 0) ub = std::min(ub, yg);
        else lb = std::max(lb, yg);
      } else {
        ++nr_free;
        sum_free += yg;
      }
    }
    const double rho = nr_free > 0 ? sum_free / nr_free : 0.5 * (ub + lb);
    f.resize(n);
    Eigen::Map<Eigen::VectorXd>(f.data(), n).noalias() = x * w;
    auto [lo, hi] = detail::optimal_bias_interval(f, y);
    return std::clamp(-rho, lo, hi);
  };

  auto primal_objective = [&](const std::vector<double>& f, double b) {
    double hinge = 0.0;
    for (Eigen::Index t = 0; t < n; ++t) hinge += std::max(0.0, 1.0 - y[t] * (f[t] + b));
    return 0.5 * w.squaredNorm() + C * hinge;
  };

  double eps = opts.tol;
  long long iter = 0;
  std::vector<double> f;
  while (true) {
    Eigen::Index i, j;
    double violation = select(i, j);
    if (violation <= eps || j < 0) {
      const double b = finalize_bias(f);
      const double primal = primal_objective(f, b);
      const double dual = dual_objective();
      const double gap = primal + dual;  // P - D with D = -dual_objective
      if ((gap <= opts.tol && violation <= opts.tol) || j < 0) {
        out.w = w;
        out.b = b;
        out.kkt_residual = std::max(0.0, violation);
        out.duality_gap = gap;
        out.primal_objective = primal;
        out.dual_objective = dual;
        out.iterations = iter;
        out.objective_trace.push_back(dual);
        break;
      }
      eps *= 0.1;
      if (eps < 1e-15)
        fail<NumericalError>("train_linear_svm: duality gap stalled at ", gap, " (tol ", opts.tol, ")");
      continue;
    }
    if (iter >= max_iters) {
      const double b = finalize_bias(f);
      fail<NumericalError>("train_linear_svm: no convergence after ", iter, " updates; duality gap ",
                           primal_objective(f, b) + dual_objective(), ", KKT residual ", violation);
    }

    const double* ki = gram.column(i, scratch_i);
    const double* kj = gram.column(j, scratch_j);
    const double old_i = alpha[i], old_j = alpha[j];
    if (y[i] != y[j]) {
      double quad = gram.diag(i) + gram.diag(j) - 2.0 * ki[j];
      if (quad <= 0) quad = kTau;
      const double delta = (-grad[i] - grad[j]) / quad;
      const double diff = alpha[i] - alpha[j];
      alpha[i] += delta;
      alpha[j] += delta;
      if (diff > 0) {
        if (alpha[j] < 0) { alpha[j] = 0; alpha[i] = diff; }
      } else {
        if (alpha[i] < 0) { alpha[i] = 0; alpha[j] = -diff; }
      }
      if (diff > 0) {
        if (alpha[i] > C) { alpha[i] = C; alpha[j] = C - diff; }
      } else {
        if (alpha[j] > C) { alpha[j] = C; alpha[i] = C + diff; }
      }
    } else {
      double quad = gram.diag(i) + gram.diag(j) - 2.0 * ki[j];
      if (quad <= 0) quad = kTau;
      const double delta = (grad[i] - grad[j]) / quad;
      const double sum = alpha[i] + alpha[j];
      alpha[i] -= delta;
      alpha[j] += delta;
      if (sum > C) {
        if (alpha[i] > C) { alpha[i] = C; alpha[j] = sum - C; }
      } else {
        if (alpha[j] < 0) { alpha[j] = 0; alpha[i] = sum; }
      }
      if (sum > C) {
        if (alpha[j] > C) { alpha[j] = C; alpha[i] = sum - C; }
      } else {
        if (alpha[i] < 0) { alpha[i] = 0; alpha[j] = sum; }
      }
    }
    const double di = alpha[i] - old_i, dj = alpha[j] - old_j;
    const double ci = y[i] * di, cj = y[j] * dj;
    for (Eigen::Index t = 0; t < n; ++t) grad[t] += y[t] * (ci * ki[t] + cj * kj[t]);
    w.noalias() += ci * x.row(i).transpose();
    w.noalias() += cj * x.row(j).transpose();
    alpha_sum += di + dj;
    ++iter;
    if (iter % n == 0) out.objective_trace.push_back(dual_objective());
  }

  const double alpha_tol = 1e-12 * C;
  for (Eigen::Index t = 0; t < n; ++t)
    if (alpha[t] > alpha_tol) {
      out.support_indices.push_back(static_cast<std::size_t>(t));
      out.dual_alphas.push_back(alpha[t]);
    }
  return out;
}

inline LinearSvm train_linear_svm(const Eigen::MatrixXd& x, std::span<const signed char> y, const SvmOptions& opts) {
  GramMatrix gram(x);
  return train_linear_svm(gram, y, opts);
}

/// Rows of `positives` get label +1, rows of `negatives` -1; support indices
/// refer to the stacked matrix [positives; negatives].
inline LinearSvm train_linear_svm(const Eigen::MatrixXd& positives, const Eigen::MatrixXd& negatives,
                                  const SvmOptions& opts) {
  if (positives.rows() == 0 || negatives.rows() == 0)
    fail<DataError>("train_linear_svm: both classes must be non-empty");
  if (positives.cols() != negatives.cols()) fail<DataError>("train_linear_svm: dimension mismatch");
  Eigen::MatrixXd x(positives.rows() + negatives.rows(), positives.cols());
  x << positives, negatives;
  std::vector<signed char> y(static_cast<std::size_t>(x.rows()), -1);
  std::fill(y.begin(), y.begin() + positives.rows(), 1);
  return train_linear_svm(x, y, opts);
}

}  // namespace svback
