// svback/fusion.hpp

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

#include <cmath>
#include <span>
#include <string>
#include <vector>

#include <Eigen/Dense>

#include "svback/corpus.hpp"
#include "svback/text.hpp"

namespace svback {

/// fused = weights . scores + bias
struct FusionModel {
  Eigen::VectorXd weights;
  double bias = 0.0;
  double gradient_norm = 0.0;
  int iterations = 0;
};

namespace detail {

inline double softplus(double z) { return z > 0 ? z + std::log1p(std::exp(-z)) : std::log1p(std::exp(z)); }
inline double sigmoid(double z) {
  if (z >= 0) return 1.0 / (1.0 + std::exp(-z));
  const double e = std::exp(z);
  return e / (1.0 + e);
}

}  // namespace detail

/// Class-balanced logistic loss summed over trials (targets and nontargets
/// each carry half of the total weight n, so the affine output is an LLR) plus
/// l2/2 |weights|^2.  The bias is not penalized.
inline double fusion_objective(const FusionModel& m, const Eigen::MatrixXd& scores, std::span<const Key> keys,
                               double l2) {
  long n_tar = 0;
  for (Key k : keys) n_tar += k == Key::target;
  const long n_non = static_cast<long>(keys.size()) - n_tar;
  const Eigen::VectorXd z = scores * m.weights + Eigen::VectorXd::Constant(scores.rows(), m.bias);
  double loss = 0.0;
  for (Eigen::Index i = 0; i < z.size(); ++i)
    loss += keys[i] == Key::target ? 0.5 * z.size() * detail::softplus(-z[i]) / n_tar
                                   : 0.5 * z.size() * detail::softplus(z[i]) / n_non;
  return loss + 0.5 * l2 * m.weights.squaredNorm();
}

/// Newton's method with backtracking to gradient norm <= grad_tol.
inline FusionModel fuse_fit(const Eigen::MatrixXd& scores, std::span<const Key> keys, double l2 = 1e-6,
                            double grad_tol = 1e-8, int max_iters = 100) {
  const Eigen::Index n = scores.rows(), m = scores.cols();
  if (m < 1) fail<DataError>("fuse_fit: need at least one system");
  if (static_cast<Eigen::Index>(keys.size()) != n) fail<DataError>("fuse_fit: key count does not match score rows");
  if (l2 < 0) fail<ConfigError>("fuse_fit: l2 penalty must be non-negative");
  long n_tar = 0;
  for (Key k : keys) n_tar += k == Key::target;
  const long n_non = n - n_tar;
  if (n_tar == 0 || n_non == 0) fail<DataError>("fuse_fit: need both target and nontarget trials");

  Eigen::MatrixXd z_mat(n, m + 1);
  z_mat << scores, Eigen::VectorXd::Ones(n);
  Eigen::VectorXd weight(n), target(n);
  for (Eigen::Index i = 0; i < n; ++i) {
    const bool tar = keys[i] == Key::target;
    weight[i] = tar ? 0.5 * n / n_tar : 0.5 * n / n_non;
    target[i] = tar ? 1.0 : 0.0;
  }
  Eigen::VectorXd penalty = Eigen::VectorXd::Constant(m + 1, l2);
  penalty[m] = 0.0;

  auto objective = [&](const Eigen::VectorXd& theta) {
    const Eigen::VectorXd z = z_mat * theta;
    double loss = 0.0;
    for (Eigen::Index i = 0; i < n; ++i) loss += weight[i] * (target[i] > 0 ? detail::softplus(-z[i]) : detail::softplus(z[i]));
    return loss + 0.5 * (penalty.array() * theta.array().square()).sum();
  };

  Eigen::VectorXd theta = Eigen::VectorXd::Zero(m + 1);
  double f = objective(theta);
  FusionModel out;
  for (int it = 0;; ++it) {
    const Eigen::VectorXd z = z_mat * theta;
    Eigen::VectorXd r(n), h(n);
    for (Eigen::Index i = 0; i < n; ++i) {
      const double p = detail::sigmoid(z[i]);
      r[i] = weight[i] * (p - target[i]);
      h[i] = weight[i] * p * (1.0 - p);
    }
    const Eigen::VectorXd grad = z_mat.transpose() * r + penalty.cwiseProduct(theta);
    out.gradient_norm = grad.norm();
    out.iterations = it;
    if (out.gradient_norm <= grad_tol) break;
    if (it >= max_iters)
      fail<NumericalError>("fuse_fit: no convergence after ", max_iters, " iterations; gradient norm ",
                           out.gradient_norm);
    Eigen::MatrixXd hess = z_mat.transpose() * h.asDiagonal() * z_mat;
    hess.diagonal() += penalty;
    Eigen::LDLT<Eigen::MatrixXd> ldlt(hess);
    Eigen::VectorXd step = ldlt.solve(-grad);
    if (ldlt.info() != Eigen::Success || !step.allFinite() || step.dot(grad) >= 0) step = -grad;
    double t = 1.0, f_new = objective(theta + step);
    // Once the predicted decrease is below the rounding noise of the summed
    // loss, the full Newton step is taken without a line search.
    const double predicted = -step.dot(grad);
    if (predicted > 1e-13 * (1.0 + std::abs(f))) {
      while (f_new > f + 1e-4 * t * step.dot(grad) && t > 1e-12) {
        t *= 0.5;
        f_new = objective(theta + t * step);
      }
      if (t <= 1e-12 && f_new >= f)
        fail<NumericalError>("fuse_fit: line search failed; gradient norm ", out.gradient_norm);
    }
    theta += t * step;
    f = f_new;
  }
  out.weights = theta.head(m);
  out.bias = theta[m];
  return out;
}

inline std::vector<double> fuse_apply(const FusionModel& model, const Eigen::MatrixXd& scores) {
  if (scores.cols() != model.weights.size())
    fail<DataError>("fuse_apply: ", scores.cols(), " score columns for ", model.weights.size(), " weights");
  const Eigen::VectorXd fused = scores * model.weights + Eigen::VectorXd::Constant(scores.rows(), model.bias);
  return {fused.data(), fused.data() + fused.size()};
}

inline void write_fusion(const FusionModel& m, std::ostream& os) {
  os << "weights";
  for (Eigen::Index i = 0; i < m.weights.size(); ++i) os << ' ' << format_double(m.weights[i]);
  os << "\nbias " << format_double(m.bias) << '\n';
}

inline void write_fusion(const FusionModel& m, const std::string& path) {
  auto os = open_output(path);
  write_fusion(m, os);
}

inline FusionModel read_fusion(std::istream& is, const std::string& name = "<stream>") {
  FusionModel m;
  bool have_w = false, have_b = false;
  std::string line;
  int line_no = 0;
  while (std::getline(is, line)) {
    ++line_no;
    auto tok = split_ws(trim(line));
    if (tok.empty()) continue;
    std::vector<double> v;
    for (std::size_t i = 1; i < tok.size(); ++i) {
      auto x = parse_double(tok[i]);
      if (!x) fail<DataError>(name, ":", line_no, ": bad number '", tok[i], "'");
      v.push_back(*x);
    }
    if (tok[0] == "weights") {
      if (v.empty()) fail<DataError>(name, ":", line_no, ": no weights");
      m.weights = Eigen::Map<Eigen::VectorXd>(v.data(), static_cast<Eigen::Index>(v.size()));
      have_w = true;
    } else if (tok[0] == "bias" && v.size() == 1) {
      m.bias = v[0];
      have_b = true;
    } else {
      fail<DataError>(name, ":", line_no, ": unexpected line");
    }
  }
  if (!have_w || !have_b) fail<DataError>(name, ": fusion model needs 'weights' and 'bias'");
  return m;
}

inline FusionModel read_fusion(const std::string& path) {
  auto is = open_input(path);
  return read_fusion(is, path);
}

}  // namespace svback
