// tests/fixtures.hpp

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

#include <initializer_list>
#include <optional>
#include <string>
#include <vector>

#include <Eigen/Dense>

#include "svback/corpus.hpp"
#include "svback/rng.hpp"

namespace svback::test {

inline Eigen::VectorXd vec(std::initializer_list<double> v) {
  Eigen::VectorXd out(static_cast<Eigen::Index>(v.size()));
  Eigen::Index i = 0;
  for (double x : v) out[i++] = x;
  return out;
}

inline Segment seg(std::string id, Eigen::VectorXd v, std::optional<std::string> spk = std::nullopt,
                   Domain dom = Domain::out_of_domain, std::optional<Gender> g = std::nullopt) {
  Segment s;
  s.id = std::move(id);
  s.vector = std::move(v);
  s.speaker = std::move(spk);
  s.domain = dom;
  s.gender = g;
  return s;
}

/// Labeled corpus from rows of `x` with class labels "c<label>".
inline Corpus labeled(const Eigen::MatrixXd& x, const std::vector<int>& labels,
                      Domain dom = Domain::out_of_domain) {
  Corpus c(static_cast<int>(x.cols()));
  for (Eigen::Index i = 0; i < x.rows(); ++i)
    c.add(seg("s" + std::to_string(i), x.row(i).transpose(), "c" + std::to_string(labels[i]), dom));
  return c;
}

inline Corpus unlabeled(const Eigen::MatrixXd& x, Domain dom = Domain::in_domain_major) {
  Corpus c(static_cast<int>(x.cols()));
  for (Eigen::Index i = 0; i < x.rows(); ++i) c.add(seg("u" + std::to_string(i), x.row(i).transpose(), std::nullopt, dom));
  return c;
}

/// Gaussian classes with random means: n per class, class means scaled by `sep`.
inline Corpus gaussian_classes(int d, int classes, int n, double sep, std::uint64_t seed) {
  Rng rng(seed);
  Eigen::MatrixXd x(classes * n, d);
  std::vector<int> labels;
  for (int c = 0; c < classes; ++c) {
    Eigen::VectorXd m(d);
    for (int j = 0; j < d; ++j) m[j] = sep * rng.normal();
    for (int i = 0; i < n; ++i) {
      for (int j = 0; j < d; ++j) x(c * n + i, j) = m[j] + rng.normal();
      labels.push_back(c);
    }
  }
  return labeled(x, labels);
}

}  // namespace svback::test
