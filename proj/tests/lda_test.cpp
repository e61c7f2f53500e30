// tests/lda_test.cpp

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

#include <algorithm>
#include <numeric>
#include <sstream>

#include <gtest/gtest.h>

#include "fixtures.hpp"
#include "oracles.hpp"
#include "svback/lda.hpp"

namespace svback {
namespace {

using test::seg;
using test::vec;

Corpus axis_example() {
  Corpus c(2);
  c.add(seg("a1", vec({0, 0}), "A"));
  c.add(seg("a2", vec({0, 2}), "A"));
  c.add(seg("b1", vec({4, 0}), "B"));
  c.add(seg("b2", vec({4, 2}), "B"));
  return c;
}

TEST(Scatter, HandExample) {
  const ScatterPair sp = compute_scatter(axis_example());
  EXPECT_EQ(sp.class_count, 2);
  EXPECT_LT((sp.within - Eigen::Matrix2d{{0, 0}, {0, 4}}).norm(), 1e-12);
  EXPECT_LT((sp.between - Eigen::Matrix2d{{16, 0}, {0, 0}}).norm(), 1e-12);
}

TEST(Scatter, IdenticalPointsGiveZero) {
  Corpus c(3);
  for (int i = 0; i < 6; ++i) c.add(seg("s" + std::to_string(i), vec({1, 2, 3}), i % 2 ? "A" : "B"));
  const ScatterPair sp = compute_scatter(c);
  EXPECT_LT(sp.between.norm(), 1e-12);
  EXPECT_LT(sp.within.norm(), 1e-12);
}

TEST(Scatter, DecomposesTotalScatter) {
  const Corpus c = test::gaussian_classes(5, 4, 7, 2.0, 3);
  const ScatterPair sp = compute_scatter(c);
  Eigen::MatrixXd x = c.matrix();
  x.rowwise() -= x.colwise().mean();
  const double total = (x.transpose() * x).trace();
  EXPECT_NEAR(sp.between.trace() + sp.within.trace(), total, 1e-9 * total);
  EXPECT_LT((sp.between - sp.between.transpose()).norm(), 1e-10);
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> eb(sp.between), ew(sp.within);
  EXPECT_GE(eb.eigenvalues().minCoeff(), -1e-8 * sp.between.trace());
  EXPECT_GE(ew.eigenvalues().minCoeff(), -1e-8 * sp.within.trace());
}

TEST(Scatter, NeedsTwoLabeledClasses) {
  Corpus one(1);
  one.add(seg("a", vec({1}), "A"));
  one.add(seg("b", vec({2}), "A"));
  EXPECT_THROW(compute_scatter(one), DataError);
  Corpus unl = axis_example();
  unl.add(seg("u", vec({1, 1})));
  EXPECT_THROW(compute_scatter(unl), DataError);
}

TEST(FitLda, SeparatingAxisExample) {
  const Projection p = fit_lda(axis_example(), 1);
  EXPECT_LT((p.matrix.row(0).transpose() - vec({1, 0})).norm(), 1e-9);
  EXPECT_EQ(p.output_dim(), 1);
  EXPECT_EQ(p.input_dim(), 2);
}

TEST(FitLda, SingularWithinScatterNeedsRidge) {
  try {
    fit_lda(axis_example(), 1, 0.0);
    FAIL();
  } catch (const NumericalError& e) {
    EXPECT_NE(std::string(e.what()).find("ridge"), std::string::npos);
  }
  EXPECT_THROW(fit_lda(axis_example(), 3), ConfigError);
}

TEST(FitLda, FullDimensionIsInvertible) {
  const Corpus c = test::gaussian_classes(4, 3, 10, 1.0, 9);
  const Projection p = fit_lda(c, 4, 1e-3);
  EXPECT_TRUE(p.objective_values.allFinite());
  EXPECT_GT(std::abs(p.matrix.determinant()), 1e-6);
  for (int i = 0; i < 4; ++i) {
    EXPECT_NEAR(p.matrix.row(i).norm(), 1.0, 1e-12);
    if (i) {
      EXPECT_GE(p.objective_values[i - 1], p.objective_values[i]);
    }
  }
}

TEST(FitLda, MatchesWhitenedEigenOracle) {
  for (std::uint64_t seed = 1; seed <= 10; ++seed) {
    const Corpus c = test::gaussian_classes(4, 3, 12, 1.5, seed);
    const Projection p = fit_lda(c, 2, 0.0);
    const ScatterPair sp = compute_scatter(c);
    const auto ref = oracle::whitened_eigen(sp.between, sp.within);
    for (int i = 0; i < 2; ++i) EXPECT_NEAR(p.objective_values[i], ref.values[i], 1e-8 * std::max(1.0, ref.values[i]));
    Eigen::MatrixXd ref_rows = ref.vectors.leftCols(2).transpose();
    EXPECT_LT(oracle::max_principal_angle(p.matrix, ref_rows), 1e-6);
  }
}

TEST(FitLda, RatioAfterProjectionEqualsObjective) {
  const Corpus c = test::gaussian_classes(5, 4, 9, 1.0, 4);
  const Projection p = fit_lda(c, 1, 0.0);
  const ScatterPair sp = compute_scatter(project(p, c));
  EXPECT_NEAR(sp.between(0, 0) / sp.within(0, 0), p.objective_values[0], 1e-8 * p.objective_values[0]);
}

TEST(FitLda, RayleighRatioBoundedByTopEigenvalue) {
  const Corpus c = test::gaussian_classes(6, 4, 8, 1.0, 12);
  const ScatterPair sp = compute_scatter(c);
  const Projection p = fit_lda(c, 1, 0.0);
  Rng rng(5);
  for (int k = 0; k < 1000; ++k) {
    const Eigen::VectorXd a = oracle::random_vector(6, rng).normalized();
    EXPECT_LE(a.dot(sp.between * a) / a.dot(sp.within * a), p.objective_values[0] + 1e-8);
  }
}

TEST(FitLda, InvariantToSegmentOrder) {
  const Corpus c = test::gaussian_classes(5, 3, 10, 1.0, 8);
  std::vector<std::size_t> order(c.size());
  std::iota(order.begin(), order.end(), 0);
  std::reverse(order.begin(), order.end());
  std::rotate(order.begin(), order.begin() + 7, order.end());
  Corpus shuffled(c.dim());
  for (auto i : order) shuffled.add(c[i]);
  const Projection a = fit_lda(c, 2), b = fit_lda(shuffled, 2);
  EXPECT_LT((a.matrix - b.matrix).cwiseAbs().maxCoeff(), 1e-8);
}

TEST(Project, IdentityAndSelection) {
  const Corpus c = test::gaussian_classes(3, 2, 3, 1.0, 1);
  Projection id{Eigen::MatrixXd::Identity(3, 3), Eigen::VectorXd::Ones(3), {}};
  EXPECT_EQ(project(id, c), c);
  Corpus one(2);
  one.add(seg("x", vec({3, 4})));
  Projection first{Eigen::MatrixXd{{1, 0}}, vec({1}), {}};
  const Corpus out = project(first, one);
  EXPECT_EQ(out.dim(), 1);
  EXPECT_EQ(out[0].vector, vec({3}));
  EXPECT_THROW(project(first, c), DataError);
}

TEST(Compose, EqualsSequentialApplication) {
  Rng rng(4);
  Projection inner{Eigen::MatrixXd::Random(4, 6), Eigen::VectorXd::Ones(4), oracle::random_vector(6, rng)};
  Projection outer{Eigen::MatrixXd::Random(2, 4), Eigen::VectorXd::Ones(2), oracle::random_vector(4, rng)};
  const Projection both = compose(outer, inner);
  for (int k = 0; k < 100; ++k) {
    const Eigen::VectorXd v = oracle::random_vector(6, rng, 3.0);
    EXPECT_LT((both.apply(v) - outer.apply(inner.apply(v))).cwiseAbs().maxCoeff(), 1e-10);
  }
}

TEST(ProjectionIo, RoundTrip) {
  const Projection p = fit_lda(test::gaussian_classes(4, 3, 5, 1.0, 2), 2);
  Projection q = p;
  q.mean = vec({0.1, 0.2, -1.0 / 3.0, 4});
  for (const auto& x : {p, q}) {
    std::stringstream ss;
    write_projection(x, ss);
    const Projection r = read_projection(ss);
    EXPECT_EQ(r.matrix, x.matrix);
    EXPECT_EQ(r.objective_values, x.objective_values);
    EXPECT_EQ(r.mean, x.mean);
  }
  std::stringstream bad("#rows 1 #cols 2\n1 2 3\n");
  EXPECT_THROW(read_projection(bad), DataError);
}

}  // namespace
}  // namespace svback
