// tests/cluster_test.cpp

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

#include <set>

#include <gtest/gtest.h>

#include "fixtures.hpp"
#include "oracles.hpp"
#include "svback/cluster.hpp"

namespace svback {
namespace {

using test::seg;
using test::vec;

Corpus gendered(int speakers, double gender_gap, std::uint64_t seed, double sigma_w = 0.1) {
  SynthConfig cfg;
  cfg.dimension = 6;
  cfg.speakers = {{Domain::out_of_domain, speakers}};
  cfg.min_segments = 3;
  cfg.max_segments = 6;
  cfg.between_speaker_std = 1.0;
  cfg.within_speaker_std = sigma_w;
  cfg.gender_shift = random_direction(6, seed + 100, gender_gap);
  cfg.seed = seed;
  return generate_corpus(cfg);
}

double inertia_of(const Eigen::MatrixXd& x, const std::vector<int>& labels, int k) {
  Eigen::MatrixXd sums = Eigen::MatrixXd::Zero(k, x.cols());
  std::vector<int> n(k, 0);
  for (Eigen::Index i = 0; i < x.rows(); ++i) {
    sums.row(labels[i]) += x.row(i);
    ++n[labels[i]];
  }
  double total = 0;
  for (Eigen::Index i = 0; i < x.rows(); ++i)
    if (n[labels[i]]) total += (x.row(i) - sums.row(labels[i]) / n[labels[i]]).squaredNorm();
  return total;
}

TEST(Gender, SymmetricMeansGiveAxisAndZeroThreshold) {
  Corpus c(2);
  c.add(seg("f1", vec({-2, 1}), "a", Domain::out_of_domain, Gender::female));
  c.add(seg("f2", vec({-2, -1}), "a", Domain::out_of_domain, Gender::female));
  c.add(seg("m1", vec({2, 1}), "b", Domain::out_of_domain, Gender::male));
  c.add(seg("m2", vec({2, -1}), "b", Domain::out_of_domain, Gender::male));
  const GenderModel g = fit_gender(c);
  EXPECT_LT((g.direction - vec({1, 0})).norm(), 1e-9);
  EXPECT_NEAR(g.threshold, 0.0, 1e-12);
  EXPECT_NEAR(g.direction.norm(), 1.0, 1e-12);
  EXPECT_EQ(g.classify(vec({0.5, 3})), Gender::male);
}

TEST(Gender, SeparatedSyntheticGendersClassifyPerfectly) {
  const Corpus c = gendered(40, 12.0, 3);  // gap 12 sigma_b
  const GenderModel g = fit_gender(c);
  for (const auto& s : c) EXPECT_EQ(g.classify(s.vector), *s.gender) << s.id;
}

TEST(Gender, DegenerateInputsAreErrors) {
  Corpus one(1);
  one.add(seg("a", vec({1}), "a", Domain::out_of_domain, Gender::female));
  EXPECT_THROW(fit_gender(one), DataError);
  Corpus same(1);
  same.add(seg("a", vec({1}), "a", Domain::out_of_domain, Gender::female));
  same.add(seg("b", vec({1}), "b", Domain::out_of_domain, Gender::male));
  EXPECT_THROW(fit_gender(same), DataError);
}

TEST(KMeans, SeparatedPairs) {
  const Eigen::MatrixXd x{{0, 0}, {0, 1}, {10, 0}, {10, 1}};
  const KMeansResult r = kmeans(x, 2, 1);
  EXPECT_EQ(r.labels[0], r.labels[1]);
  EXPECT_EQ(r.labels[2], r.labels[3]);
  EXPECT_NE(r.labels[0], r.labels[2]);
  EXPECT_NEAR(r.inertia, 1.0, 1e-12);
}

TEST(KMeans, KEqualsNGivesZeroInertia) {
  Rng rng(2);
  Eigen::MatrixXd x(7, 3);
  for (int i = 0; i < 7; ++i) x.row(i) = oracle::random_vector(3, rng).transpose();
  const KMeansResult r = kmeans(x, 7, 5);
  EXPECT_EQ(r.inertia, 0.0);
  EXPECT_EQ(std::set<int>(r.labels.begin(), r.labels.end()).size(), 7u);
}

TEST(KMeans, BeatsRandomAssignments) {
  Rng rng(6);
  Eigen::MatrixXd x(20, 2);
  for (int i = 0; i < 20; ++i) x.row(i) = oracle::random_vector(2, rng, 2.0).transpose();
  const KMeansResult r = kmeans(x, 3, 11);
  EXPECT_NEAR(r.inertia, inertia_of(x, r.labels, 3), 1e-9);
  for (int t = 0; t < 1000; ++t) {
    std::vector<int> labels(20);
    for (auto& l : labels) l = static_cast<int>(rng.below(3));
    EXPECT_LE(r.inertia, inertia_of(x, labels, 3) + 1e-12);
  }
}

TEST(KMeans, InertiaTraceNonIncreasingAndDeterministic) {
  Rng rng(7);
  Eigen::MatrixXd x(300, 4);
  for (int i = 0; i < 300; ++i) x.row(i) = oracle::random_vector(4, rng).transpose();
  const KMeansResult a = kmeans(x, 12, 3), b = kmeans(x, 12, 3);
  EXPECT_EQ(a.labels, b.labels);
  EXPECT_EQ(a.inertia, b.inertia);
  for (std::size_t i = 1; i < a.inertia_trace.size(); ++i) EXPECT_LE(a.inertia_trace[i], a.inertia_trace[i - 1] + 1e-9);
}

TEST(KMeans, BadKIsError) {
  const Eigen::MatrixXd x{{0, 0}, {1, 1}};
  EXPECT_THROW(kmeans(x, 3, 1), DataError);
  EXPECT_THROW(kmeans(x, 0, 1), ConfigError);
}

TEST(KMeans, DuplicatePointsStillTerminate) {
  const Eigen::MatrixXd x = Eigen::MatrixXd::Ones(6, 2);
  const KMeansResult r = kmeans(x, 3, 1);
  EXPECT_EQ(r.inertia, 0.0);
  EXPECT_EQ(r.labels.size(), 6u);
}

TEST(SplitClusters, ProportionalWithTiesToLarger) {
  EXPECT_EQ(split_clusters(10, 30, 70), std::make_pair(3, 7));
  EXPECT_EQ(split_clusters(75, 50, 50), std::make_pair(38, 37));
  EXPECT_EQ(split_clusters(75, 40, 60), std::make_pair(30, 45));
  EXPECT_EQ(split_clusters(3, 10, 30), std::make_pair(1, 2));  // 0.75 rounds up
  EXPECT_EQ(split_clusters(5, 0, 9), std::make_pair(0, 5));
  EXPECT_EQ(split_clusters(300, 2, 500), std::make_pair(1, 299));
}

TEST(ClusterUnlabeled, PurityOnSeparatedSpeakers) {
  for (std::uint64_t seed = 1; seed <= 5; ++seed) {
    SynthConfig cfg;
    cfg.dimension = 8;
    cfg.speakers = {{Domain::in_domain_major, 10}};
    cfg.min_segments = 4;
    cfg.max_segments = 8;
    cfg.between_speaker_std = 1.0;
    cfg.within_speaker_std = 0.1;
    cfg.gender_shift = random_direction(8, seed + 7, 12.0);
    cfg.seed = seed;
    const Corpus truth = generate_corpus(cfg);
    std::map<std::string, int> true_per_gender{{"F", 0}, {"M", 0}};
    std::set<std::string> seen;
    for (const auto& s : truth)
      if (seen.insert(*s.speaker).second) ++true_per_gender[std::string(to_string(*s.gender))];
    Corpus unl(8);
    for (const auto& s : truth) {
      Segment t = s;
      t.speaker.reset();
      unl.add(t);
    }
    const GenderModel g = fit_gender(truth);
    const ClusterAssignment a = cluster_unlabeled(unl, g, true_per_gender, seed);
    std::vector<std::string> t, c;
    for (const auto& s : truth) {
      t.push_back(*s.speaker);
      c.push_back(a.labels.at(s.id));
    }
    EXPECT_EQ(purity(t, c), 1.0) << "seed " << seed;
    EXPECT_EQ(a.produced, 10);
  }
}

TEST(ClusterUnlabeled, CoversEverySegmentWithDisjointNamespaces) {
  const Corpus c = gendered(30, 3.0, 4, 0.5);
  const GenderModel g = fit_gender(c);
  const ClusterAssignment a = cluster_unlabeled(c, g, 12, 9, {}, "major_");
  EXPECT_EQ(a.labels.size(), c.size());
  EXPECT_EQ(a.requested, 12);
  std::set<std::string> names;
  for (const auto& s : c) {
    const std::string& l = a.labels.at(s.id);
    EXPECT_TRUE(l.rfind("major_F_", 0) == 0 || l.rfind("major_M_", 0) == 0) << l;
    names.insert(l);
    const bool is_male = g.classify(s.vector) == Gender::male;
    EXPECT_EQ(l[6], is_male ? 'M' : 'F');
  }
  EXPECT_EQ(static_cast<int>(names.size()), a.produced);
  const Corpus relabeled = apply_assignment(c, a);
  for (const auto& s : relabeled) EXPECT_EQ(*s.speaker, a.labels.at(s.id));
}

TEST(ClusterUnlabeled, SingleGenderWarnsAndUsesOneSubset) {
  const Corpus c = gendered(30, 5.0, 5);
  const GenderModel g = fit_gender(c);
  const Corpus females = c.filter([](const Segment& s) { return *s.gender == Gender::female; });
  const ClusterAssignment a = cluster_unlabeled(females, g, {{"F", 4}, {"M", 4}}, 1);
  EXPECT_EQ(a.labels.size(), females.size());
  EXPECT_EQ(a.warnings.size(), 1u);
  EXPECT_EQ(a.centroids.count("M"), 0u);
  const ClusterAssignment b = cluster_unlabeled(females, g, 8, 1);
  EXPECT_EQ(b.produced, 8);
  EXPECT_TRUE(b.warnings.empty());
}

TEST(ClusterUnlabeled, FullScalePresetSizesAreAccepted) {
  SynthConfig cfg;
  cfg.dimension = 5;
  cfg.speakers = {{Domain::in_domain_minor, 40}, {Domain::in_domain_major, 120}};
  cfg.min_segments = 3;
  cfg.max_segments = 4;
  cfg.gender_shift = random_direction(5, 1, 3.0);
  cfg.seed = 3;
  const Corpus c = generate_corpus(cfg);
  const GenderModel g = fit_gender(c);
  const ClusterAssignment minor = cluster_unlabeled(c.in_domains({Domain::in_domain_minor}), g, 75, 1, {20, 1});
  const ClusterAssignment major = cluster_unlabeled(c.in_domains({Domain::in_domain_major}), g, 300, 1, {20, 1});
  EXPECT_EQ(minor.requested, 75);
  EXPECT_EQ(major.requested, 300);
  EXPECT_GT(minor.produced, 60);
  EXPECT_LE(minor.produced, 75);
  EXPECT_LE(major.produced, 300);
  EXPECT_GT(major.produced, 250);
}

}  // namespace
}  // namespace svback
