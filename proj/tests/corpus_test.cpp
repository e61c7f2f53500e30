// tests/corpus_test.cpp

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

#include <map>
#include <sstream>
#include <string>
#include <vector>

#include <gtest/gtest.h>

#include "fixtures.hpp"
#include "svback/corpus.hpp"
#include "svback/corpus_io.hpp"

namespace svback {
namespace {

using test::seg;
using test::vec;

SynthConfig small_config(std::uint64_t seed) {
  SynthConfig cfg;
  cfg.dimension = 6;
  cfg.speakers = {{Domain::out_of_domain, 12}, {Domain::in_domain_major, 5}, {Domain::dev, 4}};
  cfg.min_segments = 2;
  cfg.max_segments = 5;
  cfg.between_speaker_std = 1.0;
  cfg.within_speaker_std = 0.3;
  cfg.domain_shifts[Domain::in_domain_major] = random_direction(6, 3, 2.0);
  cfg.gender_shift = random_direction(6, 4, 1.0);
  cfg.seed = seed;
  return cfg;
}

TEST(Corpus, RejectsWrongDimensionAndDuplicateIds) {
  Corpus c(2);
  c.add(seg("a", vec({1, 2})));
  EXPECT_THROW(c.add(seg("b", vec({1, 2, 3}))), DataError);
  EXPECT_THROW(c.add(seg("a", vec({0, 0}))), DataError);
  EXPECT_THROW(Corpus(0), ConfigError);
}

TEST(Generate, SameConfigGivesIdenticalCorpus) {
  EXPECT_EQ(generate_corpus(small_config(11)), generate_corpus(small_config(11)));
  EXPECT_FALSE(generate_corpus(small_config(11)) == generate_corpus(small_config(12)));
}

TEST(Generate, ZeroNoiseMakesSpeakerSegmentsIdentical) {
  auto cfg = small_config(5);
  cfg.within_speaker_std = 0.0;
  const Corpus c = generate_corpus(cfg);
  const auto idx = index_speakers(c);
  for (const auto& mem : idx.members)
    for (auto i : mem) EXPECT_EQ(c[i].vector, c[mem[0]].vector);
}

TEST(Generate, WithinDistancesBelowBetweenDistances) {
  SynthConfig cfg;
  cfg.dimension = 2;
  cfg.speakers = {{Domain::out_of_domain, 2}};
  cfg.min_segments = 4;
  cfg.max_segments = 4;
  cfg.between_speaker_std = 10.0;
  cfg.within_speaker_std = 0.1;
  cfg.seed = 7;
  const Corpus c = generate_corpus(cfg);
  double max_within = 0, min_between = 1e300;
  for (std::size_t i = 0; i < c.size(); ++i)
    for (std::size_t j = i + 1; j < c.size(); ++j) {
      const double dist = (c[i].vector - c[j].vector).norm();
      if (c[i].speaker == c[j].speaker) max_within = std::max(max_within, dist);
      else min_between = std::min(min_between, dist);
    }
  EXPECT_LT(max_within, min_between);
}

TEST(Generate, NearestCentroidIsExactAtHighSeparation) {
  for (std::uint64_t seed = 1; seed <= 5; ++seed) {
    SynthConfig cfg;
    cfg.dimension = 10;
    cfg.speakers = {{Domain::out_of_domain, 30}};
    cfg.min_segments = 3;
    cfg.max_segments = 6;
    cfg.between_speaker_std = 1.0;
    cfg.within_speaker_std = 0.1;
    cfg.seed = seed;
    const Corpus c = generate_corpus(cfg);
    const auto idx = index_speakers(c);
    std::vector<Eigen::VectorXd> centroids;
    for (const auto& mem : idx.members) {
      Eigen::VectorXd m = Eigen::VectorXd::Zero(10);
      for (auto i : mem) m += c[i].vector;
      centroids.push_back(m / static_cast<double>(mem.size()));
    }
    for (std::size_t i = 0; i < c.size(); ++i) {
      int best = 0;
      for (int k = 1; k < static_cast<int>(centroids.size()); ++k)
        if ((c[i].vector - centroids[k]).squaredNorm() < (c[i].vector - centroids[best]).squaredNorm()) best = k;
      EXPECT_EQ(best, idx.label_of_segment[i]) << "seed " << seed << " segment " << c[i].id;
    }
  }
}

TEST(Generate, ShiftsAndCountsFollowConfig) {
  auto cfg = small_config(2);
  const Corpus c = generate_corpus(cfg);
  for (const auto& s : c) {
    EXPECT_TRUE(s.speaker && s.gender);
    if (s.domain == Domain::dev) {
      EXPECT_EQ(s.partition, std::string(to_string(*s.gender)));
    } else {
      EXPECT_FALSE(s.partition);
    }
  }
  const auto idx = index_speakers(c);
  EXPECT_EQ(idx.names.size(), 21u);
  for (const auto& mem : idx.members) {
    EXPECT_GE(mem.size(), 2u);
    EXPECT_LE(mem.size(), 5u);
  }
  auto bad = cfg;
  bad.domain_shifts[Domain::dev] = vec({1, 2});
  EXPECT_THROW(generate_corpus(bad), ConfigError);
  bad = cfg;
  bad.between_speaker_std = 0;
  EXPECT_THROW(generate_corpus(bad), ConfigError);
  bad = cfg;
  bad.dimension = 0;
  EXPECT_THROW(generate_corpus(bad), ConfigError);
}

TEST(Generate, ViewsShareSpeakersButNotNoise) {
  auto a = small_config(9), b = small_config(9);
  b.view = 1;
  const Corpus ca = generate_corpus(a), cb = generate_corpus(b);
  ASSERT_EQ(ca.size(), cb.size());
  for (std::size_t i = 0; i < ca.size(); ++i) {
    EXPECT_EQ(ca[i].id, cb[i].id);
    EXPECT_NE(ca[i].vector, cb[i].vector);
  }
}

TEST(Generate, ZeroViewNoiseMakesViewsIdentical) {
  auto a = small_config(9), b = small_config(9);
  a.view_noise = b.view_noise = 0.0;
  b.view = 1;
  const Corpus ca = generate_corpus(a), cb = generate_corpus(b);
  ASSERT_EQ(ca.size(), cb.size());
  for (std::size_t i = 0; i < ca.size(); ++i) EXPECT_EQ(ca[i].vector, cb[i].vector);
}

TEST(Generate, ViewNoiseSplitsWithinSpeakerVariance) {
  SynthConfig a;
  a.dimension = 20;
  a.speakers = {{Domain::out_of_domain, 10}};
  a.min_segments = a.max_segments = 200;
  a.within_speaker_std = 0.5;
  a.view_noise = 0.25;
  a.seed = 4;
  SynthConfig b = a;
  b.view = 1;
  const Corpus ca = generate_corpus(a), cb = generate_corpus(b);
  // Per-coordinate variance of the view difference is 2 view_noise sigma_w^2;
  // the within-speaker variance of one view stays sigma_w^2.
  double diff = 0.0, within = 0.0;
  std::size_t n_diff = 0, n_within = 0;
  std::map<std::string, std::vector<Eigen::VectorXd>> by_spk;
  for (std::size_t i = 0; i < ca.size(); ++i) {
    diff += (ca[i].vector - cb[i].vector).squaredNorm();
    n_diff += 20;
    by_spk[*ca[i].speaker].push_back(ca[i].vector);
  }
  for (const auto& [spk, xs] : by_spk) {
    Eigen::VectorXd m = Eigen::VectorXd::Zero(20);
    for (const auto& x : xs) m += x;
    m /= double(xs.size());
    for (const auto& x : xs) within += (x - m).squaredNorm();
    n_within += 20 * (xs.size() - 1);
  }
  EXPECT_NEAR(diff / double(n_diff), 2 * 0.25 * 0.25, 0.05 * 2 * 0.25 * 0.25);
  EXPECT_NEAR(within / double(n_within), 0.25, 0.05 * 0.25);
}

TEST(Generate, ViewNoiseOutsideUnitIntervalIsRejected) {
  auto a = small_config(1);
  a.view_noise = 1.5;
  EXPECT_THROW(generate_corpus(a), ConfigError);
}

Corpus abc_corpus() {
  Corpus c(1);
  int n = 0;
  for (auto [spk, count] : std::vector<std::pair<std::string, int>>{{"A", 5}, {"B", 4}, {"C", 3}})
    for (int i = 0; i < count; ++i) c.add(seg(spk + std::to_string(i), vec({double(n++)}), spk));
  return c;
}

TEST(FilterSpeakers, DropsSmallSpeakersAndKeepsOrder) {
  const Corpus c = abc_corpus();
  const Corpus f = filter_speakers(c, 4);
  EXPECT_EQ(f.size(), 9u);
  for (std::size_t i = 0; i < f.size(); ++i) {
    EXPECT_NE(f[i].speaker, "C");
    EXPECT_EQ(f[i].vector[0], double(i));
  }
  EXPECT_EQ(filter_speakers(c, 1), c);
  EXPECT_EQ(filter_speakers(c, 6).size(), 0u);
  EXPECT_EQ(filter_speakers(filter_speakers(c, 4), 5).size(), 5u);
}

TEST(CorpusIo, RoundTripPreservesEveryField) {
  Corpus c(3);
  c.add(seg("x1", vec({0.1, -2.5e-7, 3.0}), "spk1", Domain::dev, Gender::female));
  c.add(seg("x2", vec({1.0 / 3.0, 1e10, -0.0}), std::nullopt, Domain::in_domain_minor));
  Segment s = seg("x3", vec({std::nextafter(1.0, 2.0), 2, 3}), "spk2", Domain::eval, Gender::male);
  s.partition = "tgl_M";
  c.add(s);
  std::stringstream ss;
  write_corpus(c, ss);
  EXPECT_EQ(read_corpus(ss), c);
}

TEST(CorpusIo, GeneratedCorpusRoundTrips) {
  const Corpus c = generate_corpus(small_config(3));
  std::stringstream ss;
  write_corpus(c, ss);
  EXPECT_EQ(read_corpus(ss), c);
}

TEST(CorpusIo, ShortRowNamesLine) {
  std::stringstream ss("#dim=3\na\t-\t-\tdev\t-\t1 2 3\nb\t-\t-\tdev\t-\t1 2\n");
  try {
    read_corpus(ss, "bad.txt");
    FAIL() << "expected a parse error";
  } catch (const DataError& e) {
    EXPECT_NE(std::string(e.what()).find("bad.txt:3"), std::string::npos) << e.what();
  }
}

TEST(CorpusIo, DuplicateIdAndBadTokensAreErrors) {
  std::stringstream dup("#dim=1\na\t-\t-\tdev\t-\t1\na\t-\t-\tdev\t-\t2\n");
  EXPECT_THROW(read_corpus(dup), DataError);
  std::stringstream dom("#dim=1\na\t-\t-\tmars\t-\t1\n");
  EXPECT_THROW(read_corpus(dom), DataError);
  std::stringstream gen("#dim=1\na\t-\tX\tdev\t-\t1\n");
  EXPECT_THROW(read_corpus(gen), DataError);
  std::stringstream num("#dim=1\na\t-\t-\tdev\t-\tone\n");
  EXPECT_THROW(read_corpus(num), DataError);
  std::stringstream none("");
  EXPECT_THROW(read_corpus(none), DataError);
}

TEST(CorpusIo, HeaderOnlyFileIsEmptyCorpus) {
  std::stringstream ss("#dim=4\n");
  const Corpus c = read_corpus(ss);
  EXPECT_EQ(c.dim(), 4);
  EXPECT_TRUE(c.empty());
}

TEST(TrialIo, KeysAndPartitionsParse) {
  std::stringstream ss("e1,e2\tt1\ttarget\tF\ne1\tt2\tnontarget\t-\ne3\tt3\t-\t-\n");
  const TrialSet t = read_trials(ss);
  ASSERT_EQ(t.size(), 3u);
  EXPECT_EQ(t.trials[0].enroll, (std::vector<std::string>{"e1", "e2"}));
  EXPECT_EQ(t.trials[0].key, Key::target);
  EXPECT_EQ(t.trials[0].partition, "F");
  EXPECT_EQ(t.trials[1].key, Key::nontarget);
  EXPECT_FALSE(t.trials[1].partition);
  EXPECT_FALSE(t.trials[2].key);
  EXPECT_FALSE(t.has_keys());
  EXPECT_THROW(t.keys(), DataError);
  std::stringstream out;
  write_trials(t, out);
  EXPECT_EQ(out.str(), ss.str());
}

TEST(TrialIo, UnknownKeyTokenIsError) {
  std::stringstream ss("e1\tt1\tmaybe\t-\n");
  EXPECT_THROW(read_trials(ss), DataError);
}

TEST(TrialIo, KeylessFileHasNoKeys) {
  std::stringstream ss("e1\tt1\t-\t-\ne2\tt1\t-\t-\n");
  const TrialSet t = read_trials(ss);
  EXPECT_EQ(t.size(), 2u);
  EXPECT_FALSE(t.has_keys());
}

TEST(ScoreIo, RoundTripKeepsTwelveDigits) {
  ScoreSet s;
  s.trials.trials = {{{"a"}, "b", Key::target, "F"}, {{"a", "c"}, "d", Key::nontarget, std::nullopt}};
  s.scores = {1.0 / 3.0, -123456.789012345};
  s.calibration = "dev_only";
  std::stringstream ss;
  write_scores(s, ss);
  EXPECT_EQ(ss.str().substr(0, 20), "#calibrated=dev_only");
  const ScoreSet r = read_scores(ss);
  EXPECT_EQ(r.trials, s.trials);
  EXPECT_EQ(r.calibration, s.calibration);
  for (std::size_t i = 0; i < 2; ++i) EXPECT_NEAR(r.scores[i], s.scores[i], 1e-11 * std::abs(s.scores[i]));
}

TEST(Trials, CrossListCoversModelsAndTests) {
  auto cfg = small_config(4);
  const Corpus c = generate_corpus(cfg);
  const TrialSet t = generate_trials(c, Domain::dev, 1);
  const auto dev = c.in_domains({Domain::dev});
  const auto idx = index_speakers(dev);
  const std::size_t models = idx.names.size();
  EXPECT_EQ(t.size(), models * (dev.size() - models));
  std::size_t targets = 0;
  for (const auto& tr : t.trials) {
    EXPECT_EQ(c.at(tr.enroll[0]).partition, tr.partition);
    const bool same = c.at(tr.enroll[0]).speaker == c.at(tr.test).speaker;
    EXPECT_EQ(tr.key, same ? Key::target : Key::nontarget);
    targets += same;
  }
  EXPECT_EQ(targets, dev.size() - models);
}

}  // namespace
}  // namespace svback
