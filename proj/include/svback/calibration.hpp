// svback/calibration.hpp

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
#include <cstdint>
#include <map>
#include <numeric>
#include <optional>
#include <span>
#include <string>
#include <unordered_set>
#include <vector>

#include "svback/cluster.hpp"
#include "svback/corpus.hpp"
#include "svback/rng.hpp"
#include "svback/text.hpp"

namespace svback {

/// Weighted least-squares isotonic (non-decreasing) fit by pool adjacent
/// violators.  Returns one fitted value per input.
inline std::vector<double> isotonic_regression(std::span<const double> values, std::span<const double> weights) {
  if (values.size() != weights.size()) fail<DataError>("isotonic_regression: size mismatch");
  struct Block {
    double mean;
    double weight;
    std::size_t count;
  };
  std::vector<Block> blocks;
  for (std::size_t i = 0; i < values.size(); ++i) {
    if (!(weights[i] > 0)) fail<DataError>("isotonic_regression: weights must be positive");
    blocks.push_back({values[i], weights[i], 1});
    while (blocks.size() > 1 && blocks[blocks.size() - 2].mean > blocks.back().mean) {
      Block top = blocks.back();
      blocks.pop_back();
      Block& b = blocks.back();
      b.mean = (b.mean * b.weight + top.mean * top.weight) / (b.weight + top.weight);
      b.weight += top.weight;
      b.count += top.count;
    }
  }
  std::vector<double> out;
  out.reserve(values.size());
  for (const auto& b : blocks) out.insert(out.end(), b.count, b.mean);
  return out;
}

/// Monotone step function from raw scores to LLRs.  A score s maps to the
/// value of the largest knot <= s; scores outside the knot range clamp to the
/// end values.
struct CalibrationMap {
  std::vector<double> knots;       // strictly ascending raw scores
  std::vector<double> values;      // non-decreasing LLRs
  std::vector<double> posteriors;  // pooled target posteriors at the knots
  double prior = 0.5;              // target proportion of the training trials
  double llr_cap = 7.0;
};

/// PAV on the 0/1 target indicator ordered by score, equal scores pooled
/// first.  Pooled posterior p becomes logit(p) - logit(prior), with prior the
/// empirical target proportion, clamped to +-llr_cap.
inline CalibrationMap pav_fit(std::span<const double> scores, std::span<const Key> keys, double llr_cap = 7.0) {
  if (scores.size() != keys.size()) fail<DataError>("pav_fit: score/key count mismatch");
  if (!(llr_cap > 0)) fail<ConfigError>("pav_fit: llr_cap must be positive");
  std::vector<std::size_t> order(scores.size());
  std::iota(order.begin(), order.end(), 0);
  std::stable_sort(order.begin(), order.end(), [&](auto a, auto b) { return scores[a] < scores[b]; });

  CalibrationMap map;
  map.llr_cap = llr_cap;
  std::vector<double> rate, weight;
  long n_tar = 0;
  for (std::size_t i = 0; i < order.size();) {
    std::size_t j = i;
    long tar = 0;
    while (j < order.size() && scores[order[j]] == scores[order[i]]) {
      tar += keys[order[j]] == Key::target;
      ++j;
    }
    map.knots.push_back(scores[order[i]]);
    rate.push_back(static_cast<double>(tar) / static_cast<double>(j - i));
    weight.push_back(static_cast<double>(j - i));
    n_tar += tar;
    i = j;
  }
  const long n = static_cast<long>(scores.size());
  if (n_tar == 0 || n_tar == n) fail<DataError>("pav_fit: need both target and nontarget trials");
  map.prior = static_cast<double>(n_tar) / static_cast<double>(n);
  map.posteriors = isotonic_regression(rate, weight);
  const double prior_logit = std::log(map.prior / (1.0 - map.prior));
  map.values.reserve(map.posteriors.size());
  for (double p : map.posteriors) {
    double llr;
    if (p <= 0.0) llr = -llr_cap;
    else if (p >= 1.0) llr = llr_cap;
    else llr = std::clamp(std::log(p / (1.0 - p)) - prior_logit, -llr_cap, llr_cap);
    map.values.push_back(llr);
  }
  return map;
}

inline double pav_apply(const CalibrationMap& map, double s) {
  if (map.knots.empty()) fail<DataError>("pav_apply: empty calibration map");
  auto it = std::upper_bound(map.knots.begin(), map.knots.end(), s);
  if (it == map.knots.begin()) return map.values.front();
  return map.values[static_cast<std::size_t>(it - map.knots.begin()) - 1];
}

inline std::vector<double> pav_apply(const CalibrationMap& map, std::span<const double> scores) {
  std::vector<double> out;
  out.reserve(scores.size());
  for (double s : scores) out.push_back(pav_apply(map, s));
  return out;
}

inline void write_calibration(const CalibrationMap& m, std::ostream& os) {
  os << "prior " << format_double(m.prior) << "\nllr_cap " << format_double(m.llr_cap) << "\nknots "
     << m.knots.size() << '\n';
  for (std::size_t i = 0; i < m.knots.size(); ++i)
    os << format_double(m.knots[i]) << '\t' << format_double(m.values[i]) << '\t' << format_double(m.posteriors[i])
       << '\n';
}

inline void write_calibration(const CalibrationMap& m, const std::string& path) {
  auto os = open_output(path);
  write_calibration(m, os);
}

inline CalibrationMap read_calibration(std::istream& is, const std::string& name = "<stream>") {
  CalibrationMap m;
  std::string line;
  int line_no = 0;
  long remaining = -1;
  auto number = [&](std::string_view s) {
    auto v = parse_double(s);
    if (!v) fail<DataError>(name, ":", line_no, ": bad number '", s, "'");
    return *v;
  };
  while (std::getline(is, line)) {
    ++line_no;
    auto tok = split_ws(trim(line));
    if (tok.empty()) continue;
    if (remaining < 0) {
      if (tok.size() != 2) fail<DataError>(name, ":", line_no, ": expected 'key value'");
      if (tok[0] == "prior") m.prior = number(tok[1]);
      else if (tok[0] == "llr_cap") m.llr_cap = number(tok[1]);
      else if (tok[0] == "knots") {
        auto n = parse_int(tok[1]);
        if (!n || *n < 1) fail<DataError>(name, ":", line_no, ": bad knot count");
        remaining = *n;
      } else fail<DataError>(name, ":", line_no, ": unknown key '", tok[0], "'");
      continue;
    }
    if (tok.size() != 3) fail<DataError>(name, ":", line_no, ": expected knot, value, posterior");
    if (remaining == 0) fail<DataError>(name, ":", line_no, ": more knots than declared");
    m.knots.push_back(number(tok[0]));
    m.values.push_back(number(tok[1]));
    m.posteriors.push_back(number(tok[2]));
    --remaining;
  }
  if (remaining != 0) fail<DataError>(name, ": knot table missing or truncated");
  for (std::size_t i = 1; i < m.knots.size(); ++i)
    if (!(m.knots[i] > m.knots[i - 1]) || m.values[i] < m.values[i - 1])
      fail<DataError>(name, ": calibration table is not monotone");
  return m;
}

inline CalibrationMap read_calibration(const std::string& path) {
  auto is = open_input(path);
  return read_calibration(is, path);
}

enum class CalibrationStrategy { dev_only, unlabeled_only, dev_plus_unlabeled };

inline std::string_view to_string(CalibrationStrategy s) {
  switch (s) {
    case CalibrationStrategy::dev_only: return "dev_only";
    case CalibrationStrategy::unlabeled_only: return "unlabeled_only";
    case CalibrationStrategy::dev_plus_unlabeled: return "dev_plus_unlabeled";
  }
  return "?";
}

inline std::optional<CalibrationStrategy> parse_strategy(std::string_view s) {
  for (auto c : {CalibrationStrategy::dev_only, CalibrationStrategy::unlabeled_only,
                 CalibrationStrategy::dev_plus_unlabeled})
    if (to_string(c) == s) return c;
  return std::nullopt;
}

/// Calibration training trials for a strategy: dev, unlabeled, or both
/// concatenated with equal per-trial weight.
inline ScoreSet calibration_training_set(CalibrationStrategy s, const ScoreSet& dev, const ScoreSet& unlabeled) {
  switch (s) {
    case CalibrationStrategy::dev_only: return dev;
    case CalibrationStrategy::unlabeled_only: return unlabeled;
    case CalibrationStrategy::dev_plus_unlabeled: {
      ScoreSet out = dev;
      out.trials.trials.insert(out.trials.trials.end(), unlabeled.trials.trials.begin(), unlabeled.trials.trials.end());
      out.scores.insert(out.scores.end(), unlabeled.scores.begin(), unlabeled.scores.end());
      return out;
    }
  }
  fail<ConfigError>("unknown calibration strategy");
}

struct UnlabeledTrials {
  TrialSet trials;
  std::size_t available_target = 0;
  std::size_t available_nontarget = 0;
  std::vector<std::string> warnings;
};

/// Same-cluster pairs become target trials, cross-cluster pairs nontarget
/// trials; each kind is sampled without replacement with a seeded stream.
/// Segments are visited in ascending id order.
inline UnlabeledTrials make_unlabeled_trials(const ClusterAssignment& assignment, std::size_t n_target,
                                             std::size_t n_nontarget, std::uint64_t seed) {
  std::vector<std::string> ids;
  std::vector<int> cluster;
  {
    std::map<std::string, int> cluster_ids;
    for (const auto& [seg, label] : assignment.labels) {
      ids.push_back(seg);
      cluster.push_back(cluster_ids.emplace(label, static_cast<int>(cluster_ids.size())).first->second);
    }
    if (cluster_ids.size() < 2) fail<DataError>("make_unlabeled_trials: need at least 2 clusters");
  }
  const std::size_t n = ids.size();
  std::vector<std::pair<std::uint32_t, std::uint32_t>> same;
  for (std::size_t i = 0; i < n; ++i)
    for (std::size_t j = i + 1; j < n; ++j)
      if (cluster[i] == cluster[j]) same.emplace_back(static_cast<std::uint32_t>(i), static_cast<std::uint32_t>(j));
  if (same.empty()) fail<DataError>("make_unlabeled_trials: no cluster has two segments; no target pairs exist");

  UnlabeledTrials out;
  out.available_target = same.size();
  out.available_nontarget = n * (n - 1) / 2 - same.size();

  Rng rng(derive_seed(seed, {0x7472}));
  auto sample = [&](std::vector<std::pair<std::uint32_t, std::uint32_t>>& pool, std::size_t want) {
    // Partial Fisher-Yates; the selected prefix is then put in pair order.
    want = std::min(want, pool.size());
    for (std::size_t i = 0; i < want; ++i) std::swap(pool[i], pool[i + rng.below(pool.size() - i)]);
    pool.resize(want);
    std::sort(pool.begin(), pool.end());
  };

  if (n_target > same.size()) {
    out.warnings.push_back("requested " + std::to_string(n_target) + " target pairs, only " +
                           std::to_string(same.size()) + " available");
    warn(out.warnings.back());
  }
  sample(same, n_target);

  std::vector<std::pair<std::uint32_t, std::uint32_t>> cross;
  if (n_nontarget >= out.available_nontarget / 2) {
    cross.reserve(out.available_nontarget);
    for (std::size_t i = 0; i < n; ++i)
      for (std::size_t j = i + 1; j < n; ++j)
        if (cluster[i] != cluster[j]) cross.emplace_back(static_cast<std::uint32_t>(i), static_cast<std::uint32_t>(j));
    if (n_nontarget > cross.size()) {
      out.warnings.push_back("requested " + std::to_string(n_nontarget) + " nontarget pairs, only " +
                             std::to_string(cross.size()) + " available");
      warn(out.warnings.back());
    }
    sample(cross, n_nontarget);
  } else {
    // Sparse request: rejection sampling over all pairs.
    std::unordered_set<std::uint64_t> seen;
    while (cross.size() < n_nontarget) {
      auto i = static_cast<std::uint32_t>(rng.below(n));
      auto j = static_cast<std::uint32_t>(rng.below(n));
      if (i == j || cluster[i] == cluster[j]) continue;
      if (i > j) std::swap(i, j);
      if (seen.insert((static_cast<std::uint64_t>(i) << 32) | j).second) cross.emplace_back(i, j);
    }
    std::sort(cross.begin(), cross.end());
  }

  for (const auto& [i, j] : same) out.trials.trials.push_back({{ids[i]}, ids[j], Key::target, std::nullopt});
  for (const auto& [i, j] : cross) out.trials.trials.push_back({{ids[i]}, ids[j], Key::nontarget, std::nullopt});
  return out;
}

}  // namespace svback
