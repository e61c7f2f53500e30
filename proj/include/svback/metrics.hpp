// svback/metrics.hpp

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
#include <cstdio>
#include <limits>
#include <map>
#include <numeric>
#include <optional>
#include <ostream>
#include <span>
#include <string>
#include <vector>

#include "json.hpp"
#include "svback/corpus.hpp"
#include "svback/text.hpp"

namespace svback {

/// Miss and false-alarm rates at every distinct decision split of the scores.
/// A trial is accepted when its score exceeds the threshold.  thresholds[0]
/// is -inf (accept all) and the last is +inf (reject all); the interior
/// thresholds are midpoints between consecutive distinct scores.
struct ErrorProfile {
  std::vector<double> thresholds;
  std::vector<double> p_miss;
  std::vector<double> p_fa;
  long n_target = 0;
  long n_nontarget = 0;
};

inline std::pair<long, long> count_classes(std::span<const Key> keys) {
  long t = 0;
  for (Key k : keys) t += k == Key::target;
  return {t, static_cast<long>(keys.size()) - t};
}

inline ErrorProfile error_profile(std::span<const double> scores, std::span<const Key> keys) {
  if (scores.size() != keys.size()) fail<DataError>("error_profile: score/key count mismatch");
  const auto [n_tar, n_non] = count_classes(keys);
  if (n_tar == 0 || n_non == 0) fail<DataError>("error_profile: need both target and nontarget trials");
  std::vector<std::size_t> order(scores.size());
  std::iota(order.begin(), order.end(), 0);
  std::stable_sort(order.begin(), order.end(), [&](auto a, auto b) { return scores[a] < scores[b]; });

  ErrorProfile p;
  p.n_target = n_tar;
  p.n_nontarget = n_non;
  constexpr double inf = std::numeric_limits<double>::infinity();
  long miss = 0, fa = n_non;  // everything accepted
  p.thresholds.push_back(-inf);
  p.p_miss.push_back(0.0);
  p.p_fa.push_back(1.0);
  for (std::size_t i = 0; i < order.size();) {
    std::size_t j = i;
    while (j < order.size() && scores[order[j]] == scores[order[i]]) {
      if (keys[order[j]] == Key::target) ++miss;
      else --fa;
      ++j;
    }
    const double next = j < order.size() ? 0.5 * (scores[order[i]] + scores[order[j]]) : inf;
    p.thresholds.push_back(next);
    p.p_miss.push_back(static_cast<double>(miss) / n_tar);
    p.p_fa.push_back(static_cast<double>(fa) / n_non);
    i = j;
  }
  return p;
}

/// Point where the piecewise-linear ROC through the profile vertices crosses
/// p_miss = p_fa.
inline double eer(const ErrorProfile& p) {
  for (std::size_t i = 1; i < p.p_miss.size(); ++i) {
    if (p.p_miss[i] < p.p_fa[i]) continue;
    if (p.p_miss[i] == p.p_fa[i]) return p.p_miss[i];
    const double dm = p.p_miss[i] - p.p_miss[i - 1];
    const double df = p.p_fa[i] - p.p_fa[i - 1];
    const double a = (p.p_fa[i - 1] - p.p_miss[i - 1]) / (dm - df);
    return p.p_miss[i - 1] + a * dm;
  }
  return p.p_miss.back();
}

inline double eer(std::span<const double> scores, std::span<const Key> keys) {
  return eer(error_profile(scores, keys));
}

struct OperatingPoint {
  double p_target = 0.01;
  double c_miss = 1.0;
  double c_fa = 1.0;

  double bayes_threshold() const { return std::log(c_fa * (1.0 - p_target) / (c_miss * p_target)); }
  double normalized_cost(double p_miss, double p_fa) const {
    const double a = c_miss * p_target, b = c_fa * (1.0 - p_target);
    return (a * p_miss + b * p_fa) / std::min(a, b);
  }
};

/// Defaults are the two target priors of the primary cost with unit costs.
struct CostParams {
  std::vector<OperatingPoint> points = {{0.01, 1.0, 1.0}, {0.005, 1.0, 1.0}};

  void validate() const {
    if (points.empty()) fail<ConfigError>("cost params: no operating points");
    for (const auto& op : points)
      if (!(op.p_target > 0 && op.p_target < 1) || !(op.c_miss > 0) || !(op.c_fa > 0))
        fail<ConfigError>("cost params: need 0 < P_target < 1 and positive costs");
  }
};

enum class CostMode { min, act };

/// Pooled (unequalized) Cprimary: the mean over operating points of the
/// normalized cost, either minimized over thresholds per point or taken at
/// the Bayes threshold of each point (scores treated as LLRs).
inline double cprimary(std::span<const double> scores, std::span<const Key> keys, const CostParams& params,
                       CostMode mode) {
  params.validate();
  if (mode == CostMode::min) {
    const ErrorProfile p = error_profile(scores, keys);
    double total = 0.0;
    for (const auto& op : params.points) {
      double best = std::numeric_limits<double>::infinity();
      for (std::size_t i = 0; i < p.p_miss.size(); ++i) best = std::min(best, op.normalized_cost(p.p_miss[i], p.p_fa[i]));
      total += best;
    }
    return total / static_cast<double>(params.points.size());
  }
  if (scores.size() != keys.size()) fail<DataError>("cprimary: score/key count mismatch");
  const auto [n_tar, n_non] = count_classes(keys);
  if (n_tar == 0 || n_non == 0) fail<DataError>("cprimary: need both target and nontarget trials");
  double total = 0.0;
  for (const auto& op : params.points) {
    const double eta = op.bayes_threshold();
    long miss = 0, fa = 0;
    for (std::size_t i = 0; i < scores.size(); ++i) {
      if (keys[i] == Key::target) miss += scores[i] <= eta;
      else fa += scores[i] > eta;
    }
    total += op.normalized_cost(static_cast<double>(miss) / n_tar, static_cast<double>(fa) / n_non);
  }
  return total / static_cast<double>(params.points.size());
}

namespace detail {

template <typename Metric>
double equalized(std::span<const double> scores, std::span<const Key> keys,
                 std::span<const std::optional<std::string>> partitions, Metric&& metric) {
  if (partitions.size() != scores.size()) fail<DataError>("equalized metric: partition count mismatch");
  std::map<std::string, std::vector<std::size_t>> groups;
  for (std::size_t i = 0; i < partitions.size(); ++i) {
    if (!partitions[i]) fail<DataError>("equalized metric: trial ", i, " has no partition tag");
    groups[*partitions[i]].push_back(i);
  }
  double total = 0.0;
  for (const auto& [tag, idx] : groups) {
    std::vector<double> s;
    std::vector<Key> k;
    for (auto i : idx) {
      s.push_back(scores[i]);
      k.push_back(keys[i]);
    }
    total += metric(std::span<const double>(s), std::span<const Key>(k));
  }
  return total / static_cast<double>(groups.size());
}

}  // namespace detail

/// Equalized Cprimary: the mean of the per-partition values.
inline double cprimary(std::span<const double> scores, std::span<const Key> keys,
                       std::span<const std::optional<std::string>> partitions, const CostParams& params,
                       CostMode mode) {
  return detail::equalized(scores, keys, partitions, [&](auto s, auto k) { return cprimary(s, k, params, mode); });
}

inline double eer(std::span<const double> scores, std::span<const Key> keys,
                  std::span<const std::optional<std::string>> partitions) {
  return detail::equalized(scores, keys, partitions, [](auto s, auto k) { return eer(s, k); });
}

/// gnuplot-friendly columns: threshold p_miss p_fa.
inline void write_det(const ErrorProfile& p, std::ostream& os) {
  os << "# threshold\tp_miss\tp_fa\n";
  for (std::size_t i = 0; i < p.p_miss.size(); ++i)
    os << format_double(p.thresholds[i], 12) << '\t' << format_double(p.p_miss[i], 12) << '\t'
       << format_double(p.p_fa[i], 12) << '\n';
}

// Report ---------------------------------------------------------------------

/// Scores of one system on a common trial list.  EER and min-Cprimary depend
/// only on the ranking and are taken from `raw`; act-Cprimary is taken from
/// `calibrated` when present.
struct SystemScores {
  std::string name;
  std::vector<double> raw;
  std::optional<std::vector<double>> calibrated;
};

struct ReportRow {
  std::string name;
  double eer_eq = 0, min_eq = 0, act_eq = 0;
  double eer_uneq = 0, min_uneq = 0, act_uneq = 0;
  bool calibrated = false;
};

struct Report {
  std::vector<ReportRow> rows;
  CostParams params;
  bool equalized_by_partition = true;

  /// Table columns: system, EER(%)/min-Cprimary equalized -- unequalized,
  /// act-Cprimary equalized -- unequalized.
  std::string text() const {
    std::string out = "# operating points (P_target, C_miss, C_fa):";
    for (const auto& op : params.points)
      out += " (" + format_double(op.p_target) + ", " + format_double(op.c_miss) + ", " + format_double(op.c_fa) + ")";
    out += "\n";
    if (!equalized_by_partition) out += "# no partition tags: equalized columns equal the pooled ones\n";
    char buf[256];
    std::snprintf(buf, sizeof(buf), "%-24s %-32s %s\n", "system", "EER/min-Cprimary (eq -- uneq)",
                  "act-Cprimary (eq -- uneq)");
    out += buf;
    for (const auto& r : rows) {
      char left[96], right[64];
      std::snprintf(left, sizeof(left), "%.2f/%.3f -- %.2f/%.3f", 100 * r.eer_eq, r.min_eq, 100 * r.eer_uneq,
                    r.min_uneq);
      std::snprintf(right, sizeof(right), "%.3f -- %.3f%s", r.act_eq, r.act_uneq, r.calibrated ? "" : " (uncalibrated)");
      std::snprintf(buf, sizeof(buf), "%-24s %-32s %s\n", r.name.c_str(), left, right);
      out += buf;
    }
    return out;
  }

  nlohmann::ordered_json json() const {
    nlohmann::ordered_json j;
    j["operating_points"] = nlohmann::ordered_json::array();
    for (const auto& op : params.points)
      j["operating_points"].push_back({{"p_target", op.p_target}, {"c_miss", op.c_miss}, {"c_fa", op.c_fa}});
    j["equalized_by_partition"] = equalized_by_partition;
    j["systems"] = nlohmann::ordered_json::array();
    for (const auto& r : rows)
      j["systems"].push_back({{"name", r.name},
                              {"calibrated", r.calibrated},
                              {"equalized", {{"eer", r.eer_eq}, {"min_cprimary", r.min_eq}, {"act_cprimary", r.act_eq}}},
                              {"unequalized",
                               {{"eer", r.eer_uneq}, {"min_cprimary", r.min_uneq}, {"act_cprimary", r.act_uneq}}}});
    return j;
  }
};

inline Report make_report(const std::vector<SystemScores>& systems, const TrialSet& trials,
                          const CostParams& params = {}) {
  params.validate();
  const std::vector<Key> keys = trials.keys();
  std::vector<std::optional<std::string>> parts;
  std::size_t tagged = 0;
  for (const auto& t : trials.trials) {
    parts.push_back(t.partition);
    tagged += t.partition.has_value();
  }
  Report rep;
  rep.params = params;
  if (tagged != 0 && tagged != parts.size()) fail<DataError>("report: some trials lack a partition tag");
  if (tagged == 0) {
    rep.equalized_by_partition = false;
    std::fill(parts.begin(), parts.end(), std::string("all"));
  }
  for (const auto& sys : systems) {
    if (sys.raw.size() != keys.size()) fail<DataError>("report: system '", sys.name, "' score count mismatch");
    const std::vector<double>& act = sys.calibrated ? *sys.calibrated : sys.raw;
    if (act.size() != keys.size()) fail<DataError>("report: system '", sys.name, "' calibrated score count mismatch");
    if (!sys.calibrated) warn("report: system '", sys.name, "' has no calibrated scores; act-Cprimary uses raw scores");
    ReportRow r;
    r.name = sys.name;
    r.calibrated = sys.calibrated.has_value();
    r.eer_uneq = eer(sys.raw, keys);
    r.min_uneq = cprimary(sys.raw, keys, params, CostMode::min);
    r.act_uneq = cprimary(act, keys, params, CostMode::act);
    r.eer_eq = eer(sys.raw, keys, parts);
    r.min_eq = cprimary(sys.raw, keys, parts, params, CostMode::min);
    r.act_eq = cprimary(act, keys, parts, params, CostMode::act);
    rep.rows.push_back(std::move(r));
  }
  return rep;
}

}  // namespace svback
