// svback/cluster.hpp

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
#include <limits>
#include <map>
#include <string>
#include <unordered_map>
#include <vector>

#include <Eigen/Dense>

#include "svback/corpus.hpp"
#include "svback/rng.hpp"

namespace svback {

/// Linear two-class gender rule: male if direction.x > threshold.
struct GenderModel {
  Eigen::VectorXd direction;
  double threshold = 0.0;

  Gender classify(const Eigen::VectorXd& x) const {
    return direction.dot(x) > threshold ? Gender::male : Gender::female;
  }
};

/// Two-class LDA on the gender labels: direction (S_w + ridge)^-1 (mu_M - mu_F),
/// unit length; threshold halfway between the projected class means.
inline GenderModel fit_gender(const Corpus& labeled, double ridge = 1e-6) {
  const int d = labeled.dim();
  Eigen::VectorXd sum[2] = {Eigen::VectorXd::Zero(d), Eigen::VectorXd::Zero(d)};
  long count[2] = {0, 0};
  for (const auto& s : labeled) {
    if (!s.gender) continue;
    const int g = *s.gender == Gender::male;
    sum[g] += s.vector;
    ++count[g];
  }
  if (count[0] == 0 || count[1] == 0) fail<DataError>("fit_gender: need segments of both genders");
  const Eigen::VectorXd mu_f = sum[0] / static_cast<double>(count[0]);
  const Eigen::VectorXd mu_m = sum[1] / static_cast<double>(count[1]);
  const Eigen::VectorXd diff = mu_m - mu_f;
  if (diff.norm() <= 1e-12 * std::max(1.0, mu_f.norm()))
    fail<DataError>("fit_gender: gender means coincide; no separating direction");

  Eigen::MatrixXd sw = Eigen::MatrixXd::Zero(d, d);
  for (const auto& s : labeled) {
    if (!s.gender) continue;
    const Eigen::VectorXd r = s.vector - (*s.gender == Gender::male ? mu_m : mu_f);
    sw.noalias() += r * r.transpose();
  }
  sw.diagonal().array() += ridge * std::max(sw.trace() / d, 1e-300);
  GenderModel m;
  m.direction = sw.ldlt().solve(diff).normalized();
  m.threshold = 0.5 * m.direction.dot(mu_f + mu_m);
  return m;
}

struct KMeansOptions {
  int max_iters = 100;
  int restarts = 10;
};

struct KMeansResult {
  std::vector<int> labels;
  Eigen::MatrixXd centroids;  // k x d
  double inertia = 0.0;
  std::vector<double> inertia_trace;  // after each Lloyd assignment, best restart
  int reseeded = 0;                   // empty-cluster repairs, best restart
  int restart = 0;
};

namespace detail {

inline double assign(const Eigen::MatrixXd& x, const Eigen::MatrixXd& centroids, std::vector<int>& labels,
                     std::vector<double>& dist) {
  double inertia = 0.0;
  for (Eigen::Index i = 0; i < x.rows(); ++i) {
    int best = 0;
    double best_d = std::numeric_limits<double>::infinity();
    for (Eigen::Index c = 0; c < centroids.rows(); ++c) {
      const double dd = (x.row(i) - centroids.row(c)).squaredNorm();
      if (dd < best_d) {
        best_d = dd;
        best = static_cast<int>(c);
      }
    }
    labels[i] = best;
    dist[i] = best_d;
    inertia += best_d;
  }
  return inertia;
}

/// k-means++ seeding: first center uniform, then proportional to D^2.
inline Eigen::MatrixXd plus_plus_seeds(const Eigen::MatrixXd& x, int k, Rng& rng) {
  const Eigen::Index n = x.rows();
  Eigen::MatrixXd c(k, x.cols());
  std::vector<double> d2(n, std::numeric_limits<double>::infinity());
  Eigen::Index pick = static_cast<Eigen::Index>(rng.below(static_cast<std::uint64_t>(n)));
  for (int j = 0; j < k; ++j) {
    c.row(j) = x.row(pick);
    double total = 0.0;
    for (Eigen::Index i = 0; i < n; ++i) {
      d2[i] = std::min(d2[i], (x.row(i) - c.row(j)).squaredNorm());
      total += d2[i];
    }
    if (j + 1 == k) break;
    if (total <= 0.0) {
      // All remaining points coincide with a center; take the first unused.
      pick = std::min<Eigen::Index>(j + 1, n - 1);
      continue;
    }
    double r = rng.uniform() * total;
    pick = n - 1;
    for (Eigen::Index i = 0; i < n; ++i) {
      r -= d2[i];
      if (r < 0 && d2[i] > 0) {
        pick = i;
        break;
      }
    }
  }
  return c;
}

}  // namespace detail

/// Lloyd iterations from k-means++ seeds until the assignment stops changing
/// (or max_iters), best of `restarts` by (inertia, restart index).  An empty
/// cluster is re-seeded at the point farthest from its current centroid.
inline KMeansResult kmeans(const Eigen::MatrixXd& x, int k, std::uint64_t seed, const KMeansOptions& opts = {}) {
  const Eigen::Index n = x.rows();
  if (k < 1) fail<ConfigError>("kmeans: k must be >= 1");
  if (k > n) fail<DataError>("kmeans: k = ", k, " exceeds the number of points ", n);
  if (opts.restarts < 1 || opts.max_iters < 1) fail<ConfigError>("kmeans: restarts and max_iters must be >= 1");

  KMeansResult best;
  best.inertia = std::numeric_limits<double>::infinity();
  for (int r = 0; r < opts.restarts; ++r) {
    Rng rng(derive_seed(seed, {0x6b6d, static_cast<std::uint64_t>(r)}));
    KMeansResult cur;
    cur.restart = r;
    cur.centroids = detail::plus_plus_seeds(x, k, rng);
    cur.labels.assign(n, -1);
    std::vector<int> prev;
    std::vector<double> dist(n);
    for (int it = 0; it < opts.max_iters; ++it) {
      cur.inertia = detail::assign(x, cur.centroids, cur.labels, dist);
      // Repair empty clusters before recording the assignment.
      while (true) {
        std::vector<long> size(k, 0);
        for (int l : cur.labels) ++size[l];
        auto empty = std::find(size.begin(), size.end(), 0);
        if (empty == size.end()) break;
        const auto far = std::max_element(dist.begin(), dist.end()) - dist.begin();
        cur.centroids.row(empty - size.begin()) = x.row(far);
        ++cur.reseeded;
        cur.inertia = detail::assign(x, cur.centroids, cur.labels, dist);
        if (cur.reseeded > 10 * k) break;  // duplicate points: cannot fill every cluster
      }
      cur.inertia_trace.push_back(cur.inertia);
      if (cur.labels == prev) break;
      prev = cur.labels;
      Eigen::MatrixXd sums = Eigen::MatrixXd::Zero(k, x.cols());
      std::vector<long> size(k, 0);
      for (Eigen::Index i = 0; i < n; ++i) {
        sums.row(cur.labels[i]) += x.row(i);
        ++size[cur.labels[i]];
      }
      for (int c = 0; c < k; ++c)
        if (size[c] > 0) cur.centroids.row(c) = sums.row(c) / static_cast<double>(size[c]);
    }
    if (cur.inertia < best.inertia) best = std::move(cur);
  }
  return best;
}

/// Splits a cluster budget across two subsets in proportion to their sizes;
/// a fractional tie goes to the larger subset.  Each non-empty subset gets at
/// least one cluster and at most one per point.
inline std::pair<int, int> split_clusters(int k_total, std::size_t n_a, std::size_t n_b) {
  if (n_a == 0) return {0, static_cast<int>(std::min<std::size_t>(k_total, n_b))};
  if (n_b == 0) return {static_cast<int>(std::min<std::size_t>(k_total, n_a)), 0};
  const double exact = k_total * static_cast<double>(n_a) / static_cast<double>(n_a + n_b);
  int k_a = static_cast<int>(std::floor(exact));
  const double frac = exact - k_a;
  if (frac > 0.5 || (frac == 0.5 && n_a >= n_b)) ++k_a;
  k_a = std::clamp(k_a, 1, k_total - 1);
  int k_b = k_total - k_a;
  k_a = static_cast<int>(std::min<std::size_t>(k_a, n_a));
  k_b = static_cast<int>(std::min<std::size_t>(k_b, n_b));
  return {k_a, k_b};
}

struct ClusterAssignment {
  std::map<std::string, std::string> labels;           // segment id -> estimated speaker
  std::map<std::string, Eigen::MatrixXd> centroids;    // per gender subset
  std::map<std::string, double> inertia;               // per gender subset
  int requested = 0;
  int produced = 0;                                    // distinct labels actually used
  std::vector<std::string> warnings;
};

/// Splits the corpus with the gender rule, clusters each subset and pools the
/// results.  Labels are "<prefix>F_<i>" / "<prefix>M_<i>".  k_per_gender maps
/// "F"/"M" to cluster counts.
inline ClusterAssignment cluster_unlabeled(const Corpus& unlabeled, const GenderModel& gender,
                                           const std::map<std::string, int>& k_per_gender, std::uint64_t seed,
                                           const KMeansOptions& opts = {}, const std::string& prefix = "") {
  ClusterAssignment out;
  std::vector<std::size_t> subset[2];
  for (std::size_t i = 0; i < unlabeled.size(); ++i)
    subset[gender.classify(unlabeled[i].vector) == Gender::male].push_back(i);
  for (int g = 0; g < 2; ++g) {
    const std::string tag(to_string(g ? Gender::male : Gender::female));
    auto it = k_per_gender.find(tag);
    const int k = it == k_per_gender.end() ? 0 : it->second;
    if (k < 0) fail<ConfigError>("cluster_unlabeled: negative k for ", tag);
    out.requested += k;
    if (subset[g].empty()) {
      if (k > 0) {
        out.warnings.push_back("gender subset " + tag + " is empty; clustering the other subset only");
        warn(out.warnings.back());
      }
      continue;
    }
    if (k == 0) fail<ConfigError>("cluster_unlabeled: gender subset ", tag, " has ", subset[g].size(),
                                  " segments but k = 0");
    Eigen::MatrixXd x(static_cast<Eigen::Index>(subset[g].size()), unlabeled.dim());
    for (std::size_t r = 0; r < subset[g].size(); ++r) x.row(r) = unlabeled[subset[g][r]].vector.transpose();
    const KMeansResult km = kmeans(x, k, derive_seed(seed, {static_cast<std::uint64_t>(g)}), opts);
    std::vector<char> used(k, 0);
    for (std::size_t r = 0; r < subset[g].size(); ++r) {
      used[km.labels[r]] = 1;
      out.labels[unlabeled[subset[g][r]].id] = prefix + tag + "_" + std::to_string(km.labels[r]);
    }
    const int n_used = static_cast<int>(std::count(used.begin(), used.end(), 1));
    if (n_used < k) {
      out.warnings.push_back("gender subset " + tag + ": " + std::to_string(k - n_used) + " clusters collapsed");
      warn(out.warnings.back());
    }
    out.produced += n_used;
    out.centroids[tag] = km.centroids;
    out.inertia[tag] = km.inertia;
  }
  return out;
}

/// Convenience wrapper: splits a total budget across genders by subset size.
inline ClusterAssignment cluster_unlabeled(const Corpus& unlabeled, const GenderModel& gender, int k_total,
                                           std::uint64_t seed, const KMeansOptions& opts = {},
                                           const std::string& prefix = "") {
  std::size_t n_m = 0;
  for (const auto& s : unlabeled) n_m += gender.classify(s.vector) == Gender::male;
  const auto [k_f, k_m] = split_clusters(k_total, unlabeled.size() - n_m, n_m);
  return cluster_unlabeled(unlabeled, gender, {{"F", k_f}, {"M", k_m}}, seed, opts, prefix);
}

/// Copy of the corpus with estimated speaker labels filled in for every
/// clustered segment.
inline Corpus apply_assignment(const Corpus& corpus, const ClusterAssignment& a) {
  Corpus out(corpus.dim());
  for (const auto& s : corpus) {
    Segment t = s;
    if (auto it = a.labels.find(s.id); it != a.labels.end()) t.speaker = it->second;
    out.add(std::move(t));
  }
  return out;
}

/// Fraction of points whose cluster's majority true label matches their own.
inline double purity(const std::vector<std::string>& truth, const std::vector<std::string>& clusters) {
  if (truth.size() != clusters.size() || truth.empty()) fail<DataError>("purity: size mismatch");
  std::map<std::string, std::map<std::string, long>> table;
  for (std::size_t i = 0; i < truth.size(); ++i) ++table[clusters[i]][truth[i]];
  long hit = 0;
  for (const auto& [c, counts] : table) {
    long best = 0;
    for (const auto& [t, n] : counts) best = std::max(best, n);
    hit += best;
  }
  return static_cast<double>(hit) / static_cast<double>(truth.size());
}

}  // namespace svback
