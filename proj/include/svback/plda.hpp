// svback/plda.hpp

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
#include <map>
#include <numbers>
#include <string>
#include <vector>

#include <Eigen/Dense>

#include "svback/corpus.hpp"
#include "svback/preprocess.hpp"
#include "svback/text.hpp"

namespace svback {

/// Two-covariance model: x = mu + y + e, y ~ N(0, between), e ~ N(0, within).
struct PldaModel {
  Eigen::VectorXd mu;
  Eigen::MatrixXd between;
  Eigen::MatrixXd within;
  std::vector<double> em_log_likelihoods;

  int dim() const { return static_cast<int>(mu.size()); }
};

struct PldaOptions {
  int iterations = 10;
  double floor = 1e-6;  // within eigenvalues >= floor * trace(within) / k
};

/// Per-speaker sufficient statistics.
struct PldaStats {
  int dim = 0;
  std::vector<int> counts;
  std::vector<Eigen::VectorXd> means;
  Eigen::MatrixXd within_scatter;  // sum over speakers of scatter about the speaker mean
  Eigen::VectorXd data_mean;
  Eigen::MatrixXd data_covariance;
  long total = 0;
};

inline PldaStats plda_stats(const Corpus& corpus) {
  const SpeakerIndex spk = index_speakers(corpus);
  for (std::size_t i = 0; i < corpus.size(); ++i)
    if (spk.label_of_segment[i] < 0) fail<DataError>("fit_plda: segment '", corpus[i].id, "' has no speaker label");
  if (spk.names.size() < 2) fail<DataError>("fit_plda: need at least 2 speakers, got ", spk.names.size());
  bool any_multi = false;
  for (const auto& m : spk.members) any_multi |= m.size() >= 2;
  if (!any_multi) fail<DataError>("fit_plda: every speaker has a single segment; within covariance is unidentifiable");

  const int k = corpus.dim();
  PldaStats st;
  st.dim = k;
  st.within_scatter = Eigen::MatrixXd::Zero(k, k);
  st.data_mean = Eigen::VectorXd::Zero(k);
  for (const auto& members : spk.members) {
    Eigen::MatrixXd x(static_cast<Eigen::Index>(members.size()), k);
    for (std::size_t r = 0; r < members.size(); ++r) x.row(r) = corpus[members[r]].vector.transpose();
    Eigen::VectorXd mean = x.colwise().mean().transpose();
    st.data_mean += x.colwise().sum().transpose();
    x.rowwise() -= mean.transpose();
    st.within_scatter.noalias() += x.transpose() * x;
    st.counts.push_back(static_cast<int>(members.size()));
    st.means.push_back(std::move(mean));
  }
  st.total = static_cast<long>(corpus.size());
  st.data_mean /= static_cast<double>(st.total);
  Eigen::MatrixXd x = corpus.matrix();
  x.rowwise() -= st.data_mean.transpose();
  st.data_covariance = (x.transpose() * x) / static_cast<double>(st.total);
  return st;
}

namespace detail {

inline double log_det_spd(const Eigen::MatrixXd& m) {
  Eigen::LLT<Eigen::MatrixXd> llt(m);
  if (llt.info() != Eigen::Success) fail<NumericalError>("plda: covariance is not positive definite");
  return 2.0 * llt.matrixL().toDenseMatrix().diagonal().array().log().sum();
}

inline Eigen::MatrixXd floor_eigenvalues(const Eigen::MatrixXd& m, double floor) {
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(0.5 * (m + m.transpose()));
  const double lo = floor * m.trace() / static_cast<double>(m.rows());
  Eigen::VectorXd ev = es.eigenvalues().cwiseMax(lo);
  return es.eigenvectors() * ev.asDiagonal() * es.eigenvectors().transpose();
}

/// Speakers grouped by segment count; those share B + W/n.
inline std::map<int, std::vector<std::size_t>> group_by_count(const PldaStats& st) {
  std::map<int, std::vector<std::size_t>> g;
  for (std::size_t s = 0; s < st.counts.size(); ++s) g[st.counts[s]].push_back(s);
  return g;
}

}  // namespace detail

/// Total data log-likelihood.  Per speaker with n segments, mean m and
/// scatter S:  log N(m; mu, B + W/n) - (n-1)k/2 log 2pi - (n-1)/2 log|W|
///             - k/2 log n - 1/2 tr(W^-1 S).
inline double plda_log_likelihood(const PldaModel& model, const PldaStats& st) {
  const int k = st.dim;
  const double log2pi = std::log(2.0 * std::numbers::pi);
  const double logdet_w = detail::log_det_spd(model.within);
  Eigen::LLT<Eigen::MatrixXd> w_llt(model.within);
  double ll = -0.5 * w_llt.solve(st.within_scatter).trace();
  for (const auto& [n, speakers] : detail::group_by_count(st)) {
    const Eigen::MatrixXd cov = model.between + model.within / static_cast<double>(n);
    Eigen::LLT<Eigen::MatrixXd> llt(cov);
    if (llt.info() != Eigen::Success) fail<NumericalError>("plda: B + W/n is not positive definite");
    const double logdet = 2.0 * llt.matrixL().toDenseMatrix().diagonal().array().log().sum();
    for (std::size_t s : speakers) {
      const Eigen::VectorXd diff = st.means[s] - model.mu;
      ll += -0.5 * (k * log2pi + logdet + diff.dot(llt.solve(diff)));
      ll += -0.5 * (n - 1) * k * log2pi - 0.5 * (n - 1) * logdet_w - 0.5 * k * std::log(static_cast<double>(n));
    }
  }
  return ll;
}

/// One EM update of (mu, B, W) on the speaker-level latent variable.
inline PldaModel plda_em_step(const PldaModel& model, const PldaStats& st, double floor) {
  const int k = st.dim;
  const double n_spk = static_cast<double>(st.counts.size());
  Eigen::VectorXd sum_z = Eigen::VectorXd::Zero(k);
  Eigen::MatrixXd sum_zz = Eigen::MatrixXd::Zero(k, k);
  Eigen::MatrixXd w_acc = st.within_scatter;
  for (const auto& [n, speakers] : detail::group_by_count(st)) {
    const Eigen::MatrixXd cov = model.between + model.within / static_cast<double>(n);
    Eigen::LDLT<Eigen::MatrixXd> ldlt(cov);
    const Eigen::MatrixXd gain = ldlt.solve(model.between).transpose();  // B (B + W/n)^-1
    Eigen::MatrixXd post_cov = model.between - gain * model.between;
    post_cov = 0.5 * (post_cov + post_cov.transpose());
    const double cnt = static_cast<double>(speakers.size());
    sum_zz += cnt * post_cov;
    w_acc += static_cast<double>(n) * cnt * post_cov;
    for (std::size_t s : speakers) {
      const Eigen::VectorXd z = model.mu + gain * (st.means[s] - model.mu);
      sum_z += z;
      sum_zz.noalias() += z * z.transpose();
      const Eigen::VectorXd r = st.means[s] - z;
      w_acc.noalias() += static_cast<double>(n) * r * r.transpose();
    }
  }
  PldaModel next;
  next.mu = sum_z / n_spk;
  next.between = sum_zz / n_spk - next.mu * next.mu.transpose();
  next.between = 0.5 * (next.between + next.between.transpose());
  next.within = detail::floor_eigenvalues(w_acc / static_cast<double>(st.total), floor);
  return next;
}

/// EM from a given starting point.
inline PldaModel fit_plda(const PldaStats& st, const PldaModel& init, const PldaOptions& opts) {
  if (opts.iterations < 0) fail<ConfigError>("fit_plda: iterations must be >= 0");
  PldaModel model = init;
  model.em_log_likelihoods.clear();
  for (int it = 0; it < opts.iterations; ++it) {
    PldaModel next = plda_em_step(model, st, opts.floor);
    next.em_log_likelihoods = std::move(model.em_log_likelihoods);
    next.em_log_likelihoods.push_back(plda_log_likelihood(next, st));
    model = std::move(next);
  }
  return model;
}

/// Default start: mu = data mean, B = W = half the total covariance.
inline PldaModel plda_initial_model(const PldaStats& st, double floor) {
  PldaModel m;
  m.mu = st.data_mean;
  m.between = 0.5 * st.data_covariance;
  m.within = detail::floor_eigenvalues(0.5 * st.data_covariance, floor);
  return m;
}

inline PldaModel fit_plda(const Corpus& corpus, const PldaOptions& opts = {}) {
  const PldaStats st = plda_stats(corpus);
  return fit_plda(st, plda_initial_model(st, opts.floor), opts);
}

/// Precomputed quadratic form for the verification LLR
///   log N([e;t]; [mu;mu], [[T,B],[B,T]]) - log N([e;t]; [mu;mu], [[T,0],[0,T]]),  T = B + W.
/// The same-speaker covariance block-diagonalizes into T+B and T-B = W, which
/// gives the inverse blocks and determinant in closed form.
class PldaScorer {
 public:
  explicit PldaScorer(const PldaModel& m) : mu_(m.mu) {
    const Eigen::MatrixXd total = m.between + m.within;
    const Eigen::MatrixXd sum = total + m.between;
    const Eigen::MatrixXd inv_sum = Eigen::LDLT<Eigen::MatrixXd>(sum).solve(Eigen::MatrixXd::Identity(dim(), dim()));
    const Eigen::MatrixXd inv_w = Eigen::LDLT<Eigen::MatrixXd>(m.within).solve(Eigen::MatrixXd::Identity(dim(), dim()));
    const Eigen::MatrixXd inv_t = Eigen::LDLT<Eigen::MatrixXd>(total).solve(Eigen::MatrixXd::Identity(dim(), dim()));
    diag_ = 0.5 * (inv_sum + inv_w) - inv_t;
    cross_ = 0.5 * (inv_sum - inv_w);
    diag_ = 0.5 * (diag_ + diag_.transpose());
    cross_ = 0.5 * (cross_ + cross_.transpose());
    offset_ = 0.5 * (2.0 * detail::log_det_spd(total) - detail::log_det_spd(sum) - detail::log_det_spd(m.within));
  }

  int dim() const { return static_cast<int>(mu_.size()); }

  double operator()(const Eigen::VectorXd& enroll, const Eigen::VectorXd& test) const {
    if (enroll.size() != mu_.size() || test.size() != mu_.size())
      fail<DataError>("plda score: vector dimension does not match model dimension ", mu_.size());
    const Eigen::VectorXd e = enroll - mu_;
    const Eigen::VectorXd t = test - mu_;
    // Both orders of the cross term are summed so swapping e and t is exact.
    return offset_ - 0.5 * (e.dot(diag_ * e) + t.dot(diag_ * t)) - 0.5 * (e.dot(cross_ * t) + t.dot(cross_ * e));
  }

 private:
  Eigen::VectorXd mu_;
  Eigen::MatrixXd diag_;
  Eigen::MatrixXd cross_;
  double offset_ = 0.0;
};

inline double score_trial(const PldaModel& model, const Eigen::VectorXd& enroll, const Eigen::VectorXd& test) {
  return PldaScorer(model)(enroll, test);
}

/// Scores every trial in order.  Multi-segment enrollment is averaged into a
/// single vector.  With `trial_mean` the pair average is removed from both
/// sides before scoring.
inline ScoreSet score_trialset(const PldaModel& model, const Corpus& corpus, const TrialSet& trials,
                               bool trial_mean = false) {
  const PldaScorer scorer(model);
  ScoreSet out;
  out.trials = trials;
  out.scores.reserve(trials.size());
  for (std::size_t i = 0; i < trials.size(); ++i) {
    const Trial& tr = trials.trials[i];
    if (tr.enroll.empty()) fail<DataError>("trial ", i, ": empty enrollment list");
    Eigen::VectorXd enroll = Eigen::VectorXd::Zero(corpus.dim());
    for (const auto& id : tr.enroll) {
      auto idx = corpus.find(id);
      if (!idx) fail<DataError>("trial ", i, ": unknown enrollment segment '", id, "'");
      enroll += corpus[*idx].vector;
    }
    enroll /= static_cast<double>(tr.enroll.size());
    auto t_idx = corpus.find(tr.test);
    if (!t_idx) fail<DataError>("trial ", i, ": unknown test segment '", tr.test, "'");
    const Eigen::VectorXd& test = corpus[*t_idx].vector;
    if (trial_mean) {
      auto [e2, t2] = trial_mean_subtract(enroll, test);
      out.scores.push_back(scorer(e2, t2));
    } else {
      out.scores.push_back(scorer(enroll, test));
    }
  }
  return out;
}

// Model file:
//   #plda dim=<k>
//   mu <k values>
//   between            followed by k rows
//   within             followed by k rows
//   loglik <values>    (optional)
inline void write_plda(const PldaModel& m, std::ostream& os) {
  const int k = m.dim();
  os << "#plda dim=" << k << "\nmu";
  for (int i = 0; i < k; ++i) os << ' ' << format_double(m.mu[i]);
  auto matrix = [&](const char* name, const Eigen::MatrixXd& a) {
    os << '\n' << name;
    for (int r = 0; r < k; ++r) {
      os << '\n';
      for (int c = 0; c < k; ++c) os << (c ? " " : "") << format_double(a(r, c));
    }
  };
  matrix("between", m.between);
  matrix("within", m.within);
  os << "\nloglik";
  for (double v : m.em_log_likelihoods) os << ' ' << format_double(v);
  os << '\n';
}

inline void write_plda(const PldaModel& m, const std::string& path) {
  auto os = open_output(path);
  write_plda(m, os);
}

inline PldaModel read_plda(std::istream& is, const std::string& name = "<stream>") {
  std::vector<std::string> lines;
  for (std::string line; std::getline(is, line);)
    if (!trim(line).empty()) lines.push_back(line);
  if (lines.empty() || lines[0].rfind("#plda dim=", 0) != 0) fail<DataError>(name, ":1: expected '#plda dim=<k>'");
  auto k = parse_int(trim(std::string_view(lines[0]).substr(10)));
  if (!k || *k < 1) fail<DataError>(name, ":1: bad dimension");
  const int dim = static_cast<int>(*k);
  std::size_t pos = 1;
  auto values = [&](std::string_view line, std::size_t expect, std::size_t skip) {
    auto tok = split_ws(line);
    if (tok.size() != expect + skip) fail<DataError>(name, ":", pos + 1, ": expected ", expect, " values");
    std::vector<double> v;
    for (std::size_t i = skip; i < tok.size(); ++i) {
      auto x = parse_double(tok[i]);
      if (!x) fail<DataError>(name, ":", pos + 1, ": bad number '", tok[i], "'");
      v.push_back(*x);
    }
    return v;
  };
  auto expect_tag = [&](const char* tag) {
    if (pos >= lines.size() || split_ws(lines[pos]).empty() || split_ws(lines[pos])[0] != tag)
      fail<DataError>(name, ":", pos + 1, ": expected '", tag, "'");
  };
  PldaModel m;
  expect_tag("mu");
  auto mu = values(lines[pos++], dim, 1);
  m.mu = Eigen::Map<Eigen::VectorXd>(mu.data(), dim);
  auto matrix = [&](const char* tag) {
    expect_tag(tag);
    ++pos;
    Eigen::MatrixXd a(dim, dim);
    for (int r = 0; r < dim; ++r, ++pos) {
      if (pos >= lines.size()) fail<DataError>(name, ": truncated ", tag, " matrix");
      auto row = values(lines[pos], dim, 0);
      for (int c = 0; c < dim; ++c) a(r, c) = row[c];
    }
    return a;
  };
  m.between = matrix("between");
  m.within = matrix("within");
  if (pos < lines.size()) {
    expect_tag("loglik");
    auto tok = split_ws(lines[pos]);
    m.em_log_likelihoods = values(lines[pos], tok.size() - 1, 1);
  }
  return m;
}

inline PldaModel read_plda(const std::string& path) {
  auto is = open_input(path);
  return read_plda(is, path);
}

}  // namespace svback
