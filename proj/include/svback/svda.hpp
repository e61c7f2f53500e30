// svback/svda.hpp

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

#include <ostream>
#include <string>
#include <vector>

#include "svback/corpus.hpp"
#include "svback/lda.hpp"
#include "svback/svm.hpp"

namespace svback {

struct SvdaOptions {
  double c = 1.0;
  double tol = 1e-6;
  double ridge = 1e-6;
  long long max_iters = 0;
};

/// One one-vs-rest classifier per labeled class.
struct SvdaClassifier {
  std::string class_name;
  Eigen::VectorXd w;
  double b = 0.0;
  std::vector<std::size_t> support;  // indices into [labeled; unlabeled]
  std::size_t labeled_support = 0;
  std::size_t unlabeled_support = 0;
  double duality_gap = 0.0;
  double kkt_residual = 0.0;
};

/// Scatter built from support vectors.  Pool indices refer to the stacked
/// training matrix [labeled rows; unlabeled rows].
struct SvdaScatter {
  Eigen::MatrixXd between;                          // sum_c w_c w_c^T
  Eigen::MatrixXd within;                           // labeled support vectors about their class mean
  std::vector<std::size_t> support_pool;            // union over classifiers, ascending
  std::vector<std::vector<std::size_t>> class_support;  // per class, labeled pool members
  std::vector<Eigen::VectorXd> class_support_means;
  std::vector<SvdaClassifier> classifiers;
  std::size_t labeled_count = 0;

  std::size_t support_count() const { return support_pool.size(); }
};

/// Trains class-vs-rest SVMs where the rest class includes every unlabeled
/// vector, then forms S_b from the classifier directions and S_w from the
/// labeled support vectors.  Bias terms do not enter either matrix.
inline SvdaScatter compute_svda_scatter(const Corpus& labeled, const Corpus& unlabeled, const SvdaOptions& opts) {
  if (!unlabeled.empty() && unlabeled.dim() != labeled.dim())
    fail<DataError>("svda: labeled and unlabeled dimensions differ");
  const SpeakerIndex spk = index_speakers(labeled);
  for (std::size_t i = 0; i < labeled.size(); ++i)
    if (spk.label_of_segment[i] < 0) fail<DataError>("svda: labeled segment '", labeled[i].id, "' has no speaker");
  const std::size_t n_classes = spk.names.size();
  if (n_classes < 2) fail<DataError>("svda: need at least 2 labeled classes, got ", n_classes);

  const int d = labeled.dim();
  const std::size_t n_lab = labeled.size();
  Eigen::MatrixXd x(static_cast<Eigen::Index>(n_lab + unlabeled.size()), d);
  for (std::size_t i = 0; i < n_lab; ++i) x.row(i) = labeled[i].vector.transpose();
  for (std::size_t i = 0; i < unlabeled.size(); ++i) x.row(n_lab + i) = unlabeled[i].vector.transpose();
  const GramMatrix gram(x);

  SvdaScatter out;
  out.labeled_count = n_lab;
  out.between = Eigen::MatrixXd::Zero(d, d);
  out.within = Eigen::MatrixXd::Zero(d, d);
  std::vector<char> in_pool(static_cast<std::size_t>(x.rows()), 0);
  std::vector<signed char> y(static_cast<std::size_t>(x.rows()));
  SvmOptions svm_opts{opts.c, opts.tol, opts.max_iters};

  for (std::size_t c = 0; c < n_classes; ++c) {
    for (std::size_t i = 0; i < y.size(); ++i)
      y[i] = (i < n_lab && spk.label_of_segment[i] == static_cast<int>(c)) ? 1 : -1;
    LinearSvm svm = train_linear_svm(gram, y, svm_opts);
    SvdaClassifier cls{spk.names[c], svm.w, svm.b, svm.support_indices, 0, 0, svm.duality_gap, svm.kkt_residual};
    for (std::size_t idx : svm.support_indices) {
      in_pool[idx] = 1;
      (idx < n_lab ? cls.labeled_support : cls.unlabeled_support)++;
    }
    out.between.noalias() += svm.w * svm.w.transpose();
    out.classifiers.push_back(std::move(cls));
  }

  out.class_support.resize(n_classes);
  for (std::size_t i = 0; i < in_pool.size(); ++i) {
    if (!in_pool[i]) continue;
    out.support_pool.push_back(i);
    if (i < n_lab) out.class_support[spk.label_of_segment[i]].push_back(i);
  }
  out.class_support_means.resize(n_classes);
  for (std::size_t c = 0; c < n_classes; ++c) {
    const auto& members = out.class_support[c];
    if (members.empty()) fail<NumericalError>("svda: class '", spk.names[c], "' has no support vectors");
    Eigen::VectorXd mu = Eigen::VectorXd::Zero(d);
    for (auto i : members) mu += x.row(i).transpose();
    mu /= static_cast<double>(members.size());
    for (auto i : members) {
      const Eigen::VectorXd diff = x.row(i).transpose() - mu;
      out.within.noalias() += diff * diff.transpose();
    }
    out.class_support_means[c] = std::move(mu);
  }
  out.within = 0.5 * (out.within + out.within.transpose());
  out.between = 0.5 * (out.between + out.between.transpose());
  return out;
}

inline Projection fit_svda(const Corpus& labeled, const Corpus& unlabeled, int out_dim, const SvdaOptions& opts = {}) {
  if (out_dim > labeled.dim()) fail<ConfigError>("fit_svda: output dimension ", out_dim, " exceeds input ", labeled.dim());
  const SvdaScatter sc = compute_svda_scatter(labeled, unlabeled, opts);
  return discriminant_projection(sc.between, sc.within, out_dim, opts.ridge);
}

/// SVDA down to mid_dim, then LDA (fit on the SVDA-projected labeled data)
/// down to out_dim, returned as a single out_dim x d map.
inline Projection fit_svda_lda_cascade(const Corpus& labeled, const Corpus& unlabeled, int mid_dim, int out_dim,
                                       const SvdaOptions& opts = {}, double lda_ridge = 1e-6) {
  if (!(out_dim >= 1 && out_dim <= mid_dim && mid_dim <= labeled.dim()))
    fail<ConfigError>("svda->lda cascade needs 1 <= out_dim <= mid_dim <= d (got ", out_dim, ", ", mid_dim, ", ",
                      labeled.dim(), ")");
  const Projection svda = fit_svda(labeled, unlabeled, mid_dim, opts);
  const Projection lda = fit_lda(project(svda, labeled), out_dim, lda_ridge);
  return compose(lda, svda);
}

/// Plain-text per-class support counts.
inline void write_svda_report(const SvdaScatter& sc, std::ostream& os) {
  os << "# class\tlabeled_support\tunlabeled_support\tduality_gap\n";
  for (const auto& cls : sc.classifiers)
    os << cls.class_name << '\t' << cls.labeled_support << '\t' << cls.unlabeled_support << '\t'
       << format_double(cls.duality_gap, 6) << '\n';
  os << "# support_pool " << sc.support_count() << '\n';
}

}  // namespace svback
