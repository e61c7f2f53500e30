// svback/lda.hpp

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

#include <span>
#include <string>
#include <vector>

#include <Eigen/Dense>

#include "svback/corpus.hpp"
#include "svback/text.hpp"

namespace svback {

struct ScatterPair {
  Eigen::MatrixXd between;  // S_b
  Eigen::MatrixXd within;   // S_w
  int class_count = 0;
};

/// Linear map v -> matrix * (v - mean).  `mean` may be empty (no offset).
/// Rows are unit norm; objective_values are the discriminant ratios the rows
/// achieve, sorted descending.
struct Projection {
  Eigen::MatrixXd matrix;
  Eigen::VectorXd objective_values;
  Eigen::VectorXd mean;

  int input_dim() const { return static_cast<int>(matrix.cols()); }
  int output_dim() const { return static_cast<int>(matrix.rows()); }

  Eigen::VectorXd apply(const Eigen::VectorXd& v) const {
    if (v.size() != matrix.cols())
      fail<DataError>("projection expects dimension ", matrix.cols(), ", got ", v.size());
    if (mean.size() == 0) return matrix * v;
    return matrix * (v - mean);
  }
};

inline Corpus project(const Projection& p, const Corpus& corpus) {
  if (corpus.dim() != p.input_dim())
    fail<DataError>("project: corpus dimension ", corpus.dim(), " does not match projection input ",
                    p.input_dim());
  return corpus.map_vectors([&](const Segment& s) { return p.apply(s.vector); }, p.output_dim());
}

/// Every segment must carry a speaker label; classes are speakers.
inline ScatterPair compute_scatter(const Corpus& corpus) {
  const SpeakerIndex spk = index_speakers(corpus);
  for (std::size_t i = 0; i < corpus.size(); ++i)
    if (spk.label_of_segment[i] < 0)
      fail<DataError>("compute_scatter: segment '", corpus[i].id, "' has no speaker label");
  if (spk.names.size() < 2) fail<DataError>("compute_scatter: need at least 2 classes, got ", spk.names.size());

  const int d = corpus.dim();
  Eigen::VectorXd global = Eigen::VectorXd::Zero(d);
  for (const auto& s : corpus) global += s.vector;
  global /= static_cast<double>(corpus.size());

  ScatterPair out{Eigen::MatrixXd::Zero(d, d), Eigen::MatrixXd::Zero(d, d),
                  static_cast<int>(spk.names.size())};
  for (const auto& members : spk.members) {
    Eigen::MatrixXd x(static_cast<Eigen::Index>(members.size()), d);
    for (std::size_t r = 0; r < members.size(); ++r) x.row(r) = corpus[members[r]].vector.transpose();
    const Eigen::RowVectorXd mu = x.colwise().mean();
    x.rowwise() -= mu;
    out.within.noalias() += x.transpose() * x;
    const Eigen::VectorXd diff = mu.transpose() - global;
    out.between.noalias() += static_cast<double>(members.size()) * diff * diff.transpose();
  }
  out.within = 0.5 * (out.within + out.within.transpose());
  out.between = 0.5 * (out.between + out.between.transpose());
  return out;
}

/// Flips each row so that its first non-negligible entry is positive.
inline void canonicalize_signs(Eigen::MatrixXd& rows) {
  for (Eigen::Index r = 0; r < rows.rows(); ++r) {
    const double scale = rows.row(r).cwiseAbs().maxCoeff();
    for (Eigen::Index c = 0; c < rows.cols(); ++c) {
      if (std::abs(rows(r, c)) > 1e-12 * scale) {
        if (rows(r, c) < 0) rows.row(r) *= -1.0;
        break;
      }
    }
  }
}

/// Top-k generalized eigenvectors of (S_w + ridge * tr(S_w)/d * I)^-1 S_b,
/// as unit rows with canonical signs.  Shared by LDA and SVDA.
inline Projection discriminant_projection(const Eigen::MatrixXd& between, const Eigen::MatrixXd& within,
                                          int k, double ridge) {
  const auto d = within.rows();
  if (between.rows() != d || between.cols() != d || within.cols() != d)
    fail<DataError>("discriminant_projection: scatter shape mismatch");
  if (k < 1 || k > d) fail<ConfigError>("output dimension ", k, " must be in [1, ", d, "]");
  if (ridge < 0) fail<ConfigError>("ridge must be non-negative");

  Eigen::MatrixXd sw = within;
  sw.diagonal().array() += ridge * within.trace() / static_cast<double>(d);
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> check(sw, Eigen::EigenvaluesOnly);
  const double max_eig = check.eigenvalues().maxCoeff();
  if (!(max_eig > 0) || check.eigenvalues().minCoeff() <= 1e-12 * max_eig) {
    if (ridge == 0) fail<NumericalError>("within-class scatter is singular; use a positive ridge");
    fail<NumericalError>("within-class scatter is singular even with ridge ", ridge);
  }

  Eigen::GeneralizedSelfAdjointEigenSolver<Eigen::MatrixXd> ges(between, sw,
                                                               Eigen::ComputeEigenvectors | Eigen::Ax_lBx);
  if (ges.info() != Eigen::Success) fail<NumericalError>("generalized eigensolver failed");

  Projection p;
  p.matrix.resize(k, d);
  p.objective_values.resize(k);
  for (int i = 0; i < k; ++i) {
    const auto col = d - 1 - i;  // eigenvalues ascend
    p.objective_values[i] = ges.eigenvalues()[col];
    p.matrix.row(i) = ges.eigenvectors().col(col).normalized().transpose();
  }
  canonicalize_signs(p.matrix);
  return p;
}

inline Projection fit_lda(const Corpus& corpus, int out_dim, double ridge = 1e-6) {
  if (out_dim > corpus.dim()) fail<ConfigError>("fit_lda: output dimension ", out_dim, " exceeds input ", corpus.dim());
  const ScatterPair sp = compute_scatter(corpus);
  return discriminant_projection(sp.between, sp.within, out_dim, ridge);
}

/// Returns outer * inner as one projection (inner applied first).
inline Projection compose(const Projection& outer, const Projection& inner) {
  if (outer.input_dim() != inner.output_dim()) fail<DataError>("compose: dimension mismatch");
  Projection p;
  p.matrix = outer.matrix * inner.matrix;
  p.objective_values = outer.objective_values;
  p.mean = inner.mean;
  if (outer.mean.size() != 0) {
    // outer(inner(v)) = O (I (v - m_i) - m_o); fold m_o back through I's row space.
    Eigen::VectorXd shift = inner.matrix.completeOrthogonalDecomposition().solve(outer.mean);
    p.mean = (inner.mean.size() ? inner.mean : Eigen::VectorXd::Zero(inner.input_dim())) + shift;
  }
  return p;
}

// File format:
//   #rows k #cols d
//   #objective l1 ... lk
//   #mean m1 ... md          (only when the projection has an offset)
//   k rows of d values
inline void write_projection(const Projection& p, std::ostream& os) {
  os << "#rows " << p.output_dim() << " #cols " << p.input_dim() << '\n';
  os << "#objective";
  for (Eigen::Index i = 0; i < p.objective_values.size(); ++i) os << ' ' << format_double(p.objective_values[i]);
  os << '\n';
  if (p.mean.size()) {
    os << "#mean";
    for (Eigen::Index i = 0; i < p.mean.size(); ++i) os << ' ' << format_double(p.mean[i]);
    os << '\n';
  }
  for (Eigen::Index r = 0; r < p.matrix.rows(); ++r) {
    for (Eigen::Index c = 0; c < p.matrix.cols(); ++c) os << (c ? " " : "") << format_double(p.matrix(r, c));
    os << '\n';
  }
}

inline void write_projection(const Projection& p, const std::string& path) {
  auto os = open_output(path);
  write_projection(p, os);
}

namespace detail {

inline Eigen::VectorXd parse_vector(std::span<const std::string_view> tokens, const std::string& name, int line_no) {
  Eigen::VectorXd v(static_cast<Eigen::Index>(tokens.size()));
  for (std::size_t i = 0; i < tokens.size(); ++i) {
    auto x = parse_double(tokens[i]);
    if (!x) fail<DataError>(name, ":", line_no, ": bad number '", tokens[i], "'");
    v[static_cast<Eigen::Index>(i)] = *x;
  }
  return v;
}

}  // namespace detail

inline Projection read_projection(std::istream& is, const std::string& name = "<stream>") {
  std::string line;
  int line_no = 0;
  long long rows = -1, cols = -1;
  Projection p;
  int row = 0;
  while (std::getline(is, line)) {
    ++line_no;
    auto tok = split_ws(trim(line));
    if (tok.empty()) continue;
    if (rows < 0) {
      if (tok.size() != 4 || tok[0] != "#rows" || tok[2] != "#cols")
        fail<DataError>(name, ":", line_no, ": expected '#rows k #cols d' header");
      auto r = parse_int(tok[1]), c = parse_int(tok[3]);
      if (!r || !c || *r < 1 || *c < 1) fail<DataError>(name, ":", line_no, ": bad matrix shape");
      rows = *r;
      cols = *c;
      p.matrix.resize(rows, cols);
      p.objective_values = Eigen::VectorXd::Zero(rows);
      continue;
    }
    if (tok[0] == "#objective") {
      p.objective_values = detail::parse_vector(std::span(tok).subspan(1), name, line_no);
      if (p.objective_values.size() != rows) fail<DataError>(name, ":", line_no, ": expected ", rows, " objective values");
      continue;
    }
    if (tok[0] == "#mean") {
      p.mean = detail::parse_vector(std::span(tok).subspan(1), name, line_no);
      if (p.mean.size() != cols) fail<DataError>(name, ":", line_no, ": expected ", cols, " mean values");
      continue;
    }
    if (tok[0].front() == '#') continue;
    if (row >= rows) fail<DataError>(name, ":", line_no, ": too many rows");
    if (static_cast<long long>(tok.size()) != cols)
      fail<DataError>(name, ":", line_no, ": expected ", cols, " values, found ", tok.size());
    p.matrix.row(row++) = detail::parse_vector(tok, name, line_no).transpose();
  }
  if (rows < 0) fail<DataError>(name, ": missing header");
  if (row != rows) fail<DataError>(name, ": expected ", rows, " rows, found ", row);
  return p;
}

inline Projection read_projection(const std::string& path) {
  auto is = open_input(path);
  return read_projection(is, path);
}

}  // namespace svback
