// svback/preprocess.hpp

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

#include <string_view>
#include <utility>

#include "svback/corpus.hpp"

namespace svback {

enum class MeanSource { minor_only, major_only, minor_plus_major, custom };

struct CenteringStats {
  Eigen::VectorXd mean;
  MeanSource source = MeanSource::custom;
};

inline DomainSet domains_for(MeanSource src) {
  switch (src) {
    case MeanSource::minor_only: return {Domain::in_domain_minor};
    case MeanSource::major_only: return {Domain::in_domain_major};
    case MeanSource::minor_plus_major: return {Domain::in_domain_minor, Domain::in_domain_major};
    case MeanSource::custom: break;
  }
  fail<ConfigError>("custom mean source has no fixed domain selection");
}

/// Arithmetic mean of the vectors whose domain is in `selection`.
inline CenteringStats compute_mean(const Corpus& corpus, const DomainSet& selection,
                                   MeanSource source = MeanSource::custom) {
  Eigen::VectorXd sum = Eigen::VectorXd::Zero(corpus.dim());
  std::size_t n = 0;
  for (const auto& s : corpus) {
    if (!selection.contains(s.domain)) continue;
    sum += s.vector;
    ++n;
  }
  if (n == 0) fail<DataError>("compute_mean: selection is empty");
  return {sum / static_cast<double>(n), source};
}

inline CenteringStats compute_mean(const Corpus& corpus, MeanSource source) {
  return compute_mean(corpus, domains_for(source), source);
}

/// Subtracts stats.mean from the vectors of the selected domains.
inline Corpus center(const Corpus& corpus, const CenteringStats& stats,
                     const DomainSet& apply_to = DomainSet::all()) {
  if (stats.mean.size() != corpus.dim())
    fail<DataError>("center: mean has dimension ", stats.mean.size(), ", corpus has ", corpus.dim());
  return corpus.map_vectors([&](const Segment& s) -> Eigen::VectorXd {
    if (!apply_to.contains(s.domain)) return s.vector;
    return s.vector - stats.mean;
  });
}

inline Corpus length_normalize(const Corpus& corpus, const DomainSet& apply_to = DomainSet::all()) {
  return corpus.map_vectors([&](const Segment& s) -> Eigen::VectorXd {
    if (!apply_to.contains(s.domain)) return s.vector;
    const double n = s.vector.norm();
    if (!(n > 0.0)) fail<DataError>("length_normalize: segment '", s.id, "' has a zero vector");
    return s.vector / n;
  });
}

/// Subtracts the pair average from both vectors, so the results are exact
/// negatives of each other.
inline std::pair<Eigen::VectorXd, Eigen::VectorXd> trial_mean_subtract(const Eigen::VectorXd& enroll,
                                                                       const Eigen::VectorXd& test) {
  if (enroll.size() != test.size()) fail<DataError>("trial_mean_subtract: dimension mismatch");
  Eigen::VectorXd half_diff = 0.5 * (enroll - test);
  return {half_diff, -half_diff};
}

}  // namespace svback
