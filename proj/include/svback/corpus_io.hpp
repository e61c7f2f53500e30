// svback/corpus_io.hpp

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

#include <fstream>
#include <span>
#include <string>

#include "svback/corpus.hpp"
#include "svback/text.hpp"

namespace svback {

// Corpus file:
//   #dim=<d>
//   segment_id <TAB> speaker|- <TAB> gender|- <TAB> domain <TAB> partition|- <TAB> v1 v2 ... vd
// Vectors are written in shortest round-trip form, so read(write(c)) == c.

inline void write_corpus(const Corpus& corpus, std::ostream& os) {
  os << "#dim=" << corpus.dim() << '\n';
  for (const auto& s : corpus) {
    os << s.id << '\t' << (s.speaker ? *s.speaker : "-") << '\t'
       << (s.gender ? to_string(*s.gender) : "-") << '\t' << to_string(s.domain) << '\t'
       << (s.partition ? *s.partition : "-") << '\t';
    for (Eigen::Index i = 0; i < s.vector.size(); ++i) {
      if (i) os << ' ';
      os << format_double(s.vector[i]);
    }
    os << '\n';
  }
}

inline void write_corpus(const Corpus& corpus, const std::string& path) {
  auto os = open_output(path);
  write_corpus(corpus, os);
}

namespace detail {

inline std::optional<std::string> optional_field(std::string_view f) {
  if (f == "-") return std::nullopt;
  return std::string(f);
}

}  // namespace detail

inline Corpus read_corpus(std::istream& is, const std::string& name = "<stream>") {
  std::string line;
  int line_no = 0;
  std::optional<Corpus> corpus;
  while (std::getline(is, line)) {
    ++line_no;
    std::string_view view = trim(line);
    if (view.empty()) continue;
    if (!corpus) {
      if (view.substr(0, 5) != "#dim=") fail<DataError>(name, ":", line_no, ": expected '#dim=<d>' header");
      auto d = parse_int(view.substr(5));
      if (!d || *d <= 0) fail<DataError>(name, ":", line_no, ": bad dimension in header");
      corpus.emplace(static_cast<int>(*d));
      continue;
    }
    if (view.front() == '#') continue;
    auto fields = split(view, '\t');
    if (fields.size() != 6) fail<DataError>(name, ":", line_no, ": expected 6 tab-separated fields, found ", fields.size());
    Segment seg;
    seg.id = std::string(fields[0]);
    if (seg.id.empty()) fail<DataError>(name, ":", line_no, ": empty segment id");
    seg.speaker = detail::optional_field(fields[1]);
    if (fields[2] != "-") {
      auto g = parse_gender(fields[2]);
      if (!g) fail<DataError>(name, ":", line_no, ": unknown gender '", fields[2], "'");
      seg.gender = g;
    }
    auto dom = parse_domain(fields[3]);
    if (!dom) fail<DataError>(name, ":", line_no, ": unknown domain '", fields[3], "'");
    seg.domain = *dom;
    seg.partition = detail::optional_field(fields[4]);
    auto values = split_ws(fields[5]);
    if (static_cast<int>(values.size()) != corpus->dim())
      fail<DataError>(name, ":", line_no, ": expected ", corpus->dim(), " values, found ", values.size());
    seg.vector.resize(corpus->dim());
    for (std::size_t i = 0; i < values.size(); ++i) {
      auto v = parse_double(values[i]);
      if (!v) fail<DataError>(name, ":", line_no, ": bad number '", values[i], "'");
      seg.vector[static_cast<Eigen::Index>(i)] = *v;
    }
    if (corpus->find(seg.id)) fail<DataError>(name, ":", line_no, ": duplicate segment id '", seg.id, "'");
    corpus->add(std::move(seg));
  }
  if (!corpus) fail<DataError>(name, ": missing '#dim=<d>' header");
  return std::move(*corpus);
}

inline Corpus read_corpus(const std::string& path) {
  auto is = open_input(path);
  return read_corpus(is, path);
}

// Trial file: enroll_id[,enroll_id...] <TAB> test_id <TAB> target|nontarget|- <TAB> partition|-
// Score file: the trial fields plus <TAB> score.  A first line
// "#calibrated=<name>" marks calibrated scores.

inline void write_trial_fields(const Trial& t, std::ostream& os) {
  for (std::size_t i = 0; i < t.enroll.size(); ++i) os << (i ? "," : "") << t.enroll[i];
  os << '\t' << t.test << '\t' << (t.key ? to_string(*t.key) : "-") << '\t'
     << (t.partition ? *t.partition : "-");
}

inline void write_trials(const TrialSet& trials, std::ostream& os) {
  for (const auto& t : trials.trials) {
    write_trial_fields(t, os);
    os << '\n';
  }
}

inline void write_trials(const TrialSet& trials, const std::string& path) {
  auto os = open_output(path);
  write_trials(trials, os);
}

namespace detail {

inline Trial parse_trial_fields(std::span<const std::string_view> f, const std::string& name, int line_no) {
  Trial t;
  for (auto e : split(f[0], ',')) {
    if (e.empty()) fail<DataError>(name, ":", line_no, ": empty enrollment id");
    t.enroll.emplace_back(e);
  }
  if (f[1].empty()) fail<DataError>(name, ":", line_no, ": empty test id");
  t.test = std::string(f[1]);
  if (f[2] == "target") t.key = Key::target;
  else if (f[2] == "nontarget") t.key = Key::nontarget;
  else if (f[2] != "-") fail<DataError>(name, ":", line_no, ": unknown key token '", f[2], "'");
  t.partition = optional_field(f[3]);
  return t;
}

}  // namespace detail

inline TrialSet read_trials(std::istream& is, const std::string& name = "<stream>") {
  TrialSet out;
  std::string line;
  int line_no = 0;
  while (std::getline(is, line)) {
    ++line_no;
    std::string_view view = trim(line);
    if (view.empty() || view.front() == '#') continue;
    auto fields = split(view, '\t');
    if (fields.size() != 4) fail<DataError>(name, ":", line_no, ": expected 4 tab-separated fields, found ", fields.size());
    out.trials.push_back(detail::parse_trial_fields(fields, name, line_no));
  }
  return out;
}

inline TrialSet read_trials(const std::string& path) {
  auto is = open_input(path);
  return read_trials(is, path);
}

inline void write_scores(const ScoreSet& s, std::ostream& os) {
  if (s.trials.size() != s.scores.size()) fail<DataError>("score count does not match trial count");
  if (s.calibration) os << "#calibrated=" << *s.calibration << '\n';
  for (std::size_t i = 0; i < s.scores.size(); ++i) {
    write_trial_fields(s.trials.trials[i], os);
    os << '\t' << format_double(s.scores[i], 12) << '\n';
  }
}

inline void write_scores(const ScoreSet& s, const std::string& path) {
  auto os = open_output(path);
  write_scores(s, os);
}

inline ScoreSet read_scores(std::istream& is, const std::string& name = "<stream>") {
  ScoreSet out;
  std::string line;
  int line_no = 0;
  while (std::getline(is, line)) {
    ++line_no;
    std::string_view view = trim(line);
    if (view.empty()) continue;
    if (view.front() == '#') {
      if (view.substr(0, 12) == "#calibrated=") out.calibration = std::string(view.substr(12));
      continue;
    }
    auto fields = split(view, '\t');
    if (fields.size() != 5) fail<DataError>(name, ":", line_no, ": expected 5 tab-separated fields, found ", fields.size());
    out.trials.trials.push_back(detail::parse_trial_fields(fields, name, line_no));
    auto v = parse_double(fields[4]);
    if (!v) fail<DataError>(name, ":", line_no, ": bad score '", fields[4], "'");
    out.scores.push_back(*v);
  }
  return out;
}

inline ScoreSet read_scores(const std::string& path) {
  auto is = open_input(path);
  return read_scores(is, path);
}

}  // namespace svback
