// svback/corpus.hpp

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
#include <array>
#include <cmath>
#include <cstdint>
#include <cstdio>
#include <map>
#include <optional>
#include <string>
#include <string_view>
#include <unordered_map>
#include <utility>
#include <vector>

#include <Eigen/Dense>

#include "svback/error.hpp"
#include "svback/rng.hpp"

namespace svback {

enum class Gender { female, male };
enum class Domain { out_of_domain, in_domain_minor, in_domain_major, dev, eval };
enum class Key { target, nontarget };

inline constexpr std::array<Domain, 5> kAllDomains = {
    Domain::out_of_domain, Domain::in_domain_minor, Domain::in_domain_major,
    Domain::dev, Domain::eval};

inline std::string_view to_string(Domain d) {
  switch (d) {
    case Domain::out_of_domain: return "out_of_domain";
    case Domain::in_domain_minor: return "in_domain_minor";
    case Domain::in_domain_major: return "in_domain_major";
    case Domain::dev: return "dev";
    case Domain::eval: return "eval";
  }
  return "?";
}

inline std::optional<Domain> parse_domain(std::string_view s) {
  for (Domain d : kAllDomains)
    if (to_string(d) == s) return d;
  return std::nullopt;
}

inline std::string_view to_string(Gender g) { return g == Gender::female ? "F" : "M"; }

inline std::optional<Gender> parse_gender(std::string_view s) {
  if (s == "F") return Gender::female;
  if (s == "M") return Gender::male;
  return std::nullopt;
}

inline std::string_view to_string(Key k) { return k == Key::target ? "target" : "nontarget"; }

/// Set of domains, used wherever a stage selects part of a corpus.
class DomainSet {
 public:
  DomainSet() = default;
  DomainSet(std::initializer_list<Domain> ds) {
    for (Domain d : ds) insert(d);
  }
  static DomainSet all() { return DomainSet(kAllDomains.begin(), kAllDomains.end()); }

  template <typename It>
  DomainSet(It first, It last) {
    for (; first != last; ++first) insert(*first);
  }

  void insert(Domain d) { bits_ |= 1u << static_cast<unsigned>(d); }
  bool contains(Domain d) const { return bits_ & (1u << static_cast<unsigned>(d)); }
  bool empty() const { return bits_ == 0; }
  bool operator==(const DomainSet&) const = default;

 private:
  unsigned bits_ = 0;
};

struct Segment {
  std::string id;
  Eigen::VectorXd vector;
  std::optional<std::string> speaker;
  std::optional<Gender> gender;
  Domain domain = Domain::out_of_domain;
  std::optional<std::string> partition;

  bool operator==(const Segment& o) const {
    return id == o.id && speaker == o.speaker && gender == o.gender &&
           domain == o.domain && partition == o.partition &&
           vector.size() == o.vector.size() && vector == o.vector;
  }
};

/// Ordered collection of same-dimension segments with unique ids.
class Corpus {
 public:
  Corpus() = default;
  explicit Corpus(int dim) : dim_(dim) {
    if (dim <= 0) fail<ConfigError>("corpus dimension must be positive, got ", dim);
  }
  Corpus(int dim, std::vector<Segment> segments) : Corpus(dim) {
    segments_.reserve(segments.size());
    for (auto& s : segments) add(std::move(s));
  }

  void add(Segment s) {
    if (s.vector.size() != dim_)
      fail<DataError>("segment '", s.id, "' has dimension ", s.vector.size(),
                      ", corpus dimension is ", dim_);
    if (!index_.emplace(s.id, segments_.size()).second)
      fail<DataError>("duplicate segment id '", s.id, "'");
    segments_.push_back(std::move(s));
  }

  int dim() const { return dim_; }
  std::size_t size() const { return segments_.size(); }
  bool empty() const { return segments_.empty(); }
  const std::vector<Segment>& segments() const { return segments_; }
  const Segment& operator[](std::size_t i) const { return segments_[i]; }
  auto begin() const { return segments_.begin(); }
  auto end() const { return segments_.end(); }

  std::optional<std::size_t> find(std::string_view id) const {
    auto it = index_.find(std::string(id));
    if (it == index_.end()) return std::nullopt;
    return it->second;
  }

  const Segment& at(std::string_view id) const {
    auto i = find(id);
    if (!i) fail<DataError>("unknown segment id '", id, "'");
    return segments_[*i];
  }

  /// Rows are segment vectors, in corpus order.
  Eigen::MatrixXd matrix() const {
    Eigen::MatrixXd m(static_cast<Eigen::Index>(segments_.size()), dim_);
    for (std::size_t i = 0; i < segments_.size(); ++i) m.row(i) = segments_[i].vector.transpose();
    return m;
  }

  template <typename Pred>
  Corpus filter(Pred&& keep) const {
    Corpus out(dim_);
    for (const auto& s : segments_)
      if (keep(s)) out.add(s);
    return out;
  }

  Corpus in_domains(const DomainSet& ds) const {
    return filter([&](const Segment& s) { return ds.contains(s.domain); });
  }

  /// New corpus whose vectors are fn(vector); fn may change the dimension.
  template <typename Fn>
  Corpus map_vectors(Fn&& fn, int new_dim) const {
    Corpus out(new_dim);
    for (const auto& s : segments_) {
      Segment t = s;
      t.vector = fn(s);
      out.add(std::move(t));
    }
    return out;
  }

  template <typename Fn>
  Corpus map_vectors(Fn&& fn) const { return map_vectors(std::forward<Fn>(fn), dim_); }

  bool operator==(const Corpus& o) const { return dim_ == o.dim_ && segments_ == o.segments_; }

 private:
  int dim_ = 1;
  std::vector<Segment> segments_;
  std::unordered_map<std::string, std::size_t> index_;
};

/// Speaker labels in order of first appearance; unlabeled segments get -1.
struct SpeakerIndex {
  std::vector<std::string> names;
  std::vector<int> label_of_segment;
  std::vector<std::vector<std::size_t>> members;
};

inline SpeakerIndex index_speakers(const Corpus& corpus) {
  SpeakerIndex idx;
  std::unordered_map<std::string, int> ids;
  idx.label_of_segment.assign(corpus.size(), -1);
  for (std::size_t i = 0; i < corpus.size(); ++i) {
    const auto& spk = corpus[i].speaker;
    if (!spk) continue;
    auto [it, inserted] = ids.emplace(*spk, static_cast<int>(idx.names.size()));
    if (inserted) {
      idx.names.push_back(*spk);
      idx.members.emplace_back();
    }
    idx.label_of_segment[i] = it->second;
    idx.members[it->second].push_back(i);
  }
  return idx;
}

struct Trial {
  std::vector<std::string> enroll;
  std::string test;
  std::optional<Key> key;
  std::optional<std::string> partition;
  bool operator==(const Trial&) const = default;
};

struct TrialSet {
  std::vector<Trial> trials;

  std::size_t size() const { return trials.size(); }
  bool has_keys() const {
    return !trials.empty() &&
           std::all_of(trials.begin(), trials.end(), [](const Trial& t) { return t.key.has_value(); });
  }
  std::vector<Key> keys() const {
    if (!has_keys()) fail<DataError>("trial list has no key; metrics need target/nontarget labels");
    std::vector<Key> k;
    k.reserve(trials.size());
    for (const auto& t : trials) k.push_back(*t.key);
    return k;
  }
  bool operator==(const TrialSet&) const = default;
};

/// Scores aligned with a trial list.  `calibration` names the calibration
/// that produced the scores, if any; act-cost metrics expect it to be set.
struct ScoreSet {
  TrialSet trials;
  std::vector<double> scores;
  std::optional<std::string> calibration;
};

/// Drops speakers with fewer than min_segments segments.  Segments without a
/// speaker label are kept as they are.  Order is preserved.
inline Corpus filter_speakers(const Corpus& corpus, int min_segments) {
  if (min_segments <= 0) fail<ConfigError>("min_segments must be positive");
  std::unordered_map<std::string, int> counts;
  for (const auto& s : corpus)
    if (s.speaker) ++counts[*s.speaker];
  return corpus.filter([&](const Segment& s) {
    return !s.speaker || counts[*s.speaker] >= min_segments;
  });
}

// Synthetic data ------------------------------------------------------------

struct SynthConfig {
  int dimension = 0;
  std::map<Domain, int> speakers;  // speaker count per domain
  int min_segments = 1;
  int max_segments = 1;
  double between_speaker_std = 1.0;
  double within_speaker_std = 0.1;
  std::map<Domain, Eigen::VectorXd> domain_shifts;  // missing domain: no shift
  Eigen::VectorXd gender_shift;                     // empty: no shift; added to male speakers
  std::uint64_t seed = 0;
  // Front-end view.  Speaker means depend only on `seed`.  A fraction
  // `view_noise` of the within-speaker variance is redrawn per view; the rest
  // is shared by all views of a segment.
  std::uint64_t view = 0;
  double view_noise = 1.0;

  void validate() const {
    if (dimension <= 0) fail<ConfigError>("synth: dimension must be positive");
    if (!(between_speaker_std > 0)) fail<ConfigError>("synth: between_speaker_std must be > 0");
    if (!(within_speaker_std >= 0)) fail<ConfigError>("synth: within_speaker_std must be >= 0");
    if (!(view_noise >= 0 && view_noise <= 1)) fail<ConfigError>("synth: view_noise must be in [0, 1]");
    if (min_segments < 1 || max_segments < min_segments)
      fail<ConfigError>("synth: need 1 <= min_segments <= max_segments");
    for (const auto& [d, n] : speakers)
      if (n < 0) fail<ConfigError>("synth: negative speaker count for ", to_string(d));
    for (const auto& [d, v] : domain_shifts)
      if (v.size() != dimension)
        fail<ConfigError>("synth: shift for ", to_string(d), " has dimension ", v.size(),
                          ", expected ", dimension);
    if (gender_shift.size() != 0 && gender_shift.size() != dimension)
      fail<ConfigError>("synth: gender shift has dimension ", gender_shift.size(),
                        ", expected ", dimension);
  }
};

inline std::string_view domain_prefix(Domain d) {
  switch (d) {
    case Domain::out_of_domain: return "ood";
    case Domain::in_domain_minor: return "minor";
    case Domain::in_domain_major: return "major";
    case Domain::dev: return "dev";
    case Domain::eval: return "eval";
  }
  return "x";
}

/// Seeded random direction scaled to `norm`; used to build shift vectors.
inline Eigen::VectorXd random_direction(int dim, std::uint64_t seed, double norm) {
  Rng rng(derive_seed(seed, {0xd1ec7}));
  Eigen::VectorXd v(dim);
  for (int i = 0; i < dim; ++i) v[i] = rng.normal();
  return v * (norm / v.norm());
}

/// Stream layout: speaker s of domain d draws its gender, segment count and
/// mean from stream (seed, d, s); segment g draws its per-view noise from
/// stream (seed, d, s, g, view) and its shared noise from (seed, d, s, g).
inline Corpus generate_corpus(const SynthConfig& cfg) {
  cfg.validate();
  const int d = cfg.dimension;
  Corpus corpus(d);
  const double a_view = std::sqrt(cfg.view_noise);
  const double a_shared = std::sqrt(1.0 - cfg.view_noise);
  for (Domain dom : kAllDomains) {
    auto it = cfg.speakers.find(dom);
    if (it == cfg.speakers.end()) continue;
    const auto dom_tag = static_cast<std::uint64_t>(dom);
    const auto shift = cfg.domain_shifts.find(dom);
    for (int s = 0; s < it->second; ++s) {
      Rng spk(derive_seed(cfg.seed, {dom_tag, static_cast<std::uint64_t>(s)}));
      const Gender gender = spk.uniform() < 0.5 ? Gender::female : Gender::male;
      const int span = cfg.max_segments - cfg.min_segments + 1;
      const int n_seg = cfg.min_segments + static_cast<int>(spk.below(span));
      Eigen::VectorXd mean(d);
      for (int i = 0; i < d; ++i) mean[i] = cfg.between_speaker_std * spk.normal();
      if (shift != cfg.domain_shifts.end()) mean += shift->second;
      if (gender == Gender::male && cfg.gender_shift.size() == d) mean += cfg.gender_shift;

      char spk_name[32];
      std::snprintf(spk_name, sizeof(spk_name), "%s%04d", domain_prefix(dom).data(), s);
      for (int g = 0; g < n_seg; ++g) {
        Rng noise(derive_seed(cfg.seed, {dom_tag, static_cast<std::uint64_t>(s),
                                         static_cast<std::uint64_t>(g), cfg.view}));
        Rng shared(derive_seed(cfg.seed, {dom_tag, static_cast<std::uint64_t>(s), static_cast<std::uint64_t>(g)}));
        Segment seg;
        char seg_name[48];
        std::snprintf(seg_name, sizeof(seg_name), "%s_%02d", spk_name, g);
        seg.id = seg_name;
        seg.vector.resize(d);
        for (int i = 0; i < d; ++i) {
          const double own = noise.normal();
          const double common = cfg.view_noise < 1 ? shared.normal() : 0.0;
          seg.vector[i] = mean[i] + cfg.within_speaker_std * (a_view * own + a_shared * common);
        }
        seg.speaker = spk_name;
        seg.gender = gender;
        seg.domain = dom;
        if (dom == Domain::dev || dom == Domain::eval) seg.partition = std::string(to_string(gender));
        corpus.add(std::move(seg));
      }
    }
  }
  return corpus;
}

/// Builds a full cross trial list over one domain.  Each speaker with more
/// than `enroll_segments` segments gets a model from its first segments; all
/// remaining segments of the domain are tests.  Partition tag is the model
/// speaker's partition (or gender when untagged).
inline TrialSet generate_trials(const Corpus& corpus, Domain domain, int enroll_segments) {
  if (enroll_segments < 1) fail<ConfigError>("enroll_segments must be >= 1");
  const Corpus sub = corpus.in_domains({domain});
  const SpeakerIndex spk = index_speakers(sub);
  struct Model {
    std::string speaker;
    std::vector<std::string> enroll;
    std::optional<std::string> partition;
  };
  std::vector<Model> models;
  std::vector<bool> is_test(sub.size(), true);
  for (std::size_t c = 0; c < spk.names.size(); ++c) {
    const auto& mem = spk.members[c];
    if (static_cast<int>(mem.size()) <= enroll_segments) continue;
    Model m{spk.names[c], {}, std::nullopt};
    for (int e = 0; e < enroll_segments; ++e) {
      m.enroll.push_back(sub[mem[e]].id);
      is_test[mem[e]] = false;
    }
    const Segment& first = sub[mem[0]];
    if (first.partition) m.partition = first.partition;
    else if (first.gender) m.partition = std::string(to_string(*first.gender));
    models.push_back(std::move(m));
  }
  TrialSet out;
  for (const auto& m : models) {
    for (std::size_t i = 0; i < sub.size(); ++i) {
      if (!is_test[i]) continue;
      const Segment& t = sub[i];
      Trial tr;
      tr.enroll = m.enroll;
      tr.test = t.id;
      if (t.speaker) tr.key = (*t.speaker == m.speaker) ? Key::target : Key::nontarget;
      tr.partition = m.partition;
      out.trials.push_back(std::move(tr));
    }
  }
  return out;
}

}  // namespace svback
