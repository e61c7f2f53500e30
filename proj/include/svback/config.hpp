// include/svback/config.hpp

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

#include <cstdint>
#include <filesystem>
#include <map>
#include <optional>
#include <set>
#include <string>
#include <vector>

#include "json.hpp"
#include "svback/calibration.hpp"
#include "svback/cluster.hpp"
#include "svback/corpus.hpp"
#include "svback/metrics.hpp"
#include "svback/plda.hpp"
#include "svback/svda.hpp"
#include "svback/text.hpp"

namespace svback {

using Json = nlohmann::json;

// Loading -------------------------------------------------------------------

/// A config file after `extends` chains have been merged (RFC 7386 merge
/// patch, child over parent).  `dir` resolves relative paths.
struct LoadedConfig {
  Json json;
  std::filesystem::path dir;
  std::filesystem::path path;
};

namespace detail {

inline Json parse_json_file(const std::filesystem::path& path) {
  const std::string text = read_file(path.string());
  try {
    return Json::parse(text);
  } catch (const Json::parse_error& e) {
    fail<ConfigError>(path.string(), ": ", e.what());
  }
}

inline Json load_merged(const std::filesystem::path& path, std::set<std::string>& seen) {
  const auto canon = std::filesystem::weakly_canonical(path).string();
  if (!seen.insert(canon).second) fail<ConfigError>(path.string(), ": circular 'extends'");
  Json j = parse_json_file(path);
  if (!j.is_object()) fail<ConfigError>(path.string(), ": top level must be an object");
  if (!j.contains("extends")) return j;
  if (!j["extends"].is_string()) fail<ConfigError>(path.string(), ": 'extends' must be a file name");
  Json base = load_merged(path.parent_path() / j["extends"].get<std::string>(), seen);
  j.erase("extends");
  base.merge_patch(j);
  return base;
}

}  // namespace detail

inline LoadedConfig load_config(const std::filesystem::path& path) {
  std::set<std::string> seen;
  LoadedConfig c;
  c.json = detail::load_merged(path, seen);
  c.dir = path.parent_path();
  c.path = path;
  return c;
}

/// FNV-1a over the compact, key-sorted dump, so formatting and key order do
/// not matter.
inline std::string config_hash(const Json& resolved) { return hex64(fnv1a64(resolved.dump())); }

// Field access ---------------------------------------------------------------

namespace detail {

inline void check_keys(const Json& j, std::initializer_list<const char*> allowed, const std::string& where) {
  if (!j.is_object()) fail<ConfigError>(where, ": expected an object");
  for (const auto& [k, v] : j.items()) {
    bool ok = false;
    for (const char* a : allowed) ok = ok || k == a;
    if (!ok) fail<ConfigError>(where, ": unknown key '", k, "'");
  }
}

template <typename T>
T field(const Json& j, const char* key, const std::string& where) {
  if (!j.contains(key)) fail<ConfigError>(where, ": missing '", key, "'");
  try {
    return j.at(key).get<T>();
  } catch (const Json::exception&) {
    fail<ConfigError>(where, ".", key, ": wrong type");
  }
}

template <typename T>
T field(const Json& j, const char* key, const std::string& where, T fallback) {
  if (!j.contains(key)) return fallback;
  return field<T>(j, key, where);
}

inline Domain domain_of(const std::string& s, const std::string& where) {
  auto d = parse_domain(s);
  if (!d) fail<ConfigError>(where, ": unknown domain '", s, "'");
  return *d;
}

inline DomainSet domain_list(const Json& j, const std::string& where) {
  if (!j.is_array()) fail<ConfigError>(where, ": expected a list of domains");
  DomainSet out;
  for (const auto& v : j) {
    if (!v.is_string()) fail<ConfigError>(where, ": expected a list of domains");
    out.insert(domain_of(v.get<std::string>(), where));
  }
  if (out.empty()) fail<ConfigError>(where, ": domain list is empty");
  return out;
}

inline Eigen::VectorXd shift_vector(const Json& j, int dim, const std::string& where) {
  if (j.is_array()) {
    Eigen::VectorXd v(static_cast<Eigen::Index>(j.size()));
    for (std::size_t i = 0; i < j.size(); ++i) {
      if (!j[i].is_number()) fail<ConfigError>(where, ": shift entries must be numbers");
      v[static_cast<Eigen::Index>(i)] = j[i].get<double>();
    }
    if (v.size() != dim) fail<ConfigError>(where, ": shift has dimension ", v.size(), ", expected ", dim);
    return v;
  }
  check_keys(j, {"norm", "direction_seed"}, where);
  return random_direction(dim, field<std::uint64_t>(j, "direction_seed", where), field<double>(j, "norm", where));
}

}  // namespace detail

// Experiment config ----------------------------------------------------------

enum class ChainOpKind { center, length_norm, project, cluster, trial_mean_subtract };

inline std::string_view to_string(ChainOpKind k) {
  switch (k) {
    case ChainOpKind::center: return "center";
    case ChainOpKind::length_norm: return "length_norm";
    case ChainOpKind::project: return "project";
    case ChainOpKind::cluster: return "cluster";
    case ChainOpKind::trial_mean_subtract: return "trial_mean_subtract";
  }
  return "?";
}

struct ChainOp {
  ChainOpKind kind = ChainOpKind::center;
  DomainSet mean_from;                  // center only
  DomainSet apply_to = DomainSet::all();  // center, length_norm
};

/// Segments a model is trained on: the labeled out-of-domain set and/or the
/// clustered unlabeled sets with their estimated labels.
enum class TrainSource { labeled, clustered_minor, clustered_major };

enum class ProjectionType { lda, svda, svda_lda_cascade };

struct ProjectionSpec {
  ProjectionType type = ProjectionType::lda;
  int dim = 0;
  int mid_dim = 0;  // cascade only
  double ridge = 1e-6;
  SvdaOptions svda;
  std::vector<TrainSource> train{TrainSource::labeled};
  DomainSet unlabeled{Domain::in_domain_minor, Domain::in_domain_major};  // SVDA rest class
};

struct ClusterSpec {
  int k_minor = 0;
  int k_major = 0;
  KMeansOptions kmeans;
};

struct PldaSpec {
  std::vector<TrainSource> data{TrainSource::labeled};
  PldaOptions opts;
};

struct CalibrationSpec {
  std::optional<Domain> unlabeled_source;  // default follows the target domain
  std::size_t n_target = 300;
  std::size_t n_nontarget = 3000;
  double llr_cap = 7.0;
};

struct DataSpec {
  std::optional<SynthConfig> synth;
  std::string corpus_path;
  std::map<Domain, std::string> trial_paths;
};

struct ExperimentConfig {
  std::string name;
  std::uint64_t seed = 0;
  DataSpec data;
  Domain target = Domain::dev;
  int enroll_segments = 1;
  int min_segments = 1;
  std::vector<ChainOp> chain;
  std::optional<ProjectionSpec> projection;
  ClusterSpec clustering;
  PldaSpec plda;
  CalibrationSpec calibration;
  CostParams metrics;
  Json resolved;
  std::string hash;

  Domain unlabeled_source() const {
    if (calibration.unlabeled_source) return *calibration.unlabeled_source;
    return target == Domain::eval ? Domain::in_domain_major : Domain::in_domain_minor;
  }
  bool has_op(ChainOpKind k) const {
    for (const auto& op : chain)
      if (op.kind == k) return true;
    return false;
  }
};

namespace detail {

inline SynthConfig parse_synth(const Json& j) {
  const std::string w = "data.synth";
  check_keys(j, {"dimension", "speakers", "segments", "between_speaker_std", "within_speaker_std", "domain_shifts",
                 "gender_shift", "view", "view_noise"},
             w);
  SynthConfig s;
  s.dimension = field<int>(j, "dimension", w);
  if (s.dimension <= 0) fail<ConfigError>(w, ".dimension must be positive");
  const Json& spk = j.contains("speakers") ? j["speakers"] : Json::object();
  if (!spk.is_object() || spk.empty()) fail<ConfigError>(w, ".speakers: expected a map domain -> count");
  for (const auto& [k, v] : spk.items()) {
    if (!v.is_number_integer()) fail<ConfigError>(w, ".speakers.", k, ": expected an integer");
    s.speakers[domain_of(k, w + ".speakers")] = v.get<int>();
  }
  const auto seg = field<std::vector<int>>(j, "segments", w, {1, 1});
  if (seg.size() != 2) fail<ConfigError>(w, ".segments: expected [min, max]");
  s.min_segments = seg[0];
  s.max_segments = seg[1];
  s.between_speaker_std = field<double>(j, "between_speaker_std", w, 1.0);
  s.within_speaker_std = field<double>(j, "within_speaker_std", w, 0.1);
  if (j.contains("domain_shifts")) {
    if (!j["domain_shifts"].is_object()) fail<ConfigError>(w, ".domain_shifts: expected an object");
    for (const auto& [k, v] : j["domain_shifts"].items())
      s.domain_shifts[domain_of(k, w + ".domain_shifts")] = shift_vector(v, s.dimension, w + ".domain_shifts." + k);
  }
  if (j.contains("gender_shift")) s.gender_shift = shift_vector(j["gender_shift"], s.dimension, w + ".gender_shift");
  s.view = field<std::uint64_t>(j, "view", w, 0);
  s.view_noise = field<double>(j, "view_noise", w, 1.0);
  s.validate();
  return s;
}

inline ChainOp parse_op(const Json& j, std::size_t i) {
  const std::string w = "preprocess[" + std::to_string(i) + "]";
  if (!j.is_object()) fail<ConfigError>(w, ": expected an object with 'op'");
  const auto name = field<std::string>(j, "op", w);
  ChainOp op;
  if (name == "center") {
    check_keys(j, {"op", "mean_from", "apply_to"}, w);
    op.kind = ChainOpKind::center;
    if (!j.contains("mean_from")) fail<ConfigError>(w, ": center needs 'mean_from'");
    op.mean_from = domain_list(j["mean_from"], w + ".mean_from");
  } else if (name == "length_norm") {
    check_keys(j, {"op", "apply_to"}, w);
    op.kind = ChainOpKind::length_norm;
  } else if (name == "project") {
    check_keys(j, {"op"}, w);
    op.kind = ChainOpKind::project;
  } else if (name == "cluster") {
    check_keys(j, {"op"}, w);
    op.kind = ChainOpKind::cluster;
  } else if (name == "trial_mean_subtract") {
    check_keys(j, {"op"}, w);
    op.kind = ChainOpKind::trial_mean_subtract;
  } else {
    fail<ConfigError>(w, ": unknown op '", name, "'");
  }
  if (j.contains("apply_to")) op.apply_to = domain_list(j["apply_to"], w + ".apply_to");
  return op;
}

inline TrainSource train_source(const std::string& s) {
  if (s == "labeled") return TrainSource::labeled;
  if (s == "clustered_minor") return TrainSource::clustered_minor;
  if (s == "clustered_major") return TrainSource::clustered_major;
  fail<ConfigError>("unknown training source '", s, "' (labeled, clustered_minor, clustered_major)");
}

inline ProjectionSpec parse_projection(const Json& j) {
  const std::string w = "projection";
  check_keys(j, {"type", "dim", "mid_dim", "ridge", "svm_c", "svm_tol", "train", "unlabeled"}, w);
  ProjectionSpec p;
  const auto type = field<std::string>(j, "type", w, "lda");
  if (type == "lda") p.type = ProjectionType::lda;
  else if (type == "svda") p.type = ProjectionType::svda;
  else if (type == "svda_lda_cascade") p.type = ProjectionType::svda_lda_cascade;
  else fail<ConfigError>(w, ".type: unknown projection '", type, "'");
  p.dim = field<int>(j, "dim", w);
  p.mid_dim = field<int>(j, "mid_dim", w, 0);
  p.ridge = field<double>(j, "ridge", w, 1e-6);
  if (p.ridge < 0) fail<ConfigError>(w, ".ridge must be non-negative");
  p.svda.c = field<double>(j, "svm_c", w, 1.0);
  p.svda.tol = field<double>(j, "svm_tol", w, 1e-6);
  p.svda.ridge = p.ridge;
  if (!(p.svda.c > 0)) fail<ConfigError>(w, ".svm_c must be positive");
  if (j.contains("unlabeled")) p.unlabeled = domain_list(j["unlabeled"], w + ".unlabeled");
  if (j.contains("train")) {
    p.train.clear();
    for (const auto& s : field<std::vector<std::string>>(j, "train", w)) p.train.push_back(train_source(s));
    if (p.train.empty()) fail<ConfigError>(w, ".train is empty");
  }
  return p;
}


inline CostParams parse_metrics(const Json& j) {
  check_keys(j, {"operating_points"}, "metrics");
  CostParams p;
  if (j.contains("operating_points")) {
    p.points.clear();
    for (const auto& op : j["operating_points"]) {
      if (!op.is_array() || op.size() != 3) fail<ConfigError>("metrics.operating_points: expected [P_target, C_miss, C_fa]");
      p.points.push_back({op[0].get<double>(), op[1].get<double>(), op[2].get<double>()});
    }
  }
  try {
    p.validate();
  } catch (const Error& e) {
    fail<ConfigError>("metrics: ", e.what());
  }
  return p;
}

}  // namespace detail

inline std::string_view to_string(TrainSource s) {
  switch (s) {
    case TrainSource::labeled: return "labeled";
    case TrainSource::clustered_minor: return "clustered_minor";
    case TrainSource::clustered_major: return "clustered_major";
  }
  return "?";
}

/// Dimension bookkeeping through the chain; throws ConfigError on any
/// incompatibility.  Works without data, so full-scale (600-dimensional)
/// presets can be checked at desk scale.
inline void validate_experiment(const ExperimentConfig& c, int input_dim) {
  if (c.chain.empty()) fail<ConfigError>("preprocess: stage list is empty");
  int d = input_dim;
  int n_project = 0, n_cluster = 0;
  for (std::size_t i = 0; i < c.chain.size(); ++i) {
    const auto& op = c.chain[i];
    if (op.kind == ChainOpKind::trial_mean_subtract && i + 1 != c.chain.size())
      fail<ConfigError>("preprocess: trial_mean_subtract must be the last stage");
    if (op.kind == ChainOpKind::cluster && ++n_cluster > 1) fail<ConfigError>("preprocess: at most one cluster stage");
    if (op.kind != ChainOpKind::project) continue;
    if (++n_project > 1) fail<ConfigError>("preprocess: at most one project stage");
    if (!c.projection) fail<ConfigError>("preprocess: project stage needs a 'projection' section");
    const ProjectionSpec& p = *c.projection;
    if (p.type == ProjectionType::svda_lda_cascade) {
      if (!(p.dim >= 1 && p.dim <= p.mid_dim && p.mid_dim <= d))
        fail<ConfigError>("projection: cascade needs 1 <= dim <= mid_dim <= input dimension (", p.dim, ", ",
                          p.mid_dim, ", ", d, ")");
    } else if (!(p.dim >= 1 && p.dim <= d)) {
      fail<ConfigError>("projection: dim ", p.dim, " must be in [1, ", d, "]");
    }
    for (auto src : p.train)
      if (src != TrainSource::labeled && n_cluster == 0)
        fail<ConfigError>("projection.train uses clustered data, so a cluster stage must come before project");
    d = p.dim;
  }
  if (c.projection && n_project == 0) warn("config '", c.name, "': projection section present but no project stage");
  bool needs_clusters = false;
  for (auto s : c.plda.data) needs_clusters = needs_clusters || s != TrainSource::labeled;
  if (needs_clusters && n_cluster == 0) fail<ConfigError>("plda.data uses clustered data but no cluster stage is present");
  std::vector<TrainSource> used = c.plda.data;
  if (c.projection) used.insert(used.end(), c.projection->train.begin(), c.projection->train.end());
  for (auto s : used) {
    if (s == TrainSource::clustered_minor && c.clustering.k_minor < 1)
      fail<ConfigError>("clustered_minor data requested but clustering.k_minor < 1");
    if (s == TrainSource::clustered_major && c.clustering.k_major < 1)
      fail<ConfigError>("clustered_major data requested but clustering.k_major < 1");
  }
  if (n_cluster && c.clustering.k_minor < 1 && c.clustering.k_major < 1)
    fail<ConfigError>("clustering: cluster stage present but k_minor and k_major are both 0");
  if (c.target != Domain::dev && c.target != Domain::eval) fail<ConfigError>("target must be dev or eval");
}

inline ExperimentConfig parse_experiment(const Json& resolved, const std::filesystem::path& dir = ".") {
  using namespace detail;
  check_keys(resolved,
             {"name", "seed", "data", "target", "trials", "filter", "preprocess", "projection", "clustering", "plda",
              "calibration", "metrics", "description"},
             "config");
  ExperimentConfig c;
  c.resolved = resolved;
  c.hash = config_hash(resolved);
  c.name = field<std::string>(resolved, "name", "config");
  if (c.name.empty() || c.name.find('/') != std::string::npos) fail<ConfigError>("config.name must be a plain name");
  c.seed = field<std::uint64_t>(resolved, "seed", "config", 0);

  const Json& data = resolved.contains("data") ? resolved["data"] : Json::object();
  check_keys(data, {"synth", "corpus", "trials"}, "data");
  if (data.contains("synth") == data.contains("corpus"))
    fail<ConfigError>("data: give exactly one of 'synth' or 'corpus'");
  if (data.contains("synth")) c.data.synth = parse_synth(data["synth"]);
  if (data.contains("corpus")) c.data.corpus_path = (dir / field<std::string>(data, "corpus", "data")).string();
  if (data.contains("trials")) {
    if (!data["trials"].is_object()) fail<ConfigError>("data.trials: expected a map domain -> path");
    for (const auto& [k, v] : data["trials"].items())
      c.data.trial_paths[domain_of(k, "data.trials")] = (dir / v.get<std::string>()).string();
  }

  c.target = domain_of(field<std::string>(resolved, "target", "config", "dev"), "target");
  const Json& tr = resolved.contains("trials") ? resolved["trials"] : Json::object();
  check_keys(tr, {"enroll_segments"}, "trials");
  c.enroll_segments = field<int>(tr, "enroll_segments", "trials", 1);
  if (c.enroll_segments < 1) fail<ConfigError>("trials.enroll_segments must be >= 1");
  const Json& fl = resolved.contains("filter") ? resolved["filter"] : Json::object();
  check_keys(fl, {"min_segments"}, "filter");
  c.min_segments = field<int>(fl, "min_segments", "filter", 1);
  if (c.min_segments < 1) fail<ConfigError>("filter.min_segments must be >= 1");

  if (!resolved.contains("preprocess") || !resolved["preprocess"].is_array())
    fail<ConfigError>("config: 'preprocess' must be a list of stages");
  for (std::size_t i = 0; i < resolved["preprocess"].size(); ++i) c.chain.push_back(parse_op(resolved["preprocess"][i], i));
  if (resolved.contains("projection") && !resolved["projection"].is_null())
    c.projection = parse_projection(resolved["projection"]);

  const Json& cl = resolved.contains("clustering") ? resolved["clustering"] : Json::object();
  check_keys(cl, {"k_minor", "k_major", "restarts", "max_iters"}, "clustering");
  c.clustering.k_minor = field<int>(cl, "k_minor", "clustering", 0);
  c.clustering.k_major = field<int>(cl, "k_major", "clustering", 0);
  c.clustering.kmeans.restarts = field<int>(cl, "restarts", "clustering", c.clustering.kmeans.restarts);
  c.clustering.kmeans.max_iters = field<int>(cl, "max_iters", "clustering", c.clustering.kmeans.max_iters);
  if (c.clustering.k_minor < 0 || c.clustering.k_major < 0 || c.clustering.kmeans.restarts < 1 ||
      c.clustering.kmeans.max_iters < 1)
    fail<ConfigError>("clustering: counts must be non-negative and restarts, max_iters >= 1");

  const Json& pl = resolved.contains("plda") ? resolved["plda"] : Json::object();
  check_keys(pl, {"data", "iterations", "floor"}, "plda");
  if (pl.contains("data")) {
    c.plda.data.clear();
    for (const auto& s : field<std::vector<std::string>>(pl, "data", "plda")) c.plda.data.push_back(train_source(s));
    if (c.plda.data.empty()) fail<ConfigError>("plda.data is empty");
  }
  c.plda.opts.iterations = field<int>(pl, "iterations", "plda", c.plda.opts.iterations);
  c.plda.opts.floor = field<double>(pl, "floor", "plda", c.plda.opts.floor);
  if (c.plda.opts.iterations < 1 || !(c.plda.opts.floor > 0)) fail<ConfigError>("plda: iterations >= 1 and floor > 0");

  const Json& ca = resolved.contains("calibration") ? resolved["calibration"] : Json::object();
  check_keys(ca, {"unlabeled_source", "n_target", "n_nontarget", "llr_cap"}, "calibration");
  if (ca.contains("unlabeled_source"))
    c.calibration.unlabeled_source = domain_of(field<std::string>(ca, "unlabeled_source", "calibration"), "calibration");
  c.calibration.n_target = field<std::size_t>(ca, "n_target", "calibration", c.calibration.n_target);
  c.calibration.n_nontarget = field<std::size_t>(ca, "n_nontarget", "calibration", c.calibration.n_nontarget);
  c.calibration.llr_cap = field<double>(ca, "llr_cap", "calibration", c.calibration.llr_cap);
  if (!(c.calibration.llr_cap > 0)) fail<ConfigError>("calibration.llr_cap must be positive");

  c.metrics = parse_metrics(resolved.contains("metrics") ? resolved["metrics"] : Json::object());
  if (c.data.synth) validate_experiment(c, c.data.synth->dimension);
  return c;
}

// Fusion config --------------------------------------------------------------

struct FusionConfig {
  std::string name;
  std::uint64_t seed = 0;
  std::vector<std::string> members;
  CalibrationStrategy strategy = CalibrationStrategy::dev_plus_unlabeled;
  double l2 = 1e-6;
  bool recalibrate = false;
  CostParams metrics;
  std::filesystem::path member_dir;
  Json resolved;
  std::string hash;
};

inline bool is_fusion_config(const Json& j) { return j.is_object() && j.contains("fusion"); }

inline FusionConfig parse_fusion(const Json& resolved, const std::filesystem::path& dir = ".") {
  using namespace detail;
  check_keys(resolved, {"name", "seed", "fusion", "metrics", "description"}, "config");
  FusionConfig f;
  f.resolved = resolved;
  f.hash = config_hash(resolved);
  f.name = field<std::string>(resolved, "name", "config");
  f.seed = field<std::uint64_t>(resolved, "seed", "config", 0);
  const Json& fu = resolved["fusion"];
  check_keys(fu, {"members", "strategy", "l2", "recalibrate", "member_dir"}, "fusion");
  f.members = field<std::vector<std::string>>(fu, "members", "fusion");
  if (f.members.empty()) fail<ConfigError>("fusion.members is empty");
  const auto strategy = field<std::string>(fu, "strategy", "fusion", "dev_plus_unlabeled");
  auto s = parse_strategy(strategy);
  if (!s) fail<ConfigError>("fusion.strategy: unknown strategy '", strategy, "'");
  f.strategy = *s;
  f.l2 = field<double>(fu, "l2", "fusion", 1e-6);
  if (f.l2 < 0) fail<ConfigError>("fusion.l2 must be non-negative");
  f.recalibrate = field<bool>(fu, "recalibrate", "fusion", false);
  f.member_dir = dir / field<std::string>(fu, "member_dir", "fusion", ".");
  f.metrics = parse_metrics(resolved.contains("metrics") ? resolved["metrics"] : Json::object());
  return f;
}

/// Applies a --seed override to a resolved config.
inline void override_seed(Json& resolved, std::optional<std::uint64_t> seed) {
  if (seed) resolved["seed"] = *seed;
}

}  // namespace svback
