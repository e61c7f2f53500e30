// include/svback/pipeline.hpp

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

#include <chrono>
#include <cstdint>
#include <filesystem>
#include <map>
#include <optional>
#include <string>
#include <vector>

#include "json.hpp"
#include "svback/calibration.hpp"
#include "svback/cluster.hpp"
#include "svback/config.hpp"
#include "svback/corpus.hpp"
#include "svback/corpus_io.hpp"
#include "svback/fusion.hpp"
#include "svback/lda.hpp"
#include "svback/metrics.hpp"
#include "svback/plda.hpp"
#include "svback/preprocess.hpp"
#include "svback/svda.hpp"
#include "svback/text.hpp"

namespace svback {

inline constexpr const char* kVersion = "0.1.0";

// Seed stream tags under the global seed.
inline constexpr std::uint64_t kDataStream = 0x64617461;
inline constexpr std::uint64_t kClusterStream = 0x636c7573;
inline constexpr std::uint64_t kTrialStream = 0x7472696c;

struct StageRecord {
  std::string name;
  double seconds = 0.0;
  std::map<std::string, std::string> outputs;  // file name -> content digest
};

struct RunManifest {
  std::string name;
  std::string kind;  // "experiment" or "fusion"
  std::string config_hash;
  std::uint64_t seed = 0;
  std::vector<std::string> applied_order;
  std::vector<StageRecord> stages;
  std::vector<std::string> warnings;
  Json info = Json::object();
  bool complete = false;

  /// Timings are left out when `timings` is false; everything else is a
  /// function of config and seed.
  nlohmann::ordered_json json(bool timings = true) const {
    nlohmann::ordered_json j;
    j["name"] = name;
    j["kind"] = kind;
    j["version"] = kVersion;
    j["eigen"] = std::to_string(EIGEN_WORLD_VERSION) + "." + std::to_string(EIGEN_MAJOR_VERSION) + "." +
                 std::to_string(EIGEN_MINOR_VERSION);
    j["config_hash"] = config_hash;
    j["seed"] = seed;
    j["complete"] = complete;
    j["applied_order"] = applied_order;
    j["stages"] = nlohmann::ordered_json::array();
    for (const auto& s : stages) {
      nlohmann::ordered_json st;
      st["name"] = s.name;
      st["outputs"] = s.outputs;
      if (timings) st["seconds"] = s.seconds;
      j["stages"].push_back(st);
    }
    j["info"] = info;
    j["warnings"] = warnings;
    return j;
  }
};

inline RunManifest read_manifest(const std::filesystem::path& path) {
  Json j;
  try {
    j = Json::parse(read_file(path.string()));
  } catch (const Json::exception& e) {
    fail<DataError>(path.string(), ": ", e.what());
  }
  RunManifest m;
  try {
    m.name = j.at("name").get<std::string>();
    m.kind = j.at("kind").get<std::string>();
    m.config_hash = j.at("config_hash").get<std::string>();
    m.seed = j.at("seed").get<std::uint64_t>();
    m.complete = j.at("complete").get<bool>();
    m.applied_order = j.at("applied_order").get<std::vector<std::string>>();
    for (const auto& s : j.at("stages"))
      m.stages.push_back({s.at("name").get<std::string>(), s.value("seconds", 0.0),
                          s.at("outputs").get<std::map<std::string, std::string>>()});
    m.warnings = j.at("warnings").get<std::vector<std::string>>();
    m.info = j.at("info");
  } catch (const Json::exception& e) {
    fail<DataError>(path.string(), ": malformed manifest: ", e.what());
  }
  return m;
}

/// Where a partial run stops.  Each stage subcommand runs the pipeline up to
/// and including its stage.
enum class StopAfter { data, projection, clustering, preprocess, plda, score, calibrate, evaluate };

namespace detail {

inline std::string file_digest(const std::filesystem::path& p) { return hex64(fnv1a64(read_file(p.string()))); }

/// Runs `fn`, prefixing any error with the stage name while keeping its type.
template <typename Fn>
void in_stage(const std::string& stage, Fn&& fn) {
  try {
    fn();
  } catch (const ConfigError& e) {
    throw ConfigError("stage '" + stage + "': " + e.what());
  } catch (const DataError& e) {
    throw DataError("stage '" + stage + "': " + e.what());
  } catch (const NumericalError& e) {
    throw NumericalError("stage '" + stage + "': " + e.what());
  } catch (const Error& e) {
    throw Error("stage '" + stage + "': " + e.what());
  }
}

class StageLog {
 public:
  StageLog(RunManifest& m, std::filesystem::path dir) : m_(m), dir_(std::move(dir)) {}

  template <typename Fn>
  void run(const std::string& name, Fn&& fn) {
    const auto t0 = std::chrono::steady_clock::now();
    current_ = StageRecord{name, 0.0, {}};
    in_stage(name, std::forward<Fn>(fn));
    current_.seconds = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
    m_.stages.push_back(std::move(current_));
  }

  /// Path of an output of the running stage; its digest is recorded by done().
  std::string out(const std::string& file) {
    current_.outputs[file] = "";
    return (dir_ / file).string();
  }

  void seal() {
    for (auto& [file, digest] : current_.outputs) digest = file_digest(dir_ / file);
  }

 private:
  RunManifest& m_;
  std::filesystem::path dir_;
  StageRecord current_;
};

inline void write_manifest(const RunManifest& m, const std::filesystem::path& dir) {
  auto os = open_output((dir / "manifest.json").string());
  os << m.json(true).dump(2) << '\n';
}

inline void write_text(const std::string& path, const std::string& text) {
  auto os = open_output(path);
  os << text;
}

inline std::string calibrated_name(CalibrationStrategy s, Domain d) {
  return "calibrated." + std::string(to_string(s)) + "." + std::string(to_string(d)) + ".txt";
}

/// Speaker-labeled segments from the requested sources.
inline Corpus training_set(const Corpus& corpus, const std::vector<TrainSource>& sources) {
  return corpus.filter([&](const Segment& s) {
    if (!s.speaker) return false;
    for (TrainSource src : sources) {
      if (src == TrainSource::labeled && s.domain == Domain::out_of_domain) return true;
      if (src == TrainSource::clustered_minor && s.domain == Domain::in_domain_minor) return true;
      if (src == TrainSource::clustered_major && s.domain == Domain::in_domain_major) return true;
    }
    return false;
  });
}

/// Writes a score file and replaces the scores by their stored (rounded)
/// values, so later stages see exactly what is on disk.
inline void persist(ScoreSet& s, const std::string& path) {
  write_scores(s, path);
  s = read_scores(path);
}

inline std::vector<Domain> scored_domains(Domain target) {
  if (target == Domain::dev) return {Domain::dev};
  return {target, Domain::dev};
}

inline std::string scores_name(Domain d) { return "scores." + std::string(to_string(d)) + ".txt"; }

}  // namespace detail

/// Runs one sub-system: data, speaker filter, preprocessing chain (with the
/// projection and clustering stages in chain order), PLDA, scoring,
/// calibration under every available strategy, and the report.  Artifacts go
/// to out_root/<name>/.
inline RunManifest run_experiment(const ExperimentConfig& cfg, const std::filesystem::path& out_root,
                                  StopAfter stop = StopAfter::evaluate) {
  const std::filesystem::path dir = out_root / cfg.name;
  std::filesystem::create_directories(dir);
  RunManifest man;
  man.name = cfg.name;
  man.kind = "experiment";
  man.config_hash = cfg.hash;
  man.seed = cfg.seed;
  man.info["target"] = std::string(to_string(cfg.target));
  detail::StageLog log(man, dir);
  auto finish = [&](bool complete) {
    man.complete = complete;
    detail::write_manifest(man, dir);
    return man;
  };

  Corpus corpus;
  std::map<Domain, TrialSet> trials;
  std::map<std::string, std::string> truth;  // hidden labels of the unlabeled sets

  log.run("gen-data", [&] {
    if (cfg.data.synth) {
      SynthConfig s = *cfg.data.synth;
      s.seed = derive_seed(cfg.seed, {kDataStream});
      corpus = generate_corpus(s);
    } else {
      corpus = read_corpus(cfg.data.corpus_path);
    }
    for (Domain d : {Domain::dev, Domain::eval}) {
      if (auto it = cfg.data.trial_paths.find(d); it != cfg.data.trial_paths.end()) {
        trials[d] = read_trials(it->second);
      } else if (!corpus.in_domains({d}).empty()) {
        trials[d] = generate_trials(corpus, d, cfg.enroll_segments);
      }
    }
    if (!trials.count(cfg.target) || trials[cfg.target].trials.empty())
      fail<DataError>("no trials for target domain ", to_string(cfg.target));
    write_corpus(corpus, log.out("corpus.txt"));
    for (const auto& [d, t] : trials) write_trials(t, log.out("trials." + std::string(to_string(d)) + ".txt"));
    Corpus stripped(corpus.dim());
    for (const auto& s : corpus) {
      Segment t = s;
      if ((s.domain == Domain::in_domain_minor || s.domain == Domain::in_domain_major) && s.speaker) {
        truth[s.id] = *s.speaker;
        t.speaker.reset();
      }
      stripped.add(std::move(t));
    }
    corpus = std::move(stripped);
    log.seal();
  });
  if (stop == StopAfter::data) return finish(false);

  log.run("filter", [&] {
    std::map<std::string, int> counts;
    for (const auto& s : corpus)
      if (s.domain == Domain::out_of_domain && s.speaker) ++counts[*s.speaker];
    const std::size_t before = corpus.size();
    corpus = corpus.filter([&](const Segment& s) {
      return s.domain != Domain::out_of_domain || !s.speaker || counts[*s.speaker] >= cfg.min_segments;
    });
    int kept = 0;
    for (const auto& [spk, n] : counts) kept += n >= cfg.min_segments;
    man.info["filter"] = {{"min_segments", cfg.min_segments},
                          {"labeled_speakers_before", counts.size()},
                          {"labeled_speakers_after", kept},
                          {"segments_removed", before - corpus.size()}};
  });

  bool trial_mean = false;
  std::map<Domain, ClusterAssignment> assignments;
  for (std::size_t i = 0; i < cfg.chain.size(); ++i) {
    const ChainOp& op = cfg.chain[i];
    const std::string stage = std::string(to_string(op.kind));
    man.applied_order.push_back(stage);
    log.run(stage, [&] {
      switch (op.kind) {
        case ChainOpKind::center: {
          const CenteringStats stats = compute_mean(corpus, op.mean_from);
          corpus = center(corpus, stats, op.apply_to);
          break;
        }
        case ChainOpKind::length_norm:
          corpus = length_normalize(corpus, op.apply_to);
          break;
        case ChainOpKind::project: {
          const ProjectionSpec& p = *cfg.projection;
          const Corpus labeled = detail::training_set(corpus, p.train);
          Projection proj;
          if (p.type == ProjectionType::lda) {
            proj = fit_lda(labeled, p.dim, p.ridge);
          } else {
            const Corpus unlabeled = corpus.in_domains(p.unlabeled);
            const SvdaScatter sc = compute_svda_scatter(labeled, unlabeled, p.svda);
            {
              auto os = open_output(log.out("svda_report.txt"));
              write_svda_report(sc, os);
            }
            man.info["svda_support_pool"] = sc.support_count();
            const int svda_dim = p.type == ProjectionType::svda ? p.dim : p.mid_dim;
            proj = discriminant_projection(sc.between, sc.within, svda_dim, p.ridge);
            if (p.type == ProjectionType::svda_lda_cascade)
              proj = compose(fit_lda(project(proj, labeled), p.dim, p.ridge), proj);
          }
          corpus = project(proj, corpus);
          write_projection(proj, log.out("projection.txt"));
          break;
        }
        case ChainOpKind::cluster: {
          const GenderModel gender = fit_gender(corpus.filter([](const Segment& s) {
            return s.domain == Domain::out_of_domain && s.gender.has_value();
          }));
          ClusterAssignment all;
          Json info = Json::object();
          for (auto [dom, k, prefix] : {std::tuple{Domain::in_domain_minor, cfg.clustering.k_minor, "minor_"},
                                        std::tuple{Domain::in_domain_major, cfg.clustering.k_major, "major_"}}) {
            if (k < 1) continue;
            const Corpus sub = corpus.in_domains({dom});
            if (sub.empty()) fail<DataError>("no ", to_string(dom), " segments to cluster");
            const auto seed = derive_seed(cfg.seed, {kClusterStream, static_cast<std::uint64_t>(dom)});
            ClusterAssignment a = cluster_unlabeled(sub, gender, std::min<int>(k, static_cast<int>(sub.size())), seed,
                                                    cfg.clustering.kmeans, prefix);
            for (const auto& w : a.warnings) man.warnings.push_back(std::string(to_string(dom)) + ": " + w);
            Json d = {{"requested", k}, {"produced", a.produced}, {"segments", sub.size()}};
            std::vector<std::string> t, c;
            for (const auto& s : sub) {
              if (auto it = truth.find(s.id); it != truth.end()) {
                t.push_back(it->second);
                c.push_back(a.labels.at(s.id));
              }
            }
            if (!t.empty()) d["purity"] = purity(t, c);
            info[std::string(to_string(dom))] = d;
            all.labels.insert(a.labels.begin(), a.labels.end());
            assignments[dom] = std::move(a);
          }
          man.info["clustering"] = info;
          corpus = apply_assignment(corpus, all);
          write_corpus(corpus.filter([&](const Segment& s) { return all.labels.count(s.id) > 0; }),
                       log.out("clusters.txt"));
          break;
        }
        case ChainOpKind::trial_mean_subtract:
          trial_mean = true;
          break;
      }
      log.seal();
    });
    if (op.kind == ChainOpKind::project && stop == StopAfter::projection) return finish(false);
    if (op.kind == ChainOpKind::cluster && stop == StopAfter::clustering) return finish(false);
  }
  if (stop == StopAfter::projection && !cfg.has_op(ChainOpKind::project))
    fail<ConfigError>("config '", cfg.name, "' has no project stage");
  if (stop == StopAfter::clustering && !cfg.has_op(ChainOpKind::cluster))
    fail<ConfigError>("config '", cfg.name, "' has no cluster stage");
  log.run("write-processed", [&] {
    write_corpus(corpus, log.out("corpus.processed.txt"));
    log.seal();
  });
  if (stop == StopAfter::preprocess) return finish(false);

  PldaModel model;
  log.run("fit-plda", [&] {
    const Corpus train = detail::training_set(corpus, cfg.plda.data);
    model = fit_plda(train, cfg.plda.opts);
    man.info["plda"] = {{"segments", train.size()},
                        {"speakers", index_speakers(train).names.size()},
                        {"final_log_likelihood",
                         model.em_log_likelihoods.empty() ? 0.0 : model.em_log_likelihoods.back()}};
    write_plda(model, log.out("plda.txt"));
    log.seal();
  });
  if (stop == StopAfter::plda) return finish(false);

  std::map<Domain, ScoreSet> scores;
  std::optional<ScoreSet> unlabeled_scores;
  log.run("score", [&] {
    for (Domain d : detail::scored_domains(cfg.target)) {
      if (!trials.count(d)) continue;
      scores[d] = score_trialset(model, corpus, trials[d], trial_mean);
      detail::persist(scores[d], log.out(detail::scores_name(d)));
    }
    const Domain src = cfg.unlabeled_source();
    if (auto it = assignments.find(src); it != assignments.end()) {
      UnlabeledTrials ut = make_unlabeled_trials(it->second, cfg.calibration.n_target, cfg.calibration.n_nontarget,
                                                 derive_seed(cfg.seed, {kTrialStream}));
      for (const auto& w : ut.warnings) man.warnings.push_back("unlabeled trials: " + w);
      write_trials(ut.trials, log.out("trials.unlabeled.txt"));
      unlabeled_scores = score_trialset(model, corpus, ut.trials, trial_mean);
      detail::persist(*unlabeled_scores, log.out("scores.unlabeled.txt"));
    }
    log.seal();
  });
  if (stop == StopAfter::score) return finish(false);

  std::vector<std::pair<CalibrationStrategy, ScoreSet>> calibrated;  // target-domain scores
  log.run("calibrate", [&] {
    const bool have_dev = scores.count(Domain::dev) && scores[Domain::dev].trials.has_keys();
    const bool have_unl = unlabeled_scores.has_value();
    std::vector<std::string> available;
    for (CalibrationStrategy s : {CalibrationStrategy::dev_only, CalibrationStrategy::unlabeled_only,
                                  CalibrationStrategy::dev_plus_unlabeled}) {
      const bool need_dev = s != CalibrationStrategy::unlabeled_only;
      const bool need_unl = s != CalibrationStrategy::dev_only;
      if ((need_dev && !have_dev) || (need_unl && !have_unl)) continue;
      const ScoreSet train = calibration_training_set(s, have_dev ? scores[Domain::dev] : ScoreSet{},
                                                      have_unl ? *unlabeled_scores : ScoreSet{});
      const std::vector<Key> keys = train.trials.keys();
      const CalibrationMap map = pav_fit(train.scores, keys, cfg.calibration.llr_cap);
      const std::string sname(to_string(s));
      write_calibration(map, log.out("calibration." + sname + ".txt"));
      for (Domain d : detail::scored_domains(cfg.target)) {
        if (!scores.count(d)) continue;
        ScoreSet c = scores[d];
        c.scores = pav_apply(map, scores[d].scores);
        c.calibration = sname;
        detail::persist(c, log.out(detail::calibrated_name(s, d)));
        if (d == cfg.target) calibrated.emplace_back(s, std::move(c));
      }
      available.push_back(sname);
    }
    if (available.empty()) man.warnings.push_back("no calibration strategy available");
    man.info["calibration_strategies"] = available;
    log.seal();
  });
  if (stop == StopAfter::calibrate) return finish(false);

  log.run("evaluate", [&] {
    const ScoreSet& raw = scores[cfg.target];
    if (!raw.trials.has_keys()) {
      man.warnings.push_back("target trials have no keys; report skipped");
      return;
    }
    std::vector<SystemScores> systems;
    if (calibrated.empty()) systems.push_back({cfg.name, raw.scores, std::nullopt});
    for (const auto& [s, c] : calibrated)
      systems.push_back({cfg.name + "/" + std::string(to_string(s)), raw.scores, c.scores});
    const Report rep = make_report(systems, raw.trials, cfg.metrics);
    detail::write_text(log.out("report.txt"), rep.text());
    detail::write_text(log.out("report.json"), rep.json().dump(2) + "\n");
    {
      auto os = open_output(log.out("det." + std::string(to_string(cfg.target)) + ".txt"));
      write_det(error_profile(raw.scores, raw.trials.keys()), os);
    }
    log.seal();
  });
  return finish(true);
}

// Fusion ----------------------------------------------------------------------

/// Resolved member config with the fusion seed applied.
inline ExperimentConfig member_config(const FusionConfig& f, const std::string& member) {
  const auto path = f.member_dir / (member + ".json");
  if (!std::filesystem::exists(path)) fail<ConfigError>("fusion member config not found: ", path.string());
  LoadedConfig lc = load_config(path);
  override_seed(lc.json, f.seed);
  return parse_experiment(lc.json, lc.dir);
}

namespace detail {

/// True when the member directory holds a complete run of exactly this config.
inline bool member_ready(const ExperimentConfig& mc, const std::filesystem::path& dir, CalibrationStrategy s) {
  const auto man_path = dir / "manifest.json";
  if (!std::filesystem::exists(man_path)) return false;
  const RunManifest m = read_manifest(man_path);
  if (!m.complete || m.config_hash != mc.hash) return false;
  for (Domain d : {mc.target, Domain::dev})
    if (!std::filesystem::exists(dir / calibrated_name(s, d))) return false;
  return std::filesystem::exists(dir / scores_name(mc.target));
}

}  // namespace detail

/// Calibrate-then-fuse: each member's per-strategy calibrated scores are
/// combined by logistic regression trained on the dev trials.  Members are
/// read from out_root/<member>/; with run_missing, absent or stale members
/// are run first, otherwise they are reported as an error.
inline RunManifest run_fusion(const FusionConfig& f, const std::filesystem::path& out_root, bool run_missing) {
  const std::filesystem::path dir = out_root / f.name;
  std::filesystem::create_directories(dir);
  RunManifest man;
  man.name = f.name;
  man.kind = "fusion";
  man.config_hash = f.hash;
  man.seed = f.seed;
  man.info["strategy"] = std::string(to_string(f.strategy));
  man.info["members"] = f.members;
  detail::StageLog log(man, dir);

  std::vector<ExperimentConfig> configs;
  log.run("members", [&] {
    std::vector<std::string> missing;
    for (const auto& m : f.members) {
      configs.push_back(member_config(f, m));
      if (detail::member_ready(configs.back(), out_root / m, f.strategy)) continue;
      if (run_missing) run_experiment(configs.back(), out_root);
      else missing.push_back(m);
    }
    if (!missing.empty()) {
      std::string list;
      for (const auto& m : missing) list += (list.empty() ? "" : ", ") + m;
      fail<DataError>("missing or stale member outputs (seed ", f.seed, ", strategy ", to_string(f.strategy),
                      "): ", list);
    }
  });

  const Domain target = configs.front().target;
  for (const auto& c : configs)
    if (c.target != target) fail<ConfigError>("fusion: members disagree on the target domain");

  std::vector<ScoreSet> raw, cal_target, cal_dev;
  log.run("fuse", [&] {
    for (std::size_t i = 0; i < f.members.size(); ++i) {
      const auto mdir = out_root / f.members[i];
      raw.push_back(read_scores((mdir / detail::scores_name(target)).string()));
      cal_target.push_back(read_scores((mdir / detail::calibrated_name(f.strategy, target)).string()));
      cal_dev.push_back(read_scores((mdir / detail::calibrated_name(f.strategy, Domain::dev)).string()));
      if (!(raw[i].trials == raw[0].trials) || !(cal_target[i].trials == raw[0].trials) ||
          !(cal_dev[i].trials == cal_dev[0].trials))
        fail<DataError>("member '", f.members[i], "' was scored on a different trial list");
    }
    const auto n_dev = static_cast<Eigen::Index>(cal_dev[0].scores.size());
    const auto n_tgt = static_cast<Eigen::Index>(cal_target[0].scores.size());
    const auto m = static_cast<Eigen::Index>(f.members.size());
    Eigen::MatrixXd dev(n_dev, m), tgt(n_tgt, m);
    for (Eigen::Index j = 0; j < m; ++j) {
      dev.col(j) = Eigen::Map<const Eigen::VectorXd>(cal_dev[j].scores.data(), n_dev);
      tgt.col(j) = Eigen::Map<const Eigen::VectorXd>(cal_target[j].scores.data(), n_tgt);
    }
    const std::vector<Key> dev_keys = cal_dev[0].trials.keys();
    const FusionModel model = fuse_fit(dev, dev_keys, f.l2);
    write_fusion(model, log.out("fusion.txt"));
    ScoreSet fused;
    fused.trials = raw[0].trials;
    fused.scores = fuse_apply(model, tgt);
    fused.calibration = "lr";
    if (f.recalibrate) {
      const CalibrationMap map = pav_fit(fuse_apply(model, dev), dev_keys);
      write_calibration(map, log.out("calibration.fused.txt"));
      fused.scores = pav_apply(map, fused.scores);
      fused.calibration = "lr+pav";
    }
    detail::persist(fused, log.out(detail::scores_name(target)));
    man.info["weights"] = std::vector<double>(model.weights.data(), model.weights.data() + model.weights.size());
    man.info["bias"] = model.bias;

    if (fused.trials.has_keys()) {
      std::vector<SystemScores> systems;
      for (std::size_t i = 0; i < f.members.size(); ++i)
        systems.push_back({f.members[i], raw[i].scores, cal_target[i].scores});
      systems.push_back({f.name, fused.scores, fused.scores});
      const Report rep = make_report(systems, fused.trials, f.metrics);
      detail::write_text(log.out("report.txt"), rep.text());
      detail::write_text(log.out("report.json"), rep.json().dump(2) + "\n");
    }
    log.seal();
  });
  man.complete = true;
  detail::write_manifest(man, dir);
  return man;
}

}  // namespace svback
