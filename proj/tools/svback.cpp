// tools/svback.cpp

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

#include <cstdint>
#include <filesystem>
#include <iostream>
#include <optional>
#include <string>

#include "CLI11.hpp"
#include "svback/svback.hpp"

namespace {

using namespace svback;

struct Common {
  std::string config;
  std::optional<std::uint64_t> seed;
  std::string out = "runs";
};

void add_common(CLI::App* sub, Common& c) {
  sub->add_option("--config", c.config, "experiment or fusion config (JSON)")->required();
  sub->add_option("--seed", c.seed, "global seed, overrides the config");
  sub->add_option("--out", c.out, "output root; each run writes <out>/<name>/")->capture_default_str();
}

LoadedConfig load(const Common& c) {
  if (!std::filesystem::exists(c.config)) fail<ConfigError>("config not found: ", c.config);
  LoadedConfig lc = load_config(c.config);
  override_seed(lc.json, c.seed);
  return lc;
}

void print_file(const std::filesystem::path& p) {
  if (std::filesystem::exists(p)) std::cout << read_file(p.string());
}

int run_stage(const Common& c, StopAfter stop) {
  const LoadedConfig lc = load(c);
  if (is_fusion_config(lc.json)) fail<ConfigError>(c.config, " is a fusion config; use 'fuse' or 'run'");
  const ExperimentConfig cfg = parse_experiment(lc.json, lc.dir);
  run_experiment(cfg, c.out, stop);
  const auto dir = std::filesystem::path(c.out) / cfg.name;
  if (stop == StopAfter::evaluate) print_file(dir / "report.txt");
  else std::cerr << "wrote " << dir.string() << '\n';
  return 0;
}

int run_fusion_cmd(const Common& c, bool run_missing) {
  const LoadedConfig lc = load(c);
  if (!is_fusion_config(lc.json)) fail<ConfigError>(c.config, " has no 'fusion' section");
  const FusionConfig f = parse_fusion(lc.json, lc.dir);
  run_fusion(f, c.out, run_missing);
  print_file(std::filesystem::path(c.out) / f.name / "report.txt");
  return 0;
}

struct EvaluateArgs {
  std::string scores;
  std::string calibrated;
  std::string name = "system";
  std::string report_dir;
};

int evaluate(const Common& c, const EvaluateArgs& a) {
  CostParams params;
  if (!c.config.empty()) {
    const LoadedConfig lc = load(c);
    params = is_fusion_config(lc.json) ? parse_fusion(lc.json, lc.dir).metrics : parse_experiment(lc.json, lc.dir).metrics;
  }
  const ScoreSet raw = read_scores(a.scores);
  SystemScores sys{a.name, raw.scores, std::nullopt};
  if (!a.calibrated.empty()) {
    const ScoreSet cal = read_scores(a.calibrated);
    if (!(cal.trials == raw.trials)) fail<DataError>("evaluate: score files cover different trials");
    if (!cal.calibration) warn("evaluate: ", a.calibrated, " carries no calibration marker");
    sys.calibrated = cal.scores;
  } else if (raw.calibration) {
    sys.calibrated = raw.scores;
  }
  const Report rep = make_report({sys}, raw.trials, params);
  std::cout << rep.text();
  if (!a.report_dir.empty()) {
    const auto dir = std::filesystem::path(a.report_dir);
    std::filesystem::create_directories(dir);
    auto os = open_output((dir / "report.json").string());
    os << rep.json().dump(2) << '\n';
  }
  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"svback: speaker verification back-end pipeline"};
  app.require_subcommand(1);

  Common common;
  EvaluateArgs eval_args;
  struct StageCmd {
    const char* name;
    const char* help;
    StopAfter stop;
  };
  const StageCmd stages[] = {
      {"gen-data", "generate or load the corpus and trial lists", StopAfter::data},
      {"preprocess", "run the whole preprocessing chain", StopAfter::preprocess},
      {"fit-projection", "run the chain through the projection stage", StopAfter::projection},
      {"cluster", "run the chain through the clustering stage", StopAfter::clustering},
      {"fit-plda", "run through PLDA training", StopAfter::plda},
      {"score", "run through trial scoring", StopAfter::score},
      {"calibrate", "run through calibration", StopAfter::calibrate},
  };
  std::vector<std::pair<CLI::App*, StopAfter>> stage_cmds;
  for (const auto& s : stages) {
    auto* sub = app.add_subcommand(s.name, s.help);
    add_common(sub, common);
    stage_cmds.emplace_back(sub, s.stop);
  }
  auto* run = app.add_subcommand("run", "full pipeline; for a fusion config, missing members are run first");
  add_common(run, common);
  auto* fuse = app.add_subcommand("fuse", "fuse existing member runs");
  add_common(fuse, common);
  auto* eval = app.add_subcommand("evaluate", "report metrics for a score file");
  eval->add_option("--config", common.config, "config whose metric parameters are used");
  eval->add_option("--scores", eval_args.scores, "raw score file")->required();
  eval->add_option("--calibrated", eval_args.calibrated, "calibrated score file for act-Cprimary");
  eval->add_option("--name", eval_args.name, "system name in the report");
  eval->add_option("--report-dir", eval_args.report_dir, "also write report.json here");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int rc = app.exit(e);
    return rc == 0 ? 0 : 2;
  }

  try {
    for (const auto& [sub, stop] : stage_cmds)
      if (sub->parsed()) return run_stage(common, stop);
    if (run->parsed()) {
      const LoadedConfig lc = load(common);
      return is_fusion_config(lc.json) ? run_fusion_cmd(common, true) : run_stage(common, StopAfter::evaluate);
    }
    if (fuse->parsed()) return run_fusion_cmd(common, false);
    if (eval->parsed()) return evaluate(common, eval_args);
  } catch (const Error& e) {
    std::cerr << "error: " << e.what() << '\n';
    return e.exit_code();
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << '\n';
    return 1;
  }
  return 0;
}
