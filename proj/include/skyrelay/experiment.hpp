// Copyright 2026 The Skyrelay Authors
// SPDX-License-Identifier: Apache-2.0
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//     https://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

#ifndef SKYRELAY_EXPERIMENT_HPP
#define SKYRELAY_EXPERIMENT_HPP

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "json.hpp"
#include "skyrelay/baselines.hpp"
#include "skyrelay/beamforming.hpp"
#include "skyrelay/channel.hpp"
#include "skyrelay/ddpg.hpp"
#include "skyrelay/env.hpp"
#include "skyrelay/geometry.hpp"
#include "skyrelay/rates.hpp"

namespace skyrelay {

/// Library version written into every manifest.
std::string version_string();

struct ExperimentConfig {
  std::string profile = "paper";
  ScenarioConfig scenario;
  ChannelConfig channel;
  PathLossParams path_loss;
  HbfConfig hbf;
  RewardParams reward;
  ActionBox action_box;
  DdpgHyper ddpg;
  TrainOptions training;
  SwarmConfig swarm;  // bounds always follow scenario.bounds
  int eval_realizations = 2000;
  int search_realizations = 500;  // per objective call in PSO and grid search
  double grid_resolution = 5.0;
  double rate_map_resolution = 5.0;
  std::vector<std::string> methods = {"ddpg", "pso", "grid", "fd"};
  bool runtime_study = true;  // compare: timed 1/3/6-location chains (dynamic_sequence only)
  EarlyStop runtime_early_stop{.enabled = true, .min_episodes = 20, .patience = 20, .relative_tolerance = 0.03};
  std::string output_dir = "out";

  void validate() const;
};

/// Full-size arrays and budgets.
ExperimentConfig paper_profile();
/// 4x4 arrays, K=2, L=Q=4 and shorter budgets for quick runs.
ExperimentConfig desk_profile();
ExperimentConfig profile_by_name(const std::string& name);

nlohmann::json to_json(const ExperimentConfig& cfg);
/// Fields missing from `j` keep their values from `base`.
ExperimentConfig config_from_json(const nlohmann::json& j, const ExperimentConfig& base);

/// Applies "a.b.c=value" to a JSON document. The value is parsed as JSON
/// when possible and stored as a string otherwise.
void apply_override(nlohmann::json& doc, const std::string& assignment);

/// Profile defaults, then the optional config file, then overrides.
ExperimentConfig load_config(const std::string& profile, const std::optional<std::string>& path,
                             const std::vector<std::string>& overrides);

/// 64-bit FNV-1a of the canonical JSON dump.
std::uint64_t config_hash(const ExperimentConfig& cfg);

/// Dynamic indices 1..6 for dynamic_sequence, {0} for static scenarios.
std::vector<int> location_indices(const ExperimentConfig& cfg);
/// "l1".."l6", or the distribution name for index 0.
std::string segment_label(const ExperimentConfig& cfg, int index);

RelaySystem make_system(const ExperimentConfig& cfg, int location_index);

/// Seed shared by every final R2 evaluation of a run.
std::uint64_t eval_seed(const ExperimentConfig& cfg);

/// R2 at (x, y) averaged over `realizations`; stream s uses derive_seed(seed, s).
PlacementObjective r2_objective(const RelaySystem& system, int realizations, std::uint64_t seed);

/// Final comparison value: eval_realizations on stream 0 of eval_seed.
double evaluated_r2(const RelaySystem& system, const ExperimentConfig& cfg, const Point2& p);

struct PolicyEvaluation {
  std::vector<Point2> visited;  // visited[0] is the start position
  std::vector<double> r2;       // evaluated R2 at each visited position
  Point2 best;
  double best_r2 = 0.0;
  Point2 final_position;
  double final_r2 = 0.0;
  double wall_time_ms = 0.0;
};

/// Noise-free rollout of `steps` steps from `start`; every visited position
/// is scored with evaluated_r2 and the best one (earliest on ties) kept.
PolicyEvaluation evaluate_policy(const RelaySystem& system, const ExperimentConfig& cfg,
                                 const MlpParams& actor, const Point2& start);

struct SegmentResult {
  int location_index = 0;
  std::string label;
  Point2 initial;
  TrainResult training;
  PolicyEvaluation evaluation;
};

/// Trains on each location in turn. Every location after the first starts
/// from the previous best position and the previous networks.
std::vector<SegmentResult> run_ddpg_sequence(const ExperimentConfig& cfg,
                                             const std::vector<int>& indices,
                                             const EarlyStop& early_stop);

SearchResult run_pso(const RelaySystem& system, const ExperimentConfig& cfg);
SearchResult run_grid(const RelaySystem& system, const ExperimentConfig& cfg);

/// Writes rate_map_<label>.csv (x,y,r2) per location; returns the file paths.
std::vector<std::string> cmd_rate_map(const ExperimentConfig& cfg, double resolution);

/// Writes weights_<label>.json, trace.csv, rollout.csv and train_summary.json.
std::vector<SegmentResult> cmd_train(const ExperimentConfig& cfg);

/// Writes compare.csv and, for dynamic_sequence with runtime_study, runtime.csv.
/// DDPG rows need weights_<label>.json in `weights_dir`.
void cmd_compare(const ExperimentConfig& cfg, const std::string& weights_dir);

/// manifest_<command>.json with the config, its hash, seed, version and compiler.
void write_manifest(const ExperimentConfig& cfg, const std::string& command);

}  // namespace skyrelay

#endif  // SKYRELAY_EXPERIMENT_HPP
