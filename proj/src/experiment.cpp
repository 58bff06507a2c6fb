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

#include "skyrelay/experiment.hpp"

#include <algorithm>
#include <chrono>
#include <filesystem>
#include <fstream>
#include <iomanip>
#include <sstream>
#include <stdexcept>

#ifndef SKYRELAY_VERSION
#define SKYRELAY_VERSION "0.0.0"
#endif

namespace skyrelay {

namespace fs = std::filesystem;

std::string version_string() { return SKYRELAY_VERSION; }

namespace {

using Clock = std::chrono::steady_clock;

double elapsed_ms(Clock::time_point start) {
  return std::chrono::duration<double, std::milli>(Clock::now() - start).count();
}

std::ofstream open_output(const fs::path& path) {
  std::ofstream out(path);
  if (!out) throw std::runtime_error("cannot open '" + path.string() + "' for writing");
  out << std::setprecision(17);
  return out;
}

void finish_output(std::ofstream& out, const fs::path& path) {
  out.flush();
  if (!out) throw std::runtime_error("failed while writing '" + path.string() + "'");
}

fs::path output_dir(const ExperimentConfig& cfg) {
  const fs::path dir(cfg.output_dir);
  std::error_code ec;
  fs::create_directories(dir, ec);
  if (ec) throw std::runtime_error("cannot create output directory '" + dir.string() + "': " + ec.message());
  return dir;
}

nlohmann::json point_json(const Point2& p) { return {{"x", p.x}, {"y", p.y}}; }

Point2 point_from_json(const nlohmann::json& j) { return {j.at("x").get<double>(), j.at("y").get<double>()}; }

}  // namespace

void ExperimentConfig::validate() const {
  scenario.validate();
  channel.validate();
  path_loss.validate();
  hbf.validate(scenario.num_users, channel.bs_array.size(), channel.uav_rx_array.size(),
               channel.uav_tx_array.size());
  reward.validate();
  if (!(action_box.x_max > 0.0) || !(action_box.y_max > 0.0))
    throw std::invalid_argument("action_box limits must be positive");
  ddpg.validate();
  if (training.episodes < 1 || training.steps < 1)
    throw std::invalid_argument("training.episodes and training.steps must be >= 1");
  swarm.validate();
  if (eval_realizations < 1 || search_realizations < 1)
    throw std::invalid_argument("eval_realizations and search_realizations must be >= 1");
  if (!(grid_resolution > 0.0) || !(rate_map_resolution > 0.0))
    throw std::invalid_argument("grid and rate-map resolutions must be positive");
  for (const auto& m : methods)
    if (m != "ddpg" && m != "pso" && m != "grid" && m != "fd")
      throw std::invalid_argument("unknown method '" + m + "' (expected ddpg, pso, grid or fd)");
  if (output_dir.empty()) throw std::invalid_argument("output_dir must not be empty");
}

ExperimentConfig paper_profile() {
  ExperimentConfig c;
  c.profile = "paper";
  c.hbf.n_rf_bs = c.hbf.n_rf_uav = c.scenario.num_users;
  c.hbf.bs_power_w = c.hbf.uav_power_w = 1e6;
  c.training = {.episodes = 300, .steps = 100};
  c.eval_realizations = 2000;
  c.search_realizations = 500;
  c.swarm.bounds = c.scenario.bounds;
  return c;
}

ExperimentConfig desk_profile() {
  ExperimentConfig c = paper_profile();
  c.profile = "desk";
  c.scenario.num_users = 2;
  c.scenario.users_per_group = 2;
  c.channel.bs_array = c.channel.uav_rx_array = c.channel.uav_tx_array = {4, 4, 0.5};
  c.channel.num_paths_link1 = 4;
  c.channel.num_paths_link2 = 4;
  c.hbf.n_rf_bs = c.hbf.n_rf_uav = 2;
  c.training = {.episodes = 150, .steps = 50};
  c.eval_realizations = 200;
  c.search_realizations = 500;
  return c;
}

ExperimentConfig profile_by_name(const std::string& name) {
  if (name == "paper") return paper_profile();
  if (name == "desk") return desk_profile();
  throw std::invalid_argument("unknown profile '" + name + "' (expected paper or desk)");
}

nlohmann::json to_json(const ExperimentConfig& c) {
  nlohmann::json j;
  j["profile"] = c.profile;
  j["scenario"] = c.scenario;
  j["channel"] = c.channel;
  j["path_loss"] = c.path_loss;
  j["hbf"] = c.hbf;
  j["reward"] = c.reward;
  j["action_box"] = {{"x_max", c.action_box.x_max}, {"y_max", c.action_box.y_max}};
  j["ddpg"] = c.ddpg;
  j["training"] = {{"episodes", c.training.episodes}, {"steps", c.training.steps}};
  nlohmann::json swarm = c.swarm;
  swarm.erase("bounds");
  j["swarm"] = swarm;
  j["eval_realizations"] = c.eval_realizations;
  j["search_realizations"] = c.search_realizations;
  j["grid_resolution"] = c.grid_resolution;
  j["rate_map_resolution"] = c.rate_map_resolution;
  j["methods"] = c.methods;
  j["runtime_study"] = c.runtime_study;
  j["runtime_early_stop"] = c.runtime_early_stop;
  j["output_dir"] = c.output_dir;
  return j;
}

ExperimentConfig config_from_json(const nlohmann::json& j, const ExperimentConfig& base) {
  // Merge onto the base document so nested objects keep unspecified fields.
  nlohmann::json merged = to_json(base);
  merged.merge_patch(j);
  ExperimentConfig c;
  try {
    c.profile = merged.at("profile").get<std::string>();
    c.scenario = merged.at("scenario").get<ScenarioConfig>();
    c.channel = merged.at("channel").get<ChannelConfig>();
    c.path_loss = merged.at("path_loss").get<PathLossParams>();
    c.hbf = merged.at("hbf").get<HbfConfig>();
    c.reward = merged.at("reward").get<RewardParams>();
    c.action_box = {merged.at("action_box").at("x_max").get<double>(),
                    merged.at("action_box").at("y_max").get<double>()};
    c.ddpg = merged.at("ddpg").get<DdpgHyper>();
    c.training = {merged.at("training").at("episodes").get<int>(),
                  merged.at("training").at("steps").get<int>()};
    c.swarm = merged.at("swarm").get<SwarmConfig>();
    c.swarm.bounds = c.scenario.bounds;
    c.eval_realizations = merged.at("eval_realizations").get<int>();
    c.search_realizations = merged.at("search_realizations").get<int>();
    c.grid_resolution = merged.at("grid_resolution").get<double>();
    c.rate_map_resolution = merged.at("rate_map_resolution").get<double>();
    c.methods = merged.at("methods").get<std::vector<std::string>>();
    c.runtime_study = merged.at("runtime_study").get<bool>();
    c.runtime_early_stop = merged.at("runtime_early_stop").get<EarlyStop>();
    c.output_dir = merged.at("output_dir").get<std::string>();
  } catch (const nlohmann::json::exception& e) {
    throw std::invalid_argument(std::string("invalid configuration: ") + e.what());
  }
  return c;
}

void apply_override(nlohmann::json& doc, const std::string& assignment) {
  const auto eq = assignment.find('=');
  if (eq == std::string::npos || eq == 0)
    throw std::invalid_argument("override '" + assignment + "' must look like path.to.field=value");
  const std::string path = assignment.substr(0, eq);
  const std::string text = assignment.substr(eq + 1);
  nlohmann::json value = nlohmann::json::parse(text, nullptr, false);
  if (value.is_discarded()) value = text;

  nlohmann::json* node = &doc;
  std::stringstream parts(path);
  std::string key;
  std::vector<std::string> keys;
  while (std::getline(parts, key, '.')) {
    if (key.empty()) throw std::invalid_argument("override '" + assignment + "' has an empty path segment");
    keys.push_back(key);
  }
  for (std::size_t i = 0; i + 1 < keys.size(); ++i) {
    if (!node->is_object() || !node->contains(keys[i]))
      throw std::invalid_argument("override '" + assignment + "': unknown section '" + keys[i] + "'");
    node = &(*node)[keys[i]];
  }
  if (!node->is_object() || !node->contains(keys.back()))
    throw std::invalid_argument("override '" + assignment + "': unknown field '" + keys.back() + "'");
  (*node)[keys.back()] = value;
}

ExperimentConfig load_config(const std::string& profile, const std::optional<std::string>& path,
                             const std::vector<std::string>& overrides) {
  const ExperimentConfig base = profile_by_name(profile);
  nlohmann::json doc = to_json(base);
  if (path) {
    std::ifstream in(*path);
    if (!in) throw std::runtime_error("cannot read config file '" + *path + "'");
    nlohmann::json file = nlohmann::json::parse(in, nullptr, false);
    if (file.is_discarded() || !file.is_object())
      throw std::invalid_argument("config file '" + *path + "' is not a JSON object");
    doc.merge_patch(file);
  }
  for (const auto& o : overrides) apply_override(doc, o);
  ExperimentConfig cfg = config_from_json(doc, base);
  cfg.validate();
  return cfg;
}

std::uint64_t config_hash(const ExperimentConfig& cfg) {
  std::uint64_t h = 0xcbf29ce484222325ULL;
  for (unsigned char ch : to_json(cfg).dump()) {
    h ^= ch;
    h *= 0x100000001b3ULL;
  }
  return h;
}

std::vector<int> location_indices(const ExperimentConfig& cfg) {
  if (cfg.scenario.distribution_kind != DistributionKind::dynamic_sequence) return {0};
  std::vector<int> idx;
  for (int l = 1; l <= kDynamicDistributions; ++l) idx.push_back(l);
  return idx;
}

std::string segment_label(const ExperimentConfig& cfg, int index) {
  if (index == 0) return to_string(cfg.scenario.distribution_kind);
  return "l" + std::to_string(index);
}

RelaySystem make_system(const ExperimentConfig& cfg, int location_index) {
  const int l = location_index == 0 ? 1 : location_index;
  return RelaySystem(cfg.scenario, scenario_users(cfg.scenario, l), cfg.channel, cfg.path_loss,
                     cfg.hbf);
}

std::uint64_t eval_seed(const ExperimentConfig& cfg) {
  return derive_seed(cfg.scenario.rng_seed, 0x6576616cULL);
}

PlacementObjective r2_objective(const RelaySystem& system, int realizations, std::uint64_t seed) {
  return [&system, realizations, seed](const Point2& p, std::uint64_t stream) {
    return system.r2_ergodic(system.uav_at(p.x, p.y), realizations, derive_seed(seed, stream));
  };
}

double evaluated_r2(const RelaySystem& system, const ExperimentConfig& cfg, const Point2& p) {
  return r2_objective(system, cfg.eval_realizations, eval_seed(cfg))(p, 0);
}

PolicyEvaluation evaluate_policy(const RelaySystem& system, const ExperimentConfig& cfg,
                                 const MlpParams& actor, const Point2& start) {
  const auto t0 = Clock::now();
  DeploymentEnv env(system, cfg.reward, cfg.action_box, derive_seed(eval_seed(cfg), 1));
  env.set_initial(system.uav_at(start.x, start.y));
  PolicyEvaluation ev;
  EnvState s = env.reset();
  ev.visited.push_back(start);
  for (int t = 0; t < cfg.training.steps; ++t) {
    const StepResult r = env.step(cfg.action_box.clip(actor_forward(actor, s)));
    s = r.next_state;
    const Position3D p = env.position();
    ev.visited.push_back({p.x, p.y});
  }
  for (std::size_t i = 0; i < ev.visited.size(); ++i) {
    const double v = evaluated_r2(system, cfg, ev.visited[i]);
    ev.r2.push_back(v);
    if (i == 0 || v > ev.best_r2) {
      ev.best_r2 = v;
      ev.best = ev.visited[i];
    }
  }
  ev.final_position = ev.visited.back();
  ev.final_r2 = ev.r2.back();
  ev.wall_time_ms = elapsed_ms(t0);
  return ev;
}

std::vector<SegmentResult> run_ddpg_sequence(const ExperimentConfig& cfg,
                                             const std::vector<int>& indices,
                                             const EarlyStop& early_stop) {
  std::vector<SegmentResult> out;
  Point2 start{cfg.scenario.uav_initial.x, cfg.scenario.uav_initial.y};
  for (int index : indices) {
    const RelaySystem system = make_system(cfg, index);
    const auto seg = static_cast<std::uint64_t>(index);
    DeploymentEnv env(system, cfg.reward, cfg.action_box, derive_seed(cfg.ddpg.seed, 0x656e76ULL, seg));
    env.set_initial(system.uav_at(start.x, start.y));
    DdpgHyper hyper = cfg.ddpg;
    hyper.seed = derive_seed(cfg.ddpg.seed, seg);
    hyper.early_stop = early_stop;

    SegmentResult r;
    r.location_index = index;
    r.label = segment_label(cfg, index);
    r.initial = start;
    r.training = train(env, hyper, cfg.training, out.empty() ? nullptr : &out.back().training.networks);
    r.evaluation = evaluate_policy(system, cfg, r.training.networks.actor, start);
    start = r.evaluation.best;
    out.push_back(std::move(r));
  }
  return out;
}

SearchResult run_pso(const RelaySystem& system, const ExperimentConfig& cfg) {
  SwarmConfig sc = cfg.swarm;
  sc.bounds = cfg.scenario.bounds;
  return pso_optimize(r2_objective(system, cfg.search_realizations, eval_seed(cfg)), sc);
}

SearchResult run_grid(const RelaySystem& system, const ExperimentConfig& cfg) {
  return grid_search(r2_objective(system, cfg.search_realizations, eval_seed(cfg)),
                     cfg.scenario.bounds, cfg.grid_resolution);
}

std::vector<std::string> cmd_rate_map(const ExperimentConfig& cfg, double resolution) {
  const fs::path dir = output_dir(cfg);
  std::vector<std::string> files;
  for (int index : location_indices(cfg)) {
    const RelaySystem system = make_system(cfg, index);
    const PlacementObjective f = r2_objective(system, cfg.eval_realizations, eval_seed(cfg));
    const fs::path path = dir / ("rate_map_" + segment_label(cfg, index) + ".csv");
    std::ofstream out = open_output(path);
    out << "x,y,r2\n";
    const auto xs = lattice_axis(cfg.scenario.bounds.x_min, cfg.scenario.bounds.x_max, resolution);
    const auto ys = lattice_axis(cfg.scenario.bounds.y_min, cfg.scenario.bounds.y_max, resolution);
    for (double x : xs)
      for (double y : ys) out << x << ',' << y << ',' << f({x, y}, 0) << '\n';
    finish_output(out, path);
    files.push_back(path.string());
  }
  write_manifest(cfg, "rate-map");
  return files;
}

std::vector<SegmentResult> cmd_train(const ExperimentConfig& cfg) {
  const fs::path dir = output_dir(cfg);
  std::vector<SegmentResult> segments = run_ddpg_sequence(cfg, location_indices(cfg), cfg.ddpg.early_stop);

  const fs::path trace_path = dir / "trace.csv";
  std::ofstream trace = open_output(trace_path);
  trace << "segment,episode,accumulated_reward,avg_accumulated_reward\n";
  const fs::path rollout_path = dir / "rollout.csv";
  std::ofstream rollout = open_output(rollout_path);
  rollout << "segment,t,x,y,dx,dy,reward,r2\n";
  nlohmann::json summary = nlohmann::json::array();

  for (const SegmentResult& seg : segments) {
    const TrainResult& tr = seg.training;
    for (std::size_t e = 0; e < tr.episode_rewards.size(); ++e)
      trace << seg.label << ',' << e + 1 << ',' << tr.episode_rewards[e] << ',' << tr.average_rewards[e] << '\n';

    // Replay the greedy policy on the training reward to log the trajectory.
    const RelaySystem system = make_system(cfg, seg.location_index);
    DeploymentEnv env(system, cfg.reward, cfg.action_box, derive_seed(eval_seed(cfg), 1));
    env.set_initial(system.uav_at(seg.initial.x, seg.initial.y));
    const Rollout ro = greedy_rollout(tr.networks.actor, env, cfg.training.steps);
    for (std::size_t t = 0; t < ro.results.size(); ++t) {
      const auto [x, y] = denormalize(cfg.scenario.bounds, ro.results[t].next_state);
      rollout << seg.label << ',';
      write_trace_row(rollout, static_cast<int>(t) + 1, x, y, ro.actions[t], ro.results[t]);
    }

    nlohmann::json weights = networks_to_json(tr.networks);
    weights["initial_position"] = point_json(seg.initial);
    const fs::path wpath = dir / ("weights_" + seg.label + ".json");
    std::ofstream wout = open_output(wpath);
    wout << weights.dump(1) << '\n';
    finish_output(wout, wpath);

    summary.push_back({{"segment", seg.label},
                       {"initial_position", point_json(seg.initial)},
                       {"best_position", point_json(seg.evaluation.best)},
                       {"best_r2", seg.evaluation.best_r2},
                       {"final_position", point_json(seg.evaluation.final_position)},
                       {"final_r2", seg.evaluation.final_r2},
                       {"episodes", tr.episodes_run},
                       {"stopped_early", tr.stopped_early},
                       {"episodes_to_90pct", episodes_to_fraction(tr.average_rewards, 0.9)},
                       {"wall_time_ms", tr.wall_time_ms}});
  }
  finish_output(trace, trace_path);
  finish_output(rollout, rollout_path);
  const fs::path spath = dir / "train_summary.json";
  std::ofstream sout = open_output(spath);
  sout << summary.dump(2) << '\n';
  finish_output(sout, spath);
  write_manifest(cfg, "train");
  return segments;
}

void cmd_compare(const ExperimentConfig& cfg, const std::string& weights_dir) {
  const fs::path dir = output_dir(cfg);
  const auto wants = [&](const std::string& m) {
    return std::find(cfg.methods.begin(), cfg.methods.end(), m) != cfg.methods.end();
  };

  // Load every weights file up front so a missing one fails before any work.
  std::vector<std::pair<DdpgNetworks, Point2>> weights;
  if (wants("ddpg")) {
    for (int index : location_indices(cfg)) {
      const fs::path wpath = fs::path(weights_dir) / ("weights_" + segment_label(cfg, index) + ".json");
      if (!fs::exists(wpath))
        throw std::runtime_error("missing DDPG weights '" + wpath.string() +
                                 "'; run 'skyrelay train' with the same config first, point "
                                 "--weights at its output directory, or drop ddpg from methods");
      const DdpgNetworks nets = load_networks(wpath.string());
      std::ifstream in(wpath);
      const nlohmann::json j = nlohmann::json::parse(in);
      const Point2 start = j.contains("initial_position")
                               ? point_from_json(j["initial_position"])
                               : Point2{cfg.scenario.uav_initial.x, cfg.scenario.uav_initial.y};
      weights.emplace_back(nets, start);
    }
  }

  const fs::path cpath = dir / "compare.csv";
  std::ofstream out = open_output(cpath);
  out << "method,distribution,x,y,r2,wall_time_ms\n";
  const auto row = [&](const std::string& method, const std::string& label, const Point2& p, double r2,
                       double ms) {
    out << method << ',' << label << ',' << p.x << ',' << p.y << ',' << r2 << ',' << ms << '\n';
  };
  const std::vector<int> indices = location_indices(cfg);
  for (std::size_t i = 0; i < indices.size(); ++i) {
    const RelaySystem system = make_system(cfg, indices[i]);
    const std::string label = segment_label(cfg, indices[i]);
    if (wants("ddpg")) {
      const PolicyEvaluation ev = evaluate_policy(system, cfg, weights[i].first.actor, weights[i].second);
      row("ddpg", label, ev.best, ev.best_r2, ev.wall_time_ms);
    }
    if (wants("pso")) {
      const SearchResult r = run_pso(system, cfg);
      row("pso", label, r.best, evaluated_r2(system, cfg, r.best), r.wall_time_ms);
    }
    if (wants("grid")) {
      const SearchResult r = run_grid(system, cfg);
      row("grid", label, r.best, evaluated_r2(system, cfg, r.best), r.wall_time_ms);
    }
    if (wants("fd")) {
      const SearchResult r = fixed_deployment(r2_objective(system, cfg.eval_realizations, eval_seed(cfg)),
                                              cfg.scenario);
      row("fd", label, r.best, r.value, r.wall_time_ms);
    }
  }
  finish_output(out, cpath);

  if (cfg.runtime_study && cfg.scenario.distribution_kind == DistributionKind::dynamic_sequence) {
    const fs::path rpath = dir / "runtime.csv";
    std::ofstream rt = open_output(rpath);
    rt << "method,locations,cumulative_wall_time_ms\n";
    const std::vector<int> marks = {1, 3, 6};
    if (wants("ddpg")) {
      const auto segs = run_ddpg_sequence(cfg, indices, cfg.runtime_early_stop);
      double total = 0.0;
      for (std::size_t i = 0; i < segs.size(); ++i) {
        total += segs[i].training.wall_time_ms + segs[i].evaluation.wall_time_ms;
        if (std::find(marks.begin(), marks.end(), static_cast<int>(i) + 1) != marks.end())
          rt << "ddpg," << i + 1 << ',' << total << '\n';
      }
    }
    if (wants("pso")) {
      double total = 0.0;
      for (std::size_t i = 0; i < indices.size(); ++i) {
        const RelaySystem system = make_system(cfg, indices[i]);
        total += run_pso(system, cfg).wall_time_ms;
        if (std::find(marks.begin(), marks.end(), static_cast<int>(i) + 1) != marks.end())
          rt << "pso," << i + 1 << ',' << total << '\n';
      }
    }
    finish_output(rt, rpath);
  }
  write_manifest(cfg, "compare");
}

void write_manifest(const ExperimentConfig& cfg, const std::string& command) {
  const fs::path dir = output_dir(cfg);
  std::ostringstream hash;
  hash << std::hex << std::setw(16) << std::setfill('0') << config_hash(cfg);
  std::ostringstream compiler;
#if defined(__clang__)
  compiler << "clang " << __clang_major__ << '.' << __clang_minor__ << '.' << __clang_patchlevel__;
#elif defined(__GNUC__)
  compiler << "gcc " << __GNUC__ << '.' << __GNUC_MINOR__ << '.' << __GNUC_PATCHLEVEL__;
#else
  compiler << "unknown";
#endif
  const nlohmann::json manifest = {{"command", command},
                                   {"config_hash", hash.str()},
                                   {"seed", cfg.scenario.rng_seed},
                                   {"version", version_string()},
                                   {"compiler", compiler.str()},
                                   {"eigen", std::to_string(EIGEN_WORLD_VERSION) + "." +
                                                 std::to_string(EIGEN_MAJOR_VERSION) + "." +
                                                 std::to_string(EIGEN_MINOR_VERSION)},
                                   {"config", to_json(cfg)}};
  const fs::path path = dir / ("manifest_" + command + ".json");
  std::ofstream out = open_output(path);
  out << manifest.dump(2) << '\n';
  finish_output(out, path);
}

}  // namespace skyrelay
