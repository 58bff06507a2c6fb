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

#include <exception>
#include <iostream>
#include <optional>
#include <string>
#include <vector>

#include "CLI11.hpp"
#include "skyrelay/experiment.hpp"

int main(int argc, char** argv) {
  CLI::App app{"UAV relay placement experiments"};
  app.fallthrough();
  app.require_subcommand(1);

  std::string profile = "paper";
  std::string config_path;
  std::optional<std::uint64_t> seed;
  std::string out_dir;
  std::vector<std::string> overrides;
  app.add_option("--profile", profile, "Built-in defaults to start from")
      ->check(CLI::IsMember({"paper", "desk"}));
  app.add_option("--config", config_path, "JSON config merged over the profile")->check(CLI::ExistingFile);
  app.add_option("--seed", seed, "Sets scenario.rng_seed, ddpg.seed and swarm.seed");
  app.add_option("--out", out_dir, "Output directory (overrides output_dir)");
  app.add_option("--set", overrides, "Override a config field, e.g. --set training.episodes=20")
      ->take_all();

  auto* rate_map = app.add_subcommand("rate-map", "R2 over a lattice of UAV positions");
  double resolution = 0.0;
  rate_map->add_option("--resolution", resolution, "Lattice spacing in meters (default: rate_map_resolution)");

  auto* train = app.add_subcommand("train", "Train DDPG placement policies");

  auto* compare = app.add_subcommand("compare", "Compare DDPG, PSO, grid search and fixed deployment");
  std::string weights_dir;
  std::vector<std::string> methods;
  compare->add_option("--weights", weights_dir, "Directory holding weights_<segment>.json (default: output dir)");
  compare->add_option("--methods", methods, "Subset of ddpg, pso, grid, fd")->delimiter(',');

  CLI11_PARSE(app, argc, argv);

  try {
    if (seed) {
      const std::string s = std::to_string(*seed);
      overrides.push_back("scenario.rng_seed=" + s);
      overrides.push_back("ddpg.seed=" + s);
      overrides.push_back("swarm.seed=" + s);
    }
    if (!out_dir.empty()) overrides.push_back("output_dir=\"" + out_dir + "\"");
    if (!methods.empty()) {
      nlohmann::json list = methods;
      overrides.push_back("methods=" + list.dump());
    }
    const skyrelay::ExperimentConfig cfg = skyrelay::load_config(
        profile, config_path.empty() ? std::nullopt : std::optional<std::string>(config_path), overrides);

    if (*rate_map) {
      for (const auto& f : skyrelay::cmd_rate_map(cfg, resolution > 0.0 ? resolution : cfg.rate_map_resolution))
        std::cout << "wrote " << f << '\n';
    } else if (*train) {
      for (const auto& seg : skyrelay::cmd_train(cfg))
        std::cout << seg.label << ": best (" << seg.evaluation.best.x << ", " << seg.evaluation.best.y
                  << ") r2 " << seg.evaluation.best_r2 << " after " << seg.training.episodes_run
                  << " episodes\n";
    } else if (*compare) {
      skyrelay::cmd_compare(cfg, weights_dir.empty() ? cfg.output_dir : weights_dir);
      std::cout << "wrote " << cfg.output_dir << "/compare.csv\n";
    }
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << '\n';
    return 1;
  }
  return 0;
}
