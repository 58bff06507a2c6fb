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

#ifndef SKYRELAY_BASELINES_HPP
#define SKYRELAY_BASELINES_HPP

#include <cstdint>
#include <functional>
#include <vector>

#include "json.hpp"
#include "skyrelay/geometry.hpp"

namespace skyrelay {

struct Point2 {
  double x = 0.0;
  double y = 0.0;

  bool operator==(const Point2&) const = default;
};

/// Objective to maximize. The second argument names a random-number
/// substream: candidates compared against each other share it.
using PlacementObjective = std::function<double(const Point2& p, std::uint64_t crn_stream)>;

struct SwarmConfig {
  int num_particles = 30;
  double inertia = 0.7;
  double cognitive = 1.5;
  double social = 1.5;
  int max_iters = 50;
  AreaBounds bounds;
  std::uint64_t seed = 1;

  void validate() const;
};

void to_json(nlohmann::json& j, const SwarmConfig& c);
void from_json(const nlohmann::json& j, SwarmConfig& c);

struct SearchResult {
  Point2 best;
  double value = 0.0;
  double wall_time_ms = 0.0;
  int evaluations = 0;
  std::vector<double> incumbent_history;  // PSO: best value after each iteration
};

/// Global-best PSO. Velocities are limited to the area span and positions
/// clamped to the bounds. Iteration i evaluates every particle on substream i.
SearchResult pso_optimize(const PlacementObjective& objective, const SwarmConfig& cfg);

/// Every lattice point x_min + i*resolution (plus the upper bound itself),
/// all on substream 0. Ties go to the smallest x, then the smallest y.
SearchResult grid_search(const PlacementObjective& objective, const AreaBounds& bounds,
                         double resolution);

/// The lattice coordinates grid_search visits along one axis.
std::vector<double> lattice_axis(double lo, double hi, double resolution);

/// The objective at the scenario's initial hover point.
SearchResult fixed_deployment(const PlacementObjective& objective, const ScenarioConfig& scenario);

}  // namespace skyrelay

#endif  // SKYRELAY_BASELINES_HPP
