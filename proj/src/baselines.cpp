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

#include "skyrelay/baselines.hpp"

#include <algorithm>
#include <chrono>
#include <stdexcept>

#include "skyrelay/random.hpp"

namespace skyrelay {

namespace {

using Clock = std::chrono::steady_clock;

double elapsed_ms(Clock::time_point start) {
  return std::chrono::duration<double, std::milli>(Clock::now() - start).count();
}

}  // namespace

void SwarmConfig::validate() const {
  if (num_particles < 2) throw std::invalid_argument("swarm.num_particles must be >= 2");
  if (!(inertia > 0.0 && inertia < 1.0)) throw std::invalid_argument("swarm.inertia must be in (0, 1)");
  if (!(cognitive > 0.0) || !(social > 0.0))
    throw std::invalid_argument("swarm.cognitive and swarm.social must be positive");
  if (max_iters < 1) throw std::invalid_argument("swarm.max_iters must be >= 1");
  if (!(bounds.x_max > bounds.x_min) || !(bounds.y_max > bounds.y_min))
    throw std::invalid_argument("swarm.bounds must have positive extent");
}

void to_json(nlohmann::json& j, const SwarmConfig& c) {
  j = {{"num_particles", c.num_particles}, {"inertia", c.inertia}, {"cognitive", c.cognitive},
       {"social", c.social},               {"max_iters", c.max_iters}, {"bounds", c.bounds},
       {"seed", c.seed}};
}

void from_json(const nlohmann::json& j, SwarmConfig& c) {
  SwarmConfig d;
  c.num_particles = j.value("num_particles", d.num_particles);
  c.inertia = j.value("inertia", d.inertia);
  c.cognitive = j.value("cognitive", d.cognitive);
  c.social = j.value("social", d.social);
  c.max_iters = j.value("max_iters", d.max_iters);
  c.bounds = j.value("bounds", d.bounds);
  c.seed = j.value("seed", d.seed);
}

SearchResult pso_optimize(const PlacementObjective& objective, const SwarmConfig& cfg) {
  cfg.validate();
  const auto start = Clock::now();
  const AreaBounds& b = cfg.bounds;
  const double vx_max = b.x_max - b.x_min;
  const double vy_max = b.y_max - b.y_min;
  Rng rng(cfg.seed);

  const auto n = static_cast<std::size_t>(cfg.num_particles);
  std::vector<Point2> pos(n), vel(n), best_pos(n);
  std::vector<double> best_val(n);
  for (std::size_t i = 0; i < n; ++i) {
    pos[i] = {uniform(rng, b.x_min, b.x_max), uniform(rng, b.y_min, b.y_max)};
    vel[i] = {uniform(rng, -vx_max, vx_max), uniform(rng, -vy_max, vy_max)};
  }

  SearchResult r;
  // Iteration 0 scores the initial swarm; each later iteration moves then scores.
  for (int iter = 0; iter <= cfg.max_iters; ++iter) {
    if (iter > 0) {
      for (std::size_t i = 0; i < n; ++i) {
        const double r1x = uniform(rng, 0.0, 1.0), r1y = uniform(rng, 0.0, 1.0);
        const double r2x = uniform(rng, 0.0, 1.0), r2y = uniform(rng, 0.0, 1.0);
        vel[i].x = cfg.inertia * vel[i].x + cfg.cognitive * r1x * (best_pos[i].x - pos[i].x) +
                   cfg.social * r2x * (r.best.x - pos[i].x);
        vel[i].y = cfg.inertia * vel[i].y + cfg.cognitive * r1y * (best_pos[i].y - pos[i].y) +
                   cfg.social * r2y * (r.best.y - pos[i].y);
        vel[i].x = std::clamp(vel[i].x, -vx_max, vx_max);
        vel[i].y = std::clamp(vel[i].y, -vy_max, vy_max);
        pos[i].x = std::clamp(pos[i].x + vel[i].x, b.x_min, b.x_max);
        pos[i].y = std::clamp(pos[i].y + vel[i].y, b.y_min, b.y_max);
      }
    }
    const auto stream = static_cast<std::uint64_t>(iter);
    for (std::size_t i = 0; i < n; ++i) {
      const double v = objective(pos[i], stream);
      ++r.evaluations;
      if (iter == 0 || v > best_val[i]) {
        best_val[i] = v;
        best_pos[i] = pos[i];
      }
      if ((iter == 0 && i == 0) || v > r.value) {
        r.value = v;
        r.best = pos[i];
      }
    }
    r.incumbent_history.push_back(r.value);
  }
  r.wall_time_ms = elapsed_ms(start);
  return r;
}

std::vector<double> lattice_axis(double lo, double hi, double resolution) {
  if (!(resolution > 0.0)) throw std::invalid_argument("grid resolution must be positive");
  if (hi < lo) throw std::invalid_argument("lattice_axis: hi < lo");
  std::vector<double> axis;
  for (long i = 0;; ++i) {
    const double v = lo + static_cast<double>(i) * resolution;
    // Absorb rounding so that e.g. 0 + 20 * 5 lands on 100 exactly once.
    if (v > hi - 1e-9 * resolution) break;
    axis.push_back(v);
  }
  axis.push_back(hi);
  return axis;
}

SearchResult grid_search(const PlacementObjective& objective, const AreaBounds& bounds,
                         double resolution) {
  const auto start = Clock::now();
  const std::vector<double> xs = lattice_axis(bounds.x_min, bounds.x_max, resolution);
  const std::vector<double> ys = lattice_axis(bounds.y_min, bounds.y_max, resolution);
  SearchResult r;
  for (double x : xs) {
    for (double y : ys) {
      const double v = objective({x, y}, 0);
      // Strict comparison keeps the first (smallest x, then y) maximizer.
      if (r.evaluations == 0 || v > r.value) {
        r.value = v;
        r.best = {x, y};
      }
      ++r.evaluations;
    }
  }
  r.wall_time_ms = elapsed_ms(start);
  return r;
}

SearchResult fixed_deployment(const PlacementObjective& objective, const ScenarioConfig& scenario) {
  const auto start = Clock::now();
  SearchResult r;
  r.best = {scenario.uav_initial.x, scenario.uav_initial.y};
  r.value = objective(r.best, 0);
  r.evaluations = 1;
  r.wall_time_ms = elapsed_ms(start);
  return r;
}

}  // namespace skyrelay
