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

#include "skyrelay/env.hpp"

#include <algorithm>
#include <stdexcept>

namespace skyrelay {

EnvAction ActionBox::clip(const EnvAction& a) const {
  return {std::clamp(a.dx, -x_max, x_max), std::clamp(a.dy, -y_max, y_max)};
}

void RewardParams::validate() const {
  if (threshold < 0.0) throw std::invalid_argument("reward threshold must be non-negative");
  if (train_realizations < 1) throw std::invalid_argument("train_realizations must be >= 1");
}

void to_json(nlohmann::json& j, const RewardParams& r) {
  j = {{"threshold", r.threshold},
       {"below_threshold_penalty", r.below_threshold_penalty},
       {"out_of_bounds_penalty", r.out_of_bounds_penalty},
       {"train_realizations", r.train_realizations}};
}

void from_json(const nlohmann::json& j, RewardParams& r) {
  RewardParams d;
  r.threshold = j.value("threshold", d.threshold);
  r.below_threshold_penalty = j.value("below_threshold_penalty", d.below_threshold_penalty);
  r.out_of_bounds_penalty = j.value("out_of_bounds_penalty", d.out_of_bounds_penalty);
  r.train_realizations = j.value("train_realizations", d.train_realizations);
}

EnvState normalize(const AreaBounds& b, double x, double y) {
  return {(x - b.x_min) / (b.x_max - b.x_min), (y - b.y_min) / (b.y_max - b.y_min)};
}

std::pair<double, double> denormalize(const AreaBounds& b, const EnvState& s) {
  return {b.x_min + s.x_norm * (b.x_max - b.x_min), b.y_min + s.y_norm * (b.y_max - b.y_min)};
}

double reward_for(const RewardParams& params, bool out_of_bounds, double r2, RewardCase* which) {
  RewardCase c = RewardCase::rate;
  double r = r2;
  if (out_of_bounds) {
    c = RewardCase::out_of_bounds;
    r = params.out_of_bounds_penalty;
  } else if (r2 < params.threshold) {
    c = RewardCase::below_threshold;
    r = params.below_threshold_penalty;
  }
  if (which) *which = c;
  return r;
}

EnvState reset(const ScenarioConfig& scenario, const Position3D& uav_initial) {
  if (!scenario.bounds.contains(uav_initial.x, uav_initial.y))
    throw std::invalid_argument("reset: initial UAV position lies outside the deployment area");
  return normalize(scenario.bounds, uav_initial.x, uav_initial.y);
}

Move apply_action(const AreaBounds& b, double x, double y, const EnvAction& action) {
  Move m{x + action.dx, y + action.dy, false};
  if (m.x < b.x_min || m.x > b.x_max || m.y < b.y_min || m.y > b.y_max) {
    m.out_of_bounds = true;
    m.x = std::clamp(m.x, b.x_min, b.x_max);
    m.y = std::clamp(m.y, b.y_min, b.y_max);
  }
  return m;
}

StepResult evaluate_move(const Move& move, const ScenarioConfig& scenario,
                         const RewardParams& reward_params, const RateOracle& rate, Rng& rng) {
  StepResult r;
  r.next_state = normalize(scenario.bounds, move.x, move.y);
  r.out_of_bounds = move.out_of_bounds;
  double r2 = 0.0;
  if (!move.out_of_bounds) {
    r2 = rate(move.x, move.y, rng);
    r.r2_value = r2;
  }
  r.reward = reward_for(reward_params, move.out_of_bounds, r2, &r.reward_case);
  return r;
}

StepResult step(const EnvState& state, const EnvAction& action, const ScenarioConfig& scenario,
                const RewardParams& reward_params, const RateOracle& rate, Rng& rng) {
  const auto [x, y] = denormalize(scenario.bounds, state);
  return evaluate_move(apply_action(scenario.bounds, x, y, action), scenario, reward_params, rate, rng);
}

DeploymentEnv::DeploymentEnv(const RelaySystem& system, RewardParams reward, ActionBox box,
                             std::uint64_t seed)
    : system_(&system),
      reward_(reward),
      box_(box),
      initial_(system.scenario().uav_initial),
      rng_(seed) {
  reward_.validate();
  state_ = skyrelay::reset(system.scenario(), initial_);
  x_ = initial_.x;
  y_ = initial_.y;
}

void DeploymentEnv::set_initial(const Position3D& p) {
  if (!system_->scenario().bounds.contains(p.x, p.y))
    throw std::invalid_argument("set_initial: position outside the deployment area");
  initial_ = system_->uav_at(p.x, p.y);
}

EnvState DeploymentEnv::reset() {
  state_ = skyrelay::reset(system_->scenario(), initial_);
  x_ = initial_.x;
  y_ = initial_.y;
  return state_;
}

StepResult DeploymentEnv::step(const EnvAction& action) {
  if (!box_.contains(action)) throw std::invalid_argument("DeploymentEnv::step: action outside its box");
  const Move move = apply_action(system_->scenario().bounds, x_, y_, action);
  const int realizations = reward_.train_realizations;
  const RateOracle oracle = [this, realizations](double x, double y, Rng& rng) {
    return system_->r2_ergodic(system_->uav_at(x, y), realizations, rng());
  };
  StepResult r = evaluate_move(move, system_->scenario(), reward_, oracle, rng_);
  x_ = move.x;
  y_ = move.y;
  state_ = r.next_state;
  return r;
}

Position3D DeploymentEnv::position() const { return system_->uav_at(x_, y_); }

void write_trace_header(std::ostream& out) { out << "t,x,y,dx,dy,reward,r2\n"; }

void write_trace_row(std::ostream& out, int t, double x, double y, const EnvAction& a,
                     const StepResult& r) {
  out << t << ',' << x << ',' << y << ',' << a.dx << ',' << a.dy << ',' << r.reward << ',';
  if (r.r2_value) out << *r.r2_value;
  out << '\n';
}

}  // namespace skyrelay
