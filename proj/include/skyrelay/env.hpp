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

#ifndef SKYRELAY_ENV_HPP
#define SKYRELAY_ENV_HPP

#include <cmath>
#include <cstdint>
#include <functional>
#include <optional>
#include <ostream>
#include <utility>

#include "json.hpp"
#include "skyrelay/geometry.hpp"
#include "skyrelay/random.hpp"
#include "skyrelay/rates.hpp"

namespace skyrelay {

/// UAV location normalized to the deployment area, both components in [0, 1].
struct EnvState {
  double x_norm = 0.0;
  double y_norm = 0.0;

  bool operator==(const EnvState&) const = default;
};

/// Displacement in meters; positive dx moves east, positive dy north.
struct EnvAction {
  double dx = 0.0;
  double dy = 0.0;

  bool operator==(const EnvAction&) const = default;
};

/// Per-axis movement limit (a_x_max, a_y_max).
struct ActionBox {
  double x_max = 1.0;
  double y_max = 1.0;

  bool contains(const EnvAction& a) const {
    return std::abs(a.dx) <= x_max && std::abs(a.dy) <= y_max;
  }
  EnvAction clip(const EnvAction& a) const;
};

struct RewardParams {
  double threshold = 1.0;  // eta_0, bps/Hz
  double below_threshold_penalty = -1.0;
  double out_of_bounds_penalty = -5.0;
  int train_realizations = 10;

  void validate() const;
};

void to_json(nlohmann::json& j, const RewardParams& r);
void from_json(const nlohmann::json& j, RewardParams& r);

enum class RewardCase { rate, below_threshold, out_of_bounds };

struct StepResult {
  EnvState next_state;
  double reward = 0.0;
  bool out_of_bounds = false;
  std::optional<double> r2_value;  // absent when the move left the area
  RewardCase reward_case = RewardCase::rate;
};

EnvState normalize(const AreaBounds& bounds, double x, double y);
/// Inverse of normalize; returns (x, y).
std::pair<double, double> denormalize(const AreaBounds& bounds, const EnvState& s);

/// Piecewise reward: the out-of-bounds penalty dominates, otherwise R2 when
/// R2 >= eta_0 and the below-threshold penalty when it is not.
double reward_for(const RewardParams& params, bool out_of_bounds, double r2, RewardCase* which = nullptr);

/// Normalized start state. Throws if `uav_initial` lies outside the area.
EnvState reset(const ScenarioConfig& scenario, const Position3D& uav_initial);

/// Estimates R2 at a candidate (x, y). Receives an RNG for the realization seed.
using RateOracle = std::function<double(double x, double y, Rng& rng)>;

struct Move {
  double x = 0.0;
  double y = 0.0;
  bool out_of_bounds = false;
};

/// Applies a displacement, clamping to the area when it is left.
Move apply_action(const AreaBounds& bounds, double x, double y, const EnvAction& action);

/// Reward and next state for a move that has already been applied.
StepResult evaluate_move(const Move& move, const ScenarioConfig& scenario,
                         const RewardParams& reward_params, const RateOracle& rate, Rng& rng);

/// One MDP transition. A move that leaves the area is penalized and clamped
/// to the boundary; R2 is only estimated for in-bounds moves.
StepResult step(const EnvState& state, const EnvAction& action, const ScenarioConfig& scenario,
                const RewardParams& reward_params, const RateOracle& rate, Rng& rng);

/// Episodic environment used by the DDPG trainer.
class Environment {
 public:
  virtual ~Environment() = default;
  virtual EnvState reset() = 0;
  virtual StepResult step(const EnvAction& action) = 0;
  virtual ActionBox action_box() const = 0;
};

/// Relay placement MDP backed by a RelaySystem.
class DeploymentEnv : public Environment {
 public:
  DeploymentEnv(const RelaySystem& system, RewardParams reward, ActionBox box, std::uint64_t seed);

  void set_initial(const Position3D& p);
  const Position3D& initial() const { return initial_; }

  EnvState reset() override;
  StepResult step(const EnvAction& action) override;
  ActionBox action_box() const override { return box_; }

  const EnvState& state() const { return state_; }
  /// Current UAV position, tracked in meters (not re-derived from the state).
  Position3D position() const;

 private:
  const RelaySystem* system_;
  RewardParams reward_;
  ActionBox box_;
  Position3D initial_;
  EnvState state_;
  double x_ = 0.0;
  double y_ = 0.0;
  Rng rng_;
};

/// CSV header and row for episode traces: t,x,y,dx,dy,reward,r2.
void write_trace_header(std::ostream& out);
void write_trace_row(std::ostream& out, int t, double x, double y, const EnvAction& a,
                     const StepResult& r);

}  // namespace skyrelay

#endif  // SKYRELAY_ENV_HPP
