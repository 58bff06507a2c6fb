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

#ifndef SKYRELAY_DDPG_HPP
#define SKYRELAY_DDPG_HPP

#include <Eigen/Dense>
#include <cstdint>
#include <functional>
#include <string>
#include <vector>

#include "json.hpp"
#include "skyrelay/env.hpp"
#include "skyrelay/mlp.hpp"
#include "skyrelay/random.hpp"

namespace skyrelay {

struct Transition {
  EnvState state;
  EnvAction action;
  double reward = 0.0;
  EnvState next_state;
};

/// Fixed-capacity FIFO ring. Index 0 is the oldest stored transition.
class ReplayBuffer {
 public:
  explicit ReplayBuffer(std::size_t capacity);

  void push(const Transition& t);
  std::size_t size() const { return size_; }
  std::size_t capacity() const { return storage_.size(); }
  const Transition& at(std::size_t i) const;

  /// Uniform indices in [0, size), drawn with replacement.
  std::vector<std::size_t> sample_indices(std::size_t n, Rng& rng) const;
  std::vector<Transition> sample(std::size_t n, Rng& rng) const;

 private:
  std::vector<Transition> storage_;
  std::size_t head_ = 0;  // next write slot
  std::size_t size_ = 0;
};

/// Convergence test on the trailing-average reward, used to end a run
/// before the episode budget when the average stops improving.
struct EarlyStop {
  bool enabled = false;
  int min_episodes = 30;
  int patience = 15;
  double relative_tolerance = 0.01;
};

struct DdpgHyper {
  double gamma = 0.9;
  double tau = 0.01;
  double actor_lr = 1e-3;
  double critic_lr = 2e-3;
  int batch_size = 64;
  double reward_scale = 0.01;  // applied to stored rewards only; returns stay unscaled
  double critic_l2 = 0.0;  // weight decay on critic weight matrices
  double action_l2 = 1e-3;  // penalty on the actor's output pre-activations
  double noise_sigma = 0.3;  // in meters; 0.3 * a_max for the default box
  int buffer_capacity = 60000;
  std::vector<int> hidden = {20, 20};
  int avg_window = 20;
  std::uint64_t seed = 1;
  EarlyStop early_stop;

  void validate() const;
};

void to_json(nlohmann::json& j, const EarlyStop& e);
void from_json(const nlohmann::json& j, EarlyStop& e);
void to_json(nlohmann::json& j, const DdpgHyper& h);
void from_json(const nlohmann::json& j, DdpgHyper& h);

struct DdpgNetworks {
  MlpParams actor;
  MlpParams critic;
  MlpParams target_actor;
  MlpParams target_critic;
};

/// 2 -> hidden -> 2, tanh output scaled by the action box.
MlpParams make_actor(const std::vector<int>& hidden, const ActionBox& box);
/// 4 -> hidden -> 1, linear output.
MlpParams make_critic(const std::vector<int>& hidden);

/// Randomly initialized online networks; targets start as exact copies.
DdpgNetworks make_networks(const std::vector<int>& hidden, const ActionBox& box, Rng& rng);

bool is_actor_shaped(const MlpParams& p);
bool is_critic_shaped(const MlpParams& p);

EnvAction actor_forward(const MlpParams& actor, const EnvState& s);
/// The action enters the critic divided by the box half-widths.
double critic_forward(const MlpParams& critic, const EnvState& s, const EnvAction& a,
                      const ActionBox& box);

Eigen::MatrixXd state_matrix(const std::vector<EnvState>& states);
/// Rows: x_norm, y_norm, dx / a_x_max, dy / a_y_max.
Eigen::MatrixXd critic_input_matrix(const Eigen::MatrixXd& states, const Eigen::MatrixXd& actions,
                                    const ActionBox& box);

/// y_i = r_i + gamma * Q'(s'_i, mu'(s'_i)).
Eigen::VectorXd critic_targets(const DdpgNetworks& nets, const std::vector<Transition>& batch,
                               double gamma, const ActionBox& box);

/// Mean squared error against fixed targets plus l2 * (sum of squared
/// critic weights). When `grad` is given the gradient w.r.t. the critic
/// parameters is accumulated into it.
double critic_loss(const MlpParams& critic, const std::vector<Transition>& batch,
                   const Eigen::VectorXd& targets, const ActionBox& box, MlpParams* grad = nullptr,
                   double l2 = 0.0);

/// Mean over the batch of Q(s, mu(s)) minus action_l2 * mean ||z||^2, where
/// z is the actor's output pre-activation. When `grad` is given the
/// gradient w.r.t. the actor parameters (ascent direction) is accumulated.
double actor_objective(const MlpParams& actor, const MlpParams& critic,
                       const std::vector<EnvState>& states, const ActionBox& box,
                       MlpParams* grad = nullptr, double action_l2 = 0.0);

/// Gradient of mean_i [f(mu(s_i)) - action_l2 * ||z_i||^2] w.r.t. the actor,
/// given dF/da for the 2 x N batch of actions. Lets callers plug in an
/// arbitrary critic.
using ActionGradient = std::function<Eigen::MatrixXd(const Eigen::MatrixXd& actions)>;
void actor_gradient_from(const MlpParams& actor, const std::vector<EnvState>& states,
                         const ActionGradient& dq_da, MlpParams& grad, double action_l2 = 0.0);

/// One optimizer step on the critic; returns the loss before the step.
double critic_update(DdpgNetworks& nets, AdamOptimizer& critic_opt,
                     const std::vector<Transition>& batch, double gamma, const ActionBox& box,
                     double l2 = 0.0);

/// One ascent step on the actor objective.
void actor_update(DdpgNetworks& nets, AdamOptimizer& actor_opt, const std::vector<EnvState>& states,
                  const ActionBox& box, double action_l2 = 0.0);

/// Per-parameter tau * online + (1 - tau) * target.
MlpParams soft_update(const MlpParams& target, const MlpParams& online, double tau);

/// mu(s) plus N(0, sigma^2) per component, clipped to the box.
EnvAction select_action(const MlpParams& actor, const EnvState& s, double sigma,
                        const ActionBox& box, Rng& rng);

struct TrainOptions {
  int episodes = 150;
  int steps = 50;
};

struct TrainResult {
  DdpgNetworks networks;
  std::vector<double> episode_rewards;
  std::vector<double> average_rewards;  // trailing mean over avg_window episodes
  int episodes_run = 0;
  bool stopped_early = false;
  double wall_time_ms = 0.0;
};

/// Runs the DDPG loop on `env`. With `warm_start` the four networks are
/// copied from it; the replay buffer and optimizer moments start empty.
TrainResult train(Environment& env, const DdpgHyper& hyper, const TrainOptions& options,
                  const DdpgNetworks* warm_start = nullptr);

/// Trailing mean of the last `window` values at every index.
std::vector<double> trailing_average(const std::vector<double>& values, int window);

/// First episode index whose average reaches `fraction` of the final
/// average (measured as final - (1 - fraction) * |final|).
int episodes_to_fraction(const std::vector<double>& averages, double fraction = 0.9);

struct Rollout {
  std::vector<EnvState> states;  // states[0] is the reset state
  std::vector<EnvAction> actions;
  std::vector<StepResult> results;
};

/// Noise-free policy run for `steps` steps from env.reset().
Rollout greedy_rollout(const MlpParams& actor, Environment& env, int steps);

/// {"actor", "critic", "target_actor", "target_critic"}.
nlohmann::json networks_to_json(const DdpgNetworks& nets);
DdpgNetworks networks_from_json(const nlohmann::json& j);
void save_networks(const std::string& path, const DdpgNetworks& nets);
DdpgNetworks load_networks(const std::string& path);

}  // namespace skyrelay

#endif  // SKYRELAY_DDPG_HPP
