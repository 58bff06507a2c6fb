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

#include "skyrelay/ddpg.hpp"

#include <chrono>
#include <cmath>
#include <fstream>
#include <stdexcept>

namespace skyrelay {

ReplayBuffer::ReplayBuffer(std::size_t capacity) : storage_(capacity) {
  if (capacity == 0) throw std::invalid_argument("ReplayBuffer: capacity must be positive");
}

void ReplayBuffer::push(const Transition& t) {
  storage_[head_] = t;
  head_ = (head_ + 1) % storage_.size();
  if (size_ < storage_.size()) ++size_;
}

const Transition& ReplayBuffer::at(std::size_t i) const {
  if (i >= size_) throw std::out_of_range("ReplayBuffer::at: index past size");
  const std::size_t oldest = (head_ + storage_.size() - size_) % storage_.size();
  return storage_[(oldest + i) % storage_.size()];
}

std::vector<std::size_t> ReplayBuffer::sample_indices(std::size_t n, Rng& rng) const {
  if (size_ == 0) throw std::logic_error("ReplayBuffer::sample: buffer is empty");
  std::uniform_int_distribution<std::size_t> pick(0, size_ - 1);
  std::vector<std::size_t> idx(n);
  for (auto& i : idx) i = pick(rng);
  return idx;
}

std::vector<Transition> ReplayBuffer::sample(std::size_t n, Rng& rng) const {
  std::vector<Transition> out;
  out.reserve(n);
  for (std::size_t i : sample_indices(n, rng)) out.push_back(at(i));
  return out;
}

void DdpgHyper::validate() const {
  if (!(gamma >= 0.0 && gamma <= 1.0)) throw std::invalid_argument("ddpg.gamma must be in [0, 1]");
  if (!(tau > 0.0 && tau <= 1.0)) throw std::invalid_argument("ddpg.tau must be in (0, 1]");
  if (!(actor_lr > 0.0) || !(critic_lr > 0.0))
    throw std::invalid_argument("ddpg learning rates must be positive");
  if (critic_l2 < 0.0 || action_l2 < 0.0)
    throw std::invalid_argument("ddpg.critic_l2 and ddpg.action_l2 must be >= 0");
  if (!(reward_scale > 0.0)) throw std::invalid_argument("ddpg.reward_scale must be positive");
  if (batch_size < 1) throw std::invalid_argument("ddpg.batch_size must be >= 1");
  if (noise_sigma < 0.0) throw std::invalid_argument("ddpg.noise_sigma must be >= 0");
  if (buffer_capacity < 1) throw std::invalid_argument("ddpg.buffer_capacity must be >= 1");
  if (avg_window < 1) throw std::invalid_argument("ddpg.avg_window must be >= 1");
  for (int h : hidden)
    if (h < 1) throw std::invalid_argument("ddpg.hidden sizes must be >= 1");
  if (early_stop.min_episodes < 1 || early_stop.patience < 1 || early_stop.relative_tolerance < 0.0)
    throw std::invalid_argument("ddpg.early_stop: min_episodes, patience >= 1 and tolerance >= 0");
}

void to_json(nlohmann::json& j, const EarlyStop& e) {
  j = {{"enabled", e.enabled},
       {"min_episodes", e.min_episodes},
       {"patience", e.patience},
       {"relative_tolerance", e.relative_tolerance}};
}

void from_json(const nlohmann::json& j, EarlyStop& e) {
  EarlyStop d;
  e.enabled = j.value("enabled", d.enabled);
  e.min_episodes = j.value("min_episodes", d.min_episodes);
  e.patience = j.value("patience", d.patience);
  e.relative_tolerance = j.value("relative_tolerance", d.relative_tolerance);
}

void to_json(nlohmann::json& j, const DdpgHyper& h) {
  j = {{"gamma", h.gamma},         {"tau", h.tau},
       {"actor_lr", h.actor_lr},   {"critic_lr", h.critic_lr},
       {"batch_size", h.batch_size}, {"reward_scale", h.reward_scale},
       {"critic_l2", h.critic_l2},
       {"action_l2", h.action_l2},   {"noise_sigma", h.noise_sigma},
       {"buffer_capacity", h.buffer_capacity}, {"hidden", h.hidden},
       {"avg_window", h.avg_window}, {"seed", h.seed},
       {"early_stop", h.early_stop}};
}

void from_json(const nlohmann::json& j, DdpgHyper& h) {
  DdpgHyper d;
  h.gamma = j.value("gamma", d.gamma);
  h.tau = j.value("tau", d.tau);
  h.actor_lr = j.value("actor_lr", d.actor_lr);
  h.critic_lr = j.value("critic_lr", d.critic_lr);
  h.batch_size = j.value("batch_size", d.batch_size);
  h.reward_scale = j.value("reward_scale", d.reward_scale);
  h.critic_l2 = j.value("critic_l2", d.critic_l2);
  h.action_l2 = j.value("action_l2", d.action_l2);
  h.noise_sigma = j.value("noise_sigma", d.noise_sigma);
  h.buffer_capacity = j.value("buffer_capacity", d.buffer_capacity);
  h.hidden = j.value("hidden", d.hidden);
  h.avg_window = j.value("avg_window", d.avg_window);
  h.seed = j.value("seed", d.seed);
  h.early_stop = j.value("early_stop", d.early_stop);
}

namespace {

std::vector<int> with_ends(int in, const std::vector<int>& hidden, int out) {
  std::vector<int> dims{in};
  dims.insert(dims.end(), hidden.begin(), hidden.end());
  dims.push_back(out);
  return dims;
}

Eigen::Vector2d box_vector(const ActionBox& box) { return {box.x_max, box.y_max}; }

Eigen::MatrixXd action_matrix(const std::vector<Transition>& batch) {
  Eigen::MatrixXd a(2, static_cast<Eigen::Index>(batch.size()));
  for (std::size_t i = 0; i < batch.size(); ++i) {
    a(0, static_cast<Eigen::Index>(i)) = batch[i].action.dx;
    a(1, static_cast<Eigen::Index>(i)) = batch[i].action.dy;
  }
  return a;
}

void require_actor(const MlpParams& p) {
  if (!is_actor_shaped(p)) throw std::invalid_argument("expected an actor network (2 inputs, 2 tanh outputs)");
}

void require_critic(const MlpParams& p) {
  if (!is_critic_shaped(p)) throw std::invalid_argument("expected a critic network (4 inputs, 1 linear output)");
}

}  // namespace

MlpParams make_actor(const std::vector<int>& hidden, const ActionBox& box) {
  return make_mlp(with_ends(2, hidden, 2), OutputActivation::tanh_scaled, box_vector(box));
}

MlpParams make_critic(const std::vector<int>& hidden) {
  return make_mlp(with_ends(4, hidden, 1), OutputActivation::linear);
}

DdpgNetworks make_networks(const std::vector<int>& hidden, const ActionBox& box, Rng& rng) {
  DdpgNetworks n;
  n.actor = make_actor(hidden, box);
  n.critic = make_critic(hidden);
  init_uniform(n.actor, rng);
  init_uniform(n.critic, rng);
  n.target_actor = n.actor;
  n.target_critic = n.critic;
  return n;
}

bool is_actor_shaped(const MlpParams& p) {
  return p.layer_dims.size() >= 2 && p.input_dim() == 2 && p.output_dim() == 2 &&
         p.output_activation == OutputActivation::tanh_scaled;
}

bool is_critic_shaped(const MlpParams& p) {
  return p.layer_dims.size() >= 2 && p.input_dim() == 4 && p.output_dim() == 1 &&
         p.output_activation == OutputActivation::linear;
}

Eigen::MatrixXd state_matrix(const std::vector<EnvState>& states) {
  Eigen::MatrixXd s(2, static_cast<Eigen::Index>(states.size()));
  for (std::size_t i = 0; i < states.size(); ++i) {
    s(0, static_cast<Eigen::Index>(i)) = states[i].x_norm;
    s(1, static_cast<Eigen::Index>(i)) = states[i].y_norm;
  }
  return s;
}

Eigen::MatrixXd critic_input_matrix(const Eigen::MatrixXd& states, const Eigen::MatrixXd& actions,
                                    const ActionBox& box) {
  if (states.rows() != 2 || actions.rows() != 2 || states.cols() != actions.cols())
    throw std::invalid_argument("critic_input_matrix: expected 2 x N states and actions");
  Eigen::MatrixXd x(4, states.cols());
  x.topRows(2) = states;
  x.bottomRows(2) = box_vector(box).cwiseInverse().asDiagonal() * actions;
  return x;
}

EnvAction actor_forward(const MlpParams& actor, const EnvState& s) {
  require_actor(actor);
  const Eigen::MatrixXd a = mlp_forward(actor, Eigen::Vector2d(s.x_norm, s.y_norm));
  return {a(0, 0), a(1, 0)};
}

double critic_forward(const MlpParams& critic, const EnvState& s, const EnvAction& a,
                      const ActionBox& box) {
  require_critic(critic);
  const Eigen::MatrixXd x = critic_input_matrix(Eigen::Vector2d(s.x_norm, s.y_norm),
                                                Eigen::Vector2d(a.dx, a.dy), box);
  return mlp_forward(critic, x)(0, 0);
}

Eigen::VectorXd critic_targets(const DdpgNetworks& nets, const std::vector<Transition>& batch,
                               double gamma, const ActionBox& box) {
  std::vector<EnvState> next;
  next.reserve(batch.size());
  for (const auto& t : batch) next.push_back(t.next_state);
  const Eigen::MatrixXd s1 = state_matrix(next);
  const Eigen::MatrixXd a1 = mlp_forward(nets.target_actor, s1);
  const Eigen::MatrixXd q1 = mlp_forward(nets.target_critic, critic_input_matrix(s1, a1, box));
  Eigen::VectorXd y(static_cast<Eigen::Index>(batch.size()));
  for (std::size_t i = 0; i < batch.size(); ++i) {
    const auto k = static_cast<Eigen::Index>(i);
    y(k) = batch[i].reward + gamma * q1(0, k);
  }
  return y;
}

double critic_loss(const MlpParams& critic, const std::vector<Transition>& batch,
                   const Eigen::VectorXd& targets, const ActionBox& box, MlpParams* grad,
                   double l2) {
  require_critic(critic);
  if (batch.empty()) throw std::invalid_argument("critic_loss: empty batch");
  if (targets.size() != static_cast<Eigen::Index>(batch.size()))
    throw std::invalid_argument("critic_loss: one target per transition required");
  std::vector<EnvState> states;
  states.reserve(batch.size());
  for (const auto& t : batch) states.push_back(t.state);
  const Eigen::MatrixXd x = critic_input_matrix(state_matrix(states), action_matrix(batch), box);
  MlpCache cache;
  const Eigen::MatrixXd q = mlp_forward(critic, x, &cache);
  const double n = static_cast<double>(batch.size());
  const Eigen::RowVectorXd err = q.row(0) - targets.transpose();
  double penalty = 0.0;
  if (l2 > 0.0)
    for (const auto& w : critic.weights) penalty += l2 * w.squaredNorm();
  if (grad) {
    mlp_backward(critic, cache, (2.0 / n) * err, *grad);
    if (l2 > 0.0)
      for (std::size_t i = 0; i < critic.weights.size(); ++i) grad->weights[i] += 2.0 * l2 * critic.weights[i];
  }
  return err.squaredNorm() / n + penalty;
}

void actor_gradient_from(const MlpParams& actor, const std::vector<EnvState>& states,
                         const ActionGradient& dq_da, MlpParams& grad, double action_l2) {
  require_actor(actor);
  if (states.empty()) throw std::invalid_argument("actor gradient: empty batch");
  MlpCache cache;
  const Eigen::MatrixXd a = mlp_forward(actor, state_matrix(states), &cache);
  const Eigen::MatrixXd d = dq_da(a);
  if (d.rows() != 2 || d.cols() != a.cols())
    throw std::invalid_argument("actor gradient: dQ/da must be 2 x N");
  const double n = static_cast<double>(states.size());
  if (action_l2 > 0.0) {
    const Eigen::MatrixXd d_pre = (-2.0 * action_l2 / n) * cache.pre.back();
    mlp_backward(actor, cache, d / n, grad, &d_pre);
  } else {
    mlp_backward(actor, cache, d / n, grad);
  }
}

double actor_objective(const MlpParams& actor, const MlpParams& critic,
                       const std::vector<EnvState>& states, const ActionBox& box, MlpParams* grad,
                       double action_l2) {
  require_actor(actor);
  require_critic(critic);
  if (states.empty()) throw std::invalid_argument("actor_objective: empty batch");
  const Eigen::MatrixXd s = state_matrix(states);
  MlpCache actor_cache;
  const Eigen::MatrixXd a = mlp_forward(actor, s, &actor_cache);
  double value = mlp_forward(critic, critic_input_matrix(s, a, box)).mean();
  if (action_l2 > 0.0)
    value -= action_l2 * actor_cache.pre.back().colwise().squaredNorm().mean();
  if (grad) {
    const ActionGradient dq_da = [&](const Eigen::MatrixXd& actions) {
      MlpCache cache;
      mlp_forward(critic, critic_input_matrix(s, actions, box), &cache);
      MlpParams scratch = zeros_like(critic);
      const Eigen::MatrixXd d_in =
          mlp_backward(critic, cache, Eigen::RowVectorXd::Ones(actions.cols()), scratch);
      return Eigen::MatrixXd(box_vector(box).cwiseInverse().asDiagonal() * d_in.bottomRows(2));
    };
    actor_gradient_from(actor, states, dq_da, *grad, action_l2);
  }
  return value;
}

double critic_update(DdpgNetworks& nets, AdamOptimizer& critic_opt,
                     const std::vector<Transition>& batch, double gamma, const ActionBox& box,
                     double l2) {
  const Eigen::VectorXd y = critic_targets(nets, batch, gamma, box);
  MlpParams grad = zeros_like(nets.critic);
  const double loss = critic_loss(nets.critic, batch, y, box, &grad, l2);
  critic_opt.step(nets.critic, grad);
  return loss;
}

void actor_update(DdpgNetworks& nets, AdamOptimizer& actor_opt, const std::vector<EnvState>& states,
                  const ActionBox& box, double action_l2) {
  MlpParams grad = zeros_like(nets.actor);
  actor_objective(nets.actor, nets.critic, states, box, &grad, action_l2);
  // The optimizer descends; negate for ascent on Q.
  for (auto& w : grad.weights) w = -w;
  for (auto& b : grad.biases) b = -b;
  actor_opt.step(nets.actor, grad);
}

MlpParams soft_update(const MlpParams& target, const MlpParams& online, double tau) {
  if (!target.same_shape(online)) throw std::invalid_argument("soft_update: shape mismatch");
  MlpParams out = target;
  for (std::size_t i = 0; i < out.weights.size(); ++i) {
    out.weights[i] = tau * online.weights[i] + (1.0 - tau) * target.weights[i];
    out.biases[i] = tau * online.biases[i] + (1.0 - tau) * target.biases[i];
  }
  return out;
}

EnvAction select_action(const MlpParams& actor, const EnvState& s, double sigma,
                        const ActionBox& box, Rng& rng) {
  if (sigma < 0.0) throw std::invalid_argument("select_action: sigma must be >= 0");
  EnvAction a = actor_forward(actor, s);
  if (sigma > 0.0) {
    a.dx += gaussian(rng, sigma);
    a.dy += gaussian(rng, sigma);
  }
  return box.clip(a);
}

std::vector<double> trailing_average(const std::vector<double>& values, int window) {
  if (window < 1) throw std::invalid_argument("trailing_average: window must be >= 1");
  std::vector<double> avg(values.size());
  double sum = 0.0;
  for (std::size_t i = 0; i < values.size(); ++i) {
    sum += values[i];
    if (i >= static_cast<std::size_t>(window)) sum -= values[i - static_cast<std::size_t>(window)];
    avg[i] = sum / static_cast<double>(std::min(i + 1, static_cast<std::size_t>(window)));
  }
  return avg;
}

int episodes_to_fraction(const std::vector<double>& averages, double fraction) {
  if (averages.empty()) throw std::invalid_argument("episodes_to_fraction: empty trace");
  const double final_value = averages.back();
  const double threshold = final_value - (1.0 - fraction) * std::abs(final_value);
  for (std::size_t i = 0; i < averages.size(); ++i)
    if (averages[i] >= threshold) return static_cast<int>(i);
  return static_cast<int>(averages.size()) - 1;
}

TrainResult train(Environment& env, const DdpgHyper& hyper, const TrainOptions& options,
                  const DdpgNetworks* warm_start) {
  hyper.validate();
  if (options.episodes < 1 || options.steps < 1)
    throw std::invalid_argument("train: episodes and steps must be >= 1");
  const auto start = std::chrono::steady_clock::now();
  const ActionBox box = env.action_box();

  Rng init_rng(derive_seed(hyper.seed, 1));
  Rng noise_rng(derive_seed(hyper.seed, 2));
  Rng sample_rng(derive_seed(hyper.seed, 3));

  TrainResult result;
  DdpgNetworks& nets = result.networks;
  if (warm_start) {
    nets = *warm_start;
    require_actor(nets.actor);
    require_actor(nets.target_actor);
    require_critic(nets.critic);
    require_critic(nets.target_critic);
  } else {
    nets = make_networks(hyper.hidden, box, init_rng);
  }
  AdamOptimizer actor_opt(nets.actor, {.learning_rate = hyper.actor_lr});
  AdamOptimizer critic_opt(nets.critic, {.learning_rate = hyper.critic_lr});
  ReplayBuffer buffer(static_cast<std::size_t>(hyper.buffer_capacity));
  const auto batch_size = static_cast<std::size_t>(hyper.batch_size);

  double best_avg = 0.0;
  int since_best = 0;
  for (int episode = 0; episode < options.episodes; ++episode) {
    EnvState s = env.reset();
    double accumulated = 0.0;
    for (int t = 0; t < options.steps; ++t) {
      const EnvAction a = select_action(nets.actor, s, hyper.noise_sigma, box, noise_rng);
      const StepResult r = env.step(a);
      buffer.push({s, a, hyper.reward_scale * r.reward, r.next_state});
      accumulated += r.reward;
      s = r.next_state;
      if (buffer.size() < batch_size) continue;
      const std::vector<Transition> batch = buffer.sample(batch_size, sample_rng);
      critic_update(nets, critic_opt, batch, hyper.gamma, box, hyper.critic_l2);
      std::vector<EnvState> states;
      states.reserve(batch.size());
      for (const auto& tr : batch) states.push_back(tr.state);
      actor_update(nets, actor_opt, states, box, hyper.action_l2);
      nets.target_critic = soft_update(nets.target_critic, nets.critic, hyper.tau);
      nets.target_actor = soft_update(nets.target_actor, nets.actor, hyper.tau);
    }
    result.episode_rewards.push_back(accumulated);
    const std::vector<double> avg = trailing_average(result.episode_rewards, hyper.avg_window);
    const double current = avg.back();
    ++result.episodes_run;

    const EarlyStop& es = hyper.early_stop;
    if (!es.enabled) continue;
    if (episode == 0 || current > best_avg + es.relative_tolerance * std::abs(best_avg)) {
      best_avg = current;
      since_best = 0;
    } else {
      ++since_best;
    }
    if (result.episodes_run >= es.min_episodes && since_best >= es.patience) {
      result.stopped_early = result.episodes_run < options.episodes;
      break;
    }
  }
  result.average_rewards = trailing_average(result.episode_rewards, hyper.avg_window);
  result.wall_time_ms =
      std::chrono::duration<double, std::milli>(std::chrono::steady_clock::now() - start).count();
  return result;
}

Rollout greedy_rollout(const MlpParams& actor, Environment& env, int steps) {
  Rollout r;
  r.states.push_back(env.reset());
  const ActionBox box = env.action_box();
  for (int t = 0; t < steps; ++t) {
    const EnvAction a = box.clip(actor_forward(actor, r.states.back()));
    StepResult res = env.step(a);
    r.actions.push_back(a);
    r.states.push_back(res.next_state);
    r.results.push_back(std::move(res));
  }
  return r;
}

nlohmann::json networks_to_json(const DdpgNetworks& nets) {
  return {{"actor", to_json(nets.actor)},
          {"critic", to_json(nets.critic)},
          {"target_actor", to_json(nets.target_actor)},
          {"target_critic", to_json(nets.target_critic)}};
}

DdpgNetworks networks_from_json(const nlohmann::json& j) {
  DdpgNetworks n;
  n.actor = mlp_from_json(j.at("actor"));
  n.critic = mlp_from_json(j.at("critic"));
  n.target_actor = mlp_from_json(j.at("target_actor"));
  n.target_critic = mlp_from_json(j.at("target_critic"));
  require_actor(n.actor);
  require_actor(n.target_actor);
  require_critic(n.critic);
  require_critic(n.target_critic);
  return n;
}

void save_networks(const std::string& path, const DdpgNetworks& nets) {
  std::ofstream out(path);
  if (!out) throw std::runtime_error("cannot write weights file '" + path + "'");
  out << networks_to_json(nets).dump(1) << '\n';
  if (!out) throw std::runtime_error("failed while writing weights file '" + path + "'");
}

DdpgNetworks load_networks(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw std::runtime_error("cannot read weights file '" + path + "'");
  try {
    return networks_from_json(nlohmann::json::parse(in));
  } catch (const nlohmann::json::exception& e) {
    throw std::runtime_error("malformed weights file '" + path + "': " + e.what());
  }
}

}  // namespace skyrelay
