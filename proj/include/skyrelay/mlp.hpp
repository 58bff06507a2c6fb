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

#ifndef SKYRELAY_MLP_HPP
#define SKYRELAY_MLP_HPP

#include <Eigen/Dense>
#include <string>
#include <vector>

#include "json.hpp"
#include "skyrelay/random.hpp"

namespace skyrelay {

enum class OutputActivation { tanh_scaled, linear };

std::string to_string(OutputActivation a);
OutputActivation output_activation_from_string(const std::string& name);

/// Fully connected network with ReLU hidden layers. weights[i] maps layer i
/// (layer_dims[i] units) to layer i+1. For tanh_scaled outputs the result is
/// output_scale .* tanh(z).
struct MlpParams {
  std::vector<int> layer_dims;
  std::vector<Eigen::MatrixXd> weights;
  std::vector<Eigen::VectorXd> biases;
  OutputActivation output_activation = OutputActivation::linear;
  Eigen::VectorXd output_scale;  // only used by tanh_scaled

  int input_dim() const { return layer_dims.front(); }
  int output_dim() const { return layer_dims.back(); }
  std::size_t num_layers() const { return weights.size(); }
  std::size_t parameter_count() const;
  bool all_finite() const;
  bool same_shape(const MlpParams& other) const;
};

/// All-zero parameters of the given shape.
MlpParams make_mlp(const std::vector<int>& dims, OutputActivation out,
                   Eigen::VectorXd output_scale = {});

/// Hidden layers U(-1/sqrt(fan_in), 1/sqrt(fan_in)); the last layer U(-final_range, final_range).
void init_uniform(MlpParams& p, Rng& rng, double final_range = 3e-3);

/// Same shape, all zeros. Used for gradients and optimizer moments.
MlpParams zeros_like(const MlpParams& p);

/// Per-layer activations kept for the backward pass.
struct MlpCache {
  std::vector<Eigen::MatrixXd> inputs;       // input to each layer (columns = samples)
  std::vector<Eigen::MatrixXd> pre;          // pre-activations of each layer
  Eigen::MatrixXd output;
};

/// Batch forward pass, one sample per column.
Eigen::MatrixXd mlp_forward(const MlpParams& p, const Eigen::MatrixXd& x, MlpCache* cache = nullptr);

/// Backpropagates d(loss)/d(output). Gradients accumulate into `grads`
/// (same shape as p); returns d(loss)/d(input). `d_output_pre`, when given,
/// is an extra gradient w.r.t. the last layer's pre-activation.
Eigen::MatrixXd mlp_backward(const MlpParams& p, const MlpCache& cache,
                             const Eigen::MatrixXd& d_output, MlpParams& grads,
                             const Eigen::MatrixXd* d_output_pre = nullptr);

Eigen::VectorXd flatten(const MlpParams& p);
void unflatten(MlpParams& p, const Eigen::VectorXd& flat);

struct AdamConfig {
  double learning_rate = 1e-3;
  double beta1 = 0.9;
  double beta2 = 0.999;
  double epsilon = 1e-8;
};

/// Adam with bias correction; descends along the supplied gradient.
class AdamOptimizer {
 public:
  AdamOptimizer() = default;
  AdamOptimizer(const MlpParams& shape, AdamConfig config);

  void step(MlpParams& params, const MlpParams& grads);
  long steps() const { return t_; }

 private:
  AdamConfig config_;
  MlpParams m_;
  MlpParams v_;
  long t_ = 0;
};

/// {"layer_dims", "output_activation", "output_scale", "weights": [row-major], "biases"}.
nlohmann::json to_json(const MlpParams& p);
MlpParams mlp_from_json(const nlohmann::json& j);

}  // namespace skyrelay

#endif  // SKYRELAY_MLP_HPP
