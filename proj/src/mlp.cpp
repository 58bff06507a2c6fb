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

#include "skyrelay/mlp.hpp"

#include <cmath>
#include <stdexcept>

namespace skyrelay {

std::string to_string(OutputActivation a) {
  return a == OutputActivation::tanh_scaled ? "tanh_scaled" : "linear";
}

OutputActivation output_activation_from_string(const std::string& name) {
  if (name == "tanh_scaled") return OutputActivation::tanh_scaled;
  if (name == "linear") return OutputActivation::linear;
  throw std::invalid_argument("unknown output activation '" + name + "'");
}

std::size_t MlpParams::parameter_count() const {
  std::size_t n = 0;
  for (std::size_t i = 0; i < weights.size(); ++i)
    n += static_cast<std::size_t>(weights[i].size() + biases[i].size());
  return n;
}

bool MlpParams::all_finite() const {
  for (std::size_t i = 0; i < weights.size(); ++i)
    if (!weights[i].allFinite() || !biases[i].allFinite()) return false;
  return true;
}

bool MlpParams::same_shape(const MlpParams& other) const {
  if (layer_dims != other.layer_dims || weights.size() != other.weights.size()) return false;
  for (std::size_t i = 0; i < weights.size(); ++i) {
    if (weights[i].rows() != other.weights[i].rows() || weights[i].cols() != other.weights[i].cols())
      return false;
    if (biases[i].size() != other.biases[i].size()) return false;
  }
  return true;
}

MlpParams make_mlp(const std::vector<int>& dims, OutputActivation out, Eigen::VectorXd output_scale) {
  if (dims.size() < 2) throw std::invalid_argument("make_mlp: need at least input and output dims");
  MlpParams p;
  p.layer_dims = dims;
  p.output_activation = out;
  for (std::size_t i = 0; i + 1 < dims.size(); ++i) {
    p.weights.push_back(Eigen::MatrixXd::Zero(dims[i + 1], dims[i]));
    p.biases.push_back(Eigen::VectorXd::Zero(dims[i + 1]));
  }
  if (out == OutputActivation::tanh_scaled) {
    if (output_scale.size() == 0) output_scale = Eigen::VectorXd::Ones(dims.back());
    if (output_scale.size() != dims.back())
      throw std::invalid_argument("make_mlp: output_scale size must match the output dim");
  }
  p.output_scale = std::move(output_scale);
  return p;
}

void init_uniform(MlpParams& p, Rng& rng, double final_range) {
  for (std::size_t i = 0; i < p.weights.size(); ++i) {
    const bool last = i + 1 == p.weights.size();
    const double r = last ? final_range : 1.0 / std::sqrt(static_cast<double>(p.weights[i].cols()));
    for (Eigen::Index c = 0; c < p.weights[i].cols(); ++c)
      for (Eigen::Index row = 0; row < p.weights[i].rows(); ++row) p.weights[i](row, c) = uniform(rng, -r, r);
    for (Eigen::Index row = 0; row < p.biases[i].size(); ++row) p.biases[i](row) = uniform(rng, -r, r);
  }
}

MlpParams zeros_like(const MlpParams& p) {
  MlpParams z = p;
  for (auto& w : z.weights) w.setZero();
  for (auto& b : z.biases) b.setZero();
  return z;
}

Eigen::MatrixXd mlp_forward(const MlpParams& p, const Eigen::MatrixXd& x, MlpCache* cache) {
  if (x.rows() != p.input_dim())
    throw std::invalid_argument("mlp_forward: input has " + std::to_string(x.rows()) +
                                " rows, network expects " + std::to_string(p.input_dim()));
  if (cache) {
    cache->inputs.clear();
    cache->pre.clear();
  }
  Eigen::MatrixXd a = x;
  for (std::size_t i = 0; i < p.weights.size(); ++i) {
    Eigen::MatrixXd z = p.weights[i] * a;
    z.colwise() += p.biases[i];
    if (cache) {
      cache->inputs.push_back(a);
      cache->pre.push_back(z);
    }
    const bool last = i + 1 == p.weights.size();
    if (!last) {
      a = z.cwiseMax(0.0);
    } else if (p.output_activation == OutputActivation::tanh_scaled) {
      a = p.output_scale.asDiagonal() * z.array().tanh().matrix();
    } else {
      a = std::move(z);
    }
  }
  if (cache) cache->output = a;
  return a;
}

Eigen::MatrixXd mlp_backward(const MlpParams& p, const MlpCache& cache,
                             const Eigen::MatrixXd& d_output, MlpParams& grads,
                             const Eigen::MatrixXd* d_output_pre) {
  const std::size_t n = p.weights.size();
  Eigen::MatrixXd delta;
  if (p.output_activation == OutputActivation::tanh_scaled) {
    const Eigen::ArrayXXd t = cache.pre[n - 1].array().tanh();
    delta = (p.output_scale.asDiagonal() * d_output).array() * (1.0 - t.square());
  } else {
    delta = d_output;
  }
  if (d_output_pre) delta += *d_output_pre;
  for (std::size_t i = n; i-- > 0;) {
    grads.weights[i].noalias() += delta * cache.inputs[i].transpose();
    grads.biases[i] += delta.rowwise().sum();
    Eigen::MatrixXd d_input = p.weights[i].transpose() * delta;
    if (i == 0) return d_input;
    // ReLU derivative of the previous layer's pre-activation.
    delta = d_input.array() * (cache.pre[i - 1].array() > 0.0).cast<double>();
  }
  return {};
}

Eigen::VectorXd flatten(const MlpParams& p) {
  Eigen::VectorXd flat(static_cast<Eigen::Index>(p.parameter_count()));
  Eigen::Index k = 0;
  for (std::size_t i = 0; i < p.weights.size(); ++i) {
    for (Eigen::Index j = 0; j < p.weights[i].size(); ++j) flat(k++) = p.weights[i].data()[j];
    for (Eigen::Index j = 0; j < p.biases[i].size(); ++j) flat(k++) = p.biases[i](j);
  }
  return flat;
}

void unflatten(MlpParams& p, const Eigen::VectorXd& flat) {
  if (static_cast<std::size_t>(flat.size()) != p.parameter_count())
    throw std::invalid_argument("unflatten: size mismatch");
  Eigen::Index k = 0;
  for (std::size_t i = 0; i < p.weights.size(); ++i) {
    for (Eigen::Index j = 0; j < p.weights[i].size(); ++j) p.weights[i].data()[j] = flat(k++);
    for (Eigen::Index j = 0; j < p.biases[i].size(); ++j) p.biases[i](j) = flat(k++);
  }
}

AdamOptimizer::AdamOptimizer(const MlpParams& shape, AdamConfig config)
    : config_(config), m_(zeros_like(shape)), v_(zeros_like(shape)) {}

void AdamOptimizer::step(MlpParams& params, const MlpParams& grads) {
  if (!params.same_shape(m_) || !grads.same_shape(m_))
    throw std::invalid_argument("AdamOptimizer::step: shape mismatch");
  ++t_;
  const double c1 = 1.0 - std::pow(config_.beta1, static_cast<double>(t_));
  const double c2 = 1.0 - std::pow(config_.beta2, static_cast<double>(t_));
  auto update = [&](auto& x, auto& m, auto& v, const auto& g) {
    m = config_.beta1 * m + (1.0 - config_.beta1) * g;
    v = config_.beta2 * v.array() + (1.0 - config_.beta2) * g.array().square();
    x.array() -= config_.learning_rate * (m.array() / c1) / ((v.array() / c2).sqrt() + config_.epsilon);
  };
  for (std::size_t i = 0; i < params.weights.size(); ++i) {
    update(params.weights[i], m_.weights[i], v_.weights[i], grads.weights[i]);
    update(params.biases[i], m_.biases[i], v_.biases[i], grads.biases[i]);
  }
}

nlohmann::json to_json(const MlpParams& p) {
  nlohmann::json j;
  j["layer_dims"] = p.layer_dims;
  j["output_activation"] = to_string(p.output_activation);
  j["output_scale"] = std::vector<double>(p.output_scale.data(), p.output_scale.data() + p.output_scale.size());
  auto& ws = j["weights"] = nlohmann::json::array();
  auto& bs = j["biases"] = nlohmann::json::array();
  for (std::size_t i = 0; i < p.weights.size(); ++i) {
    std::vector<double> w;
    for (Eigen::Index r = 0; r < p.weights[i].rows(); ++r)
      for (Eigen::Index c = 0; c < p.weights[i].cols(); ++c) w.push_back(p.weights[i](r, c));
    ws.push_back(w);
    bs.push_back(std::vector<double>(p.biases[i].data(), p.biases[i].data() + p.biases[i].size()));
  }
  return j;
}

MlpParams mlp_from_json(const nlohmann::json& j) {
  const auto dims = j.at("layer_dims").get<std::vector<int>>();
  const auto scale = j.value("output_scale", std::vector<double>{});
  Eigen::VectorXd s = Eigen::Map<const Eigen::VectorXd>(scale.data(), static_cast<Eigen::Index>(scale.size()));
  MlpParams p = make_mlp(dims, output_activation_from_string(j.at("output_activation")), s);
  const auto& ws = j.at("weights");
  const auto& bs = j.at("biases");
  if (ws.size() != p.weights.size() || bs.size() != p.biases.size())
    throw std::invalid_argument("mlp_from_json: layer count does not match layer_dims");
  for (std::size_t i = 0; i < p.weights.size(); ++i) {
    const auto w = ws[i].get<std::vector<double>>();
    const auto b = bs[i].get<std::vector<double>>();
    if (static_cast<Eigen::Index>(w.size()) != p.weights[i].size() ||
        static_cast<Eigen::Index>(b.size()) != p.biases[i].size())
      throw std::invalid_argument("mlp_from_json: layer " + std::to_string(i) + " has the wrong size");
    std::size_t k = 0;
    for (Eigen::Index r = 0; r < p.weights[i].rows(); ++r)
      for (Eigen::Index c = 0; c < p.weights[i].cols(); ++c) p.weights[i](r, c) = w[k++];
    for (Eigen::Index r = 0; r < p.biases[i].size(); ++r) p.biases[i](r) = b[static_cast<std::size_t>(r)];
  }
  if (!p.all_finite()) throw std::invalid_argument("mlp_from_json: non-finite parameters");
  return p;
}

}  // namespace skyrelay
