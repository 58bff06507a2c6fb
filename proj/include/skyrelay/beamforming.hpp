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

#ifndef SKYRELAY_BEAMFORMING_HPP
#define SKYRELAY_BEAMFORMING_HPP

#include <Eigen/Dense>
#include <span>
#include <vector>

#include "json.hpp"
#include "skyrelay/channel.hpp"
#include "skyrelay/geometry.hpp"

namespace skyrelay {

struct HbfConfig {
  int n_rf_bs = 4;
  int n_rf_uav = 4;
  double bs_power_w = 1.0;
  double uav_power_w = 1.0;

  /// K <= N_RF_b <= N_T and K <= N_RF_u <= min(N_r, N_t); powers positive.
  void validate(int num_users, int n_bs, int n_uav_rx, int n_uav_tx) const;
};

void to_json(nlohmann::json& j, const HbfConfig& c);
void from_json(const nlohmann::json& j, HbfConfig& c);

/// The six hybrid stages of the relay. RF stages are constant modulus.
struct BeamformerSet {
  Eigen::MatrixXcd f_b;   // N_T x N_RF_b
  Eigen::MatrixXcd b_b;   // N_RF_b x K
  Eigen::MatrixXcd f_ur;  // N_RF_u x N_r
  Eigen::MatrixXcd b_ur;  // K x N_RF_u
  Eigen::MatrixXcd f_ut;  // N_t x N_RF_u
  Eigen::MatrixXcd b_ut;  // N_RF_u x K
};

nlohmann::json to_json(const BeamformerSet& set);

/// Column j is the conjugate steering vector at directions[j % size],
/// scaled to entry modulus 1/sqrt(N).
Eigen::MatrixXcd rf_stage(const ArrayGeometry& geom, std::span<const Angles> directions, int n_rf);

/// `count` distinct directions covering the angular support of one cluster:
/// azimuths evenly spaced across [mean - spread, mean + spread] at the mean
/// elevation. A single direction is the mean itself.
std::vector<Angles> support_directions(const Angles& mean, double spread_azimuth, int count);

/// Distributes `n_rf` beams over several clusters round-robin, each
/// cluster's share spread over its own support.
std::vector<Angles> support_directions(std::span<const Angles> means, double spread_azimuth,
                                       int n_rf);

/// F_ur * H1 * F_b.
Eigen::MatrixXcd effective_channel_link1(const Eigen::MatrixXcd& h1, const Eigen::MatrixXcd& f_b,
                                         const Eigen::MatrixXcd& f_ur);

struct Link1Baseband {
  Eigen::MatrixXcd b_b;   // N_RF_b x K, unit-norm right singular vectors
  Eigen::MatrixXcd b_ur;  // K x N_RF_u, Hermitian of left singular vectors
};

/// Truncated SVD of the effective channel, before any power scaling.
/// Throws if k exceeds the numerical rank.
Link1Baseband bb_stages_link1(const Eigen::MatrixXcd& h_eff, int k);

/// Rescales `b` so that ||f * b||_F^2 == power.
Eigen::MatrixXcd scale_to_power(const Eigen::MatrixXcd& f, const Eigen::MatrixXcd& b, double power);

/// Regularized zero forcing B = H^H (H H^H + eps I)^-1 with eps = K sigma^2 / P_u,
/// then scaled to ||f_ut * B||_F^2 == P_u. Pass noise_power = 0 for exact ZF.
/// Throws on a rank-deficient effective channel.
Eigen::MatrixXcd bb_stage_link2(const Eigen::MatrixXcd& h2_eff, const Eigen::MatrixXcd& f_ut,
                                double uav_power, double noise_power);

}  // namespace skyrelay

#endif  // SKYRELAY_BEAMFORMING_HPP
