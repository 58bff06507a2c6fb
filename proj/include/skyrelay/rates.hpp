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

#ifndef SKYRELAY_RATES_HPP
#define SKYRELAY_RATES_HPP

#include <Eigen/Dense>
#include <cstdint>
#include <vector>

#include "json.hpp"
#include "skyrelay/beamforming.hpp"
#include "skyrelay/channel.hpp"
#include "skyrelay/geometry.hpp"
#include "skyrelay/random.hpp"

namespace skyrelay {

/// Thermal noise power in watts for a PSD in dBm/Hz over `bandwidth_hz`.
double noise_power(double psd_dbm_hz, double bandwidth_hz);

struct NoiseModel {
  double psd_dbm_hz = -174.0;
  double bandwidth_hz = 100e6;

  double power() const { return noise_power(psd_dbm_hz, bandwidth_hz); }
};

struct RateReport {
  double r1 = 0.0;
  double r2 = 0.0;
  std::vector<double> per_user_sinr;  // ergodic mean of each user's SINR
  double overall = 0.0;
  int num_realizations = 0;
};

void to_json(nlohmann::json& j, const RateReport& r);

/// log2 det(I + Q1^-1 S) with S = B_ur H_eff B_b B_b^H H_eff^H B_ur^H and
/// Q1 = sigma^2 (B_ur F_ur)(B_ur F_ur)^H, the post-combining noise covariance.
double rate_link1(const BeamformerSet& set, const Eigen::MatrixXcd& h1, double noise);

/// SINR of user `user` (0-based, groups of `users_per_group` consecutive
/// users; 0 means a single group). The denominator holds the intra-group sum
/// over the other users of the same group and the inter-group sum over users
/// of other groups whose in-group index differs from this user's.
double sinr_user(const BeamformerSet& set, const Eigen::MatrixXcd& h2, int user, double noise,
                 int users_per_group = 0);

std::vector<double> sinr_all(const BeamformerSet& set, const Eigen::MatrixXcd& h2, double noise,
                             int users_per_group = 0);

/// Half-duplex decode-and-forward end-to-end rate: 0.5 * min(r1, r2).
double overall_rate(double r1, double r2);

/// Slow-varying state of the relay at one UAV position: distances, mean
/// angles and the RF stages built from them.
struct LinkState {
  Position3D uav;
  double tau1 = 0.0;
  std::vector<double> tau2;
  std::vector<ClusterAngleSpec> link1_clusters;
  std::vector<ClusterAngleSpec> link2_users;
  Eigen::MatrixXcd f_b;
  Eigen::MatrixXcd f_ur;
  Eigen::MatrixXcd f_ut;
};

/// The BS -> UAV -> users system for one scenario instance (fixed users).
/// Evaluates achievable rates at arbitrary UAV positions by Monte Carlo
/// over fast fading; realization r is drawn from derive_seed(seed, r).
class RelaySystem {
 public:
  RelaySystem(ScenarioConfig scenario, std::vector<Position3D> users, ChannelConfig channel,
              PathLossParams path_loss, HbfConfig hbf);

  const ScenarioConfig& scenario() const { return scenario_; }
  const std::vector<Position3D>& users() const { return users_; }
  const ChannelConfig& channel() const { return channel_; }
  const HbfConfig& hbf() const { return hbf_; }
  double noise() const { return noise_; }
  int num_users() const { return static_cast<int>(users_.size()); }

  /// UAV at (x, y) and the scenario's fixed height.
  Position3D uav_at(double x, double y) const { return {x, y, scenario_.uav_height}; }

  LinkState link_state(const Position3D& uav) const;

  ChannelRealization draw_channel(const LinkState& state, Rng& rng, bool with_link1 = true) const;

  /// Baseband stages for one realization on top of the state's RF stages.
  BeamformerSet beamformers(const LinkState& state, const ChannelRealization& channel,
                            bool with_link1 = true) const;

  /// Sum over users of log2(1 + SINR) for one realization.
  double r2_instant(const LinkState& state, Rng& rng) const;

  double r2_ergodic(const Position3D& uav, int num_realizations, std::uint64_t seed) const;

  RateReport evaluate(const Position3D& uav, int num_realizations, std::uint64_t seed) const;

 private:
  ScenarioConfig scenario_;
  std::vector<Position3D> users_;
  ChannelConfig channel_;
  PathLossParams path_loss_;
  HbfConfig hbf_;
  double noise_;
};

/// Ergodic second-hop rate with the realization seed taken from `rng`.
double rate_link2_ergodic(const RelaySystem& system, const Position3D& uav, int num_realizations,
                          Rng& rng);

/// Neumaier-compensated running sum.
class CompensatedSum {
 public:
  void add(double v);
  double value() const { return sum_ + comp_; }

 private:
  double sum_ = 0.0;
  double comp_ = 0.0;
};

}  // namespace skyrelay

#endif  // SKYRELAY_RATES_HPP
