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

#include "skyrelay/rates.hpp"

#include <algorithm>
#include <cmath>
#include <sstream>
#include <stdexcept>

namespace skyrelay {

double noise_power(double psd_dbm_hz, double bandwidth_hz) {
  if (!(bandwidth_hz > 0.0)) throw std::invalid_argument("noise_power: bandwidth must be positive");
  return std::pow(10.0, (psd_dbm_hz - 30.0) / 10.0) * bandwidth_hz;
}

void to_json(nlohmann::json& j, const RateReport& r) {
  j = {{"r1", r.r1},
       {"r2", r.r2},
       {"per_user_sinr", r.per_user_sinr},
       {"overall", r.overall},
       {"num_realizations", r.num_realizations}};
}

void CompensatedSum::add(double v) {
  const double t = sum_ + v;
  if (std::abs(sum_) >= std::abs(v))
    comp_ += (sum_ - t) + v;
  else
    comp_ += (v - t) + sum_;
  sum_ = t;
}

double rate_link1(const BeamformerSet& set, const Eigen::MatrixXcd& h1, double noise) {
  const Eigen::MatrixXcd h_eff = effective_channel_link1(h1, set.f_b, set.f_ur);
  if (set.b_ur.cols() != h_eff.rows() || h_eff.cols() != set.b_b.rows())
    throw std::invalid_argument("rate_link1: baseband stages do not conform to the effective channel");
  const Eigen::MatrixXcd g = set.b_ur * h_eff * set.b_b;
  const Eigen::MatrixXcd signal = g * g.adjoint();
  const Eigen::MatrixXcd combiner = set.b_ur * set.f_ur;
  const Eigen::MatrixXcd q1 = noise * combiner * combiner.adjoint();
  Eigen::LLT<Eigen::MatrixXcd> llt(q1);
  if (llt.info() != Eigen::Success || !(noise > 0.0)) {
    std::ostringstream msg;
    msg << "rate_link1: combined noise covariance Q1 is singular (noise " << noise
        << ", combiner rank-deficient or zero)";
    throw std::domain_error(msg.str());
  }
  const auto k = signal.rows();
  const Eigen::MatrixXcd m = Eigen::MatrixXcd::Identity(k, k) + llt.solve(signal);
  const std::complex<double> det = m.partialPivLu().determinant();
  if (std::abs(det.imag()) > 1e-9 * std::abs(det.real()))
    throw std::domain_error("rate_link1: log-det argument has a non-negligible imaginary part");
  return std::max(0.0, std::log2(det.real()));
}

namespace {

Eigen::MatrixXd received_power(const BeamformerSet& set, const Eigen::MatrixXcd& h2) {
  if (h2.cols() != set.f_ut.rows() || set.f_ut.cols() != set.b_ut.rows())
    throw std::invalid_argument("sinr: dimension mismatch between H2, F_ut and B_ut");
  return (h2 * set.f_ut * set.b_ut).cwiseAbs2();
}

double sinr_from_power(const Eigen::MatrixXd& p, int user, double noise, int per_group) {
  const int group = user / per_group;
  const int index = user % per_group;
  double intra = 0.0;
  double inter = 0.0;
  for (int j = 0; j < static_cast<int>(p.cols()); ++j) {
    if (j == user) continue;
    if (j / per_group == group)
      intra += p(user, j);
    else if (j % per_group != index)
      inter += p(user, j);
  }
  return p(user, user) / (intra + inter + noise);
}

int group_size(int users_per_group, Eigen::Index num_users) {
  const int per_group = users_per_group > 0 ? users_per_group : static_cast<int>(num_users);
  if (num_users % per_group != 0)
    throw std::invalid_argument("sinr: user count is not a multiple of users_per_group");
  return per_group;
}

}  // namespace

double sinr_user(const BeamformerSet& set, const Eigen::MatrixXcd& h2, int user, double noise,
                 int users_per_group) {
  if (user < 0 || user >= h2.rows())
    throw std::out_of_range("sinr_user: user index " + std::to_string(user) + " out of range");
  const Eigen::MatrixXd p = received_power(set, h2);
  return sinr_from_power(p, user, noise, group_size(users_per_group, h2.rows()));
}

std::vector<double> sinr_all(const BeamformerSet& set, const Eigen::MatrixXcd& h2, double noise,
                             int users_per_group) {
  const Eigen::MatrixXd p = received_power(set, h2);
  const int per_group = group_size(users_per_group, h2.rows());
  std::vector<double> out;
  out.reserve(static_cast<std::size_t>(h2.rows()));
  for (int k = 0; k < h2.rows(); ++k) out.push_back(sinr_from_power(p, k, noise, per_group));
  return out;
}

double overall_rate(double r1, double r2) {
  if (r1 < 0.0 || r2 < 0.0) throw std::invalid_argument("overall_rate: rates must be non-negative");
  return 0.5 * std::min(r1, r2);
}

RelaySystem::RelaySystem(ScenarioConfig scenario, std::vector<Position3D> users,
                         ChannelConfig channel, PathLossParams path_loss, HbfConfig hbf)
    : scenario_(std::move(scenario)),
      users_(std::move(users)),
      channel_(std::move(channel)),
      path_loss_(path_loss),
      hbf_(hbf),
      noise_(noise_power(path_loss.noise_psd_dbm_hz, path_loss.bandwidth_hz)) {
  if (users_.empty()) throw std::invalid_argument("RelaySystem: no users");
  if (static_cast<int>(users_.size()) != scenario_.num_users)
    throw std::invalid_argument("RelaySystem: user list does not match scenario.num_users");
  channel_.validate();
  path_loss_.validate();
  hbf_.validate(num_users(), channel_.bs_array.size(), channel_.uav_rx_array.size(),
                channel_.uav_tx_array.size());
}

namespace {

std::vector<Angles> unique_means(const std::vector<Angles>& in) {
  std::vector<Angles> out;
  for (const auto& a : in) {
    const bool seen = std::any_of(out.begin(), out.end(), [&](const Angles& b) {
      return a.elevation == b.elevation && a.azimuth == b.azimuth;
    });
    if (!seen) out.push_back(a);
  }
  return out;
}

}  // namespace

LinkState RelaySystem::link_state(const Position3D& uav) const {
  LinkState s;
  s.uav = uav;
  s.tau1 = distance_3d(scenario_.bs_position, uav);
  for (const auto& u : users_) s.tau2.push_back(distance_3d(uav, u));

  const double spread_el = deg2rad(channel_.spread_elevation_deg);
  const double spread_az = deg2rad(channel_.spread_azimuth_deg);
  const int per_group = scenario_.users_per_group;

  if (channel_.angle_mode == AngleMode::table) {
    s.link1_clusters.assign(static_cast<std::size_t>(channel_.num_clusters_link1),
                            channel_.link1_table_cluster());
    for (int k = 0; k < num_users(); ++k) {
      const Angles mean = channel_.link2_group_mean(k / per_group);
      ClusterAngleSpec c;
      c.mean_eaod = mean.elevation;
      c.mean_aaod = mean.azimuth;
      c.spread_elevation = spread_el;
      c.spread_azimuth = spread_az;
      s.link2_users.push_back(c);
    }
  } else {
    const Angles dep = geometric_angles(scenario_.bs_position, uav);
    const Angles arr = geometric_angles(uav, scenario_.bs_position);
    ClusterAngleSpec c1{dep.elevation, dep.azimuth, arr.elevation, arr.azimuth, spread_el, spread_az};
    s.link1_clusters.assign(static_cast<std::size_t>(channel_.num_clusters_link1), c1);
    for (const auto& u : users_) {
      const Angles a = geometric_angles(uav, u);
      ClusterAngleSpec c;
      c.mean_eaod = a.elevation;
      c.mean_aaod = a.azimuth;
      c.spread_elevation = spread_el;
      c.spread_azimuth = spread_az;
      s.link2_users.push_back(c);
    }
  }

  std::vector<Angles> dep_means, arr_means, user_means;
  for (const auto& c : s.link1_clusters) {
    dep_means.push_back(c.departure());
    arr_means.push_back(c.arrival());
  }
  for (const auto& c : s.link2_users) user_means.push_back(c.departure());

  const int n_rf_b = hbf_.n_rf_bs;
  const int n_rf_u = hbf_.n_rf_uav;
  s.f_b = rf_stage(channel_.bs_array, support_directions(unique_means(dep_means), spread_az, n_rf_b), n_rf_b);
  s.f_ur = rf_stage(channel_.uav_rx_array, support_directions(unique_means(arr_means), spread_az, n_rf_u), n_rf_u)
               .transpose();
  s.f_ut = rf_stage(channel_.uav_tx_array, support_directions(unique_means(user_means), spread_az, n_rf_u), n_rf_u);
  return s;
}

// Link 2 is drawn before link 1 so that the second-hop draws of a full
// realization coincide with those of a link-2-only realization.
ChannelRealization RelaySystem::draw_channel(const LinkState& state, Rng& rng, bool with_link1) const {
  ChannelRealization r;
  auto d2 = draw_h2(channel_.uav_tx_array, state.link2_users, state.tau2, path_loss_,
                    channel_.num_paths_link2, rng);
  r.h2 = std::move(d2.h2);
  r.z2 = std::move(d2.gains);
  r.link2_angles = std::move(d2.angles);
  if (with_link1) {
    auto d1 = draw_h1(channel_.bs_array, channel_.uav_rx_array, state.link1_clusters, state.tau1,
                      path_loss_, channel_.num_paths_link1, rng);
    r.h1 = std::move(d1.h1);
    r.z1 = std::move(d1.gains);
    r.link1_angles = std::move(d1.angles);
  }
  return r;
}

BeamformerSet RelaySystem::beamformers(const LinkState& state, const ChannelRealization& channel,
                                       bool with_link1) const {
  BeamformerSet set;
  set.f_b = state.f_b;
  set.f_ur = state.f_ur;
  set.f_ut = state.f_ut;
  if (with_link1) {
    const Eigen::MatrixXcd h_eff = effective_channel_link1(channel.h1, set.f_b, set.f_ur);
    const Link1Baseband bb = bb_stages_link1(h_eff, num_users());
    set.b_b = scale_to_power(set.f_b, bb.b_b, hbf_.bs_power_w);
    set.b_ur = bb.b_ur;
  }
  set.b_ut = bb_stage_link2(channel.h2 * set.f_ut, set.f_ut, hbf_.uav_power_w, noise_);
  return set;
}

double RelaySystem::r2_instant(const LinkState& state, Rng& rng) const {
  const ChannelRealization channel = draw_channel(state, rng, false);
  const BeamformerSet set = beamformers(state, channel, false);
  double sum = 0.0;
  for (double s : sinr_all(set, channel.h2, noise_, scenario_.users_per_group)) sum += std::log2(1.0 + s);
  return sum;
}

double RelaySystem::r2_ergodic(const Position3D& uav, int num_realizations, std::uint64_t seed) const {
  if (num_realizations < 1) throw std::invalid_argument("r2_ergodic: need at least one realization");
  const LinkState state = link_state(uav);
  CompensatedSum total;
  for (int r = 0; r < num_realizations; ++r) {
    Rng rng(derive_seed(seed, static_cast<std::uint64_t>(r)));
    total.add(r2_instant(state, rng));
  }
  return total.value() / num_realizations;
}

RateReport RelaySystem::evaluate(const Position3D& uav, int num_realizations, std::uint64_t seed) const {
  if (num_realizations < 1) throw std::invalid_argument("evaluate: need at least one realization");
  const LinkState state = link_state(uav);
  CompensatedSum r1_sum, r2_sum;
  std::vector<CompensatedSum> sinr_sum(users_.size());
  for (int r = 0; r < num_realizations; ++r) {
    Rng rng(derive_seed(seed, static_cast<std::uint64_t>(r)));
    const ChannelRealization channel = draw_channel(state, rng, true);
    const BeamformerSet set = beamformers(state, channel, true);
    r1_sum.add(rate_link1(set, channel.h1, noise_));
    const auto sinr = sinr_all(set, channel.h2, noise_, scenario_.users_per_group);
    double r2 = 0.0;
    for (std::size_t k = 0; k < sinr.size(); ++k) {
      r2 += std::log2(1.0 + sinr[k]);
      sinr_sum[k].add(sinr[k]);
    }
    r2_sum.add(r2);
  }
  RateReport report;
  report.num_realizations = num_realizations;
  report.r1 = r1_sum.value() / num_realizations;
  report.r2 = r2_sum.value() / num_realizations;
  for (const auto& s : sinr_sum) report.per_user_sinr.push_back(s.value() / num_realizations);
  report.overall = overall_rate(report.r1, report.r2);
  return report;
}

double rate_link2_ergodic(const RelaySystem& system, const Position3D& uav, int num_realizations,
                          Rng& rng) {
  return system.r2_ergodic(uav, num_realizations, rng());
}

}  // namespace skyrelay
