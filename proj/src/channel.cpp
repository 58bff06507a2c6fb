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

#include "skyrelay/channel.hpp"

#include <cmath>
#include <numbers>
#include <stdexcept>

namespace skyrelay {

using cd = std::complex<double>;

void ArrayGeometry::validate() const {
  if (n_x < 1 || n_y < 1) throw std::invalid_argument("array needs n_x, n_y >= 1");
  if (!(spacing > 0.0)) throw std::invalid_argument("array spacing must be positive");
}

double PathLossParams::reference_amplitude() const {
  return std::pow(10.0, -reference_loss_db / 20.0);
}

void PathLossParams::validate() const {
  if (!(exponent > 0.0)) throw std::invalid_argument("path loss exponent must be positive");
  if (!(bandwidth_hz > 0.0)) throw std::invalid_argument("bandwidth must be positive");
}

void to_json(nlohmann::json& j, const ArrayGeometry& g) {
  j = {{"n_x", g.n_x}, {"n_y", g.n_y}, {"spacing", g.spacing}};
}

void from_json(const nlohmann::json& j, ArrayGeometry& g) {
  j.at("n_x").get_to(g.n_x);
  j.at("n_y").get_to(g.n_y);
  g.spacing = j.value("spacing", 0.5);
}

void to_json(nlohmann::json& j, const PathLossParams& p) {
  j = {{"exponent", p.exponent},
       {"reference_loss_db", p.reference_loss_db},
       {"noise_psd_dbm_hz", p.noise_psd_dbm_hz},
       {"bandwidth_hz", p.bandwidth_hz}};
}

void from_json(const nlohmann::json& j, PathLossParams& p) {
  PathLossParams d;
  p.exponent = j.value("exponent", d.exponent);
  p.reference_loss_db = j.value("reference_loss_db", d.reference_loss_db);
  p.noise_psd_dbm_hz = j.value("noise_psd_dbm_hz", d.noise_psd_dbm_hz);
  p.bandwidth_hz = j.value("bandwidth_hz", d.bandwidth_hz);
}

std::string to_string(AngleMode mode) {
  return mode == AngleMode::table ? "table" : "geometric";
}

AngleMode angle_mode_from_string(const std::string& name) {
  if (name == "table") return AngleMode::table;
  if (name == "geometric") return AngleMode::geometric;
  throw std::invalid_argument("unknown angle_mode '" + name + "' (expected table or geometric)");
}

void ChannelConfig::validate() const {
  bs_array.validate();
  uav_rx_array.validate();
  uav_tx_array.validate();
  if (num_clusters_link1 < 1 || num_paths_link1 < num_clusters_link1 ||
      num_paths_link1 % num_clusters_link1 != 0)
    throw std::invalid_argument("num_paths_link1 must be a positive multiple of num_clusters_link1");
  if (num_paths_link2 < 1) throw std::invalid_argument("num_paths_link2 must be >= 1");
  if (spread_elevation_deg < 0.0 || spread_azimuth_deg < 0.0)
    throw std::invalid_argument("angle spreads must be non-negative");
}

Angles ChannelConfig::link2_group_mean(int group) const {
  return {deg2rad(link2_mean_elevation_deg),
          deg2rad(link2_azimuth_base_deg + link2_azimuth_step_deg * group)};
}

ClusterAngleSpec ChannelConfig::link1_table_cluster() const {
  ClusterAngleSpec c;
  c.mean_eaod = c.mean_eaoa = deg2rad(link1_mean_elevation_deg);
  c.mean_aaod = c.mean_aaoa = deg2rad(link1_mean_azimuth_deg);
  c.spread_elevation = deg2rad(spread_elevation_deg);
  c.spread_azimuth = deg2rad(spread_azimuth_deg);
  return c;
}

void to_json(nlohmann::json& j, const ChannelConfig& c) {
  j = {{"bs_array", c.bs_array},
       {"uav_rx_array", c.uav_rx_array},
       {"uav_tx_array", c.uav_tx_array},
       {"num_paths_link1", c.num_paths_link1},
       {"num_clusters_link1", c.num_clusters_link1},
       {"num_paths_link2", c.num_paths_link2},
       {"link1_mean_elevation_deg", c.link1_mean_elevation_deg},
       {"link1_mean_azimuth_deg", c.link1_mean_azimuth_deg},
       {"link2_mean_elevation_deg", c.link2_mean_elevation_deg},
       {"link2_azimuth_base_deg", c.link2_azimuth_base_deg},
       {"link2_azimuth_step_deg", c.link2_azimuth_step_deg},
       {"spread_elevation_deg", c.spread_elevation_deg},
       {"spread_azimuth_deg", c.spread_azimuth_deg},
       {"angle_mode", to_string(c.angle_mode)},
       {"carrier_frequency_hz", c.carrier_frequency_hz}};
}

void from_json(const nlohmann::json& j, ChannelConfig& c) {
  ChannelConfig d;
  c.bs_array = j.value("bs_array", d.bs_array);
  c.uav_rx_array = j.value("uav_rx_array", d.uav_rx_array);
  c.uav_tx_array = j.value("uav_tx_array", d.uav_tx_array);
  c.num_paths_link1 = j.value("num_paths_link1", d.num_paths_link1);
  c.num_clusters_link1 = j.value("num_clusters_link1", d.num_clusters_link1);
  c.num_paths_link2 = j.value("num_paths_link2", d.num_paths_link2);
  c.link1_mean_elevation_deg = j.value("link1_mean_elevation_deg", d.link1_mean_elevation_deg);
  c.link1_mean_azimuth_deg = j.value("link1_mean_azimuth_deg", d.link1_mean_azimuth_deg);
  c.link2_mean_elevation_deg = j.value("link2_mean_elevation_deg", d.link2_mean_elevation_deg);
  c.link2_azimuth_base_deg = j.value("link2_azimuth_base_deg", d.link2_azimuth_base_deg);
  c.link2_azimuth_step_deg = j.value("link2_azimuth_step_deg", d.link2_azimuth_step_deg);
  c.spread_elevation_deg = j.value("spread_elevation_deg", d.spread_elevation_deg);
  c.spread_azimuth_deg = j.value("spread_azimuth_deg", d.spread_azimuth_deg);
  c.angle_mode = angle_mode_from_string(j.value("angle_mode", to_string(d.angle_mode)));
  c.carrier_frequency_hz = j.value("carrier_frequency_hz", d.carrier_frequency_hz);
}

nlohmann::json complex_matrix_json(const Eigen::MatrixXcd& m) {
  std::vector<double> re, im;
  re.reserve(static_cast<std::size_t>(m.size()));
  im.reserve(static_cast<std::size_t>(m.size()));
  for (Eigen::Index r = 0; r < m.rows(); ++r)
    for (Eigen::Index c = 0; c < m.cols(); ++c) {
      re.push_back(m(r, c).real());
      im.push_back(m(r, c).imag());
    }
  return {{"rows", m.rows()}, {"cols", m.cols()}, {"real", re}, {"imag", im}};
}

nlohmann::json to_json(const ChannelRealization& r) {
  nlohmann::json j;
  j["h1"] = complex_matrix_json(r.h1);
  j["h2"] = complex_matrix_json(r.h2);
  j["z1"] = complex_matrix_json(r.z1);
  j["z2"] = complex_matrix_json(r.z2);
  auto& l1 = j["link1_angles"] = nlohmann::json::array();
  for (const auto& p : r.link1_angles)
    l1.push_back({{"eaod", p.departure.elevation},
                  {"aaod", p.departure.azimuth},
                  {"eaoa", p.arrival.elevation},
                  {"aaoa", p.arrival.azimuth}});
  auto& l2 = j["link2_angles"] = nlohmann::json::array();
  for (const auto& user : r.link2_angles) {
    auto row = nlohmann::json::array();
    for (const auto& a : user) row.push_back({{"eaod", a.elevation}, {"aaod", a.azimuth}});
    l2.push_back(row);
  }
  return j;
}

Eigen::VectorXcd steering_vector(const ArrayGeometry& geom, double elevation, double azimuth) {
  const double k = 2.0 * std::numbers::pi * geom.spacing * std::sin(elevation);
  const double px = k * std::cos(azimuth);
  const double py = k * std::sin(azimuth);
  Eigen::VectorXcd a(geom.size());
  for (int ix = 0; ix < geom.n_x; ++ix) {
    for (int iy = 0; iy < geom.n_y; ++iy) {
      a(ix * geom.n_y + iy) = std::polar(1.0, -(px * ix + py * iy));
    }
  }
  return a;
}

cd path_amplitude(double distance, const PathLossParams& params, Rng& rng, int num_paths) {
  if (!(distance > 0.0)) throw std::invalid_argument("path_amplitude: distance must be positive");
  if (num_paths < 1) throw std::invalid_argument("path_amplitude: num_paths must be >= 1");
  const cd z = complex_gaussian(rng, 1.0 / num_paths);
  return z * std::pow(distance, -params.exponent) * params.reference_amplitude();
}

namespace {

// uniform_real_distribution(a, a) is undefined; zero spread needs special care.
Angles draw_angles(Rng& rng, const Angles& mean, double spread_el, double spread_az) {
  Angles a = mean;
  if (spread_el > 0.0) a.elevation = uniform(rng, mean.elevation - spread_el, mean.elevation + spread_el);
  if (spread_az > 0.0) a.azimuth = uniform(rng, mean.azimuth - spread_az, mean.azimuth + spread_az);
  return a;
}

}  // namespace

Link1Draw draw_h1(const ArrayGeometry& bs_geom, const ArrayGeometry& uav_geom,
                  std::span<const ClusterAngleSpec> clusters, double distance,
                  const PathLossParams& params, int num_paths, Rng& rng) {
  if (!(distance > 0.0)) throw std::invalid_argument("draw_h1: distance must be positive");
  if (clusters.empty()) throw std::invalid_argument("draw_h1: need at least one cluster");
  const int num_clusters = static_cast<int>(clusters.size());
  if (num_paths < num_clusters || num_paths % num_clusters != 0)
    throw std::invalid_argument("draw_h1: num_paths must be a positive multiple of the cluster count");
  const int per_cluster = num_paths / num_clusters;

  Link1Draw out;
  out.h1 = Eigen::MatrixXcd::Zero(uav_geom.size(), bs_geom.size());
  out.gains.resize(num_paths);
  out.angles.reserve(static_cast<std::size_t>(num_paths));
  int path = 0;
  for (const auto& c : clusters) {
    for (int l = 0; l < per_cluster; ++l, ++path) {
      PathAngles pa;
      pa.departure = draw_angles(rng, c.departure(), c.spread_elevation, c.spread_azimuth);
      pa.arrival = draw_angles(rng, c.arrival(), c.spread_elevation, c.spread_azimuth);
      const cd gain = path_amplitude(distance, params, rng, num_paths);
      const Eigen::VectorXcd a_r = steering_vector(uav_geom, pa.arrival.elevation, pa.arrival.azimuth);
      const Eigen::VectorXcd a_t = steering_vector(bs_geom, pa.departure.elevation, pa.departure.azimuth);
      out.h1.noalias() += gain * a_r * a_t.transpose();
      out.gains(path) = gain;
      out.angles.push_back(pa);
    }
  }
  return out;
}

Eigen::MatrixXcd generate_h1(const ArrayGeometry& bs_geom, const ArrayGeometry& uav_geom,
                             const ClusterAngleSpec& angles, double distance,
                             const PathLossParams& params, int num_paths, int num_clusters,
                             Rng& rng) {
  if (num_clusters < 1) throw std::invalid_argument("generate_h1: num_clusters must be >= 1");
  const std::vector<ClusterAngleSpec> clusters(static_cast<std::size_t>(num_clusters), angles);
  return draw_h1(bs_geom, uav_geom, clusters, distance, params, num_paths, rng).h1;
}

Link2Draw draw_h2(const ArrayGeometry& uav_geom, std::span<const ClusterAngleSpec> per_user_angles,
                  std::span<const double> distances, const PathLossParams& params, int num_paths,
                  Rng& rng) {
  if (per_user_angles.size() != distances.size())
    throw std::invalid_argument("draw_h2: one angle spec and one distance per user");
  if (num_paths < 1) throw std::invalid_argument("draw_h2: num_paths must be >= 1");
  const auto num_users = static_cast<Eigen::Index>(distances.size());
  Link2Draw out;
  out.h2 = Eigen::MatrixXcd::Zero(num_users, uav_geom.size());
  out.gains.resize(num_users, num_paths);
  out.angles.resize(distances.size());
  for (Eigen::Index k = 0; k < num_users; ++k) {
    const auto& spec = per_user_angles[static_cast<std::size_t>(k)];
    const double tau = distances[static_cast<std::size_t>(k)];
    if (!(tau > 0.0)) throw std::invalid_argument("draw_h2: user distances must be positive");
    for (int q = 0; q < num_paths; ++q) {
      const Angles a = draw_angles(rng, spec.departure(), spec.spread_elevation, spec.spread_azimuth);
      const cd gain = path_amplitude(tau, params, rng, num_paths);
      out.h2.row(k) += gain * steering_vector(uav_geom, a.elevation, a.azimuth).transpose();
      out.gains(k, q) = gain;
      out.angles[static_cast<std::size_t>(k)].push_back(a);
    }
  }
  return out;
}

Eigen::MatrixXcd generate_h2(const ArrayGeometry& uav_geom,
                             std::span<const ClusterAngleSpec> per_user_angles,
                             std::span<const double> distances, const PathLossParams& params,
                             int num_paths, Rng& rng) {
  return draw_h2(uav_geom, per_user_angles, distances, params, num_paths, rng).h2;
}

}  // namespace skyrelay
