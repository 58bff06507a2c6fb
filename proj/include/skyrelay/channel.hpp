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

#ifndef SKYRELAY_CHANNEL_HPP
#define SKYRELAY_CHANNEL_HPP

#include <Eigen/Dense>
#include <complex>
#include <numbers>
#include <span>
#include <string>
#include <vector>

#include "json.hpp"
#include "skyrelay/geometry.hpp"
#include "skyrelay/random.hpp"

namespace skyrelay {

/// Uniform rectangular array of n_x * n_y elements, spacing in wavelengths.
struct ArrayGeometry {
  int n_x = 1;
  int n_y = 1;
  double spacing = 0.5;

  int size() const { return n_x * n_y; }
  void validate() const;
  bool operator==(const ArrayGeometry&) const = default;
};

/// Mean departure/arrival angles of one cluster plus the half-width of the
/// uniform interval the per-path angles are drawn from. Radians.
struct ClusterAngleSpec {
  double mean_eaod = 0.0;
  double mean_aaod = 0.0;
  double mean_eaoa = 0.0;
  double mean_aaoa = 0.0;
  double spread_elevation = 0.0;
  double spread_azimuth = 0.0;

  Angles departure() const { return {mean_eaod, mean_aaod}; }
  Angles arrival() const { return {mean_eaoa, mean_aaoa}; }
};

struct PathLossParams {
  double exponent = 3.6;
  double reference_loss_db = 61.34;
  double noise_psd_dbm_hz = -174.0;
  double bandwidth_hz = 100e6;

  /// 10^(-alpha/20), applied to every path amplitude.
  double reference_amplitude() const;
  void validate() const;
};

enum class AngleMode {
  table,      // fixed per-link / per-group means, independent of the UAV position
  geometric,  // means recomputed from BS, UAV and user positions
};

std::string to_string(AngleMode mode);
AngleMode angle_mode_from_string(const std::string& name);

/// Array sizes, path counts and angle statistics for both hops. Angles are
/// kept in degrees here since this is the user-facing configuration.
struct ChannelConfig {
  ArrayGeometry bs_array{12, 12, 0.5};
  ArrayGeometry uav_rx_array{12, 12, 0.5};
  ArrayGeometry uav_tx_array{12, 12, 0.5};
  int num_paths_link1 = 10;  // L, total over all clusters
  int num_clusters_link1 = 1;
  int num_paths_link2 = 10;  // Q, per user
  double link1_mean_elevation_deg = 60.0;
  double link1_mean_azimuth_deg = 120.0;
  double link2_mean_elevation_deg = 60.0;
  double link2_azimuth_base_deg = 21.0;    // group g: base + step * (g - 1)
  double link2_azimuth_step_deg = 120.0;
  double spread_elevation_deg = 10.0;
  double spread_azimuth_deg = 10.0;
  AngleMode angle_mode = AngleMode::table;
  double carrier_frequency_hz = 28e9;  // informational only

  void validate() const;
  /// Mean departure azimuth/elevation of user group g (0-based) in table mode.
  Angles link2_group_mean(int group) const;
  ClusterAngleSpec link1_table_cluster() const;
};

void to_json(nlohmann::json& j, const ChannelConfig& c);
void from_json(const nlohmann::json& j, ChannelConfig& c);

inline double deg2rad(double deg) { return deg * std::numbers::pi / 180.0; }

struct PathAngles {
  Angles departure;
  Angles arrival;
};

struct ChannelRealization {
  Eigen::MatrixXcd h1;  // N_r x N_T
  Eigen::MatrixXcd h2;  // K x N_t
  Eigen::VectorXcd z1;  // per-path link-1 gains, length L (distance scaling included)
  Eigen::MatrixXcd z2;  // K x Q link-2 gains (distance scaling included)
  std::vector<PathAngles> link1_angles;
  std::vector<std::vector<Angles>> link2_angles;  // [user][path], departure at the UAV
};

void to_json(nlohmann::json& j, const ArrayGeometry& g);
void from_json(const nlohmann::json& j, ArrayGeometry& g);
void to_json(nlohmann::json& j, const PathLossParams& p);
void from_json(const nlohmann::json& j, PathLossParams& p);

/// Debug dump: {"h1": {"rows","cols","real","imag"}, ...} in row-major order.
nlohmann::json to_json(const ChannelRealization& r);
nlohmann::json complex_matrix_json(const Eigen::MatrixXcd& m);

/// URA response: x-axis phase progression (Kronecker) y-axis progression.
/// Entry index is ix * n_y + iy.
Eigen::VectorXcd steering_vector(const ArrayGeometry& geom, double elevation, double azimuth);

/// z * tau^-eta * 10^(-alpha/20) with z ~ CN(0, 1/num_paths).
std::complex<double> path_amplitude(double distance, const PathLossParams& params, Rng& rng,
                                    int num_paths);

/// Link-1 draw with per-path gains and angles kept for inspection.
struct Link1Draw {
  Eigen::MatrixXcd h1;
  Eigen::VectorXcd gains;
  std::vector<PathAngles> angles;
};

/// BS -> UAV clustered channel. `clusters` holds C cluster specs; the
/// `num_paths` paths (L in total) are split evenly across them.
Link1Draw draw_h1(const ArrayGeometry& bs_geom, const ArrayGeometry& uav_geom,
                  std::span<const ClusterAngleSpec> clusters, double distance,
                  const PathLossParams& params, int num_paths, Rng& rng);

Eigen::MatrixXcd generate_h1(const ArrayGeometry& bs_geom, const ArrayGeometry& uav_geom,
                             const ClusterAngleSpec& angles, double distance,
                             const PathLossParams& params, int num_paths, int num_clusters,
                             Rng& rng);

struct Link2Draw {
  Eigen::MatrixXcd h2;
  Eigen::MatrixXcd gains;
  std::vector<std::vector<Angles>> angles;
};

/// UAV -> users channel; row k is the user-k channel (transposed), built
/// from `num_paths` (Q) paths sharing the user's distance.
Link2Draw draw_h2(const ArrayGeometry& uav_geom, std::span<const ClusterAngleSpec> per_user_angles,
                  std::span<const double> distances, const PathLossParams& params, int num_paths,
                  Rng& rng);

Eigen::MatrixXcd generate_h2(const ArrayGeometry& uav_geom,
                             std::span<const ClusterAngleSpec> per_user_angles,
                             std::span<const double> distances, const PathLossParams& params,
                             int num_paths, Rng& rng);

}  // namespace skyrelay

#endif  // SKYRELAY_CHANNEL_HPP
