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

#ifndef SKYRELAY_GEOMETRY_HPP
#define SKYRELAY_GEOMETRY_HPP

#include <cstdint>
#include <string>
#include <vector>

#include "json.hpp"
#include "skyrelay/random.hpp"

namespace skyrelay {

/// Cartesian location in meters. Ground level is z = 0.
struct Position3D {
  double x = 0.0;
  double y = 0.0;
  double z = 0.0;

  bool operator==(const Position3D&) const = default;
};

struct AreaBounds {
  double x_min = 0.0;
  double x_max = 100.0;
  double y_min = 0.0;
  double y_max = 100.0;

  bool contains(double x, double y) const {
    return x >= x_min && x <= x_max && y >= y_min && y <= y_max;
  }
  bool operator==(const AreaBounds&) const = default;
};

struct Angles {
  double elevation = 0.0;  // from the downward vertical
  double azimuth = 0.0;
};

enum class DistributionKind { static_narrow, static_wide, dynamic_sequence, explicit_ranges };

std::string to_string(DistributionKind kind);
DistributionKind distribution_kind_from_string(const std::string& name);

/// Number of user distributions in the dynamic sequence.
inline constexpr int kDynamicDistributions = 6;

struct ScenarioConfig {
  Position3D bs_position{0.0, 0.0, 10.0};
  Position3D uav_initial{50.0, 50.0, 20.0};
  double uav_height = 20.0;
  AreaBounds bounds{};
  int num_users = 4;
  int num_groups = 1;
  int users_per_group = 4;
  DistributionKind distribution_kind = DistributionKind::static_narrow;
  // Used by explicit_ranges: user k falls in rectangle k % size().
  std::vector<AreaBounds> explicit_user_ranges;
  std::uint64_t rng_seed = 1;

  /// Throws std::invalid_argument when an invariant is violated.
  void validate() const;
};

void to_json(nlohmann::json& j, const Position3D& p);
void from_json(const nlohmann::json& j, Position3D& p);
void to_json(nlohmann::json& j, const AreaBounds& b);
void from_json(const nlohmann::json& j, AreaBounds& b);
void to_json(nlohmann::json& j, const ScenarioConfig& cfg);
void from_json(const nlohmann::json& j, ScenarioConfig& cfg);

double distance_3d(const Position3D& p, const Position3D& q);

/// Direction from `from` towards `to`. Elevation is measured from the
/// downward vertical (0 = straight down, pi/2 = horizontal) and azimuth is
/// atan2(dy, dx), taken as 0 when the horizontal offset vanishes.
Angles geometric_angles(const Position3D& from, const Position3D& to);

/// User rectangle for the static scenarios: [90,100]^2 narrow, [50,100]^2 wide.
AreaBounds static_user_area(DistributionKind kind);

/// The l-th (1-based) rectangle of the dynamic sequence.
AreaBounds dynamic_user_area(int index);

std::vector<Position3D> sample_in_area(const AreaBounds& area, int count, Rng& rng);

std::vector<Position3D> sample_static_users(const ScenarioConfig& cfg, Rng& rng);

std::vector<Position3D> dynamic_distribution(int index, int num_users, Rng& rng);

/// Dispatches on cfg.distribution_kind. `dynamic_index` selects the
/// rectangle for dynamic_sequence and is ignored otherwise.
std::vector<Position3D> sample_users(const ScenarioConfig& cfg, Rng& rng,
                                     int dynamic_index = 1);

/// Draws users once per scenario instance from a seed-derived stream.
std::vector<Position3D> scenario_users(const ScenarioConfig& cfg, int dynamic_index = 1);

}  // namespace skyrelay

#endif  // SKYRELAY_GEOMETRY_HPP
