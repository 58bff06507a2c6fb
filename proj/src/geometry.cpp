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

#include "skyrelay/geometry.hpp"

#include <cmath>
#include <stdexcept>

namespace skyrelay {

std::string to_string(DistributionKind kind) {
  switch (kind) {
    case DistributionKind::static_narrow:
      return "static_narrow";
    case DistributionKind::static_wide:
      return "static_wide";
    case DistributionKind::dynamic_sequence:
      return "dynamic_sequence";
    case DistributionKind::explicit_ranges:
      return "explicit";
  }
  return "unknown";
}

DistributionKind distribution_kind_from_string(const std::string& name) {
  if (name == "static_narrow") return DistributionKind::static_narrow;
  if (name == "static_wide") return DistributionKind::static_wide;
  if (name == "dynamic_sequence") return DistributionKind::dynamic_sequence;
  if (name == "explicit") return DistributionKind::explicit_ranges;
  throw std::invalid_argument("unknown distribution_kind '" + name +
                              "' (expected static_narrow, static_wide, "
                              "dynamic_sequence or explicit)");
}

namespace {

bool finite(const Position3D& p) {
  return std::isfinite(p.x) && std::isfinite(p.y) && std::isfinite(p.z);
}

void check_position(const Position3D& p, const char* what) {
  if (!finite(p) || p.z < 0.0)
    throw std::invalid_argument(std::string(what) + " must be finite with z >= 0");
}

void check_area(const AreaBounds& b, const char* what) {
  if (!(b.x_min < b.x_max) || !(b.y_min < b.y_max))
    throw std::invalid_argument(std::string(what) + " requires x_min < x_max and y_min < y_max");
}

bool inside(const AreaBounds& inner, const AreaBounds& outer) {
  return inner.x_min >= outer.x_min && inner.x_max <= outer.x_max &&
         inner.y_min >= outer.y_min && inner.y_max <= outer.y_max;
}

}  // namespace

void ScenarioConfig::validate() const {
  check_position(bs_position, "bs_position");
  check_position(uav_initial, "uav_initial");
  check_area(bounds, "bounds");
  if (!(uav_height > 0.0)) throw std::invalid_argument("uav_height must be positive");
  if (uav_initial.z != uav_height)
    throw std::invalid_argument("uav_initial.z must equal uav_height (fixed-height deployment)");
  if (!bounds.contains(uav_initial.x, uav_initial.y))
    throw std::invalid_argument("uav_initial lies outside bounds");
  if (num_users < 1 || num_groups < 1 || users_per_group < 1)
    throw std::invalid_argument("user and group counts must be positive");
  if (num_users != num_groups * users_per_group)
    throw std::invalid_argument("num_users must equal num_groups * users_per_group");

  switch (distribution_kind) {
    case DistributionKind::static_narrow:
    case DistributionKind::static_wide:
      if (!inside(static_user_area(distribution_kind), bounds))
        throw std::invalid_argument("static user area exceeds bounds");
      break;
    case DistributionKind::dynamic_sequence:
      for (int l = 1; l <= kDynamicDistributions; ++l)
        if (!inside(dynamic_user_area(l), bounds))
          throw std::invalid_argument("dynamic user area exceeds bounds");
      break;
    case DistributionKind::explicit_ranges:
      if (explicit_user_ranges.empty())
        throw std::invalid_argument("explicit distribution needs explicit_user_ranges");
      for (const auto& r : explicit_user_ranges) {
        check_area(r, "explicit_user_ranges entry");
        if (!inside(r, bounds))
          throw std::invalid_argument("explicit user range exceeds bounds");
      }
      break;
  }
}

void to_json(nlohmann::json& j, const Position3D& p) { j = {{"x", p.x}, {"y", p.y}, {"z", p.z}}; }

void from_json(const nlohmann::json& j, Position3D& p) {
  j.at("x").get_to(p.x);
  j.at("y").get_to(p.y);
  j.at("z").get_to(p.z);
}

void to_json(nlohmann::json& j, const AreaBounds& b) {
  j = {{"x_min", b.x_min}, {"x_max", b.x_max}, {"y_min", b.y_min}, {"y_max", b.y_max}};
}

void from_json(const nlohmann::json& j, AreaBounds& b) {
  j.at("x_min").get_to(b.x_min);
  j.at("x_max").get_to(b.x_max);
  j.at("y_min").get_to(b.y_min);
  j.at("y_max").get_to(b.y_max);
}

void to_json(nlohmann::json& j, const ScenarioConfig& cfg) {
  j = {{"bs_position", cfg.bs_position},
       {"uav_initial", cfg.uav_initial},
       {"uav_height", cfg.uav_height},
       {"bounds", cfg.bounds},
       {"num_users", cfg.num_users},
       {"num_groups", cfg.num_groups},
       {"users_per_group", cfg.users_per_group},
       {"distribution_kind", to_string(cfg.distribution_kind)},
       {"explicit_user_ranges", cfg.explicit_user_ranges},
       {"rng_seed", cfg.rng_seed}};
}

void from_json(const nlohmann::json& j, ScenarioConfig& cfg) {
  ScenarioConfig d;
  cfg.bs_position = j.value("bs_position", d.bs_position);
  cfg.uav_initial = j.value("uav_initial", d.uav_initial);
  cfg.uav_height = j.value("uav_height", d.uav_height);
  cfg.bounds = j.value("bounds", d.bounds);
  cfg.num_users = j.value("num_users", d.num_users);
  cfg.num_groups = j.value("num_groups", d.num_groups);
  cfg.users_per_group = j.value("users_per_group", d.users_per_group);
  cfg.distribution_kind =
      distribution_kind_from_string(j.value("distribution_kind", to_string(d.distribution_kind)));
  cfg.explicit_user_ranges = j.value("explicit_user_ranges", d.explicit_user_ranges);
  cfg.rng_seed = j.value("rng_seed", d.rng_seed);
}

double distance_3d(const Position3D& p, const Position3D& q) {
  return std::hypot(p.x - q.x, p.y - q.y, p.z - q.z);
}

Angles geometric_angles(const Position3D& from, const Position3D& to) {
  const double dx = to.x - from.x;
  const double dy = to.y - from.y;
  const double dz = to.z - from.z;
  const double horizontal = std::hypot(dx, dy);
  if (horizontal == 0.0 && dz == 0.0)
    throw std::invalid_argument("geometric_angles: coincident points");
  Angles a;
  a.elevation = std::atan2(horizontal, -dz);
  a.azimuth = horizontal == 0.0 ? 0.0 : std::atan2(dy, dx);
  return a;
}

AreaBounds static_user_area(DistributionKind kind) {
  switch (kind) {
    case DistributionKind::static_narrow:
      return {90.0, 100.0, 90.0, 100.0};
    case DistributionKind::static_wide:
      return {50.0, 100.0, 50.0, 100.0};
    default:
      throw std::invalid_argument("static_user_area: not a static distribution");
  }
}

AreaBounds dynamic_user_area(int index) {
  switch (index) {
    case 1: return {60.0, 70.0, 60.0, 70.0};
    case 2: return {60.0, 70.0, 70.0, 80.0};
    case 3: return {70.0, 80.0, 80.0, 90.0};
    case 4: return {80.0, 90.0, 80.0, 90.0};
    case 5: return {80.0, 90.0, 70.0, 80.0};
    case 6: return {80.0, 90.0, 60.0, 70.0};
    default:
      throw std::out_of_range("dynamic distribution index must be in 1..6, got " +
                              std::to_string(index));
  }
}

std::vector<Position3D> sample_in_area(const AreaBounds& area, int count, Rng& rng) {
  std::vector<Position3D> users;
  users.reserve(static_cast<std::size_t>(count));
  for (int k = 0; k < count; ++k) {
    const double x = uniform(rng, area.x_min, area.x_max);
    const double y = uniform(rng, area.y_min, area.y_max);
    users.push_back({x, y, 0.0});
  }
  return users;
}

std::vector<Position3D> sample_static_users(const ScenarioConfig& cfg, Rng& rng) {
  return sample_in_area(static_user_area(cfg.distribution_kind), cfg.num_users, rng);
}

std::vector<Position3D> dynamic_distribution(int index, int num_users, Rng& rng) {
  return sample_in_area(dynamic_user_area(index), num_users, rng);
}

std::vector<Position3D> sample_users(const ScenarioConfig& cfg, Rng& rng, int dynamic_index) {
  switch (cfg.distribution_kind) {
    case DistributionKind::static_narrow:
    case DistributionKind::static_wide:
      return sample_static_users(cfg, rng);
    case DistributionKind::dynamic_sequence:
      return dynamic_distribution(dynamic_index, cfg.num_users, rng);
    case DistributionKind::explicit_ranges: {
      std::vector<Position3D> users;
      const auto& ranges = cfg.explicit_user_ranges;
      for (int k = 0; k < cfg.num_users; ++k) {
        const auto& r = ranges[static_cast<std::size_t>(k) % ranges.size()];
        users.push_back({uniform(rng, r.x_min, r.x_max), uniform(rng, r.y_min, r.y_max), 0.0});
      }
      return users;
    }
  }
  return {};
}

std::vector<Position3D> scenario_users(const ScenarioConfig& cfg, int dynamic_index) {
  Rng rng(derive_seed(cfg.rng_seed, 0x75736572 /* "user" */, static_cast<std::uint64_t>(dynamic_index)));
  return sample_users(cfg, rng, dynamic_index);
}

}  // namespace skyrelay
