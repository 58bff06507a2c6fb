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

#include <gtest/gtest.h>

#include <cmath>
#include <numbers>
#include <stdexcept>

#include "skyrelay/geometry.hpp"

namespace skyrelay {
namespace {

constexpr double kPi = std::numbers::pi;

bool inside(const AreaBounds& a, const Position3D& p) {
  return p.x >= a.x_min && p.x <= a.x_max && p.y >= a.y_min && p.y <= a.y_max;
}

TEST(Distance, AxisAlignedAndPythagorean) {
  EXPECT_DOUBLE_EQ(distance_3d({0, 0, 10}, {0, 0, 20}), 10.0);
  EXPECT_DOUBLE_EQ(distance_3d({0, 0, 0}, {3, 4, 0}), 5.0);
}

TEST(Distance, BaseStationToInitialHover) {
  // sqrt(50^2 + 50^2 + 10^2) = sqrt(5100)
  EXPECT_NEAR(distance_3d({0, 0, 10}, {50, 50, 20}), 71.4143, 1e-4);
  EXPECT_DOUBLE_EQ(distance_3d({0, 0, 10}, {50, 50, 20}), std::sqrt(5100.0));
}

TEST(Distance, TriangleInequalityOnRandomTriples) {
  Rng rng(11);
  for (int i = 0; i < 2000; ++i) {
    auto draw = [&] { return Position3D{uniform(rng, -100, 100), uniform(rng, -100, 100), uniform(rng, 0, 50)}; };
    const Position3D a = draw(), b = draw(), c = draw();
    EXPECT_LE(distance_3d(a, c), distance_3d(a, b) + distance_3d(b, c) + 1e-12);
    EXPECT_DOUBLE_EQ(distance_3d(a, b), distance_3d(b, a));
  }
}

TEST(GeometricAngles, StraightDownHasZeroElevationAndAzimuth) {
  const Angles a = geometric_angles({0, 0, 20}, {0, 0, 0});
  EXPECT_DOUBLE_EQ(a.elevation, 0.0);
  EXPECT_DOUBLE_EQ(a.azimuth, 0.0);
}

TEST(GeometricAngles, HorizontalAlongX) {
  const Angles a = geometric_angles({0, 0, 20}, {10, 0, 20});
  EXPECT_NEAR(a.elevation, kPi / 2, 1e-15);
  EXPECT_DOUBLE_EQ(a.azimuth, 0.0);
}

TEST(GeometricAngles, DiagonalAzimuth) {
  const Angles a = geometric_angles({0, 0, 20}, {10, 10, 10});
  EXPECT_NEAR(a.azimuth, kPi / 4, 1e-15);
  // Downward offset of 10 against a horizontal offset of 10*sqrt(2).
  EXPECT_NEAR(a.elevation, std::atan2(10 * std::sqrt(2.0), 10.0), 1e-15);
}

TEST(GeometricAngles, CoincidentPointsThrow) {
  EXPECT_THROW(geometric_angles({1, 2, 3}, {1, 2, 3}), std::invalid_argument);
}

TEST(StaticUsers, NarrowAndWideRectangles) {
  ScenarioConfig cfg;
  Rng rng(3);
  cfg.distribution_kind = DistributionKind::static_narrow;
  for (const auto& p : sample_static_users(cfg, rng)) {
    EXPECT_TRUE(p.x >= 90 && p.x <= 100 && p.y >= 90 && p.y <= 100);
    EXPECT_EQ(p.z, 0.0);
  }
  cfg.distribution_kind = DistributionKind::static_wide;
  const auto wide = sample_static_users(cfg, rng);
  ASSERT_EQ(wide.size(), 4u);
  for (const auto& p : wide) EXPECT_TRUE(p.x >= 50 && p.x <= 100 && p.y >= 50 && p.y <= 100);
}

TEST(StaticUsers, SameSeedSameUsers) {
  ScenarioConfig cfg;
  Rng a(99), b(99);
  EXPECT_EQ(sample_static_users(cfg, a), sample_static_users(cfg, b));
  EXPECT_EQ(scenario_users(cfg), scenario_users(cfg));
}

TEST(DynamicDistribution, NamedRectangles) {
  EXPECT_EQ(dynamic_user_area(1), (AreaBounds{60, 70, 60, 70}));
  EXPECT_EQ(dynamic_user_area(4), (AreaBounds{80, 90, 80, 90}));
  EXPECT_EQ(dynamic_user_area(6), (AreaBounds{80, 90, 60, 70}));
  EXPECT_THROW(dynamic_user_area(0), std::out_of_range);
  EXPECT_THROW(dynamic_user_area(7), std::out_of_range);
}

TEST(DynamicDistribution, SamplesStayInsideTheirRectangle) {
  Rng rng(5);
  for (int l = 1; l <= kDynamicDistributions; ++l) {
    const AreaBounds area = dynamic_user_area(l);
    for (int rep = 0; rep < 2500; ++rep)
      for (const auto& p : dynamic_distribution(l, 4, rng)) ASSERT_TRUE(inside(area, p)) << "l" << l;
  }
}

TEST(SampleInArea, PropertyOverManyDraws) {
  Rng rng(8);
  const AreaBounds area{12.5, 13.0, 40.0, 90.0};
  const auto pts = sample_in_area(area, 10000, rng);
  ASSERT_EQ(pts.size(), 10000u);
  for (const auto& p : pts) ASSERT_TRUE(inside(area, p));
}

TEST(ScenarioConfig, ValidationRejectsBrokenInvariants) {
  ScenarioConfig ok;
  EXPECT_NO_THROW(ok.validate());

  ScenarioConfig bad = ok;
  bad.num_users = 3;
  EXPECT_THROW(bad.validate(), std::invalid_argument);

  bad = ok;
  bad.bounds.x_max = bad.bounds.x_min;
  EXPECT_THROW(bad.validate(), std::invalid_argument);

  bad = ok;
  bad.uav_initial.x = 150;
  EXPECT_THROW(bad.validate(), std::invalid_argument);

  bad = ok;
  bad.bounds = {0, 80, 0, 80};  // narrow users at 90..100 fall outside
  EXPECT_THROW(bad.validate(), std::invalid_argument);

  bad = ok;
  bad.distribution_kind = DistributionKind::explicit_ranges;
  EXPECT_THROW(bad.validate(), std::invalid_argument);
  bad.explicit_user_ranges = {{10, 20, 10, 20}};
  EXPECT_NO_THROW(bad.validate());
}

TEST(ScenarioConfig, JsonRoundTrip) {
  ScenarioConfig cfg;
  cfg.distribution_kind = DistributionKind::explicit_ranges;
  cfg.explicit_user_ranges = {{1, 2, 3, 4}, {5, 6, 7, 8}};
  cfg.rng_seed = 77;
  const nlohmann::json j = cfg;
  const auto back = j.get<ScenarioConfig>();
  EXPECT_EQ(nlohmann::json(back), j);
  EXPECT_THROW(distribution_kind_from_string("diagonal"), std::invalid_argument);
}

TEST(ExplicitRanges, UsersCycleThroughRectangles) {
  ScenarioConfig cfg;
  cfg.distribution_kind = DistributionKind::explicit_ranges;
  cfg.explicit_user_ranges = {{0, 10, 0, 10}, {90, 100, 90, 100}};
  Rng rng(1);
  const auto users = sample_users(cfg, rng);
  ASSERT_EQ(users.size(), 4u);
  for (std::size_t k = 0; k < users.size(); ++k)
    EXPECT_TRUE(inside(cfg.explicit_user_ranges[k % 2], users[k]));
}

}  // namespace
}  // namespace skyrelay
