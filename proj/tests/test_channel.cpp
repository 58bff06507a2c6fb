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
#include <vector>

#include "skyrelay/channel.hpp"

namespace skyrelay {
namespace {

constexpr double kPi = std::numbers::pi;
using cd = std::complex<double>;

PathLossParams unit_loss() {
  PathLossParams p;
  p.reference_loss_db = 0.0;
  return p;
}

TEST(SteeringVector, BroadsideIsAllOnes) {
  const ArrayGeometry g{3, 4, 0.5};
  const Eigen::VectorXcd a = steering_vector(g, 0.0, 1.234);
  ASSERT_EQ(a.size(), 12);
  for (Eigen::Index i = 0; i < a.size(); ++i) EXPECT_NEAR(std::abs(a(i) - cd(1, 0)), 0.0, 1e-15);
}

TEST(SteeringVector, SingleElementIsOne) {
  const Eigen::VectorXcd a = steering_vector({1, 1, 0.5}, 0.7, -2.0);
  ASSERT_EQ(a.size(), 1);
  EXPECT_EQ(a(0), cd(1, 0));
}

TEST(SteeringVector, TwoElementEndfire) {
  // sin(pi/2) cos(0) = 1: phase step of pi per element.
  const Eigen::VectorXcd a = steering_vector({2, 1, 0.5}, kPi / 2, 0.0);
  EXPECT_NEAR(std::abs(a(0) - cd(1, 0)), 0.0, 1e-15);
  EXPECT_NEAR(std::abs(a(1) - std::exp(cd(0, -kPi))), 0.0, 1e-15);
}

TEST(SteeringVector, UnitModulusEverywhere) {
  Rng rng(4);
  const ArrayGeometry g{12, 12, 0.5};
  for (int i = 0; i < 200; ++i) {
    const Eigen::VectorXcd a = steering_vector(g, uniform(rng, 0, kPi), uniform(rng, -kPi, kPi));
    EXPECT_LT((a.cwiseAbs().array() - 1.0).abs().maxCoeff(), 1e-12);
  }
}

TEST(SteeringVector, SingleRowMatchesLinearArray) {
  const double theta = 0.9, phi = 0.4;
  const Eigen::VectorXcd a = steering_vector({6, 1, 0.5}, theta, phi);
  for (int i = 0; i < 6; ++i) {
    const cd expect = std::exp(cd(0, -2 * kPi * 0.5 * i * std::sin(theta) * std::cos(phi)));
    EXPECT_NEAR(std::abs(a(i) - expect), 0.0, 1e-13);
  }
}

TEST(SteeringVector, KroneckerOfAxisResponses) {
  const double theta = 1.1, phi = 2.3;
  const ArrayGeometry g{3, 5, 0.5};
  const Eigen::VectorXcd a = steering_vector(g, theta, phi);
  Eigen::VectorXcd ax(3), ay(5);
  for (int i = 0; i < 3; ++i) ax(i) = std::exp(cd(0, -kPi * i * std::sin(theta) * std::cos(phi)));
  for (int i = 0; i < 5; ++i) ay(i) = std::exp(cd(0, -kPi * i * std::sin(theta) * std::sin(phi)));
  for (int ix = 0; ix < 3; ++ix)
    for (int iy = 0; iy < 5; ++iy) EXPECT_NEAR(std::abs(a(ix * 5 + iy) - ax(ix) * ay(iy)), 0.0, 1e-13);
}

TEST(PathAmplitude, VarianceIsOneOverPathCount) {
  Rng rng(21);
  const int n = 100000;
  double sum = 0.0, sum_sq = 0.0;
  for (int i = 0; i < n; ++i) {
    const double p = std::norm(path_amplitude(1.0, unit_loss(), rng, 10));
    sum += p;
    sum_sq += p * p;
  }
  const double mean = sum / n;
  const double sd = std::sqrt(sum_sq / n - mean * mean);
  EXPECT_NEAR(mean, 0.1, 3 * sd / std::sqrt(n));
}

TEST(PathAmplitude, DoublingDistanceScalesPowerByTwoToMinusTwoEta) {
  // Same random stream at both distances, so the ratio is exact per draw
  // and also holds for the sample means.
  const PathLossParams p;
  Rng a(5), b(5);
  double near = 0.0, far = 0.0;
  for (int i = 0; i < 100000; ++i) {
    near += std::norm(path_amplitude(20.0, p, a, 10));
    far += std::norm(path_amplitude(40.0, p, b, 10));
  }
  EXPECT_NEAR(far / near, std::pow(2.0, -2 * p.exponent), 1e-12);
}

TEST(PathAmplitude, IndependentStreamsRatio) {
  const PathLossParams p;
  Rng a(5), b(6);
  const int n = 100000;
  double near = 0.0, far = 0.0;
  for (int i = 0; i < n; ++i) {
    near += std::norm(path_amplitude(20.0, p, a, 10));
    far += std::norm(path_amplitude(40.0, p, b, 10));
  }
  // Each mean is exponential-distributed with relative sd 1/sqrt(n).
  EXPECT_NEAR((far / near) / std::pow(2.0, -2 * p.exponent), 1.0, 5 * std::sqrt(2.0 / n));
}

TEST(PathAmplitude, ReferenceLossIsAmplitudeFactor) {
  PathLossParams p = unit_loss();
  p.reference_loss_db = 20.0;
  EXPECT_NEAR(p.reference_amplitude(), 0.1, 1e-15);
  Rng a(9), b(9);
  const cd with = path_amplitude(1.0, p, a, 1);
  const cd without = path_amplitude(1.0, unit_loss(), b, 1);
  EXPECT_NEAR(std::abs(with - 0.1 * without), 0.0, 1e-15);
}

TEST(PathAmplitude, RejectsNonPositiveDistance) {
  Rng rng(1);
  EXPECT_THROW(path_amplitude(0.0, unit_loss(), rng, 1), std::invalid_argument);
  EXPECT_THROW(path_amplitude(1.0, unit_loss(), rng, 0), std::invalid_argument);
}

ClusterAngleSpec fixed_cluster(double el, double az) {
  ClusterAngleSpec c;
  c.mean_eaod = c.mean_eaoa = el;
  c.mean_aaod = c.mean_aaoa = az;
  return c;
}

TEST(GenerateH1, SinglePathIsRankOneOuterProduct) {
  const ArrayGeometry bs{4, 3, 0.5}, uav{2, 5, 0.5};
  const ClusterAngleSpec c = fixed_cluster(0.8, 1.9);
  Rng rng(12);
  const std::vector<ClusterAngleSpec> clusters{c};
  const Link1Draw d = draw_h1(bs, uav, clusters, 30.0, PathLossParams{}, 1, rng);
  ASSERT_EQ(d.h1.rows(), 10);
  ASSERT_EQ(d.h1.cols(), 12);
  const Eigen::MatrixXcd expect =
      d.gains(0) * steering_vector(uav, 0.8, 1.9) * steering_vector(bs, 0.8, 1.9).transpose();
  EXPECT_LT((d.h1 - expect).norm(), 1e-12 * expect.norm());
  Eigen::JacobiSVD<Eigen::MatrixXcd> svd(d.h1);
  EXPECT_LT(svd.singularValues()(1), 1e-10 * svd.singularValues()(0));
}

TEST(GenerateH1, FullSizeShape) {
  Rng rng(1);
  ClusterAngleSpec c = fixed_cluster(deg2rad(60), deg2rad(120));
  c.spread_azimuth = c.spread_elevation = deg2rad(10);
  const Eigen::MatrixXcd h1 = generate_h1({12, 12, 0.5}, {12, 12, 0.5}, c, 71.4, PathLossParams{}, 10, 1, rng);
  EXPECT_EQ(h1.rows(), 144);
  EXPECT_EQ(h1.cols(), 144);
  EXPECT_TRUE(h1.allFinite());
}

TEST(GenerateH1, FrobeniusPowerMatchesClosedForm) {
  // E||H1||_F^2 = tau^(-2 eta) 10^(-alpha/10) N_r N_T because every path
  // contributes |z|^2 N_r N_T and the path powers sum to one on average.
  const ArrayGeometry bs{3, 3, 0.5}, uav{2, 2, 0.5};
  ClusterAngleSpec c = fixed_cluster(1.0, 0.5);
  c.spread_azimuth = c.spread_elevation = 0.2;
  const PathLossParams p;
  const double tau = 40.0;
  Rng rng(31);
  const int n = 4000;
  double sum = 0.0, sum_sq = 0.0;
  for (int i = 0; i < n; ++i) {
    const double f = generate_h1(bs, uav, c, tau, p, 10, 1, rng).squaredNorm();
    sum += f;
    sum_sq += f * f;
  }
  const double expect = std::pow(tau, -2 * p.exponent) * std::pow(10.0, -p.reference_loss_db / 10) * 4 * 9;
  const double mean = sum / n;
  const double se = std::sqrt((sum_sq / n - mean * mean) / n);
  EXPECT_NEAR(mean, expect, 4 * se);
}

TEST(GenerateH1, AnglesStayInsideTheirSupport) {
  ClusterAngleSpec c = fixed_cluster(1.0, 2.0);
  c.spread_elevation = 0.1;
  c.spread_azimuth = 0.3;
  const std::vector<ClusterAngleSpec> clusters{c, fixed_cluster(0.5, -1.0)};
  Rng rng(2);
  for (int i = 0; i < 300; ++i) {
    const Link1Draw d = draw_h1({2, 2, 0.5}, {2, 2, 0.5}, clusters, 10.0, PathLossParams{}, 10, rng);
    for (int l = 0; l < 5; ++l) {
      EXPECT_LE(std::abs(d.angles[l].departure.elevation - 1.0), 0.1);
      EXPECT_LE(std::abs(d.angles[l].departure.azimuth - 2.0), 0.3);
      EXPECT_LE(std::abs(d.angles[l].arrival.azimuth - 2.0), 0.3);
    }
    for (int l = 5; l < 10; ++l) {
      EXPECT_EQ(d.angles[l].departure.elevation, 0.5);
      EXPECT_EQ(d.angles[l].arrival.azimuth, -1.0);
    }
  }
}

TEST(GenerateH1, PathCountMustSplitAcrossClusters) {
  Rng rng(1);
  const std::vector<ClusterAngleSpec> clusters(3, fixed_cluster(1, 1));
  EXPECT_THROW(draw_h1({2, 2, 0.5}, {2, 2, 0.5}, clusters, 10.0, PathLossParams{}, 10, rng),
               std::invalid_argument);
}

TEST(GenerateH2, SinglePathRowsFollowSteeringVectors) {
  const ArrayGeometry uav{3, 3, 0.5};
  const std::vector<ClusterAngleSpec> users{fixed_cluster(0.6, 0.4), fixed_cluster(1.2, -2.0)};
  const std::vector<double> dist{20.0, 35.0};
  Rng rng(3);
  const Link2Draw d = draw_h2(uav, users, dist, PathLossParams{}, 1, rng);
  ASSERT_EQ(d.h2.rows(), 2);
  ASSERT_EQ(d.h2.cols(), 9);
  for (int k = 0; k < 2; ++k) {
    const Eigen::RowVectorXcd expect =
        d.gains(k, 0) * steering_vector(uav, users[k].mean_eaod, users[k].mean_aaod).transpose();
    EXPECT_LT((d.h2.row(k) - expect).norm(), 1e-14);
  }
}

TEST(GenerateH2, FullSizeShape) {
  Rng rng(1);
  const std::vector<ClusterAngleSpec> users(4, fixed_cluster(1.0, 0.3));
  const std::vector<double> dist{30, 31, 32, 33};
  const Eigen::MatrixXcd h2 = generate_h2({12, 12, 0.5}, users, dist, PathLossParams{}, 10, rng);
  EXPECT_EQ(h2.rows(), 4);
  EXPECT_EQ(h2.cols(), 144);
  EXPECT_TRUE(h2.allFinite());
}

TEST(GenerateH2, HalvingDistanceScalesRowPower) {
  const ArrayGeometry uav{2, 2, 0.5};
  ClusterAngleSpec u = fixed_cluster(1.0, 0.3);
  u.spread_azimuth = 0.2;
  const std::vector<ClusterAngleSpec> users{u};
  const PathLossParams p;
  Rng a(8), b(8);
  double far = 0.0, near = 0.0;
  for (int i = 0; i < 2000; ++i) {
    far += generate_h2(uav, users, std::vector<double>{50.0}, p, 4, a).squaredNorm();
    near += generate_h2(uav, users, std::vector<double>{25.0}, p, 4, b).squaredNorm();
  }
  EXPECT_NEAR(near / far, std::pow(2.0, 2 * p.exponent), 1e-9 * std::pow(2.0, 2 * p.exponent));
}

TEST(GenerateH2, RejectsMismatchedInputs) {
  Rng rng(1);
  const std::vector<ClusterAngleSpec> users(2, fixed_cluster(1, 1));
  EXPECT_THROW(draw_h2({2, 2, 0.5}, users, std::vector<double>{10.0}, PathLossParams{}, 1, rng),
               std::invalid_argument);
  EXPECT_THROW(draw_h2({2, 2, 0.5}, users, std::vector<double>{10.0, -1.0}, PathLossParams{}, 1, rng),
               std::invalid_argument);
}

TEST(ChannelConfig, TableGroupMeans) {
  const ChannelConfig c;
  EXPECT_NEAR(c.link2_group_mean(0).azimuth, deg2rad(21), 1e-15);
  EXPECT_NEAR(c.link2_group_mean(2).azimuth, deg2rad(261), 1e-15);
  EXPECT_NEAR(c.link2_group_mean(1).elevation, deg2rad(60), 1e-15);
}

TEST(ChannelConfig, ValidationAndJson) {
  ChannelConfig c;
  EXPECT_NO_THROW(c.validate());
  c.num_clusters_link1 = 3;
  EXPECT_THROW(c.validate(), std::invalid_argument);
  c.num_clusters_link1 = 2;
  c.angle_mode = AngleMode::geometric;
  const nlohmann::json j = c;
  EXPECT_EQ(j.at("angle_mode"), "geometric");
  EXPECT_EQ(nlohmann::json(j.get<ChannelConfig>()), j);
  ArrayGeometry g{0, 3, 0.5};
  EXPECT_THROW(g.validate(), std::invalid_argument);
}

}  // namespace
}  // namespace skyrelay
