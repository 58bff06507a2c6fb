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

#include "skyrelay/beamforming.hpp"
#include "skyrelay/rates.hpp"

namespace skyrelay {
namespace {

using cd = std::complex<double>;

Eigen::MatrixXcd random_matrix(Eigen::Index rows, Eigen::Index cols, Rng& rng) {
  Eigen::MatrixXcd m(rows, cols);
  for (Eigen::Index i = 0; i < m.size(); ++i) m.data()[i] = complex_gaussian(rng, 1.0);
  return m;
}

double max_modulus_error(const Eigen::MatrixXcd& f, double expected) {
  return (f.cwiseAbs().array() - expected).abs().maxCoeff();
}

TEST(RfStage, BroadsideSingleColumn) {
  const ArrayGeometry g{4, 4, 0.5};
  const std::vector<Angles> dirs{{0.0, 0.3}};
  const Eigen::MatrixXcd f = rf_stage(g, dirs, 1);
  ASSERT_EQ(f.rows(), 16);
  ASSERT_EQ(f.cols(), 1);
  for (Eigen::Index i = 0; i < 16; ++i) EXPECT_NEAR(std::abs(f(i, 0) - cd(0.25, 0)), 0.0, 1e-15);
}

TEST(RfStage, FullGainAtDesignAngle) {
  const ArrayGeometry g{12, 12, 0.5};
  const Angles d{deg2rad(60), deg2rad(21)};
  const std::vector<Angles> dirs{d};
  const Eigen::MatrixXcd f = rf_stage(g, dirs, 1);
  const cd gain = (steering_vector(g, d.elevation, d.azimuth).transpose() * f)(0, 0);
  EXPECT_NEAR(std::abs(gain), 12.0, 1e-12);
}

TEST(RfStage, SeparatedGroupsBarelyLeak) {
  const ArrayGeometry g{12, 12, 0.5};
  const std::vector<Angles> dirs{{deg2rad(60), deg2rad(21)}, {deg2rad(60), deg2rad(141)}};
  const Eigen::MatrixXcd f = rf_stage(g, dirs, 2);
  const Eigen::VectorXcd a1 = steering_vector(g, dirs[0].elevation, dirs[0].azimuth);
  const double cross = std::abs((a1.transpose() * f.col(1))(0, 0));
  EXPECT_LT(cross, 0.1 * 12.0);
}

TEST(RfStage, ConstantModulusForEveryArray) {
  Rng rng(2);
  for (const ArrayGeometry g : {ArrayGeometry{12, 12, 0.5}, ArrayGeometry{4, 4, 0.5}, ArrayGeometry{3, 7, 0.4}}) {
    std::vector<Angles> dirs;
    for (int j = 0; j < 3; ++j) dirs.push_back({uniform(rng, 0, 1.5), uniform(rng, -3, 3)});
    const Eigen::MatrixXcd f = rf_stage(g, dirs, 5);
    EXPECT_LT(max_modulus_error(f, 1.0 / std::sqrt(g.size())), 1e-12);
    // Directions are reused cyclically beyond their count.
    EXPECT_EQ(f.col(3), f.col(0));
  }
  EXPECT_THROW(rf_stage({2, 2, 0.5}, std::vector<Angles>{}, 1), std::invalid_argument);
}

TEST(SupportDirections, SingleBeamAtMean) {
  const auto d = support_directions(Angles{1.0, 2.0}, 0.3, 1);
  ASSERT_EQ(d.size(), 1u);
  EXPECT_EQ(d[0].azimuth, 2.0);
  EXPECT_EQ(d[0].elevation, 1.0);
}

TEST(SupportDirections, MidpointsOfEqualSubIntervals) {
  const auto d = support_directions(Angles{1.0, 0.0}, 0.3, 3);
  ASSERT_EQ(d.size(), 3u);
  EXPECT_NEAR(d[0].azimuth, -0.2, 1e-15);
  EXPECT_NEAR(d[1].azimuth, 0.0, 1e-15);
  EXPECT_NEAR(d[2].azimuth, 0.2, 1e-15);
}

TEST(SupportDirections, RoundRobinAcrossClusters) {
  const std::vector<Angles> means{{1.0, 0.0}, {1.0, 2.0}};
  const auto d = support_directions(means, 0.4, 3);
  ASSERT_EQ(d.size(), 3u);
  // Cluster 0 gets two beams, cluster 1 one; order alternates.
  EXPECT_NEAR(d[0].azimuth, -0.2, 1e-15);
  EXPECT_NEAR(d[1].azimuth, 2.0, 1e-15);
  EXPECT_NEAR(d[2].azimuth, 0.2, 1e-15);
}

TEST(EffectiveChannel, ScaledIdentityStages) {
  Rng rng(3);
  const int n = 6;
  const Eigen::MatrixXcd h1 = random_matrix(n, n, rng);
  const Eigen::MatrixXcd f = Eigen::MatrixXcd::Identity(n, n) / std::sqrt(double(n));
  EXPECT_LT((effective_channel_link1(h1, f, f) - h1 / double(n)).norm(), 1e-14);
}

TEST(EffectiveChannel, ShapeAndAssociativity) {
  Rng rng(4);
  const Eigen::MatrixXcd h1 = random_matrix(144, 144, rng);
  const Eigen::MatrixXcd f_b = random_matrix(144, 4, rng);
  const Eigen::MatrixXcd f_ur = random_matrix(4, 144, rng);
  const Eigen::MatrixXcd h = effective_channel_link1(h1, f_b, f_ur);
  EXPECT_EQ(h.rows(), 4);
  EXPECT_EQ(h.cols(), 4);
  const Eigen::MatrixXcd left = (f_ur * h1) * f_b;
  const Eigen::MatrixXcd right = f_ur * (h1 * f_b);
  EXPECT_LT((left - right).norm(), 1e-10 * left.norm());
  EXPECT_THROW(effective_channel_link1(h1, f_ur, f_b), std::invalid_argument);
}

TEST(Link1Baseband, DiagonalChannelSelectsDominantCoordinates) {
  Eigen::MatrixXcd h = Eigen::MatrixXcd::Zero(3, 3);
  h(0, 0) = 3;
  h(1, 1) = 2;
  h(2, 2) = 1;
  const Link1Baseband bb = bb_stages_link1(h, 2);
  ASSERT_EQ(bb.b_b.rows(), 3);
  ASSERT_EQ(bb.b_b.cols(), 2);
  EXPECT_NEAR(std::abs(bb.b_b(0, 0)), 1.0, 1e-12);
  EXPECT_NEAR(std::abs(bb.b_b(1, 1)), 1.0, 1e-12);
  EXPECT_NEAR(std::abs(bb.b_b(2, 0)) + std::abs(bb.b_b(2, 1)), 0.0, 1e-12);
  const Eigen::MatrixXcd d = bb.b_ur * h * bb.b_b;
  EXPECT_NEAR(d(0, 0).real(), 3.0, 1e-12);
  EXPECT_NEAR(d(1, 1).real(), 2.0, 1e-12);
  EXPECT_NEAR(std::abs(d(0, 1)) + std::abs(d(1, 0)), 0.0, 1e-12);
}

TEST(Link1Baseband, DiagonalizesRandomChannel) {
  Rng rng(5);
  const Eigen::MatrixXcd h = random_matrix(5, 4, rng);
  const Link1Baseband bb = bb_stages_link1(h, 3);
  const Eigen::MatrixXcd d = bb.b_ur * h * bb.b_b;
  const Eigen::VectorXd s = Eigen::BDCSVD<Eigen::MatrixXcd>(h).singularValues();
  for (int i = 0; i < 3; ++i)
    for (int j = 0; j < 3; ++j) EXPECT_NEAR(std::abs(d(i, j) - (i == j ? cd(s(i), 0) : cd(0, 0))), 0.0, 1e-12);
}

TEST(Link1Baseband, RankDeficientChannelThrows) {
  Rng rng(6);
  const Eigen::VectorXcd u = random_matrix(4, 1, rng), v = random_matrix(4, 1, rng);
  const Eigen::MatrixXcd h = u * v.adjoint();
  EXPECT_NO_THROW(bb_stages_link1(h, 1));
  EXPECT_THROW(bb_stages_link1(h, 2), std::domain_error);
  EXPECT_THROW(bb_stages_link1(h, 5), std::invalid_argument);
}

TEST(Link1Baseband, RankOneRateMatchesScalarFormula) {
  Rng rng(7);
  const ArrayGeometry g{3, 3, 0.5};
  const Eigen::VectorXcd u = random_matrix(9, 1, rng), v = random_matrix(9, 1, rng);
  const Eigen::MatrixXcd h1 = u * v.adjoint() * 1e-6;
  const std::vector<Angles> dirs{{0.4, 0.1}, {0.9, 1.7}};
  BeamformerSet set;
  set.f_b = rf_stage(g, dirs, 2);
  set.f_ur = rf_stage(g, dirs, 2).transpose();
  const Eigen::MatrixXcd h_eff = effective_channel_link1(h1, set.f_b, set.f_ur);
  const Link1Baseband bb = bb_stages_link1(h_eff, 1);
  const double p_b = 2.5, noise = 1e-13;
  set.b_b = scale_to_power(set.f_b, bb.b_b, p_b);
  set.b_ur = bb.b_ur;

  // Independent evaluation: sigma_1 of H_eff, the transmit power lost in
  // F_b and the noise gain of the combiner.
  Eigen::BDCSVD<Eigen::MatrixXcd> svd(h_eff, Eigen::ComputeThinU | Eigen::ComputeThinV);
  const double s1 = svd.singularValues()(0);
  const Eigen::VectorXcd v1 = svd.matrixV().col(0), u1 = svd.matrixU().col(0);
  const double tx = (set.f_b * v1).squaredNorm();
  const double rx = (set.f_ur.adjoint() * u1).squaredNorm();
  const double expect = std::log2(1.0 + s1 * s1 * p_b / (tx * noise * rx));
  EXPECT_NEAR(rate_link1(set, h1, noise), expect, 1e-10 * expect);
}

TEST(Link1Baseband, IdentityStagesGiveEqualPowerModeRate) {
  Rng rng(8);
  const int n = 6, k = 3;
  const Eigen::MatrixXcd h1 = random_matrix(n, n, rng);
  BeamformerSet set;
  set.f_b = Eigen::MatrixXcd::Identity(n, n);
  set.f_ur = Eigen::MatrixXcd::Identity(n, n);
  const Link1Baseband bb = bb_stages_link1(h1, k);
  const double p_b = 3.0, noise = 0.2;
  set.b_b = scale_to_power(set.f_b, bb.b_b, p_b);
  set.b_ur = bb.b_ur;
  const Eigen::VectorXd s = Eigen::BDCSVD<Eigen::MatrixXcd>(h1).singularValues();
  double expect = 0.0;
  for (int i = 0; i < k; ++i) expect += std::log2(1.0 + s(i) * s(i) * p_b / (k * noise));
  EXPECT_NEAR(rate_link1(set, h1, noise), expect, 1e-6);
}

TEST(ScaleToPower, HitsTargetExactly) {
  Rng rng(9);
  const Eigen::MatrixXcd f = random_matrix(16, 4, rng);
  const Eigen::MatrixXcd b = random_matrix(4, 2, rng);
  for (double p : {1e-3, 1.0, 1e6}) {
    const Eigen::MatrixXcd scaled = scale_to_power(f, b, p);
    EXPECT_NEAR((f * scaled).squaredNorm(), p, 1e-9 * p);
  }
  EXPECT_THROW(scale_to_power(f, Eigen::MatrixXcd::Zero(4, 2), 1.0), std::domain_error);
}

TEST(Link2Baseband, SingleUserMatchedFilterAtFullPower) {
  Rng rng(10);
  const ArrayGeometry g{4, 4, 0.5};
  const std::vector<Angles> dirs{{0.5, 0.2}, {0.8, 1.2}, {0.3, -1.0}};
  const Eigen::MatrixXcd f_ut = rf_stage(g, dirs, 3);
  const Eigen::MatrixXcd h2 = random_matrix(1, 16, rng);
  const Eigen::MatrixXcd h_eff = h2 * f_ut;
  const Eigen::MatrixXcd b = bb_stage_link2(h_eff, f_ut, 2.0, 1e-3);
  ASSERT_EQ(b.rows(), 3);
  ASSERT_EQ(b.cols(), 1);
  const Eigen::VectorXcd mf = h_eff.adjoint();
  const double cosine = std::abs(mf.dot(b.col(0))) / (mf.norm() * b.norm());
  EXPECT_NEAR(cosine, 1.0, 1e-12);
  EXPECT_NEAR((f_ut * b).squaredNorm(), 2.0, 2e-9);
}

TEST(Link2Baseband, ExactZeroForcingDiagonalizes) {
  Rng rng(11);
  const Eigen::MatrixXcd f_ut = random_matrix(16, 4, rng);
  const Eigen::MatrixXcd h_eff = random_matrix(4, 4, rng);
  const Eigen::MatrixXcd b = bb_stage_link2(h_eff, f_ut, 1.0, 0.0);
  const Eigen::MatrixXcd g = h_eff * b;
  const double diag = g.diagonal().cwiseAbs().minCoeff();
  Eigen::MatrixXcd off = g;
  off.diagonal().setZero();
  EXPECT_LT(off.cwiseAbs().maxCoeff(), 1e-8 * diag);
  EXPECT_NEAR((f_ut * b).squaredNorm(), 1.0, 1e-9);
}

TEST(Link2Baseband, RegularizedPowerNormalization) {
  Rng rng(12);
  const Eigen::MatrixXcd f_ut = random_matrix(16, 4, rng) * 0.25;
  const Eigen::MatrixXcd h_eff = random_matrix(2, 4, rng) * 1e-5;
  for (double p : {0.1, 1.0, 1e6}) {
    const Eigen::MatrixXcd b = bb_stage_link2(h_eff, f_ut, p, 1e-12);
    EXPECT_NEAR((f_ut * b).squaredNorm(), p, 1e-9 * p);
  }
}

TEST(Link2Baseband, RejectsTooManyUsersOrRankDeficiency) {
  Rng rng(13);
  const Eigen::MatrixXcd f_ut = random_matrix(8, 2, rng);
  EXPECT_THROW(bb_stage_link2(random_matrix(3, 2, rng), f_ut, 1.0, 0.0), std::domain_error);
  Eigen::MatrixXcd dup = random_matrix(2, 2, rng);
  dup.row(1) = dup.row(0);
  EXPECT_THROW(bb_stage_link2(dup, f_ut, 1.0, 0.0), std::domain_error);
}

RelaySystem small_system(double power) {
  ScenarioConfig sc;
  sc.num_users = 2;
  sc.users_per_group = 2;
  ChannelConfig ch;
  ch.bs_array = ch.uav_rx_array = ch.uav_tx_array = {4, 4, 0.5};
  ch.num_paths_link1 = 4;
  ch.num_paths_link2 = 4;
  HbfConfig hbf{2, 2, power, power};
  return RelaySystem(sc, scenario_users(sc), ch, PathLossParams{}, hbf);
}

TEST(BeamformerSet, InvariantsHoldAfterEveryConstruction) {
  const RelaySystem sys = small_system(1e6);
  Rng rng(14);
  for (int i = 0; i < 20; ++i) {
    const LinkState st = sys.link_state(sys.uav_at(uniform(rng, 0, 100), uniform(rng, 0, 100)));
    const ChannelRealization ch = sys.draw_channel(st, rng);
    const BeamformerSet set = sys.beamformers(st, ch);
    EXPECT_LT(max_modulus_error(set.f_b, 0.25), 1e-12);
    EXPECT_LT(max_modulus_error(set.f_ur, 0.25), 1e-12);
    EXPECT_LT(max_modulus_error(set.f_ut, 0.25), 1e-12);
    EXPECT_NEAR((set.f_b * set.b_b).squaredNorm(), 1e6, 1e-9 * 1e6);
    EXPECT_NEAR((set.f_ut * set.b_ut).squaredNorm(), 1e6, 1e-9 * 1e6);
  }
}

TEST(BeamformerSet, RfStagesIgnoreFastFading) {
  const RelaySystem sys = small_system(1.0);
  const Position3D uav = sys.uav_at(40, 70);
  const LinkState before = sys.link_state(uav);
  Rng rng(15);
  const BeamformerSet a = sys.beamformers(before, sys.draw_channel(before, rng));
  const BeamformerSet b = sys.beamformers(before, sys.draw_channel(before, rng));
  const LinkState after = sys.link_state(uav);
  EXPECT_EQ(before.f_b, after.f_b);
  EXPECT_EQ(before.f_ur, after.f_ur);
  EXPECT_EQ(before.f_ut, after.f_ut);
  EXPECT_EQ(a.f_b, b.f_b);
  EXPECT_EQ(a.f_ut, b.f_ut);
  EXPECT_NE(a.b_ut, b.b_ut);
}

TEST(HbfConfig, RfChainBounds) {
  HbfConfig c{4, 4, 1.0, 1.0};
  EXPECT_NO_THROW(c.validate(4, 144, 144, 144));
  EXPECT_THROW(c.validate(5, 144, 144, 144), std::invalid_argument);
  EXPECT_THROW(c.validate(2, 3, 144, 144), std::invalid_argument);
  EXPECT_THROW(c.validate(2, 144, 144, 3), std::invalid_argument);
  c.uav_power_w = 0.0;
  EXPECT_THROW(c.validate(4, 144, 144, 144), std::invalid_argument);
}

}  // namespace
}  // namespace skyrelay
