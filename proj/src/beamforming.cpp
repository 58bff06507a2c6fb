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

#include "skyrelay/beamforming.hpp"

#include <algorithm>
#include <cmath>
#include <sstream>
#include <stdexcept>

namespace skyrelay {

void HbfConfig::validate(int num_users, int n_bs, int n_uav_rx, int n_uav_tx) const {
  if (n_rf_bs < num_users || n_rf_bs > n_bs)
    throw std::invalid_argument("n_rf_bs must satisfy K <= N_RF_b <= N_T");
  if (n_rf_uav < num_users || n_rf_uav > std::min(n_uav_rx, n_uav_tx))
    throw std::invalid_argument("n_rf_uav must satisfy K <= N_RF_u <= min(N_r, N_t)");
  if (!(bs_power_w > 0.0) || !(uav_power_w > 0.0))
    throw std::invalid_argument("transmit powers must be positive");
}

void to_json(nlohmann::json& j, const HbfConfig& c) {
  j = {{"n_rf_bs", c.n_rf_bs},
       {"n_rf_uav", c.n_rf_uav},
       {"bs_power_w", c.bs_power_w},
       {"uav_power_w", c.uav_power_w}};
}

void from_json(const nlohmann::json& j, HbfConfig& c) {
  HbfConfig d;
  c.n_rf_bs = j.value("n_rf_bs", d.n_rf_bs);
  c.n_rf_uav = j.value("n_rf_uav", d.n_rf_uav);
  c.bs_power_w = j.value("bs_power_w", d.bs_power_w);
  c.uav_power_w = j.value("uav_power_w", d.uav_power_w);
}

nlohmann::json to_json(const BeamformerSet& set) {
  return {{"f_b", complex_matrix_json(set.f_b)},   {"b_b", complex_matrix_json(set.b_b)},
          {"f_ur", complex_matrix_json(set.f_ur)}, {"b_ur", complex_matrix_json(set.b_ur)},
          {"f_ut", complex_matrix_json(set.f_ut)}, {"b_ut", complex_matrix_json(set.b_ut)}};
}

Eigen::MatrixXcd rf_stage(const ArrayGeometry& geom, std::span<const Angles> directions, int n_rf) {
  if (n_rf < 1) throw std::invalid_argument("rf_stage: n_rf must be >= 1");
  if (directions.empty()) throw std::invalid_argument("rf_stage: need at least one direction");
  const double scale = 1.0 / std::sqrt(static_cast<double>(geom.size()));
  Eigen::MatrixXcd f(geom.size(), n_rf);
  for (int j = 0; j < n_rf; ++j) {
    const Angles& d = directions[static_cast<std::size_t>(j) % directions.size()];
    f.col(j) = steering_vector(geom, d.elevation, d.azimuth).conjugate() * scale;
  }
  return f;
}

std::vector<Angles> support_directions(const Angles& mean, double spread_azimuth, int count) {
  std::vector<Angles> out;
  for (int j = 0; j < count; ++j) {
    // Midpoints of `count` equal sub-intervals of the support.
    const double offset = spread_azimuth * (2.0 * j + 1.0 - count) / count;
    out.push_back({mean.elevation, mean.azimuth + offset});
  }
  return out;
}

std::vector<Angles> support_directions(std::span<const Angles> means, double spread_azimuth,
                                       int n_rf) {
  if (means.empty()) throw std::invalid_argument("support_directions: no cluster means");
  const int clusters = static_cast<int>(means.size());
  std::vector<std::vector<Angles>> per_cluster(means.size());
  for (int c = 0; c < clusters; ++c) {
    const int share = n_rf / clusters + (c < n_rf % clusters ? 1 : 0);
    per_cluster[static_cast<std::size_t>(c)] =
        support_directions(means[static_cast<std::size_t>(c)], spread_azimuth, share);
  }
  std::vector<Angles> out;
  for (int j = 0; j < n_rf; ++j) {
    const auto c = static_cast<std::size_t>(j % clusters);
    out.push_back(per_cluster[c][static_cast<std::size_t>(j / clusters)]);
  }
  return out;
}

Eigen::MatrixXcd effective_channel_link1(const Eigen::MatrixXcd& h1, const Eigen::MatrixXcd& f_b,
                                         const Eigen::MatrixXcd& f_ur) {
  if (f_ur.cols() != h1.rows() || h1.cols() != f_b.rows()) {
    std::ostringstream msg;
    msg << "effective_channel_link1: dimension mismatch (" << f_ur.rows() << "x" << f_ur.cols()
        << ")(" << h1.rows() << "x" << h1.cols() << ")(" << f_b.rows() << "x" << f_b.cols() << ")";
    throw std::invalid_argument(msg.str());
  }
  return f_ur * h1 * f_b;
}

Link1Baseband bb_stages_link1(const Eigen::MatrixXcd& h_eff, int k) {
  if (k < 1 || k > std::min(h_eff.rows(), h_eff.cols()))
    throw std::invalid_argument("bb_stages_link1: k exceeds the effective channel dimensions");
  Eigen::JacobiSVD<Eigen::MatrixXcd> svd(h_eff, Eigen::ComputeThinU | Eigen::ComputeThinV);
  const auto& s = svd.singularValues();
  const double tol = s(0) * 1e-12 * static_cast<double>(std::max(h_eff.rows(), h_eff.cols()));
  const auto rank = (s.array() > tol).count();
  if (s(0) == 0.0 || k > rank) {
    std::ostringstream msg;
    msg << "bb_stages_link1: requested " << k << " streams but the effective channel has rank "
        << rank;
    throw std::domain_error(msg.str());
  }
  Link1Baseband out;
  out.b_b = svd.matrixV().leftCols(k);
  out.b_ur = svd.matrixU().leftCols(k).adjoint();
  return out;
}

Eigen::MatrixXcd scale_to_power(const Eigen::MatrixXcd& f, const Eigen::MatrixXcd& b, double power) {
  const double current = (f * b).squaredNorm();
  if (!(current > 0.0)) throw std::domain_error("scale_to_power: zero precoder");
  return b * std::sqrt(power / current);
}

Eigen::MatrixXcd bb_stage_link2(const Eigen::MatrixXcd& h2_eff, const Eigen::MatrixXcd& f_ut,
                                double uav_power, double noise_power) {
  const auto k = h2_eff.rows();
  if (k > h2_eff.cols())
    throw std::domain_error("bb_stage_link2: more users than RF chains, cannot zero-force");
  Eigen::JacobiSVD<Eigen::MatrixXcd> svd(h2_eff);
  const auto& s = svd.singularValues();
  if (!(s(0) > 0.0) || s(k - 1) < s(0) * 1e-12) {
    std::ostringstream msg;
    msg << "bb_stage_link2: effective channel is rank deficient (singular values "
        << s.transpose() << ")";
    throw std::domain_error(msg.str());
  }
  const double eps = static_cast<double>(k) * noise_power / uav_power;
  const Eigen::MatrixXcd gram =
      h2_eff * h2_eff.adjoint() + eps * Eigen::MatrixXcd::Identity(k, k);
  const Eigen::MatrixXcd b = h2_eff.adjoint() * gram.llt().solve(Eigen::MatrixXcd::Identity(k, k));
  return scale_to_power(f_ut, b, uav_power);
}

}  // namespace skyrelay
