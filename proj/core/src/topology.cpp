// cfmimo: link-level simulator for cell-free massive MIMO-OFDM downlink
// Copyright (C) 2026 cfmimo contributors
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
// http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.
// ------------------------------------------------------------------------

#include "cfmimo/topology.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>

#include "cfmimo/rng.hpp"

namespace cfmimo {

std::vector<std::string> NetworkConfig::validate() const {
  std::vector<std::string> errors;
  if (num_aps < 1) errors.push_back("network.num_aps: must be >= 1");
  if (num_users < 1) errors.push_back("network.num_users: must be >= 1");
  if (antennas_per_ap < 1) errors.push_back("network.antennas_per_ap: must be >= 1");
  if (!(area_side > 0.0)) errors.push_back("network.area_side: must be > 0");
  if (!(noise_power > 0.0)) errors.push_back("network.noise_power: must be > 0");
  if (!(min_distance > 0.0)) errors.push_back("network.min_distance: must be > 0");
  if (correlation_model == CorrelationModel::kLocalScattering && !(asd_deg > 0.0)) {
    errors.push_back("network.asd_deg: must be > 0 for localScattering");
  }
  if (pathloss.shadowing_sigma_db < 0.0) {
    errors.push_back("network.pathloss.shadowing_sigma_db: must be >= 0");
  }
  return errors;
}

double plain_distance(const Eigen::Vector2d& a, const Eigen::Vector2d& b, double min_distance) {
  return std::max(min_distance, (a - b).norm());
}

double wrap_distance(const Eigen::Vector2d& a, const Eigen::Vector2d& b, double area_side,
                     double min_distance) {
  double dx = std::abs(a.x() - b.x());
  double dy = std::abs(a.y() - b.y());
  dx = std::min(dx, area_side - dx);
  dy = std::min(dy, area_side - dy);
  return std::max(min_distance, std::hypot(dx, dy));
}

double large_scale_db(double d, const NetworkConfig& cfg) {
  const PathlossParams& p = cfg.pathloss;
  if (cfg.pathloss_model == PathlossModel::kLogDistance) {
    return p.ref_gain_db + p.slope_db_per_decade * std::log10(d);
  }
  // Three-slope: d^3.5 decay beyond outer_m, d^2 between the breakpoints,
  // constant below inner_m.
  const double d0 = p.three_slope_inner_m;
  const double d1 = p.three_slope_outer_m;
  const double loss = p.three_slope_loss_db;
  if (d > d1) {
    return -(loss + 35.0 * std::log10(d / 1000.0));
  }
  if (d > d0) {
    return -(loss + 15.0 * std::log10(d1 / 1000.0) + 20.0 * std::log10(d / 1000.0));
  }
  return -(loss + 15.0 * std::log10(d1 / 1000.0) + 20.0 * std::log10(d0 / 1000.0));
}

double large_scale(double d, const NetworkConfig& cfg) {
  return std::pow(10.0, large_scale_db(d, cfg) / 10.0);
}

namespace {

// Gaussian local scattering for a half-wavelength ULA: the angular deviation
// is N(0, sigma^2) around the nominal angle, linearized inside the array
// response. Entry (l, m) is the characteristic function of that Gaussian,
// so the Toeplitz matrix is PSD by construction.
CMatrix local_scattering(double beta, double angle, double asd_rad, int m_antennas) {
  CMatrix r(m_antennas, m_antennas);
  const double s = std::sin(angle);
  const double c = std::cos(angle);
  for (int row = 0; row < m_antennas; ++row) {
    for (int col = 0; col < m_antennas; ++col) {
      const double lag = static_cast<double>(row - col);
      const double phase = std::numbers::pi * lag * s;
      const double spread = std::numbers::pi * lag * c * asd_rad;
      const double mag = beta * std::exp(-0.5 * spread * spread);
      r(row, col) = std::polar(mag, phase);
    }
  }
  return r;
}

void clip_negative_eigenvalues(CMatrix* r, double beta, Diagnostics* diag) {
  Eigen::SelfAdjointEigenSolver<CMatrix> eig(*r);
  const double tol = 1e-12 * r->real().trace();
  if (eig.eigenvalues().minCoeff() >= -tol) return;
  Vector lambda = eig.eigenvalues().cwiseMax(0.0);
  *r = eig.eigenvectors() * lambda.asDiagonal() * eig.eigenvectors().adjoint();
  // Clipping raises the trace; rescale so tr(R)/M == beta is preserved.
  const double tr = r->real().trace();
  if (tr > 0.0) *r *= beta * r->rows() / tr;
  if (diag) diag->psd_clips++;
}

}  // namespace

CMatrix correlation_matrix(double beta, double nominal_angle_rad, const NetworkConfig& cfg,
                           Diagnostics* diag) {
  const int m = cfg.antennas_per_ap;
  if (cfg.correlation_model == CorrelationModel::kUncorrelated) {
    return beta * CMatrix::Identity(m, m);
  }
  const double asd_rad = cfg.asd_deg * std::numbers::pi / 180.0;
  CMatrix r = local_scattering(beta, nominal_angle_rad, asd_rad, m);
  clip_negative_eigenvalues(&r, beta, diag);
  return r;
}

NetworkDrop generate_drop(const NetworkConfig& cfg, std::uint64_t seed, Diagnostics* diag) {
  RandomStream stream(seed);
  const int q_count = cfg.num_aps;
  const int k_count = cfg.num_users;

  NetworkDrop drop;
  drop.area_side = cfg.area_side;
  drop.wrap_around = cfg.wrap_around;
  drop.min_distance = cfg.min_distance;
  drop.antennas = cfg.antennas_per_ap;
  drop.ap_positions.resize(q_count, 2);
  drop.user_positions.resize(k_count, 2);
  for (int q = 0; q < q_count; ++q) {
    drop.ap_positions(q, 0) = cfg.area_side * stream.uniform();
    drop.ap_positions(q, 1) = cfg.area_side * stream.uniform();
  }
  for (int k = 0; k < k_count; ++k) {
    drop.user_positions(k, 0) = cfg.area_side * stream.uniform();
    drop.user_positions(k, 1) = cfg.area_side * stream.uniform();
  }

  drop.distances.resize(q_count, k_count);
  for (int q = 0; q < q_count; ++q) {
    const Eigen::Vector2d ap = drop.ap_positions.row(q);
    for (int k = 0; k < k_count; ++k) {
      const Eigen::Vector2d user = drop.user_positions.row(k);
      drop.distances(q, k) = cfg.wrap_around
                                 ? wrap_distance(ap, user, cfg.area_side, cfg.min_distance)
                                 : plain_distance(ap, user, cfg.min_distance);
    }
  }

  drop.beta.resize(q_count, k_count);
  const double sigma_sh = cfg.pathloss.shadowing_sigma_db;
  for (int q = 0; q < q_count; ++q) {
    for (int k = 0; k < k_count; ++k) {
      double gain_db = large_scale_db(drop.distances(q, k), cfg);
      if (sigma_sh > 0.0) gain_db += sigma_sh * stream.gaussian();
      drop.beta(q, k) = std::pow(10.0, gain_db / 10.0);
    }
  }

  drop.correlation.resize(static_cast<std::size_t>(q_count) * k_count);
  for (int q = 0; q < q_count; ++q) {
    const Eigen::Vector2d ap = drop.ap_positions.row(q);
    for (int k = 0; k < k_count; ++k) {
      Eigen::Vector2d delta = drop.user_positions.row(k).transpose() - ap;
      if (cfg.wrap_around) {
        // Bearing toward the nearest toroidal image of the user.
        for (int axis = 0; axis < 2; ++axis) {
          if (delta(axis) > 0.5 * cfg.area_side) delta(axis) -= cfg.area_side;
          if (delta(axis) < -0.5 * cfg.area_side) delta(axis) += cfg.area_side;
        }
      }
      const double angle = std::atan2(delta.y(), delta.x());
      drop.spatial_correlation(q, k) = correlation_matrix(drop.beta(q, k), angle, cfg, diag);
    }
  }
  return drop;
}

}  // namespace cfmimo
