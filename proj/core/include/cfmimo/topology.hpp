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

#ifndef CFMIMO_TOPOLOGY_HPP
#define CFMIMO_TOPOLOGY_HPP

#include <cstdint>
#include <string>
#include <vector>

#include "cfmimo/common.hpp"

namespace cfmimo {

enum class PathlossModel { kLogDistance, kThreeSlopeLike };
enum class CorrelationModel { kUncorrelated, kLocalScattering };

/// Large-scale gain parameters. The log-distance defaults give
/// beta_dB = -30.5 - 36.7 log10(d) with 4 dB log-normal shadowing.
struct PathlossParams {
  double ref_gain_db = -30.5;        // gain at 1 m
  double slope_db_per_decade = -36.7;
  double shadowing_sigma_db = 4.0;   // 0 disables shadowing
  // Three-slope variant: free-space up to inner_m, d^2 up to outer_m, d^3.5 beyond.
  double three_slope_loss_db = 140.7;  // loss at 1 km on the outer slope
  double three_slope_inner_m = 10.0;
  double three_slope_outer_m = 50.0;
};

struct NetworkConfig {
  double area_side = 1000.0;  // meters
  int num_aps = 30;           // Q
  int num_users = 20;         // K
  int antennas_per_ap = 10;   // M
  bool wrap_around = true;
  PathlossModel pathloss_model = PathlossModel::kLogDistance;
  CorrelationModel correlation_model = CorrelationModel::kUncorrelated;
  double asd_deg = 15.0;            // angular standard deviation, local scattering only
  double noise_power = 3.0825e-13;  // sigma^2, watts (thermal over 15.36 MHz + 7 dB NF)
  double min_distance = 1.0;        // meters, floor applied to every AP-user distance
  PathlossParams pathloss;

  /// Returns human-readable violations; empty means the config is usable.
  std::vector<std::string> validate() const;
};

/// One random network realization: geometry plus channel statistics.
struct NetworkDrop {
  double area_side = 0.0;
  bool wrap_around = true;
  double min_distance = 1.0;
  Matrix ap_positions;    // Q x 2, meters
  Matrix user_positions;  // K x 2, meters
  Matrix distances;       // Q x K, meters
  Matrix beta;            // Q x K, linear gain
  std::vector<CMatrix> correlation;  // Q*K Hermitian PSD M x M, row-major (q*K + k)
  int antennas = 0;

  int num_aps() const { return static_cast<int>(ap_positions.rows()); }
  int num_users() const { return static_cast<int>(user_positions.rows()); }
  const CMatrix& spatial_correlation(int q, int k) const {
    return correlation[static_cast<std::size_t>(q) * num_users() + k];
  }
  CMatrix& spatial_correlation(int q, int k) {
    return correlation[static_cast<std::size_t>(q) * num_users() + k];
  }
};

/// Minimum Euclidean distance over the 9 toroidal image shifts (or the plain
/// distance when wrap is off), floored at min_distance.
double wrap_distance(const Eigen::Vector2d& a, const Eigen::Vector2d& b, double area_side,
                     double min_distance = 1.0);
double plain_distance(const Eigen::Vector2d& a, const Eigen::Vector2d& b,
                      double min_distance = 1.0);

/// Deterministic large-scale gain in dB at distance d (no shadowing).
double large_scale_db(double d, const NetworkConfig& cfg);
/// Linear version of large_scale_db.
double large_scale(double d, const NetworkConfig& cfg);

/// M x M Hermitian PSD spatial correlation with tr(R)/M == beta.
/// Uncorrelated mode returns beta * I. Local scattering uses the Gaussian
/// angular model for a half-wavelength ULA at the given nominal angle.
CMatrix correlation_matrix(double beta, double nominal_angle_rad, const NetworkConfig& cfg,
                           Diagnostics* diag = nullptr);

/// Uniform AP/user placement, wrap-aware distances, large-scale fading with
/// optional shadowing, and per-pair correlation matrices. Deterministic in
/// (cfg, seed).
NetworkDrop generate_drop(const NetworkConfig& cfg, std::uint64_t seed,
                          Diagnostics* diag = nullptr);

}  // namespace cfmimo

#endif  // CFMIMO_TOPOLOGY_HPP
