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

#include <cmath>
#include <numbers>

#include "doctest.h"

#include "cfmimo/rng.hpp"
#include "test_support.hpp"

using namespace cfmimo;

namespace {

NetworkConfig paper_network() {
  NetworkConfig cfg;
  cfg.num_aps = 30;
  cfg.num_users = 20;
  cfg.antennas_per_ap = 4;
  cfg.area_side = 1000.0;
  return cfg;
}

}  // namespace

TEST_CASE("generate_drop places everything inside the square and is seed-deterministic") {
  NetworkConfig cfg = paper_network();
  const NetworkDrop a = generate_drop(cfg, 42);
  const NetworkDrop b = generate_drop(cfg, 42);
  const NetworkDrop c = generate_drop(cfg, 43);

  REQUIRE(a.num_aps() == 30);
  REQUIRE(a.num_users() == 20);
  CHECK((a.ap_positions.array() >= 0.0).all());
  CHECK((a.ap_positions.array() < 1000.0).all());
  CHECK((a.user_positions.array() >= 0.0).all());
  CHECK((a.user_positions.array() < 1000.0).all());

  CHECK(a.ap_positions == b.ap_positions);
  CHECK(a.user_positions == b.user_positions);
  CHECK(a.distances == b.distances);
  CHECK(a.beta == b.beta);
  for (int q = 0; q < a.num_aps(); ++q) {
    for (int k = 0; k < a.num_users(); ++k) {
      CHECK(a.spatial_correlation(q, k) == b.spatial_correlation(q, k));
    }
  }
  CHECK(a.ap_positions != c.ap_positions);

  CHECK((a.distances.array() >= cfg.min_distance).all());
}

TEST_CASE("wrap_distance handles the named examples") {
  const double side = 1000.0;
  const Eigen::Vector2d origin(0.0, 0.0);
  // Coincident points sit at the minimum-distance floor.
  CHECK(wrap_distance(origin, origin, side, 1.0) == doctest::Approx(1.0));
  // Corner wrap: (0,0) vs (999,999) is sqrt(2) away through the corner.
  CHECK(wrap_distance(origin, {999.0, 999.0}, side, 0.0) ==
        doctest::Approx(std::numbers::sqrt2));
  // Interior pair, no wrapping involved.
  CHECK(wrap_distance({100.0, 100.0}, {300.0, 100.0}, side, 0.0) == doctest::Approx(200.0));
  // AP at (0,0), user at (900,0): the wrapped image is 100 m away.
  CHECK(wrap_distance(origin, {900.0, 0.0}, side, 1.0) == doctest::Approx(100.0));
}

TEST_CASE("wrap_distance is symmetric, dominated by the plain metric, and triangular") {
  const double side = 500.0;
  RandomStream stream(7);
  for (int trial = 0; trial < 300; ++trial) {
    const Eigen::Vector2d a(stream.uniform(0, side), stream.uniform(0, side));
    const Eigen::Vector2d b(stream.uniform(0, side), stream.uniform(0, side));
    const Eigen::Vector2d c(stream.uniform(0, side), stream.uniform(0, side));
    const double ab = wrap_distance(a, b, side, 0.0);
    CHECK(ab == wrap_distance(b, a, side, 0.0));
    CHECK(ab <= plain_distance(a, b, 0.0) + 1e-12);
    CHECK(ab <= wrap_distance(a, c, side, 0.0) + wrap_distance(c, b, side, 0.0) + 1e-12);
  }
}

TEST_CASE("large_scale evaluates the log-distance model") {
  NetworkConfig cfg;
  cfg.pathloss.shadowing_sigma_db = 0.0;
  CHECK(test::rel_error(large_scale(1.0, cfg), std::pow(10.0, -3.05)) < 1e-12);
  CHECK(test::rel_error(large_scale(10.0, cfg), std::pow(10.0, -6.72)) < 1e-12);

  // Degenerate shadowing keeps the whole drop deterministic without RNG reuse.
  cfg.num_aps = 4;
  cfg.num_users = 3;
  cfg.antennas_per_ap = 2;
  const NetworkDrop drop = generate_drop(cfg, 5);
  for (int q = 0; q < cfg.num_aps; ++q) {
    for (int k = 0; k < cfg.num_users; ++k) {
      CHECK(drop.beta(q, k) == doctest::Approx(large_scale(drop.distances(q, k), cfg)));
    }
  }
}

TEST_CASE("three-slope model is continuous at the breakpoints and monotone") {
  NetworkConfig cfg;
  cfg.pathloss_model = PathlossModel::kThreeSlopeLike;
  const double inner = cfg.pathloss.three_slope_inner_m;
  const double outer = cfg.pathloss.three_slope_outer_m;
  CHECK(test::rel_error(large_scale_db(inner * (1 + 1e-9), cfg), large_scale_db(inner, cfg)) <
        1e-6);
  CHECK(test::rel_error(large_scale_db(outer * (1 + 1e-9), cfg), large_scale_db(outer, cfg)) <
        1e-6);
  double prev = large_scale(5.0, cfg);
  for (double d : {20.0, 60.0, 200.0, 900.0}) {
    const double cur = large_scale(d, cfg);
    CHECK(cur < prev);
    prev = cur;
  }
}

TEST_CASE("uncorrelated correlation matrix is a scaled identity") {
  NetworkConfig cfg;
  cfg.antennas_per_ap = 2;
  const CMatrix r = correlation_matrix(0.5, 0.3, cfg);
  CHECK((r - 0.5 * CMatrix::Identity(2, 2)).norm() == 0.0);
}

TEST_CASE("local scattering matches brute-force integration of the scattering integral") {
  NetworkConfig cfg;
  cfg.correlation_model = CorrelationModel::kLocalScattering;
  cfg.antennas_per_ap = 4;
  cfg.asd_deg = 15.0;
  const double beta = 2.3;
  const double angle = 0.7;
  const CMatrix r = correlation_matrix(beta, angle, cfg);

  const double sigma = cfg.asd_deg * std::numbers::pi / 180.0;
  for (int row = 0; row < 4; ++row) {
    for (int col = 0; col < 4; ++col) {
      const double lag = row - col;
      // The model integral: Gaussian angular deviation linearized inside the
      // half-wavelength ULA response.
      const cplx oracle =
          beta * test::simpson(
                     [&](double delta) {
                       const double arg =
                           std::numbers::pi * lag *
                           (std::sin(angle) + delta * std::cos(angle));
                       const double weight = std::exp(-0.5 * delta * delta / (sigma * sigma)) /
                                             (std::sqrt(2.0 * std::numbers::pi) * sigma);
                       return std::polar(weight, arg);
                     },
                     -40.0 * sigma, 40.0 * sigma, 4000);
      CHECK(std::abs(r(row, col) - oracle) < 1e-8 * beta);
    }
  }

  // Large angular spread kills the off-diagonal terms: R approaches beta * I.
  cfg.asd_deg = 2000.0;
  const CMatrix wide = correlation_matrix(beta, 0.3, cfg);
  CHECK((wide - beta * CMatrix::Identity(4, 4)).norm() < 1e-8 * beta);
}

TEST_CASE("generated correlation matrices are Hermitian PSD with trace M beta") {
  NetworkConfig cfg;
  cfg.num_aps = 6;
  cfg.num_users = 5;
  cfg.antennas_per_ap = 4;
  cfg.correlation_model = CorrelationModel::kLocalScattering;
  cfg.asd_deg = 10.0;
  const NetworkDrop drop = generate_drop(cfg, 11);
  for (int q = 0; q < cfg.num_aps; ++q) {
    for (int k = 0; k < cfg.num_users; ++k) {
      const CMatrix& r = drop.spatial_correlation(q, k);
      CHECK((r - r.adjoint()).norm() <= 1e-12 * r.norm());
      Eigen::SelfAdjointEigenSolver<CMatrix> eig(r);
      CHECK(eig.eigenvalues().minCoeff() >= -1e-12 * r.real().trace());
      CHECK(test::rel_error(r.real().trace() / cfg.antennas_per_ap, drop.beta(q, k)) < 1e-9);
    }
  }
}
