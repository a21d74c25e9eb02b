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

#include "cfmimo/precoding.hpp"

#include <cmath>

#include "doctest.h"

#include "cfmimo/rng.hpp"
#include "cfmimo/simulation.hpp"
#include "test_support.hpp"

using namespace cfmimo;

TEST_CASE("equal_power splits each AP budget over its served users") {
  NetworkConfig net;
  net.num_aps = 5;
  net.num_users = 4;
  net.antennas_per_ap = 1;
  const NetworkDrop drop = generate_drop(net, 8);
  const ClusterPlan plan = cluster_by_distance(drop, 5, 19.5);  // all APs serve everyone
  const PowerAllocation alloc = equal_power(plan, 0.2);
  for (int q = 0; q < 5; ++q) {
    CHECK(alloc.rho(q, 0) == 0.05);  // 4 served users, exact binary split
    CHECK(alloc.rho.row(q).sum() == 0.2);
  }

  // Single served user takes the whole budget; an idle AP has a zero row.
  Matrix dist(2, 1);
  dist << 10.0, 20.0;
  const NetworkDrop tiny = test::drop_from_distances(dist, 1);
  const ClusterPlan single = cluster_by_distance(tiny, 1, 19.5);
  const PowerAllocation salloc = equal_power(single, 0.2);
  CHECK(salloc.rho(0, 0) == 0.2);
  CHECK(salloc.rho(1, 0) == 0.0);
}

TEST_CASE("normalize_precoder handles zero power and is scale invariant") {
  CVector dir(2);
  dir << cplx(1.0, 2.0), cplx(-0.5, 0.25);
  CHECK(normalize_precoder(dir, 3.0, 0.0).norm() == 0.0);
  CHECK(normalize_precoder(dir, 0.0, 0.5).norm() == 0.0);

  const CVector w = normalize_precoder(dir, 3.0, 0.5);
  CHECK(test::rel_error(w.squaredNorm(), 0.5 * dir.squaredNorm() / 3.0) < 1e-12);

  // Scaling the estimate (and its statistics consistently) leaves w unchanged.
  for (double c : {0.1, 7.0, 1234.5}) {
    const CVector scaled = normalize_precoder(c * dir, c * c * 3.0, 0.5);
    CHECK((scaled - w).norm() <= 1e-12 * w.norm());
  }
}

TEST_CASE("MR normalizer tr(B) matches the sampled estimate energy") {
  NetworkConfig net;
  net.num_aps = 2;
  net.num_users = 2;
  net.antennas_per_ap = 3;
  net.area_side = 400.0;
  net.correlation_model = CorrelationModel::kLocalScattering;
  net.asd_deg = 15.0;
  net.noise_power = 1e-13;
  OfdmConfig ofdm;
  ofdm.coherence_block.num_subcarriers = 2;
  SimulationOptions opt;
  DropSimulator sim(net, ofdm, 2, opt, 6);
  DropSimulator::Lane& lane = sim.lane(ClustererType::kDistance);

  Matrix mean_sq = Matrix::Zero(2, 2);
  RandomStream stream(9);
  std::vector<CMatrix> h;
  std::vector<CMatrix> noise;
  std::vector<CMatrix> estimates;
  const int samples = 10000;
  for (int s = 0; s < samples; ++s) {
    sim.draw_channels(stream, &h);
    sim.draw_pilot_noise(stream, &noise);
    sim.estimate_channels(lane, h, noise, &estimates);
    for (int q = 0; q < 2; ++q) {
      for (int k = 0; k < 2; ++k) mean_sq(q, k) += estimates[q].col(k).squaredNorm();
    }
  }
  mean_sq /= samples;
  for (int q = 0; q < 2; ++q) {
    for (int k = 0; k < 2; ++k) {
      CHECK(test::rel_error(mean_sq(q, k), lane.est.trB(q, k)) < 0.03);
    }
  }
}

TEST_CASE("lmmse_directions solves its normal equations and limits to MR") {
  const int m = 3;
  RandomStream stream(11);
  CMatrix estimates(m, 2);
  for (int j = 0; j < 2; ++j) {
    for (int r = 0; r < m; ++r) estimates(r, j) = stream.complex_gaussian();
  }
  Vector powers(2);
  powers << 0.1, 0.2;

  SUBCASE("solver contract: tiny relative residual") {
    const CMatrix err_sum = test::hermitian_psd(m, 0.7);
    const CMatrix dirs = lmmse_directions(estimates, powers, err_sum);
    CMatrix gram = err_sum;
    for (int j = 0; j < 2; ++j) {
      gram += powers(j) * (estimates.col(j) * estimates.col(j).adjoint());
    }
    for (int j = 0; j < 2; ++j) {
      const CVector residual = gram * dirs.col(j) - powers(j) * estimates.col(j);
      CHECK(residual.norm() <= 1e-10 * (powers(j) * estimates.col(j)).norm());
    }
  }

  SUBCASE("single antenna, single user: collinear with the estimate") {
    CMatrix est1(1, 1);
    est1(0, 0) = cplx(0.7, -0.3);
    const Vector p1 = Vector::Constant(1, 0.1);
    const CMatrix noise1 = 0.01 * CMatrix::Identity(1, 1);
    const CMatrix dirs = lmmse_directions(est1, p1, noise1);
    CHECK(std::abs(std::arg(dirs(0, 0) / est1(0, 0))) < 1e-12);
  }

  SUBCASE("noise-dominated regime converges to the MR direction") {
    double prev_gap = 2.0;
    for (double sigma2 : {1.0, 1e2, 1e4, 1e6}) {
      const CMatrix dirs =
          lmmse_directions(estimates, powers, sigma2 * CMatrix::Identity(m, m));
      const CVector a = dirs.col(0).normalized();
      const CVector b = estimates.col(0).normalized();
      const double gap = 1.0 - std::abs((a.adjoint() * b)(0, 0));
      CHECK(gap <= prev_gap + 1e-15);
      prev_gap = gap;
    }
    CHECK(prev_gap < 1e-10);
  }
}

TEST_CASE("normalized precoders radiate the allocated power on a fresh batch") {
  NetworkConfig net;
  net.num_aps = 3;
  net.num_users = 3;
  net.antennas_per_ap = 2;
  net.area_side = 400.0;
  net.noise_power = 1e-13;
  OfdmConfig ofdm;
  ofdm.coherence_block.num_subcarriers = 3;
  SimulationOptions opt;
  opt.lmmse_normalizer_realizations = 1000;
  DropSimulator sim(net, ofdm, 3, opt, 12);
  DropSimulator::Lane& lane = sim.lane(ClustererType::kDistance);

  for (PrecoderType type : {PrecoderType::kMr, PrecoderType::kLmmse}) {
    Matrix mean_sq = Matrix::Zero(3, 3);
    RandomStream stream(mix_seed({100, static_cast<std::uint64_t>(type)}));
    std::vector<CMatrix> h;
    std::vector<CMatrix> noise;
    std::vector<CMatrix> estimates;
    std::vector<CMatrix> w;
    Diagnostics diag;
    const int batch = 1500;
    for (int s = 0; s < batch; ++s) {
      sim.draw_channels(stream, &h);
      sim.draw_pilot_noise(stream, &noise);
      sim.estimate_channels(lane, h, noise, &estimates);
      sim.precode(lane, type, estimates, &w, &diag);
      for (int q = 0; q < 3; ++q) {
        for (int k = 0; k < 3; ++k) mean_sq(q, k) += w[q].col(k).squaredNorm();
      }
    }
    mean_sq /= batch;
    for (int q = 0; q < 3; ++q) {
      double radiated = 0.0;
      for (int k = 0; k < 3; ++k) {
        const double rho = lane.power.rho(q, k);
        if (rho > 0.0) {
          CHECK(mean_sq(q, k) >= 0.9 * rho);
          CHECK(mean_sq(q, k) <= 1.1 * rho);
        } else {
          CHECK(mean_sq(q, k) == 0.0);
        }
        radiated += mean_sq(q, k);
      }
      CHECK(radiated <= 1.1 * lane.power.ap_budget);
    }
  }
}
