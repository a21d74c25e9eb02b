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

#include "cfmimo/timing.hpp"

#include <numbers>

#include "doctest.h"

#include "cfmimo/clustering.hpp"
#include "test_support.hpp"

using namespace cfmimo;

namespace {

OfdmConfig small_ofdm() {
  OfdmConfig ofdm;
  ofdm.num_subcarriers = 64;
  ofdm.cp_length = 8;
  ofdm.subcarrier_spacing = 15e3;
  ofdm.coherence_block.num_subcarriers = 4;
  ofdm.coherence_block.num_symbols = 7;
  ofdm.coherence_block.first_subcarrier = 0;
  return ofdm;
}

}  // namespace

TEST_CASE("OfdmConfig derived quantities") {
  OfdmConfig ofdm;  // defaults: N=1024, CP=72, 15 kHz
  CHECK(ofdm.symbol_length() == 1096);
  CHECK(test::rel_error(ofdm.sample_period(), 1.0 / (1024.0 * 15e3)) < 1e-15);
  CHECK(test::rel_error(ofdm.sampling_distance(), kSpeedOfLight / (1024.0 * 15e3)) < 1e-15);
  CHECK(ofdm.tau_p() == 14);
  CHECK(ofdm.tau() == 98);
  CHECK(ofdm.tau_d() == 84);
  CHECK(ofdm.validate().empty());
  CHECK(ofdm.warnings().size() == 1);  // 14 does not divide 1024
}

TEST_CASE("downlink offsets floor the normalized distance difference") {
  OfdmConfig ofdm = small_ofdm();
  const double d_sample = ofdm.sampling_distance();

  Matrix dist(3, 1);
  dist << 100.0, 100.0 + d_sample, 100.0 + 2.7 * d_sample;
  const NetworkDrop drop = test::drop_from_distances(dist, 1);
  TimingModel timing;
  dl_offsets(drop, {{0, 1, 2}}, ofdm, &timing);

  CHECK(timing.dl_reference[0] == 0);
  CHECK(timing.dl_farthest[0] == 2);
  CHECK(timing.dl_offset(0, 0) == 0);  // nearest AP is the reference
  CHECK(timing.dl_offset(1, 0) == 1);  // exactly one sampling distance -> floor boundary
  CHECK(timing.dl_offset(2, 0) == 2);  // floor(2.7)
}

TEST_CASE("uplink offsets mirror the rule with roles swapped") {
  OfdmConfig ofdm = small_ofdm();
  const double d_sample = ofdm.sampling_distance();

  SUBCASE("single served user is its own reference") {
    Matrix dist(1, 1);
    dist << 250.0;
    const NetworkDrop drop = test::drop_from_distances(dist, 1);
    TimingModel timing;
    ul_offsets(drop, {{0}}, ofdm, UplinkTimingMode::kNearestServedUser, &timing);
    CHECK(timing.ul_offset(0, 0) == 0);
  }

  SUBCASE("equidistant users both get zero") {
    Matrix dist(1, 2);
    dist << 300.0, 300.0;
    const NetworkDrop drop = test::drop_from_distances(dist, 1);
    TimingModel timing;
    ul_offsets(drop, {{0, 1}}, ofdm, UplinkTimingMode::kNearestServedUser, &timing);
    CHECK(timing.ul_offset(0, 0) == 0);
    CHECK(timing.ul_offset(0, 1) == 0);
  }

  SUBCASE("1.2 sampling distances farther floors to one sample") {
    Matrix dist(1, 2);
    dist << 300.0, 300.0 + 1.2 * d_sample;
    const NetworkDrop drop = test::drop_from_distances(dist, 1);
    TimingModel timing;
    ul_offsets(drop, {{0, 1}}, ofdm, UplinkTimingMode::kNearestServedUser, &timing);
    CHECK(timing.ul_offset(0, 0) == 0);
    CHECK(timing.ul_offset(0, 1) == 1);
  }

  SUBCASE("global-zero mode zeroes everything") {
    Matrix dist(2, 2);
    dist << 100.0, 900.0, 500.0, 200.0;
    const NetworkDrop drop = test::drop_from_distances(dist, 1);
    TimingModel timing;
    ul_offsets(drop, {{0, 1}, {0, 1}}, ofdm, UplinkTimingMode::kGlobalZero, &timing);
    CHECK(timing.ul_offset.cwiseAbs().maxCoeff() == 0);
  }
}

TEST_CASE("phase_shift special values and periodicity") {
  const int n_fft = 64;
  CHECK(phase_shift(0, 13, n_fft) == cplx(1.0, 0.0));
  CHECK(phase_shift(5, 0, n_fft) == cplx(1.0, 0.0));
  CHECK(std::abs(phase_shift(n_fft / 2, 1, n_fft) - cplx(-1.0, 0.0)) < 1e-12);

  for (int delta : {-3, 0, 1, 7, 40}) {
    for (int n : {0, 1, 17, 60}) {
      CHECK(std::abs(std::abs(phase_shift(delta, n, n_fft)) - 1.0) < 1e-15);
      // Periodic in the subcarrier index (bitwise by construction).
      CHECK(phase_shift(delta, n + n_fft, n_fft) == phase_shift(delta, n, n_fft));
    }
  }
}

TEST_CASE("ul_phase_diagonal matches the scalar phase shift element-wise") {
  OfdmConfig ofdm = small_ofdm();
  const CVector diag = ul_phase_diagonal(3, ofdm);
  REQUIRE(diag.size() == 4);
  CHECK(diag(0) == cplx(1.0, 0.0));  // n1 = 0
  for (int m = 0; m < 4; ++m) {
    CHECK(std::abs(std::abs(diag(m)) - 1.0) < 1e-15);
    CHECK(diag(m) == phase_shift(3, m, 64));
  }

  // Zero offset gives the identity diagonal.
  const CVector identity = ul_phase_diagonal(0, ofdm);
  for (int m = 0; m < 4; ++m) CHECK(identity(m) == cplx(1.0, 0.0));
}

TEST_CASE("per user exactly one serving AP has zero offset and none are negative") {
  NetworkConfig net;
  net.num_aps = 12;
  net.num_users = 6;
  net.antennas_per_ap = 2;
  OfdmConfig ofdm;  // default numerology, D ~ 19.5 m
  for (std::uint64_t seed : {1ull, 2ull, 3ull}) {
    const NetworkDrop drop = generate_drop(net, seed);
    const ClusterPlan plan = cluster_by_distance(drop, 8, ofdm.sampling_distance());
    const TimingModel timing =
        make_timing(drop, plan.serving, plan.served, ofdm, UplinkTimingMode::kNearestServedUser);
    for (int k = 0; k < net.num_users; ++k) {
      int zeros = 0;
      for (int q : plan.serving[k]) {
        CHECK(timing.dl_offset(q, k) >= 0);
        if (timing.dl_offset(q, k) == 0) zeros++;
      }
      CHECK(zeros >= 1);
      CHECK(timing.dl_offset(timing.dl_reference[k], k) == 0);
      // Offsets are monotone in distance across the serving set.
      for (int a : plan.serving[k]) {
        for (int b : plan.serving[k]) {
          if (drop.distances(a, k) <= drop.distances(b, k)) {
            CHECK(timing.dl_offset(a, k) <= timing.dl_offset(b, k));
          }
        }
      }
    }
  }
}
