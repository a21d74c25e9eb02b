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

#include <cmath>
#include <numbers>

namespace cfmimo {

std::vector<std::string> OfdmConfig::validate() const {
  std::vector<std::string> errors;
  if (num_subcarriers < 1) errors.push_back("ofdm.num_subcarriers: must be >= 1");
  if (cp_length < 0) errors.push_back("ofdm.cp_length: must be >= 0");
  if (!(subcarrier_spacing > 0.0)) errors.push_back("ofdm.subcarrier_spacing: must be > 0");
  if (coherence_block.num_subcarriers < 1) {
    errors.push_back("ofdm.coherence_block.num_subcarriers: must be >= 1");
  }
  if (coherence_block.num_symbols < 1) {
    errors.push_back("ofdm.coherence_block.num_symbols: must be >= 1");
  }
  if (coherence_block.first_subcarrier < 0 ||
      coherence_block.first_subcarrier + coherence_block.num_subcarriers > num_subcarriers) {
    errors.push_back("ofdm.coherence_block: block [n1, n1+n_sub) must fit inside [0, N)");
  }
  if (coherence_block.num_subcarriers >= 1 && coherence_block.num_symbols >= 1 &&
      tau_d() <= 0) {
    errors.push_back("ofdm.coherence_block: tau_d = n_sub*(n_t - 1) must be > 0");
  }
  return errors;
}

std::vector<std::string> OfdmConfig::warnings() const {
  std::vector<std::string> warns;
  if (coherence_block.num_subcarriers >= 1 &&
      num_subcarriers % coherence_block.num_subcarriers != 0) {
    warns.push_back(
        "ofdm: coherence_block.num_subcarriers does not divide num_subcarriers; "
        "the simulated block is still well defined");
  }
  return warns;
}

int quantized_offset(double d, double d_ref, double sampling_distance) {
  return static_cast<int>(std::floor((d - d_ref) / sampling_distance));
}

void dl_offsets(const NetworkDrop& drop, const std::vector<std::vector<int>>& serving,
                const OfdmConfig& ofdm, TimingModel* timing) {
  const int q_count = drop.num_aps();
  const int k_count = drop.num_users();
  const double d_sample = ofdm.sampling_distance();
  timing->dl_offset.resize(q_count, k_count);
  timing->dl_reference.assign(k_count, -1);
  timing->dl_farthest.assign(k_count, -1);
  for (int k = 0; k < k_count; ++k) {
    int nearest = -1;
    int farthest = -1;
    for (int q : serving[k]) {
      if (nearest < 0 || drop.distances(q, k) < drop.distances(nearest, k)) nearest = q;
      if (farthest < 0 || drop.distances(q, k) > drop.distances(farthest, k)) farthest = q;
    }
    timing->dl_reference[k] = nearest;
    timing->dl_farthest[k] = farthest;
    const double d_ref = drop.distances(nearest, k);
    for (int q = 0; q < q_count; ++q) {
      timing->dl_offset(q, k) = quantized_offset(drop.distances(q, k), d_ref, d_sample);
    }
  }
}

void ul_offsets(const NetworkDrop& drop, const std::vector<std::vector<int>>& served,
                const OfdmConfig& ofdm, UplinkTimingMode mode, TimingModel* timing) {
  const int q_count = drop.num_aps();
  const int k_count = drop.num_users();
  timing->ul_offset = IMatrix::Zero(q_count, k_count);
  if (mode == UplinkTimingMode::kGlobalZero) return;
  const double d_sample = ofdm.sampling_distance();
  for (int q = 0; q < q_count; ++q) {
    if (served[q].empty()) continue;  // unused AP, offsets irrelevant
    int nearest = -1;
    for (int k : served[q]) {
      if (nearest < 0 || drop.distances(q, k) < drop.distances(q, nearest)) nearest = k;
    }
    const double d_ref = drop.distances(q, nearest);
    for (int k = 0; k < k_count; ++k) {
      timing->ul_offset(q, k) = quantized_offset(drop.distances(q, k), d_ref, d_sample);
    }
  }
}

TimingModel make_timing(const NetworkDrop& drop, const std::vector<std::vector<int>>& serving,
                        const std::vector<std::vector<int>>& served, const OfdmConfig& ofdm,
                        UplinkTimingMode mode) {
  TimingModel timing;
  dl_offsets(drop, serving, ofdm, &timing);
  ul_offsets(drop, served, ofdm, mode, &timing);
  return timing;
}

cplx phase_shift(int delta, int n, int num_subcarriers) {
  // Reduce n*delta modulo N first so the angle stays in (-2pi, 0]; this keeps
  // the value exact for delta = 0 and periodic in n by construction.
  const long long prod = static_cast<long long>(n) * delta;
  long long m = prod % num_subcarriers;
  if (m < 0) m += num_subcarriers;
  const double angle = -2.0 * std::numbers::pi * static_cast<double>(m) / num_subcarriers;
  return m == 0 ? cplx(1.0, 0.0) : std::polar(1.0, angle);
}

CVector ul_phase_diagonal(int delta, const OfdmConfig& ofdm) {
  const int tau_p = ofdm.tau_p();
  const int n1 = ofdm.coherence_block.first_subcarrier;
  CVector diag(tau_p);
  for (int m = 0; m < tau_p; ++m) {
    diag(m) = phase_shift(delta, n1 + m, ofdm.num_subcarriers);
  }
  return diag;
}

}  // namespace cfmimo
