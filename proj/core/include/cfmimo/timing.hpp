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

#ifndef CFMIMO_TIMING_HPP
#define CFMIMO_TIMING_HPP

#include <string>
#include <vector>

#include "cfmimo/common.hpp"
#include "cfmimo/topology.hpp"

namespace cfmimo {

/// Coherence-block tile: n_sub consecutive subcarriers by n_t OFDM symbols,
/// starting at first_subcarrier. One statistically representative block is
/// simulated.
struct CoherenceBlock {
  int num_subcarriers = 14;   // N_sub (= tau_p)
  int num_symbols = 7;        // N_T
  int first_subcarrier = 512; // n_1
};

struct OfdmConfig {
  int num_subcarriers = 1024;        // N
  int cp_length = 72;                // N_CP
  double subcarrier_spacing = 15e3;  // delta-f, Hz
  CoherenceBlock coherence_block;

  double sample_period() const { return 1.0 / (num_subcarriers * subcarrier_spacing); }
  int symbol_length() const { return num_subcarriers + cp_length; }  // N_OFDM
  double sampling_distance() const { return kSpeedOfLight * sample_period(); }  // D, meters
  int tau_p() const { return coherence_block.num_subcarriers; }
  int tau() const { return coherence_block.num_subcarriers * coherence_block.num_symbols; }
  int tau_d() const { return tau() - tau_p(); }
  /// Default evaluation subcarrier: middle of the block.
  int eval_subcarrier() const {
    return coherence_block.first_subcarrier + coherence_block.num_subcarriers / 2;
  }

  std::vector<std::string> validate() const;
  /// Non-fatal oddities (e.g. block size not dividing N).
  std::vector<std::string> warnings() const;
};

/// How the uplink sampling reference at each AP is chosen.
///  - kNearestServedUser: mirror of the downlink rule, offsets relative to the
///    AP's nearest served user.
///  - kGlobalZero: all uplink offsets zero (isolates downlink asynchrony).
enum class UplinkTimingMode { kNearestServedUser, kGlobalZero };

/// Quantized sample offsets for every AP-user pair. Downlink offsets are
/// relative to the user's nearest serving AP, so they are zero there and
/// non-negative across the serving set; uplink offsets mirror the rule with
/// roles swapped.
struct TimingModel {
  IMatrix dl_offset;              // Q x K, integer samples
  IMatrix ul_offset;              // Q x K, integer samples
  std::vector<int> dl_reference;  // per user: nearest serving AP
  std::vector<int> dl_farthest;   // per user: farthest serving AP
};

/// floor((d - d_ref) / sampling_distance); negative when d < d_ref.
int quantized_offset(double d, double d_ref, double sampling_distance);

/// Fills dl_offset / dl_reference / dl_farthest. serving[k] lists the APs
/// serving user k (ascending index); ties on distance break to the lowest AP.
void dl_offsets(const NetworkDrop& drop, const std::vector<std::vector<int>>& serving,
                const OfdmConfig& ofdm, TimingModel* timing);

/// Fills ul_offset. served[q] lists the users served by AP q; an AP serving
/// nobody gets a zero row.
void ul_offsets(const NetworkDrop& drop, const std::vector<std::vector<int>>& served,
                const OfdmConfig& ofdm, UplinkTimingMode mode, TimingModel* timing);

TimingModel make_timing(const NetworkDrop& drop, const std::vector<std::vector<int>>& serving,
                        const std::vector<std::vector<int>>& served, const OfdmConfig& ofdm,
                        UplinkTimingMode mode);

/// exp(-j 2 pi n delta / N), exactly unit modulus.
cplx phase_shift(int delta, int n, int num_subcarriers);

/// Diagonal of the uplink phase matrix: entries at subcarriers
/// n_1 .. n_1 + tau_p - 1 for the given offset.
CVector ul_phase_diagonal(int delta, const OfdmConfig& ofdm);

}  // namespace cfmimo

#endif  // CFMIMO_TIMING_HPP
