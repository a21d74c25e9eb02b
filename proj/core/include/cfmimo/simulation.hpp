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

#ifndef CFMIMO_SIMULATION_HPP
#define CFMIMO_SIMULATION_HPP

#include <array>
#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "cfmimo/clustering.hpp"
#include "cfmimo/estimation.hpp"
#include "cfmimo/precoding.hpp"
#include "cfmimo/rate.hpp"
#include "cfmimo/rng.hpp"
#include "cfmimo/timing.hpp"
#include "cfmimo/topology.hpp"

namespace cfmimo {

/// Transmission scheme under evaluation:
///  - kSync: ideal synchronous reception, one coherent cluster per user.
///  - kAsync: true phase shifts, still one cluster (coherent attempt).
///  - kMixed: coherent within clusters, independent streams across clusters,
///    combined by SIC at the user.
enum class Scheme { kSync, kAsync, kMixed };
enum class PrecoderType { kMr, kLmmse };
enum class ClustererType { kDistance, kFixed };

const char* to_string(Scheme s);
const char* to_string(PrecoderType p);
const char* to_string(ClustererType c);
bool parse_scheme(const std::string& text, Scheme* out);
bool parse_precoder(const std::string& text, PrecoderType* out);
bool parse_clusterer(const std::string& text, ClustererType* out);

struct SimulationOptions {
  int realizations_per_drop = 300;
  int lmmse_normalizer_realizations = 1000;  // disjoint batch for E{||w_bar||^2}
  UplinkTimingMode ul_timing_mode = UplinkTimingMode::kNearestServedUser;
  PsiForm psi_form = PsiForm::kMatrixWeighted;
  bool average_over_block = false;  // average SE over the block's subcarriers
  double ap_power = 0.2;            // P_ap, watts
  double ul_power = 0.1;            // per-user uplink power, watts
};

struct ComboRow {
  Scheme scheme;
  PrecoderType precoder;
  ClustererType clusterer;
  RateReport report;
  Diagnostics diagnostics;
};

struct DropOutput {
  std::uint64_t drop_seed = 0;
  std::vector<ComboRow> rows;  // ordered scheme-major, then precoder, then clusterer
  Diagnostics build_diagnostics;
};

/// Everything needed to run Monte-Carlo trials for one drop. All requested
/// (scheme, precoder) combinations share the same channel and noise
/// realizations, so per-drop differences are paired.
class DropSimulator {
 public:
  /// Deterministic per-clusterer context.
  struct Lane {
    ClusterPlan plan;
    TimingModel timing;
    EstimationSet est;
    PowerAllocation power;
    std::vector<std::vector<std::vector<int>>> single_clusters;  // one cluster per user
    std::vector<int> single_counts;                              // all ones
    std::vector<int> mixed_counts;                               // plan cluster counts
    std::vector<CMatrix> chi;   // per evaluation subcarrier: Q x K phase shifts
    CMatrix unit_phase;         // Q x K exact ones (synchronous scheme)
    std::vector<CMatrix> despread_gain;  // per AP: K x used-pilots, sqrt(p/tau_p) alpha
    std::vector<CMatrix> lmmse_err_sum;  // per AP: sigma^2 I + sum p_i C_qi
    Matrix lmmse_normalizer;             // Q x K, E{||w_bar||^2}; NaN until estimated
    bool lmmse_ready = false;
  };

  DropSimulator(const NetworkConfig& net, const OfdmConfig& ofdm, int serving_set_size,
                const SimulationOptions& options, std::uint64_t drop_seed);

  const NetworkDrop& drop() const { return drop_; }
  const PilotBook& pilots() const { return pilots_; }
  const OfdmConfig& ofdm() const { return ofdm_; }
  const SimulationOptions& options() const { return options_; }
  double sigma2() const { return net_.noise_power; }
  const Diagnostics& build_diagnostics() const { return build_diag_; }
  std::uint64_t drop_seed() const { return drop_seed_; }

  /// Subcarriers the rate is evaluated at (one mid-block index, or the whole
  /// block when averaging).
  std::vector<int> eval_subcarriers() const;

  Lane& lane(ClustererType type);

  /// Runs the shared-realization Monte-Carlo batch and reports one row per
  /// (scheme, precoder, clusterer) combination.
  DropOutput run(const std::vector<Scheme>& schemes, const std::vector<PrecoderType>& precoders,
                 const std::vector<ClustererType>& clusterers);

  /// Closed-form MR SINR on a lane at one subcarrier.
  Vector closed_form(ClustererType type, int subcarrier);

  // Low-level hooks, primarily for tests and oracles. Draw order per
  // realization is channels first, then pilot noise, from one stream.
  void draw_channels(RandomStream& stream, std::vector<CMatrix>* h) const;
  void draw_pilot_noise(RandomStream& stream, std::vector<CMatrix>* noise) const;
  void estimate_channels(const Lane& lane, const std::vector<CMatrix>& h,
                         const std::vector<CMatrix>& noise,
                         std::vector<CMatrix>* estimates) const;
  void precode(Lane& lane, PrecoderType type, const std::vector<CMatrix>& estimates,
               std::vector<CMatrix>* w, Diagnostics* diag);
  /// coupling[q](k, i) = h_qk^H w_qi.
  static std::vector<CMatrix> coupling(const std::vector<CMatrix>& h,
                                       const std::vector<CMatrix>& w);
  void ensure_lmmse_normalizers(Lane& lane);

 private:
  Lane build_lane(ClustererType type);

  NetworkConfig net_;
  OfdmConfig ofdm_;
  int serving_set_size_;
  SimulationOptions options_;
  std::uint64_t drop_seed_;
  NetworkDrop drop_;
  PilotBook pilots_;
  Diagnostics build_diag_;
  bool uncorrelated_ = true;
  Matrix sqrt_beta_;                    // fast sampling path
  std::vector<CMatrix> sample_factor_;  // F with F F^H = R, per (q, k)
  std::vector<int> pilot_column_;       // pilot id -> column in the noise buffer
  std::array<std::optional<Lane>, 2> lanes_;
};

}  // namespace cfmimo

#endif  // CFMIMO_SIMULATION_HPP
