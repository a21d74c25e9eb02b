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

#ifndef CFMIMO_RATE_HPP
#define CFMIMO_RATE_HPP

#include <cstdint>
#include <vector>

#include "cfmimo/clustering.hpp"
#include "cfmimo/common.hpp"
#include "cfmimo/estimation.hpp"
#include "cfmimo/precoding.hpp"
#include "cfmimo/timing.hpp"

namespace cfmimo {

/// Running sums of the hardening-bound moments. desired_sum[k](l) collects
/// the complex per-cluster desired samples; interference_sum[k][i](l_i)
/// collects |cluster sum|^2 samples of user i's transmission as seen by
/// user k. Accumulators with the same shape merge associatively.
struct MomentAccumulator {
  std::vector<CVector> desired_sum;
  std::vector<std::vector<Vector>> interference_sum;
  std::int64_t num_samples = 0;

  /// Zero accumulator shaped by the per-user cluster counts.
  static MomentAccumulator make(const std::vector<int>& cluster_counts);

  void merge(const MomentAccumulator& other);

  int num_users() const { return static_cast<int>(desired_sum.size()); }
  int clusters_of(int k) const { return static_cast<int>(desired_sum[k].size()); }
  cplx desired_mean(int k, int l) const {
    return desired_sum[k](l) / static_cast<double>(num_samples);
  }
  double interference_mean(int k, int i, int li) const {
    return interference_sum[k][i](li) / static_cast<double>(num_samples);
  }
  /// Total received interference power at user k (all transmitters, all clusters).
  double total_interference(int k) const;
  double desired_power(int k) const;  // sum over clusters of |mean|^2
};

/// Adds one realization to the accumulator. coupling[q](k, i) must hold
/// h_qk^H w_qi; phase(q, k) is the per-pair downlink phase shift seen by the
/// receiver (identity matrix of ones for the synchronous scheme); clusters
/// gives each transmitter's AP grouping (a single group per user degenerates
/// to fully coherent transmission).
void accumulate_moments(MomentAccumulator* acc, const std::vector<CMatrix>& coupling,
                        const CMatrix& phase,
                        const std::vector<std::vector<std::vector<int>>>& clusters);

struct SinrOptions {
  double denominator_floor = 1e-15;
};

/// Hardening-bound SINR per user from accumulated moments:
/// sum_l |E{desired_l}|^2 over (total interference - desired + noise).
/// Negative finite-sample denominators are floored and counted.
Vector uatf_sinr(const MomentAccumulator& acc, double sigma2, Diagnostics* diag = nullptr,
                 const SinrOptions& opts = {});

/// Per-cluster SINRs under successive interference cancellation. decode_order,
/// when given, lists cluster indices per user in decoding order (default:
/// ascending, nearest cluster first). Element j of the result for user k is
/// the SINR of the j-th decoded cluster.
std::vector<Vector> sic_cluster_sinrs(const MomentAccumulator& acc, double sigma2,
                                      const std::vector<std::vector<int>>* decode_order = nullptr,
                                      Diagnostics* diag = nullptr,
                                      const SinrOptions& opts = {});

/// Closed-form MR SINR from the estimation statistics alone (no channel
/// realizations). chi(q, k) is the downlink phase shift at the evaluation
/// subcarrier. Exact when co-pilot contamination is the only estimation
/// coupling (uplink offsets zero or pilot-aligned).
Vector closed_form_mr_sinr(const NetworkDrop& drop, const EstimationSet& est,
                           const PilotBook& pilots, const ClusterPlan& plan,
                           const PowerAllocation& power, const CMatrix& chi, double sigma2,
                           Diagnostics* diag = nullptr);

struct RateReport {
  Vector sinr;            // per user
  Vector se;              // bits/s/Hz per user
  double sum_se = 0.0;
  double prefactor = 0.0; // (tau_d / tau) * (N / N_OFDM)
  int subcarrier = -1;    // evaluation subcarrier
};

/// SE_k = (tau_d / tau) * (N / N_OFDM) * log2(1 + gamma_k).
RateReport spectral_efficiency(const Vector& gamma, const OfdmConfig& ofdm, int subcarrier);

}  // namespace cfmimo

#endif  // CFMIMO_RATE_HPP
