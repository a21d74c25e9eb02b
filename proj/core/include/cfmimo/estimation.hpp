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

#ifndef CFMIMO_ESTIMATION_HPP
#define CFMIMO_ESTIMATION_HPP

#include <vector>

#include "cfmimo/common.hpp"
#include "cfmimo/timing.hpp"
#include "cfmimo/topology.hpp"

namespace cfmimo {

/// Orthogonal pilot sequences (scaled DFT columns, unit-modulus entries,
/// ||phi||^2 = tau_p) plus the user-to-pilot assignment and co-pilot groups.
struct PilotBook {
  int tau_p = 0;
  CMatrix sequences;                    // tau_p x tau_p, column t = pilot t
  std::vector<int> assignment;          // t_k per user
  std::vector<std::vector<int>> copilot;  // P_k: users sharing user k's pilot, incl. k
  std::vector<int> used_pilots;           // distinct pilots in use, ascending
  std::vector<int> representative;        // per pilot: lowest user index on it, or -1

  const CVector sequence_of_user(int k) const { return sequences.col(assignment[k]); }
};

/// One-to-one assignment while users fit; past tau_p each extra user takes a
/// least-loaded pilot whose current holders are geographically farthest.
/// Deterministic in the drop.
PilotBook assign_pilots(int num_users, int tau_p, const NetworkDrop& drop);

/// Pilot inner product through the uplink phase matrix:
/// phi_i^T diag(theta) phi_k^*.
cplx pilot_alpha(const CVector& phi_i, const CVector& phi_k, const CVector& theta_diag);

/// Interpretation of the despread-signal covariance. kMatrixWeighted is the
/// actual covariance of the despread observation and the default; kScalarTrace
/// replaces each user's correlation matrix by the identity and exists for
/// sensitivity analysis only.
enum class PsiForm { kMatrixWeighted, kScalarTrace };

/// Covariance of the despread pilot observation for one (AP, pilot) pair:
/// sum_i (p_i / tau_p) |alpha_i|^2 R_i + sigma^2 I.
CMatrix psi_matrix(const std::vector<cplx>& alphas, const Vector& ul_power,
                   const std::vector<const CMatrix*>& correlations, double sigma2, int tau_p,
                   PsiForm form);

/// Per-drop estimation statistics: pilot inner products, despread covariances,
/// LMMSE filters, estimate/error covariances.
struct EstimationSet {
  int num_aps = 0;
  int num_users = 0;
  int antennas = 0;
  int tau_p = 0;
  double sigma2 = 0.0;
  PsiForm form = PsiForm::kMatrixWeighted;
  Vector ul_power;                  // p_i, watts
  std::vector<int> pilot_of_user;   // t_k
  std::vector<int> used_pilots;
  std::vector<int> representative;  // per pilot id: representative user
  std::vector<CMatrix> alpha;       // per AP: K x K, (i, k) -> alpha_iqk
  std::vector<CMatrix> psi;         // per (q, k): M x M (co-pilot users share values)
  std::vector<CMatrix> est_cov;     // B_qk
  std::vector<CMatrix> err_cov;     // C_qk
  std::vector<CMatrix> filter;      // A_qk with h_hat = A_qk y
  Vector tr_est_cov;                // tr(B_qk), flattened q*K + k

  std::size_t index(int q, int k) const {
    return static_cast<std::size_t>(q) * num_users + k;
  }
  cplx alpha_of(int i, int q, int k) const { return alpha[q](i, k); }
  const CMatrix& B(int q, int k) const { return est_cov[index(q, k)]; }
  const CMatrix& C(int q, int k) const { return err_cov[index(q, k)]; }
  const CMatrix& Psi(int q, int k) const { return psi[index(q, k)]; }
  const CMatrix& A(int q, int k) const { return filter[index(q, k)]; }
  double trB(int q, int k) const { return tr_est_cov(index(q, k)); }
};

/// Builds every statistic for one drop. The uplink offsets come from
/// timing.ul_offset; sigma2 is the receiver noise power.
EstimationSet build_estimation(const NetworkDrop& drop, const PilotBook& pilots,
                               const TimingModel& timing, const OfdmConfig& ofdm,
                               const Vector& ul_power, double sigma2, PsiForm form,
                               Diagnostics* diag = nullptr);

/// LMMSE estimate from one despread observation: A_qk * y.
CVector lmmse_estimate(const EstimationSet& est, int q, int k, const CVector& y_despread);

/// Cross matrix linking co-pilot estimates: h_hat_qi = E_iqk h_hat_qk on
/// every realization. Throws std::invalid_argument when the users do not
/// share a pilot or the reference estimate is degenerate; a singular R_qk is
/// regularized with ridge 1e-10 tr(R)/M and flagged in the diagnostics.
CMatrix cross_matrix(const EstimationSet& est, const NetworkDrop& drop, int i, int q, int k,
                     Diagnostics* diag = nullptr);

}  // namespace cfmimo

#endif  // CFMIMO_ESTIMATION_HPP
