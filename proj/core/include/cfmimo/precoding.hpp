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

#ifndef CFMIMO_PRECODING_HPP
#define CFMIMO_PRECODING_HPP

#include "cfmimo/clustering.hpp"
#include "cfmimo/common.hpp"

namespace cfmimo {

/// Transmit power each AP assigns to each user; zero off the served sets and
/// row sums bounded by the per-AP budget.
struct PowerAllocation {
  Matrix rho;             // Q x K, watts
  double ap_budget = 0.0; // P_ap, watts
};

/// Equal split of the AP budget across the users it serves.
PowerAllocation equal_power(const ClusterPlan& plan, double ap_budget);

/// MR direction is the channel estimate itself; its average-power normalizer
/// is tr(B_qk) in closed form.
inline const CVector& mr_direction(const CVector& estimate) { return estimate; }

/// w = sqrt(rho) * direction / sqrt(E{||direction||^2}). Zero power or a zero
/// normalizer yields the zero vector.
CVector normalize_precoder(const CVector& direction, double mean_sq_norm, double rho);

/// Local MMSE directions for one AP: column j solves
/// (sum_i p_i (h_hat_i h_hat_i^H + C_i) + sigma^2 I) w = p_j h_hat_j
/// over the served users. `estimates` holds the served estimates as columns,
/// `err_cov_sum` is sigma^2 I + sum_i p_i C_i (realization-invariant part).
/// Condition estimates above 1e12 bump the diagnostics counter.
CMatrix lmmse_directions(const CMatrix& estimates, const Vector& powers,
                         const CMatrix& err_cov_sum, Diagnostics* diag = nullptr);

}  // namespace cfmimo

#endif  // CFMIMO_PRECODING_HPP
