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

namespace cfmimo {

PowerAllocation equal_power(const ClusterPlan& plan, double ap_budget) {
  PowerAllocation alloc;
  alloc.ap_budget = ap_budget;
  alloc.rho = Matrix::Zero(plan.num_aps(), plan.num_users());
  for (int q = 0; q < plan.num_aps(); ++q) {
    if (plan.served[q].empty()) continue;
    const double share = ap_budget / static_cast<double>(plan.served[q].size());
    for (int k : plan.served[q]) alloc.rho(q, k) = share;
  }
  return alloc;
}

CVector normalize_precoder(const CVector& direction, double mean_sq_norm, double rho) {
  if (!(rho > 0.0) || !(mean_sq_norm > 0.0)) return CVector::Zero(direction.size());
  return direction * std::sqrt(rho / mean_sq_norm);
}

CMatrix lmmse_directions(const CMatrix& estimates, const Vector& powers,
                         const CMatrix& err_cov_sum, Diagnostics* diag) {
  CMatrix gram = err_cov_sum;
  for (Eigen::Index j = 0; j < estimates.cols(); ++j) {
    gram.noalias() += powers(j) * (estimates.col(j) * estimates.col(j).adjoint());
  }
  Eigen::LLT<CMatrix> llt(gram);
  if (diag) {
    // Cheap condition proxy from the Cholesky diagonal.
    const Vector d = llt.matrixLLT().diagonal().real();
    const double dmax = d.maxCoeff();
    const double dmin = d.minCoeff();
    if (!(dmin > 0.0) || (dmax / dmin) * (dmax / dmin) > 1e12) {
      diag->ill_conditioned_solves++;
    }
  }
  CMatrix dirs = llt.solve(estimates);
  for (Eigen::Index j = 0; j < dirs.cols(); ++j) dirs.col(j) *= powers(j);
  return dirs;
}

}  // namespace cfmimo
