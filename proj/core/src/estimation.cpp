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

#include "cfmimo/estimation.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numbers>
#include <stdexcept>

namespace cfmimo {

PilotBook assign_pilots(int num_users, int tau_p, const NetworkDrop& drop) {
  if (tau_p < 1) throw std::invalid_argument("assign_pilots: tau_p must be >= 1");
  PilotBook book;
  book.tau_p = tau_p;
  book.sequences.resize(tau_p, tau_p);
  for (int t = 0; t < tau_p; ++t) {
    for (int m = 0; m < tau_p; ++m) {
      book.sequences(m, t) =
          std::polar(1.0, -2.0 * std::numbers::pi * static_cast<double>(m) * t / tau_p);
    }
  }

  book.assignment.resize(num_users);
  std::vector<std::vector<int>> users_of_pilot(tau_p);
  const int direct = std::min(num_users, tau_p);
  for (int k = 0; k < direct; ++k) {
    book.assignment[k] = k;
    users_of_pilot[k].push_back(k);
  }

  // Reuse: among the least-loaded pilots pick the one whose current holders
  // are farthest from the new user, ties to the lowest pilot index.
  auto user_gap = [&drop](int a, int b) {
    const Eigen::Vector2d pa = drop.user_positions.row(a);
    const Eigen::Vector2d pb = drop.user_positions.row(b);
    return drop.wrap_around ? wrap_distance(pa, pb, drop.area_side, 0.0)
                            : plain_distance(pa, pb, 0.0);
  };
  for (int k = tau_p; k < num_users; ++k) {
    std::size_t min_load = std::numeric_limits<std::size_t>::max();
    for (const auto& u : users_of_pilot) min_load = std::min(min_load, u.size());
    int best = -1;
    double best_gap = -1.0;
    for (int t = 0; t < tau_p; ++t) {
      if (users_of_pilot[t].size() != min_load) continue;
      double gap = std::numeric_limits<double>::infinity();
      for (int other : users_of_pilot[t]) gap = std::min(gap, user_gap(k, other));
      if (gap > best_gap) {
        best_gap = gap;
        best = t;
      }
    }
    book.assignment[k] = best;
    users_of_pilot[best].push_back(k);
  }

  book.copilot.resize(num_users);
  for (int k = 0; k < num_users; ++k) book.copilot[k] = users_of_pilot[book.assignment[k]];
  book.representative.assign(tau_p, -1);
  for (int t = 0; t < tau_p; ++t) {
    if (!users_of_pilot[t].empty()) {
      book.representative[t] = users_of_pilot[t].front();
      book.used_pilots.push_back(t);
    }
  }
  return book;
}

cplx pilot_alpha(const CVector& phi_i, const CVector& phi_k, const CVector& theta_diag) {
  return (phi_i.array() * theta_diag.array() * phi_k.conjugate().array()).sum();
}

CMatrix psi_matrix(const std::vector<cplx>& alphas, const Vector& ul_power,
                   const std::vector<const CMatrix*>& correlations, double sigma2, int tau_p,
                   PsiForm form) {
  const int m = static_cast<int>(correlations.front()->rows());
  CMatrix out = sigma2 * CMatrix::Identity(m, m);
  for (std::size_t i = 0; i < alphas.size(); ++i) {
    const double weight = ul_power(static_cast<Eigen::Index>(i)) / tau_p * std::norm(alphas[i]);
    if (weight == 0.0) continue;
    if (form == PsiForm::kMatrixWeighted) {
      out += weight * (*correlations[i]);
    } else {
      out += weight * CMatrix::Identity(m, m);
    }
  }
  return out;
}

EstimationSet build_estimation(const NetworkDrop& drop, const PilotBook& pilots,
                               const TimingModel& timing, const OfdmConfig& ofdm,
                               const Vector& ul_power, double sigma2, PsiForm form,
                               Diagnostics* diag) {
  const int q_count = drop.num_aps();
  const int k_count = drop.num_users();
  const int m = drop.antennas;
  const int tau_p = pilots.tau_p;
  if (ul_power.size() != k_count) {
    throw std::invalid_argument("build_estimation: ul_power must have one entry per user");
  }
  if (!(sigma2 > 0.0)) throw std::invalid_argument("build_estimation: sigma2 must be > 0");

  EstimationSet est;
  est.num_aps = q_count;
  est.num_users = k_count;
  est.antennas = m;
  est.tau_p = tau_p;
  est.sigma2 = sigma2;
  est.form = form;
  est.ul_power = ul_power;
  est.pilot_of_user = pilots.assignment;
  est.used_pilots = pilots.used_pilots;
  est.representative = pilots.representative;
  est.alpha.resize(q_count);
  est.psi.resize(static_cast<std::size_t>(q_count) * k_count);
  est.est_cov.resize(est.psi.size());
  est.err_cov.resize(est.psi.size());
  est.filter.resize(est.psi.size());
  est.tr_est_cov.resize(static_cast<Eigen::Index>(est.psi.size()));

  for (int q = 0; q < q_count; ++q) {
    // Phase diagonals depend on the transmitting user's uplink offset only.
    std::vector<CVector> theta(k_count);
    for (int i = 0; i < k_count; ++i) {
      theta[i] = ul_phase_diagonal(timing.ul_offset(q, i), ofdm);
    }
    CMatrix& a = est.alpha[q];
    a.resize(k_count, k_count);
    for (int i = 0; i < k_count; ++i) {
      for (int k = 0; k < k_count; ++k) {
        a(i, k) = pilot_alpha(pilots.sequences.col(pilots.assignment[i]),
                              pilots.sequences.col(pilots.assignment[k]), theta[i]);
      }
    }

    // One covariance and factorization per pilot in use.
    std::vector<CMatrix> psi_of_pilot(tau_p);
    std::vector<Eigen::LLT<CMatrix>> llt_of_pilot(tau_p);
    for (int t : pilots.used_pilots) {
      const int rep = pilots.representative[t];
      std::vector<cplx> alphas(k_count);
      std::vector<const CMatrix*> corrs(k_count);
      for (int i = 0; i < k_count; ++i) {
        alphas[i] = a(i, rep);
        corrs[i] = &drop.spatial_correlation(q, i);
      }
      psi_of_pilot[t] = psi_matrix(alphas, ul_power, corrs, sigma2, tau_p, form);
      llt_of_pilot[t].compute(psi_of_pilot[t]);
    }

    for (int k = 0; k < k_count; ++k) {
      const std::size_t idx = est.index(q, k);
      const int t = pilots.assignment[k];
      const CMatrix& r = drop.spatial_correlation(q, k);
      est.psi[idx] = psi_of_pilot[t];
      const cplx a_self = a(k, k);
      const double scale = ul_power(k) / tau_p * std::norm(a_self);
      if (std::norm(a_self) < 1e-24 * static_cast<double>(tau_p) * tau_p) {
        // Despread pilot energy vanished; the LMMSE estimate degenerates to 0.
        est.filter[idx] = CMatrix::Zero(m, m);
        est.est_cov[idx] = CMatrix::Zero(m, m);
        est.err_cov[idx] = r;
        est.tr_est_cov(static_cast<Eigen::Index>(idx)) = 0.0;
        if (diag) diag->degenerate_pilots++;
        continue;
      }
      const CMatrix psi_inv_r = llt_of_pilot[t].solve(r);  // Psi^{-1} R
      est.filter[idx] =
          std::sqrt(ul_power(k) / tau_p) * std::conj(a_self) * psi_inv_r.adjoint();
      CMatrix b = scale * (r * psi_inv_r);
      b = 0.5 * (b + b.adjoint().eval());  // symmetrize rounding noise
      est.est_cov[idx] = b;
      est.err_cov[idx] = r - b;
      est.tr_est_cov(static_cast<Eigen::Index>(idx)) = b.real().trace();
    }
  }
  return est;
}

CVector lmmse_estimate(const EstimationSet& est, int q, int k, const CVector& y_despread) {
  return est.A(q, k) * y_despread;
}

CMatrix cross_matrix(const EstimationSet& est, const NetworkDrop& drop, int i, int q, int k,
                     Diagnostics* diag) {
  if (est.pilot_of_user[i] != est.pilot_of_user[k]) {
    throw std::invalid_argument("cross_matrix: users do not share a pilot");
  }
  const cplx a_ref = est.alpha_of(k, q, k);
  if (std::norm(a_ref) < 1e-24 * static_cast<double>(est.tau_p) * est.tau_p) {
    throw std::invalid_argument("cross_matrix: degenerate pilot, reference estimate undefined");
  }
  const CMatrix& r_k = drop.spatial_correlation(q, k);
  const CMatrix& r_i = drop.spatial_correlation(q, i);
  Eigen::LLT<CMatrix> llt(r_k);
  CMatrix r_inv_ri;
  if (llt.info() == Eigen::Success) {
    r_inv_ri = llt.solve(r_i);
  } else {
    const double ridge = 1e-10 * r_k.real().trace() / r_k.rows();
    CMatrix reg = r_k + ridge * CMatrix::Identity(r_k.rows(), r_k.cols());
    r_inv_ri = Eigen::LLT<CMatrix>(reg).solve(r_i);
    if (diag) diag->regularized_inversions++;
  }
  const cplx factor = std::sqrt(est.ul_power(i) / est.ul_power(k)) *
                      std::conj(est.alpha_of(i, q, k) / a_ref);
  // R_qi R_qk^{-1} = (R_qk^{-1} R_qi)^H for Hermitian inputs.
  return factor * r_inv_ri.adjoint();
}

}  // namespace cfmimo
