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

#include "cfmimo/rate.hpp"

#include <cmath>
#include <stdexcept>

namespace cfmimo {

MomentAccumulator MomentAccumulator::make(const std::vector<int>& cluster_counts) {
  MomentAccumulator acc;
  const int k_count = static_cast<int>(cluster_counts.size());
  acc.desired_sum.resize(k_count);
  acc.interference_sum.resize(k_count);
  for (int k = 0; k < k_count; ++k) {
    acc.desired_sum[k] = CVector::Zero(cluster_counts[k]);
    acc.interference_sum[k].resize(k_count);
    for (int i = 0; i < k_count; ++i) {
      acc.interference_sum[k][i] = Vector::Zero(cluster_counts[i]);
    }
  }
  return acc;
}

void MomentAccumulator::merge(const MomentAccumulator& other) {
  if (num_users() != other.num_users()) {
    throw std::invalid_argument("MomentAccumulator::merge: shape mismatch");
  }
  for (int k = 0; k < num_users(); ++k) {
    desired_sum[k] += other.desired_sum[k];
    for (int i = 0; i < num_users(); ++i) {
      interference_sum[k][i] += other.interference_sum[k][i];
    }
  }
  num_samples += other.num_samples;
}

double MomentAccumulator::total_interference(int k) const {
  double total = 0.0;
  for (int i = 0; i < num_users(); ++i) {
    total += interference_sum[k][i].sum();
  }
  return total / static_cast<double>(num_samples);
}

double MomentAccumulator::desired_power(int k) const {
  double power = 0.0;
  for (int l = 0; l < clusters_of(k); ++l) power += std::norm(desired_mean(k, l));
  return power;
}

void accumulate_moments(MomentAccumulator* acc, const std::vector<CMatrix>& coupling,
                        const CMatrix& phase,
                        const std::vector<std::vector<std::vector<int>>>& clusters) {
  const int k_count = acc->num_users();
  for (int k = 0; k < k_count; ++k) {
    // Desired signal: per-cluster sums toward user k from its own clusters.
    // The received sample is (chi h)^H w, hence the conjugated phase.
    CVector& des = acc->desired_sum[k];
    const auto& own = clusters[k];
    for (std::size_t l = 0; l < own.size(); ++l) {
      cplx s = 0.0;
      for (int q : own[l]) s += std::conj(phase(q, k)) * coupling[q](k, k);
      des(static_cast<Eigen::Index>(l)) += s;
    }
    // Interference power: one |cluster sum|^2 per transmitter cluster.
    for (int i = 0; i < k_count; ++i) {
      Vector& row = acc->interference_sum[k][i];
      const auto& tx = clusters[i];
      for (std::size_t li = 0; li < tx.size(); ++li) {
        cplx s = 0.0;
        for (int q : tx[li]) s += std::conj(phase(q, k)) * coupling[q](k, i);
        row(static_cast<Eigen::Index>(li)) += std::norm(s);
      }
    }
  }
  acc->num_samples++;
}

Vector uatf_sinr(const MomentAccumulator& acc, double sigma2, Diagnostics* diag,
                 const SinrOptions& opts) {
  if (acc.num_samples < 1) throw std::invalid_argument("uatf_sinr: empty accumulator");
  Vector gamma(acc.num_users());
  for (int k = 0; k < acc.num_users(); ++k) {
    const double desired = acc.desired_power(k);
    double den = acc.total_interference(k) - desired + sigma2;
    if (den < opts.denominator_floor) {
      den = opts.denominator_floor;
      if (diag) diag->floored_denominators++;
    }
    gamma(k) = desired / den;
  }
  return gamma;
}

std::vector<Vector> sic_cluster_sinrs(const MomentAccumulator& acc, double sigma2,
                                      const std::vector<std::vector<int>>* decode_order,
                                      Diagnostics* diag, const SinrOptions& opts) {
  if (acc.num_samples < 1) throw std::invalid_argument("sic_cluster_sinrs: empty accumulator");
  std::vector<Vector> out(acc.num_users());
  for (int k = 0; k < acc.num_users(); ++k) {
    const int num_clusters = acc.clusters_of(k);
    const double total = acc.total_interference(k);
    Vector gammas(num_clusters);
    double removed = 0.0;
    for (int step = 0; step < num_clusters; ++step) {
      const int cluster = decode_order ? (*decode_order)[k][step] : step;
      const double power = std::norm(acc.desired_mean(k, cluster));
      removed += power;  // the decoded cluster leaves the residual with itself
      double den = total - removed + sigma2;
      if (den < opts.denominator_floor) {
        den = opts.denominator_floor;
        if (diag) diag->floored_denominators++;
      }
      gammas(step) = power / den;
    }
    out[k] = gammas;
  }
  return out;
}

Vector closed_form_mr_sinr(const NetworkDrop& drop, const EstimationSet& est,
                           const PilotBook& pilots, const ClusterPlan& plan,
                           const PowerAllocation& power, const CMatrix& chi, double sigma2,
                           Diagnostics*) {
  const int k_count = drop.num_users();
  Vector gamma(k_count);

  // tr(E_iqk B_qk) reduced through B's definition:
  // sqrt(p_i p_k)/tau_p * conj(alpha_iqk) alpha_kqk * tr(R_qi Psi^{-1} R_qk).
  auto contamination_trace = [&](int i, int q, int k) -> cplx {
    const cplx a_i = est.alpha_of(i, q, k);
    const cplx a_k = est.alpha_of(k, q, k);
    const Eigen::LLT<CMatrix> llt(est.Psi(q, k));
    const CMatrix solved = llt.solve(drop.spatial_correlation(q, k));
    const cplx tr = trace_product(drop.spatial_correlation(q, i), solved);
    return std::sqrt(est.ul_power(i) * est.ul_power(k)) / est.tau_p * std::conj(a_i) * a_k * tr;
  };

  for (int k = 0; k < k_count; ++k) {
    double numerator = 0.0;
    for (const auto& cluster : plan.clusters[k]) {
      double coherent = 0.0;
      for (int q : cluster) {
        coherent += std::sqrt(power.rho(q, k) * est.trB(q, k));
      }
      numerator += coherent * coherent;
    }

    // Non-coherent part: every transmitter contributes
    // rho_qi tr(R_qk B_qi) / tr(B_qi) per serving AP.
    double noncoherent = 0.0;
    for (int i = 0; i < k_count; ++i) {
      for (int q : plan.serving[i]) {
        const double trb = est.trB(q, i);
        if (!(trb > 0.0)) continue;  // AP has no estimate power for user i
        noncoherent += power.rho(q, i) *
                       hermitian_trace_product(drop.spatial_correlation(q, k), est.B(q, i)) /
                       trb;
      }
    }

    // Coherent pilot contamination from users sharing user k's pilot.
    double contamination = 0.0;
    for (int i : pilots.copilot[k]) {
      if (i == k) continue;
      for (const auto& cluster : plan.clusters[i]) {
        cplx s = 0.0;
        for (int q : cluster) {
          const double trb = est.trB(q, i);
          if (!(trb > 0.0)) continue;
          s += std::conj(chi(q, k)) * std::sqrt(power.rho(q, i) / trb) *
               contamination_trace(i, q, k);
        }
        contamination += std::norm(s);
      }
    }

    gamma(k) = numerator / (noncoherent + contamination + sigma2);
  }
  return gamma;
}

RateReport spectral_efficiency(const Vector& gamma, const OfdmConfig& ofdm, int subcarrier) {
  RateReport report;
  report.sinr = gamma;
  report.prefactor = (static_cast<double>(ofdm.tau_d()) / ofdm.tau()) *
                     (static_cast<double>(ofdm.num_subcarriers) / ofdm.symbol_length());
  report.subcarrier = subcarrier;
  report.se.resize(gamma.size());
  for (Eigen::Index k = 0; k < gamma.size(); ++k) {
    report.se(k) = report.prefactor * std::log2(1.0 + gamma(k));
  }
  report.sum_se = report.se.sum();
  return report;
}

}  // namespace cfmimo
