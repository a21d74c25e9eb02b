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

#include "cfmimo/simulation.hpp"

#include <cmath>
#include <limits>
#include <stdexcept>

namespace cfmimo {

namespace {
// Stream tags: every random consumer of a drop owns a distinct substream so
// enabling or disabling a feature never shifts another one's numbers.
constexpr std::uint64_t kTagTopology = 1;
constexpr std::uint64_t kTagMonteCarlo = 2;
constexpr std::uint64_t kTagLmmseNorm = 3;
}  // namespace

const char* to_string(Scheme s) {
  switch (s) {
    case Scheme::kSync: return "sync";
    case Scheme::kAsync: return "async";
    case Scheme::kMixed: return "mixed";
  }
  return "?";
}

const char* to_string(PrecoderType p) {
  switch (p) {
    case PrecoderType::kMr: return "MR";
    case PrecoderType::kLmmse: return "LMMSE";
  }
  return "?";
}

const char* to_string(ClustererType c) {
  switch (c) {
    case ClustererType::kDistance: return "distance";
    case ClustererType::kFixed: return "fixed";
  }
  return "?";
}

bool parse_scheme(const std::string& text, Scheme* out) {
  if (text == "sync") *out = Scheme::kSync;
  else if (text == "async") *out = Scheme::kAsync;
  else if (text == "mixed") *out = Scheme::kMixed;
  else return false;
  return true;
}

bool parse_precoder(const std::string& text, PrecoderType* out) {
  if (text == "MR") *out = PrecoderType::kMr;
  else if (text == "LMMSE") *out = PrecoderType::kLmmse;
  else return false;
  return true;
}

bool parse_clusterer(const std::string& text, ClustererType* out) {
  if (text == "distance") *out = ClustererType::kDistance;
  else if (text == "fixed") *out = ClustererType::kFixed;
  else return false;
  return true;
}

DropSimulator::DropSimulator(const NetworkConfig& net, const OfdmConfig& ofdm,
                             int serving_set_size, const SimulationOptions& options,
                             std::uint64_t drop_seed)
    : net_(net),
      ofdm_(ofdm),
      serving_set_size_(serving_set_size),
      options_(options),
      drop_seed_(drop_seed) {
  drop_ = generate_drop(net_, mix_seed({drop_seed_, kTagTopology}), &build_diag_);
  pilots_ = assign_pilots(net_.num_users, ofdm_.tau_p(), drop_);
  pilot_column_.assign(pilots_.tau_p, -1);
  for (std::size_t pos = 0; pos < pilots_.used_pilots.size(); ++pos) {
    pilot_column_[pilots_.used_pilots[pos]] = static_cast<int>(pos);
  }

  uncorrelated_ = net_.correlation_model == CorrelationModel::kUncorrelated;
  if (uncorrelated_) {
    sqrt_beta_ = drop_.beta.cwiseSqrt();
  } else {
    sample_factor_.resize(drop_.correlation.size());
    for (std::size_t idx = 0; idx < drop_.correlation.size(); ++idx) {
      Eigen::SelfAdjointEigenSolver<CMatrix> eig(drop_.correlation[idx]);
      const Vector lambda = eig.eigenvalues().cwiseMax(0.0);
      sample_factor_[idx] = eig.eigenvectors() * lambda.cwiseSqrt().asDiagonal();
    }
  }
}

std::vector<int> DropSimulator::eval_subcarriers() const {
  if (!options_.average_over_block) return {ofdm_.eval_subcarrier()};
  std::vector<int> out(ofdm_.tau_p());
  for (int m = 0; m < ofdm_.tau_p(); ++m) {
    out[m] = ofdm_.coherence_block.first_subcarrier + m;
  }
  return out;
}

DropSimulator::Lane& DropSimulator::lane(ClustererType type) {
  auto& slot = lanes_[type == ClustererType::kDistance ? 0 : 1];
  if (!slot.has_value()) slot = build_lane(type);
  return *slot;
}

DropSimulator::Lane DropSimulator::build_lane(ClustererType type) {
  Lane lane;
  lane.plan = type == ClustererType::kDistance
                  ? cluster_by_distance(drop_, serving_set_size_, ofdm_.sampling_distance())
                  : fixed_baseline(drop_, serving_set_size_);
  lane.timing = make_timing(drop_, lane.plan.serving, lane.plan.served, ofdm_,
                            options_.ul_timing_mode);
  Vector ul_power = Vector::Constant(drop_.num_users(), options_.ul_power);
  lane.est = build_estimation(drop_, pilots_, lane.timing, ofdm_, ul_power, sigma2(),
                              options_.psi_form, &build_diag_);
  lane.power = equal_power(lane.plan, options_.ap_power);

  const int k_count = drop_.num_users();
  lane.single_clusters.resize(k_count);
  for (int k = 0; k < k_count; ++k) lane.single_clusters[k] = {lane.plan.serving[k]};
  lane.single_counts.assign(k_count, 1);
  lane.mixed_counts = lane.plan.cluster_count;

  const int q_count = drop_.num_aps();
  for (int n : eval_subcarriers()) {
    CMatrix chi(q_count, k_count);
    for (int q = 0; q < q_count; ++q) {
      for (int k = 0; k < k_count; ++k) {
        chi(q, k) = phase_shift(lane.timing.dl_offset(q, k), n, ofdm_.num_subcarriers);
      }
    }
    lane.chi.push_back(std::move(chi));
  }
  lane.unit_phase = CMatrix::Constant(q_count, k_count, cplx(1.0, 0.0));

  // Realization-invariant despreading gains, one gemm per AP at runtime.
  const int used = static_cast<int>(pilots_.used_pilots.size());
  lane.despread_gain.resize(q_count);
  for (int q = 0; q < q_count; ++q) {
    CMatrix gain(k_count, used);
    for (int pos = 0; pos < used; ++pos) {
      const int rep = pilots_.representative[pilots_.used_pilots[pos]];
      for (int i = 0; i < k_count; ++i) {
        gain(i, pos) = std::sqrt(ul_power(i) / pilots_.tau_p) * lane.est.alpha[q](i, rep);
      }
    }
    lane.despread_gain[q] = std::move(gain);
  }

  lane.lmmse_err_sum.resize(q_count);
  const int m = drop_.antennas;
  for (int q = 0; q < q_count; ++q) {
    CMatrix sum = sigma2() * CMatrix::Identity(m, m);
    for (int i : lane.plan.served[q]) sum += ul_power(i) * lane.est.C(q, i);
    lane.lmmse_err_sum[q] = sum;
  }
  lane.lmmse_normalizer =
      Matrix::Constant(q_count, k_count, std::numeric_limits<double>::quiet_NaN());
  return lane;
}

void DropSimulator::draw_channels(RandomStream& stream, std::vector<CMatrix>* h) const {
  const int q_count = drop_.num_aps();
  const int k_count = drop_.num_users();
  const int m = drop_.antennas;
  h->resize(q_count);
  CVector z(m);
  for (int q = 0; q < q_count; ++q) {
    CMatrix& hq = (*h)[q];
    hq.resize(m, k_count);
    for (int k = 0; k < k_count; ++k) {
      stream.fill_complex_gaussian(z);
      if (uncorrelated_) {
        hq.col(k) = sqrt_beta_(q, k) * z;
      } else {
        hq.col(k).noalias() = sample_factor_[static_cast<std::size_t>(q) * k_count + k] * z;
      }
    }
  }
}

void DropSimulator::draw_pilot_noise(RandomStream& stream, std::vector<CMatrix>* noise) const {
  const int q_count = drop_.num_aps();
  const int used = static_cast<int>(pilots_.used_pilots.size());
  const int m = drop_.antennas;
  noise->resize(q_count);
  for (int q = 0; q < q_count; ++q) {
    CMatrix& nq = (*noise)[q];
    nq.resize(m, used);
    for (int t = 0; t < used; ++t) {
      stream.fill_complex_gaussian(nq.col(t), sigma2());
    }
  }
}

void DropSimulator::estimate_channels(const Lane& lane, const std::vector<CMatrix>& h,
                                      const std::vector<CMatrix>& noise,
                                      std::vector<CMatrix>* estimates) const {
  const int q_count = drop_.num_aps();
  const int k_count = drop_.num_users();
  const int m = drop_.antennas;
  estimates->resize(q_count);
  CMatrix despread(m, static_cast<int>(pilots_.used_pilots.size()));
  for (int q = 0; q < q_count; ++q) {
    despread = noise[q];
    despread.noalias() += h[q] * lane.despread_gain[q];
    CMatrix& out = (*estimates)[q];
    out.resize(m, k_count);
    for (int k = 0; k < k_count; ++k) {
      const int pos = pilot_column_[pilots_.assignment[k]];
      out.col(k).noalias() = lane.est.A(q, k) * despread.col(pos);
    }
  }
}

void DropSimulator::precode(Lane& lane, PrecoderType type, const std::vector<CMatrix>& estimates,
                            std::vector<CMatrix>* w, Diagnostics* diag) {
  const int q_count = drop_.num_aps();
  const int k_count = drop_.num_users();
  const int m = drop_.antennas;
  if (type == PrecoderType::kLmmse && !lane.lmmse_ready) ensure_lmmse_normalizers(lane);
  w->resize(q_count);
  for (int q = 0; q < q_count; ++q) {
    CMatrix& wq = (*w)[q];
    wq = CMatrix::Zero(m, k_count);
    const auto& served = lane.plan.served[q];
    if (served.empty()) continue;
    if (type == PrecoderType::kMr) {
      for (int k : served) {
        wq.col(k) =
            normalize_precoder(estimates[q].col(k), lane.est.trB(q, k), lane.power.rho(q, k));
      }
    } else {
      CMatrix cols(m, static_cast<int>(served.size()));
      Vector powers(static_cast<Eigen::Index>(served.size()));
      for (std::size_t j = 0; j < served.size(); ++j) {
        cols.col(static_cast<Eigen::Index>(j)) = estimates[q].col(served[j]);
        powers(static_cast<Eigen::Index>(j)) = lane.est.ul_power(served[j]);
      }
      const CMatrix dirs = lmmse_directions(cols, powers, lane.lmmse_err_sum[q], diag);
      for (std::size_t j = 0; j < served.size(); ++j) {
        const int k = served[j];
        wq.col(k) = normalize_precoder(dirs.col(static_cast<Eigen::Index>(j)),
                                       lane.lmmse_normalizer(q, k), lane.power.rho(q, k));
      }
    }
  }
}

std::vector<CMatrix> DropSimulator::coupling(const std::vector<CMatrix>& h,
                                             const std::vector<CMatrix>& w) {
  std::vector<CMatrix> g(h.size());
  for (std::size_t q = 0; q < h.size(); ++q) {
    g[q].noalias() = h[q].adjoint() * w[q];
  }
  return g;
}

void DropSimulator::ensure_lmmse_normalizers(Lane& lane) {
  if (lane.lmmse_ready) return;
  const int q_count = drop_.num_aps();
  const int k_count = drop_.num_users();
  const int m = drop_.antennas;
  Matrix sums = Matrix::Zero(q_count, k_count);
  RandomStream stream(mix_seed({drop_seed_, kTagLmmseNorm}));
  std::vector<CMatrix> h;
  std::vector<CMatrix> noise;
  std::vector<CMatrix> estimates;
  const int batch = options_.lmmse_normalizer_realizations;
  CMatrix cols;
  for (int r = 0; r < batch; ++r) {
    draw_channels(stream, &h);
    draw_pilot_noise(stream, &noise);
    estimate_channels(lane, h, noise, &estimates);
    for (int q = 0; q < q_count; ++q) {
      const auto& served = lane.plan.served[q];
      if (served.empty()) continue;
      cols.resize(m, static_cast<int>(served.size()));
      Vector powers(static_cast<Eigen::Index>(served.size()));
      for (std::size_t j = 0; j < served.size(); ++j) {
        cols.col(static_cast<Eigen::Index>(j)) = estimates[q].col(served[j]);
        powers(static_cast<Eigen::Index>(j)) = lane.est.ul_power(served[j]);
      }
      const CMatrix dirs = lmmse_directions(cols, powers, lane.lmmse_err_sum[q], nullptr);
      for (std::size_t j = 0; j < served.size(); ++j) {
        sums(q, served[j]) += dirs.col(static_cast<Eigen::Index>(j)).squaredNorm();
      }
    }
  }
  lane.lmmse_normalizer = sums / static_cast<double>(batch);
  lane.lmmse_ready = true;
}

Vector DropSimulator::closed_form(ClustererType type, int subcarrier) {
  Lane& l = lane(type);
  const int q_count = drop_.num_aps();
  const int k_count = drop_.num_users();
  CMatrix chi(q_count, k_count);
  for (int q = 0; q < q_count; ++q) {
    for (int k = 0; k < k_count; ++k) {
      chi(q, k) = phase_shift(l.timing.dl_offset(q, k), subcarrier, ofdm_.num_subcarriers);
    }
  }
  return closed_form_mr_sinr(drop_, l.est, pilots_, l.plan, l.power, chi, sigma2());
}

DropOutput DropSimulator::run(const std::vector<Scheme>& schemes,
                              const std::vector<PrecoderType>& precoders,
                              const std::vector<ClustererType>& clusterers) {
  DropOutput out;
  out.drop_seed = drop_seed_;

  const std::vector<int> eval_ns = eval_subcarriers();
  const int num_ns = static_cast<int>(eval_ns.size());

  struct ComboAcc {
    std::vector<MomentAccumulator> per_n;
    Diagnostics diag;
  };
  // Indexed [clusterer][precoder][scheme].
  std::vector<ComboAcc> accs(clusterers.size() * precoders.size() * schemes.size());
  auto acc_at = [&](std::size_t c, std::size_t p, std::size_t s) -> ComboAcc& {
    return accs[(c * precoders.size() + p) * schemes.size() + s];
  };
  // Precoding events are shared by all schemes of a (clusterer, precoder) pair.
  std::vector<Diagnostics> precode_diag(clusterers.size() * precoders.size());

  for (std::size_t c = 0; c < clusterers.size(); ++c) {
    Lane& l = lane(clusterers[c]);
    for (std::size_t p = 0; p < precoders.size(); ++p) {
      if (precoders[p] == PrecoderType::kLmmse) ensure_lmmse_normalizers(l);
      for (std::size_t s = 0; s < schemes.size(); ++s) {
        auto& acc = acc_at(c, p, s);
        acc.per_n.reserve(num_ns);
        const auto& counts =
            schemes[s] == Scheme::kMixed ? l.mixed_counts : l.single_counts;
        for (int n = 0; n < num_ns; ++n) acc.per_n.push_back(MomentAccumulator::make(counts));
      }
    }
  }

  RandomStream stream(mix_seed({drop_seed_, kTagMonteCarlo}));
  std::vector<CMatrix> h;
  std::vector<CMatrix> noise;
  std::vector<CMatrix> estimates;
  std::vector<CMatrix> w;
  for (int r = 0; r < options_.realizations_per_drop; ++r) {
    draw_channels(stream, &h);
    draw_pilot_noise(stream, &noise);
    for (std::size_t c = 0; c < clusterers.size(); ++c) {
      Lane& l = lane(clusterers[c]);
      estimate_channels(l, h, noise, &estimates);
      for (std::size_t p = 0; p < precoders.size(); ++p) {
        precode(l, precoders[p], estimates, &w, &precode_diag[c * precoders.size() + p]);
        const std::vector<CMatrix> g = coupling(h, w);
        for (std::size_t s = 0; s < schemes.size(); ++s) {
          const bool mixed = schemes[s] == Scheme::kMixed;
          const auto& clusters = mixed ? l.plan.clusters : l.single_clusters;
          for (int n = 0; n < num_ns; ++n) {
            const CMatrix& phase =
                schemes[s] == Scheme::kSync ? l.unit_phase : l.chi[static_cast<std::size_t>(n)];
            accumulate_moments(&acc_at(c, p, s).per_n[n], g, phase, clusters);
          }
        }
      }
    }
  }

  // Reports in scheme-major order to match the CSV layout.
  const int mid = num_ns / 2;
  for (std::size_t s = 0; s < schemes.size(); ++s) {
    for (std::size_t p = 0; p < precoders.size(); ++p) {
      for (std::size_t c = 0; c < clusterers.size(); ++c) {
        ComboAcc& acc = acc_at(c, p, s);
        Diagnostics combo_diag = acc.diag;
        combo_diag.merge(precode_diag[c * precoders.size() + p]);
        RateReport report;
        if (num_ns == 1) {
          const Vector gamma = uatf_sinr(acc.per_n[0], sigma2(), &combo_diag);
          report = spectral_efficiency(gamma, ofdm_, eval_ns[0]);
        } else {
          Vector se_sum = Vector::Zero(drop_.num_users());
          Vector gamma_mid;
          for (int n = 0; n < num_ns; ++n) {
            const Vector gamma = uatf_sinr(acc.per_n[n], sigma2(), &combo_diag);
            if (n == mid) gamma_mid = gamma;
            se_sum += spectral_efficiency(gamma, ofdm_, eval_ns[n]).se;
          }
          report = spectral_efficiency(gamma_mid, ofdm_, eval_ns[mid]);
          report.se = se_sum / static_cast<double>(num_ns);
          report.sum_se = report.se.sum();
        }
        combo_diag.merge(build_diag_);
        out.rows.push_back(
            {schemes[s], precoders[p], clusterers[c], std::move(report), combo_diag});
      }
    }
  }
  out.build_diagnostics = build_diag_;
  return out;
}

}  // namespace cfmimo
