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

#ifndef CFMIMO_COMMON_HPP
#define CFMIMO_COMMON_HPP

#include <complex>
#include <cstdint>
#include <string>

#include <Eigen/Dense>

namespace cfmimo {

inline constexpr double kSpeedOfLight = 299792458.0;  // m/s

using cplx = std::complex<double>;
using CMatrix = Eigen::MatrixXcd;
using CVector = Eigen::VectorXcd;
using Matrix = Eigen::MatrixXd;
using Vector = Eigen::VectorXd;
using IMatrix = Eigen::MatrixXi;

/// Counters for numerical events that are reported as warnings, never as
/// hard failures. Everything here leaves the result usable.
struct Diagnostics {
  std::int64_t psd_clips = 0;               // negative eigenvalues clipped to 0
  std::int64_t floored_denominators = 0;    // SINR denominators pushed to the floor
  std::int64_t ill_conditioned_solves = 0;  // condition estimate above 1e12
  std::int64_t regularized_inversions = 0;  // ridge added to a singular matrix
  std::int64_t degenerate_pilots = 0;       // |alpha_kqk| ~ 0, estimate forced to zero

  void merge(const Diagnostics& other) {
    psd_clips += other.psd_clips;
    floored_denominators += other.floored_denominators;
    ill_conditioned_solves += other.ill_conditioned_solves;
    regularized_inversions += other.regularized_inversions;
    degenerate_pilots += other.degenerate_pilots;
  }

  bool clean() const {
    return psd_clips == 0 && floored_denominators == 0 && ill_conditioned_solves == 0 &&
           regularized_inversions == 0 && degenerate_pilots == 0;
  }

  /// Compact single-token summary ("ok" or "k=v|k=v"), safe inside a CSV field.
  std::string summary() const {
    if (clean()) return "ok";
    std::string out;
    auto add = [&out](const char* name, std::int64_t v) {
      if (v == 0) return;
      if (!out.empty()) out += '|';
      out += name;
      out += '=';
      out += std::to_string(v);
    };
    add("psd_clip", psd_clips);
    add("floored_den", floored_denominators);
    add("ill_cond", ill_conditioned_solves);
    add("ridge_inv", regularized_inversions);
    add("degen_pilot", degenerate_pilots);
    return out;
  }
};

/// Real part of tr(A * B); exact trace for Hermitian A, B where the product
/// trace is real analytically.
inline double hermitian_trace_product(const CMatrix& a, const CMatrix& b) {
  return a.cwiseProduct(b.transpose()).sum().real();
}

/// Full complex trace of A * B without forming the product.
inline cplx trace_product(const CMatrix& a, const CMatrix& b) {
  return a.cwiseProduct(b.transpose()).sum();
}

}  // namespace cfmimo

#endif  // CFMIMO_COMMON_HPP
