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
//
// Self-contained counter-seeded random streams. The standard <random>
// distributions are implementation-defined, so every sampled value here is
// produced by our own generators to keep runs bit-reproducible across
// toolchains and independent of worker scheduling.

#ifndef CFMIMO_RNG_HPP
#define CFMIMO_RNG_HPP

#include <cmath>
#include <cstdint>
#include <initializer_list>
#include <numbers>

#include "cfmimo/common.hpp"

namespace cfmimo {

class SplitMix64 {
 public:
  explicit constexpr SplitMix64(std::uint64_t seed) : state_(seed) {}

  constexpr std::uint64_t next() {
    std::uint64_t z = (state_ += 0x9E3779B97F4A7C15ull);
    z = (z ^ (z >> 30)) * 0xBF58476D1CE4E5B9ull;
    z = (z ^ (z >> 27)) * 0x94D049BB133111EBull;
    return z ^ (z >> 31);
  }

 private:
  std::uint64_t state_;
};

/// Folds a list of words (seed, drop index, stream tag, ...) into one seed.
/// Streams derived from distinct word lists are decorrelated, so worker
/// scheduling can never change which numbers a drop sees.
inline std::uint64_t mix_seed(std::initializer_list<std::uint64_t> words) {
  std::uint64_t h = 0xA0761D6478BD642Full;
  for (std::uint64_t w : words) {
    SplitMix64 sm(h ^ (w + 0x9E3779B97F4A7C15ull));
    h = sm.next();
  }
  return h;
}

class Xoshiro256PlusPlus {
 public:
  explicit Xoshiro256PlusPlus(std::uint64_t seed) {
    SplitMix64 sm(seed);
    for (auto& s : state_) s = sm.next();
  }

  std::uint64_t next() {
    const std::uint64_t result = rotl(state_[0] + state_[3], 23) + state_[0];
    const std::uint64_t t = state_[1] << 17;
    state_[2] ^= state_[0];
    state_[3] ^= state_[1];
    state_[1] ^= state_[2];
    state_[0] ^= state_[3];
    state_[2] ^= t;
    state_[3] = rotl(state_[3], 45);
    return result;
  }

 private:
  static constexpr std::uint64_t rotl(std::uint64_t x, int k) {
    return (x << k) | (x >> (64 - k));
  }
  std::uint64_t state_[4];
};

/// One independent random stream: uniforms, Box-Muller Gaussians and
/// circularly symmetric complex Gaussians.
class RandomStream {
 public:
  explicit RandomStream(std::uint64_t seed) : gen_(seed) {}

  static RandomStream substream(std::uint64_t base, std::uint64_t a, std::uint64_t b = 0) {
    return RandomStream(mix_seed({base, a, b}));
  }

  /// Uniform in [0, 1).
  double uniform() { return static_cast<double>(gen_.next() >> 11) * 0x1.0p-53; }

  /// Uniform in (0, 1), both endpoints excluded.
  double uniform_open() {
    return (static_cast<double>(gen_.next() >> 11) + 0.5) * 0x1.0p-53;
  }

  double uniform(double lo, double hi) { return lo + (hi - lo) * uniform(); }

  /// Standard normal via Box-Muller; the second deviate of each pair is cached.
  double gaussian() {
    if (have_cached_) {
      have_cached_ = false;
      return cached_;
    }
    const double r = std::sqrt(-2.0 * std::log(uniform_open()));
    const double t = 2.0 * std::numbers::pi * uniform();
    cached_ = r * std::sin(t);
    have_cached_ = true;
    return r * std::cos(t);
  }

  /// CN(0, 1): unit-variance circularly symmetric complex Gaussian.
  cplx complex_gaussian() {
    const double s = std::numbers::sqrt2 / 2.0;
    return {gaussian() * s, gaussian() * s};
  }

  /// Fills v with iid CN(0, per_entry_variance) entries.
  void fill_complex_gaussian(Eigen::Ref<CVector> v, double per_entry_variance = 1.0) {
    const double s = std::sqrt(per_entry_variance / 2.0);
    for (Eigen::Index i = 0; i < v.size(); ++i) {
      v(i) = cplx(gaussian() * s, gaussian() * s);
    }
  }

 private:
  Xoshiro256PlusPlus gen_;
  double cached_ = 0.0;
  bool have_cached_ = false;
};

}  // namespace cfmimo

#endif  // CFMIMO_RNG_HPP
