// uplda/rng.h

// Copyright 2026  The uplda Authors

// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//  http://www.apache.org/licenses/LICENSE-2.0
//
// THIS CODE IS PROVIDED *AS IS* BASIS, WITHOUT WARRANTIES OR CONDITIONS OF ANY
// KIND, EITHER EXPRESS OR IMPLIED, INCLUDING WITHOUT LIMITATION ANY IMPLIED
// WARRANTIES OR CONDITIONS OF TITLE, FITNESS FOR A PARTICULAR PURPOSE,
// MERCHANTABLITY OR NON-INFRINGEMENT.
// See the Apache 2 License for the specific language governing permissions and
// limitations under the License.

#ifndef UPLDA_RNG_H_
#define UPLDA_RNG_H_

#include <cmath>
#include <cstdint>
#include <initializer_list>

namespace uplda {

/// SplitMix64 output function.  Bijective mixer over 64-bit words.
inline uint64_t Mix64(uint64_t z) {
  z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
  z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
  return z ^ (z >> 31);
}

/// Counter-based random stream (SplitMix64 family).
///
/// The i-th output is Mix64(key + i * golden), so a stream is a pure
/// function of (key, counter).  Keys are derived by hashing a seed with an
/// explicit path of indices, which gives every speaker/utterance/purpose its
/// own independent stream: generation order and thread count cannot change
/// the values drawn for an entity.
class RngStream {
 public:
  explicit RngStream(uint64_t seed) : key_(Mix64(seed + kGolden)) {}

  RngStream(uint64_t seed, std::initializer_list<uint64_t> path)
      : RngStream(seed) {
    for (uint64_t p : path) key_ = Mix64(key_ ^ Mix64(p + kGolden));
  }

  /// Child stream for a sub-entity; does not disturb this stream's counter.
  RngStream Fork(uint64_t index) const {
    RngStream child(*this);
    child.key_ = Mix64(key_ ^ Mix64(index + kGolden));
    child.counter_ = 0;
    child.has_spare_ = false;
    return child;
  }

  uint64_t NextU64() { return Mix64(key_ + (++counter_) * kGolden); }

  /// Uniform double in [0, 1) with 53 random bits.
  double NextDouble() { return static_cast<double>(NextU64() >> 11) * 0x1.0p-53; }

  /// Uniform double in [lo, hi).
  double NextUniform(double lo, double hi) { return lo + (hi - lo) * NextDouble(); }

  /// Standard normal via Box-Muller; pairs are cached.
  double NextGaussian() {
    if (has_spare_) {
      has_spare_ = false;
      return spare_;
    }
    double u1 = NextDouble();
    if (u1 <= 0.0) u1 = 0x1.0p-53;
    double u2 = NextDouble();
    double r = std::sqrt(-2.0 * std::log(u1));
    double a = 6.283185307179586476925286766559 * u2;
    spare_ = r * std::sin(a);
    has_spare_ = true;
    return r * std::cos(a);
  }

 private:
  static constexpr uint64_t kGolden = 0x9e3779b97f4a7c15ULL;

  uint64_t key_;
  uint64_t counter_ = 0;
  bool has_spare_ = false;
  double spare_ = 0.0;
};

}  // namespace uplda

#endif  // UPLDA_RNG_H_
