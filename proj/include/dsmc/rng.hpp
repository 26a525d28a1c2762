// Copyright 2026 The dsmc Authors
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//     http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

#pragma once

#include <cstdint>
#include <random>

namespace dsmc {

/// Seedable, splittable random source used by every estimator.
///
/// The engine is std::mt19937_64. A stream is identified by a root seed and
/// a path of stream ids; its engine seed is derived by folding each id into
/// the root with the SplitMix64 finalizer:
///
///     key_0 = mix(seed), key_{i+1} = mix(key_i ^ mix(id_i + 1))
///
/// Worker w of a parallel run uses stream (seed, w). Per-trial streams used
/// by the logic estimator are (seed, trial).
class Rng {
 public:
  using Engine = std::mt19937_64;

  explicit Rng(std::uint64_t seed) : engine_(mix(seed)) {}

  static Rng stream(std::uint64_t seed, std::uint64_t id) { return Rng(derive(seed, id), kDerived); }

  /// SplitMix64 output function.
  static constexpr std::uint64_t mix(std::uint64_t z) {
    z += 0x9e3779b97f4a7c15ull;
    z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ull;
    z = (z ^ (z >> 27)) * 0x94d049bb133111ebull;
    return z ^ (z >> 31);
  }

  static constexpr std::uint64_t derive(std::uint64_t seed, std::uint64_t id) {
    return mix(mix(seed) ^ mix(id + 1));
  }

  std::uint64_t next_u64() { return engine_(); }

  /// Uniform double in [0, 1) with 53 random bits.
  double uniform() { return static_cast<double>(engine_() >> 11) * 0x1.0p-53; }

 private:
  struct DerivedTag {};
  static constexpr DerivedTag kDerived{};
  Rng(std::uint64_t key, DerivedTag) : engine_(key) {}

  Engine engine_;
};

}  // namespace dsmc
