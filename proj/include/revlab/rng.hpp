// Copyright 2026 The revlab Authors.
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//     https://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

#ifndef REVLAB_RNG_HPP_
#define REVLAB_RNG_HPP_

#include <cstdint>
#include <random>
#include <string_view>

namespace revlab {

// FNV-1a, 64 bit. Stable across platforms and runs; used to key RNG streams
// by entity names.
std::uint64_t stable_hash(std::string_view bytes);

// SplitMix64 finalizer; mixes stream keys into engine seeds.
std::uint64_t mix64(std::uint64_t x);

// Derives an independent stream seed from a parent seed and a key.
std::uint64_t derive_seed(std::uint64_t parent, std::uint64_t key);
std::uint64_t derive_seed(std::uint64_t parent, std::string_view key);

// Seeded generator with distribution code that does not depend on the
// standard library implementation (std::normal_distribution and friends are
// implementation-defined, which would break cross-toolchain reproducibility).
class Rng {
 public:
  explicit Rng(std::uint64_t seed) : engine_(mix64(seed)) {}

  std::uint64_t next_u64() { return engine_(); }

  // Uniform in [0, 1) with 53 random bits.
  double uniform01();

  // Uniform integer in [0, bound). bound must be positive.
  std::uint64_t uniform_below(std::uint64_t bound);

  // Standard normal via Box-Muller; caches the second variate.
  double normal();
  double normal(double mean, double stddev) { return mean + stddev * normal(); }

 private:
  std::mt19937_64 engine_;
  double spare_ = 0.0;
  bool has_spare_ = false;
};

}  // namespace revlab

#endif  // REVLAB_RNG_HPP_
