// Copyright 2026 The qmodel Authors
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//      http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

#ifndef QMODEL_RANDOM_H_
#define QMODEL_RANDOM_H_

#include <cstdint>
#include <random>

namespace qmodel {

/// SplitMix64 finaliser. Used to derive independent stream seeds.
std::uint64_t splitmix64(std::uint64_t x);

/// Seed for stream `index` under `master`: splitmix64(master ^ splitmix64(index + 1)).
/// Record i of a dataset uses derive_seed(master_seed, i); the value depends
/// only on (master, index), never on scheduling.
std::uint64_t derive_seed(std::uint64_t master, std::uint64_t index);

/// Random stream with platform-independent distributions.
///
/// The standard library fixes the mt19937_64 engine output but leaves the
/// distribution algorithms implementation-defined, so uniform, normal and
/// index draws are implemented here on top of the raw engine output.
class Rng {
 public:
  explicit Rng(std::uint64_t seed) : engine_(seed) {}

  /// Uniform double in [0, 1) with 53 random bits.
  double uniform();
  /// Uniform double in [lo, hi).
  double uniform(double lo, double hi) { return lo + (hi - lo) * uniform(); }
  /// Standard normal via Box-Muller (one value per call).
  double normal();
  /// Uniform integer in [0, n), unbiased.
  std::uint64_t index(std::uint64_t n);

  std::uint64_t next() { return engine_(); }

 private:
  std::mt19937_64 engine_;
};

}  // namespace qmodel

#endif  // QMODEL_RANDOM_H_
