// Copyright 2026 The CCST Authors. All Rights Reserved.
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
#ifndef CCST_RNG_H_
#define CCST_RNG_H_

#include <cstddef>
#include <cstdint>
#include <random>
#include <string_view>
#include <vector>

namespace ccst {

/// Names one independent random stream. Two equal keys under the same root
/// seed always produce the same draws, regardless of which thread asks.
struct StreamKey {
  std::uint64_t client = 0;
  std::uint64_t round = 0;
  std::string_view purpose;
  std::uint64_t index = 0;
};

/// Keyed random stream. The engine is std::mt19937_64 (its output sequence is
/// fixed by the standard); every distribution on top of it is implemented here
/// because the standard library distributions differ between vendors.
class Rng {
 public:
  Rng(std::uint64_t seed, const StreamKey& key);

  std::uint64_t next_u64() { return engine_(); }
  /// Uniform in [0, 1) with 53 random bits.
  double uniform();
  double uniform(double lo, double hi) { return lo + (hi - lo) * uniform(); }
  /// Uniform integer in [0, n). n must be positive.
  std::uint64_t below(std::uint64_t n);
  double normal();

  template <typename T>
  void shuffle(std::vector<T>& items) {
    for (std::size_t i = items.size(); i > 1; --i) {
      std::size_t j = static_cast<std::size_t>(below(i));
      std::swap(items[i - 1], items[j]);
    }
  }

  /// k distinct indices from [0, n), in draw order.
  std::vector<std::size_t> sample_without_replacement(std::size_t n,
                                                      std::size_t k);

 private:
  std::mt19937_64 engine_;
};

/// SplitMix64 finalizer; used to derive seeds.
std::uint64_t mix64(std::uint64_t x);

/// Derives a child seed from a root seed and a label, e.g. one seed per
/// held-out target in a leave-one-out suite.
std::uint64_t derive_seed(std::uint64_t root, std::string_view label,
                          std::uint64_t index = 0);

}  // namespace ccst

#endif  // CCST_RNG_H_
