/*
 * Copyright 2026 The tgx authors.
 * Licensed under the Apache License, Version 2.0 (the "License");
 * you may not use this file except in compliance with the License.
 * You may obtain a copy of the License at
 *
 *     https://www.apache.org/licenses/LICENSE-2.0
 *
 * Unless required by applicable law or agreed to in writing, software
 * distributed under the License is distributed on an "AS IS" BASIS,
 * WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
 * See the License for the specific language governing permissions and
 * limitations under the License.
 */

#ifndef TGX_RNG_HPP
#define TGX_RNG_HPP

#include <algorithm>
#include <cstddef>
#include <cstdint>
#include <vector>

namespace tgx {

// SplitMix64 generator. The standard <random> engines are portable but the
// distributions are not; every draw we make goes through this class so that
// identical seeds give identical streams on any platform and compiler.
class Rng {
 public:
  explicit Rng(std::uint64_t seed) : state_(seed) {}

  std::uint64_t next_u64() {
    std::uint64_t z = (state_ += 0x9e3779b97f4a7c15ULL);
    z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
    z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
    return z ^ (z >> 31);
  }

  // Uniform in [0, 1) with 53 random bits.
  double uniform01() { return static_cast<double>(next_u64() >> 11) * 0x1.0p-53; }

  // Uniform integer in [0, n); n must be positive. Unbiased via rejection.
  std::uint64_t uniform_below(std::uint64_t n) {
    const std::uint64_t threshold = (0ULL - n) % n;
    for (;;) {
      const std::uint64_t r = next_u64();
      if (r >= threshold) return r % n;
    }
  }

  std::size_t uniform_index(std::size_t n) {
    return static_cast<std::size_t>(uniform_below(static_cast<std::uint64_t>(n)));
  }

  // Draws a uniform subset of the given size from {0, ..., n-1}; the result is
  // sorted ascending. Partial Fisher-Yates over an index array.
  std::vector<std::size_t> sample_subset(std::size_t n, std::size_t size) {
    std::vector<std::size_t> pool(n);
    for (std::size_t i = 0; i < n; ++i) pool[i] = i;
    size = std::min(size, n);
    for (std::size_t i = 0; i < size; ++i) {
      const std::size_t j = i + uniform_index(n - i);
      std::swap(pool[i], pool[j]);
    }
    pool.resize(size);
    std::sort(pool.begin(), pool.end());
    return pool;
  }

 private:
  std::uint64_t state_;
};

// Derives an independent child seed from a root seed and a stream tag. Used to
// split one run-level seed into per-instance and per-purpose streams so that
// worker scheduling can never affect results.
inline std::uint64_t derive_seed(std::uint64_t root, std::uint64_t tag) {
  Rng r(root ^ (0x2545f4914f6cdd1dULL * (tag + 1)));
  return r.next_u64();
}

}  // namespace tgx

#endif  // TGX_RNG_HPP
