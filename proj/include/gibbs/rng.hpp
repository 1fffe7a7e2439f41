/*
 * Copyright 2026 the artifact authors
 *
 * Licensed under the Apache License, Version 2.0 (the "License");
 * you may not use this file except in compliance with the License.
 * You may obtain a copy of the License at
 *
 *     http://www.apache.org/licenses/LICENSE-2.0
 *
 * Unless required by applicable law or agreed to in writing, software
 * distributed under the License is distributed on an "AS IS" BASIS,
 * WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
 * See the License for the specific language governing permissions and
 * limitations under the License.
 */

#ifndef GIBBS_RNG_HPP
#define GIBBS_RNG_HPP

#include <array>
#include <cstdint>

namespace gibbs {

// Philox 4x32 block function with 10 rounds. Counter-based: the output is a
// pure function of (counter, key), so replication r can draw from stream r
// with no skip-ahead cost and no dependence on scheduling order.
std::array<std::uint32_t, 4> philox4x32(std::array<std::uint32_t, 4> counter,
                                        std::array<std::uint32_t, 2> key);

// A buffered stream of randomness over the Philox block function.
//
// Counter layout: (block_lo, block_hi, stream_lo, stream_hi); key = seed.
// Identical (seed, stream) pairs reproduce identical draws bit for bit on
// every platform and under any parallel schedule.
class RandomStream {
public:
  explicit RandomStream(std::uint64_t seed, std::uint64_t stream = 0);

  std::uint32_t next_u32();
  std::uint64_t next_u64();

  // Uniform on [0, 1) with 53 random bits.
  double uniform();
  // Uniform on [a, b).
  double uniform(double a, double b);
  // Standard normal via Box-Muller; generates pairs, caches the second.
  double normal();

  std::uint64_t seed() const { return seed_; }
  std::uint64_t stream() const { return stream_; }

private:
  void refill();

  std::uint64_t seed_;
  std::uint64_t stream_;
  std::array<std::uint32_t, 2> key_;
  std::uint64_t block_ = 0;
  std::array<std::uint32_t, 4> buf_{};
  int pos_ = 4; // consumed
  double cached_normal_ = 0.0;
  bool has_cached_normal_ = false;
};

} // namespace gibbs

#endif // GIBBS_RNG_HPP
