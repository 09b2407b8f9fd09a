// Copyright 2026 The ppbench Authors.
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//   http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

#pragma once

#include <gmpxx.h>

#include <bit>
#include <cstddef>
#include <cstdint>
#include <random>

#include "ppbench/errors.hpp"

namespace ppbench {

// Seedable random source used throughout the library.
using Rng = std::mt19937_64;

// SplitMix64 finalizer.
constexpr std::uint64_t mix64(std::uint64_t z) noexcept {
  z += 0x9e3779b97f4a7c15ULL;
  z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
  z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
  return z ^ (z >> 31);
}

// Counter-based seed split: stream `counter` of the family rooted at `master`.
constexpr std::uint64_t split_seed(std::uint64_t master,
                                   std::uint64_t counter) noexcept {
  return mix64(mix64(master) ^ mix64(counter + 0x632be59bd9b4e019ULL));
}

// Uniform integer in [0, bound) by rejection from the next power of two.
inline std::uint64_t uniform_below(Rng& rng, std::uint64_t bound) {
  if (bound == 0) throw ParameterError("uniform_below: bound must be positive");
  if (bound == 1) return 0;
  const int width = std::bit_width(bound - 1);
  const std::uint64_t mask =
      width == 64 ? ~std::uint64_t{0} : ((std::uint64_t{1} << width) - 1);
  for (;;) {
    const std::uint64_t candidate = rng() & mask;
    if (candidate < bound) return candidate;
  }
}

// Uniform integer with exactly `bits` random low bits.
inline mpz_class random_bits(Rng& rng, std::size_t bits) {
  mpz_class out = 0;
  std::size_t filled = 0;
  while (filled < bits) {
    const std::size_t take = bits - filled < 64 ? bits - filled : 64;
    std::uint64_t word = rng();
    if (take < 64) word &= (std::uint64_t{1} << take) - 1;
    mpz_class chunk;
    mpz_import(chunk.get_mpz_t(), 1, 1, sizeof(word), 0, 0, &word);
    out += chunk << static_cast<mp_bitcnt_t>(filled);
    filled += take;
  }
  return out;
}

// Uniform big integer in [0, bound) by rejection from the next power of two.
inline mpz_class uniform_below(Rng& rng, const mpz_class& bound) {
  if (bound <= 0) throw ParameterError("uniform_below: bound must be positive");
  if (bound == 1) return 0;
  const mpz_class top = bound - 1;
  const std::size_t width = mpz_sizeinbase(top.get_mpz_t(), 2);
  for (;;) {
    mpz_class candidate = random_bits(rng, width);
    if (candidate < bound) return candidate;
  }
}

// Uniform double in [0, 1) with 53 bits of precision.
inline double unit_uniform(Rng& rng) {
  return static_cast<double>(rng() >> 11) * 0x1.0p-53;
}

// Position of the most significant set bit, 1-based; 0 for zero.
constexpr unsigned msb_position(std::uint64_t value) noexcept {
  return static_cast<unsigned>(std::bit_width(value));
}

inline unsigned msb_position(const mpz_class& value) {
  if (value == 0) return 0;
  return static_cast<unsigned>(mpz_sizeinbase(value.get_mpz_t(), 2));
}

// Running mean of msb positions over the random values a protocol draws.
class MagnitudeTap {
 public:
  void observe(std::uint64_t value) noexcept { add(msb_position(value)); }
  void observe(const mpz_class& value) { add(msb_position(value)); }

  std::size_t count() const noexcept { return count_; }
  double mean() const noexcept {
    return count_ == 0 ? 0.0 : static_cast<double>(sum_) / static_cast<double>(count_);
  }
  void reset() noexcept { sum_ = 0; count_ = 0; }

 private:
  void add(unsigned position) noexcept {
    sum_ += position;
    ++count_;
  }

  std::uint64_t sum_ = 0;
  std::size_t count_ = 0;
};

}  // namespace ppbench
