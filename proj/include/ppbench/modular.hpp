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

#include <cstdint>
#include <string>

#include "ppbench/errors.hpp"
#include "ppbench/random.hpp"

namespace ppbench {

// Inverse of `a` modulo `n` by the extended Euclidean algorithm.
inline mpz_class mod_inverse(const mpz_class& a, const mpz_class& n) {
  if (n <= 1) throw ParameterError("mod_inverse: modulus must exceed 1");
  mpz_class old_r = a % n;
  if (old_r < 0) old_r += n;
  mpz_class r = n;
  mpz_class old_s = 1;
  mpz_class s = 0;
  while (r != 0) {
    const mpz_class quotient = old_r / r;
    mpz_class tmp = old_r - quotient * r;
    old_r = r;
    r = tmp;
    tmp = old_s - quotient * s;
    old_s = s;
    s = tmp;
  }
  if (old_r != 1) {
    throw NotInvertibleError("mod_inverse: " + a.get_str() + " shares a factor with " +
                             n.get_str());
  }
  mpz_class out = old_s % n;
  if (out < 0) out += n;
  return out;
}

inline std::uint64_t mod_inverse(std::uint64_t a, std::uint64_t n) {
  if (n <= 1) throw ParameterError("mod_inverse: modulus must exceed 1");
  __int128 old_r = a % n;
  __int128 r = n;
  __int128 old_s = 1;
  __int128 s = 0;
  while (r != 0) {
    const __int128 quotient = old_r / r;
    __int128 tmp = old_r - quotient * r;
    old_r = r;
    r = tmp;
    tmp = old_s - quotient * s;
    old_s = s;
    s = tmp;
  }
  if (old_r != 1) {
    throw NotInvertibleError("mod_inverse: " + std::to_string(a) + " shares a factor with " +
                             std::to_string(n));
  }
  __int128 out = old_s % static_cast<__int128>(n);
  if (out < 0) out += n;
  return static_cast<std::uint64_t>(out);
}

inline std::uint64_t gcd_u64(std::uint64_t a, std::uint64_t b) noexcept {
  while (b != 0) {
    const std::uint64_t t = a % b;
    a = b;
    b = t;
  }
  return a;
}

// Arithmetic in the ring Z_q for any 2 <= q < 2^64.
class ZqRing {
 public:
  explicit ZqRing(std::uint64_t q) : q_(q) {
    if (q < 2) throw ParameterError("Z_q modulus must be at least 2");
  }

  std::uint64_t modulus() const noexcept { return q_; }
  bool contains(std::uint64_t x) const noexcept { return x < q_; }

  std::uint64_t reduce(std::uint64_t x) const noexcept { return x % q_; }

  std::uint64_t add(std::uint64_t a, std::uint64_t b) const noexcept {
    const unsigned __int128 sum = static_cast<unsigned __int128>(a) + b;
    return static_cast<std::uint64_t>(sum % q_);
  }

  std::uint64_t sub(std::uint64_t a, std::uint64_t b) const noexcept {
    return a >= b ? a - b : static_cast<std::uint64_t>(
                                static_cast<unsigned __int128>(a) + q_ - b);
  }

  std::uint64_t mul(std::uint64_t a, std::uint64_t b) const noexcept {
    const unsigned __int128 product = static_cast<unsigned __int128>(a) * b;
    return static_cast<std::uint64_t>(product % q_);
  }

  std::uint64_t uniform(Rng& rng) const { return uniform_below(rng, q_); }

  friend bool operator==(const ZqRing&, const ZqRing&) = default;

 private:
  std::uint64_t q_;
};

// 2^61 - 1, a Mersenne prime.
inline constexpr std::uint64_t kDefaultShareModulus = (std::uint64_t{1} << 61) - 1;

}  // namespace ppbench
