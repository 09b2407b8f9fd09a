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

#include <cstddef>
#include <cstdint>
#include <string>

#include "json.hpp"
#include "ppbench/errors.hpp"
#include "ppbench/modular.hpp"
#include "ppbench/random.hpp"

namespace ppbench::paillier {

// Public key material with g fixed to N + 1.
struct PublicKey {
  mpz_class n;
  mpz_class g;
  mpz_class n_squared;

  // Cheap fingerprint of N, used to catch ciphertexts from another key.
  std::uint64_t id() const {
    const std::uint64_t low = mpz_getlimbn(n.get_mpz_t(), 0);
    return mix64(low ^ (static_cast<std::uint64_t>(mpz_sizeinbase(n.get_mpz_t(), 2)) << 48)) | 1;
  }
};

struct PrivateKey {
  mpz_class lambda;
  mpz_class mu;
  mpz_class n;

  std::uint64_t id() const { return PublicKey{n, 0, 0}.id(); }
};

// An element of Z_{N^2}. `key_id` is 0 for values not bound to a key (for
// example ciphertexts built by hand in tests).
struct Ciphertext {
  mpz_class value;
  std::uint64_t key_id = 0;
};

struct Keypair {
  PublicKey public_key;
  PrivateKey private_key;
};

inline constexpr std::size_t kBenchmarkKeyBits = 2048;
inline constexpr std::size_t kTestKeyBits = 512;
inline constexpr int kPrimalityRounds = 40;

// GMP runs Baillie-PSW before the Miller-Rabin rounds, which is exact below 2^64.
inline bool is_probable_prime(const mpz_class& candidate) {
  return mpz_probab_prime_p(candidate.get_mpz_t(), kPrimalityRounds) > 0;
}

namespace detail {

// L(x) = (x - 1) / N
inline mpz_class l_function(const mpz_class& x, const mpz_class& n) {
  mpz_class out = x - 1;
  mpz_divexact(out.get_mpz_t(), out.get_mpz_t(), n.get_mpz_t());
  return out;
}

inline void check_bound(const PublicKey& pk, const Ciphertext& c, const char* op) {
  if (c.key_id != 0 && c.key_id != pk.id()) {
    throw KeyMismatchError(std::string(op) + ": ciphertext was produced under another key");
  }
  if (c.value <= 0 || c.value >= pk.n_squared) {
    throw KeyMismatchError(std::string(op) + ": ciphertext is not an element of Z_{N^2}");
  }
}

inline mpz_class random_prime(Rng& rng, std::size_t bits, std::size_t max_attempts) {
  for (std::size_t attempt = 0; attempt < max_attempts; ++attempt) {
    mpz_class candidate = random_bits(rng, bits);
    // Top two bits set so the product of two such primes has exactly 2*bits bits.
    mpz_setbit(candidate.get_mpz_t(), bits - 1);
    mpz_setbit(candidate.get_mpz_t(), bits - 2);
    mpz_setbit(candidate.get_mpz_t(), 0);
    if (is_probable_prime(candidate)) return candidate;
  }
  throw RngExhaustedError("keygen: no prime found after " + std::to_string(max_attempts) +
                          " candidates");
}

}  // namespace detail

// Builds a keypair from two distinct primes. Used by keygen and by tests
// that need hand-checkable keys.
inline Keypair keypair_from_primes(const mpz_class& p, const mpz_class& q) {
  if (p < 3 || q < 3 || p == q) {
    throw ParameterError("paillier: need two distinct odd primes");
  }
  if (!is_probable_prime(p) || !is_probable_prime(q)) {
    throw ParameterError("paillier: key factors must be prime");
  }
  const mpz_class n = p * q;
  const mpz_class phi = (p - 1) * (q - 1);
  mpz_class common;
  mpz_gcd(common.get_mpz_t(), n.get_mpz_t(), phi.get_mpz_t());
  if (common != 1) throw ParameterError("paillier: gcd(N, phi(N)) must be 1");

  Keypair keys;
  keys.public_key.n = n;
  keys.public_key.g = n + 1;
  keys.public_key.n_squared = n * n;

  mpz_class lambda;
  const mpz_class pm1 = p - 1;
  const mpz_class qm1 = q - 1;
  mpz_lcm(lambda.get_mpz_t(), pm1.get_mpz_t(), qm1.get_mpz_t());
  mpz_class g_lambda;
  mpz_powm(g_lambda.get_mpz_t(), keys.public_key.g.get_mpz_t(), lambda.get_mpz_t(),
           keys.public_key.n_squared.get_mpz_t());
  keys.private_key.lambda = lambda;
  keys.private_key.mu = mod_inverse(detail::l_function(g_lambda, n), n);
  keys.private_key.n = n;
  return keys;
}

// Generates a key with an N of exactly `bits` bits from two primes of bits/2
// bits each. Deterministic for a given rng state.
inline Keypair keygen(std::size_t bits, Rng& rng) {
  if (bits < 16) throw ParameterError("keygen: key size must be at least 16 bits");
  if (bits % 2 != 0) throw ParameterError("keygen: key size must be even");
  const std::size_t half = bits / 2;
  const std::size_t budget = 64 * half + 256;
  for (int round = 0; round < 64; ++round) {
    const mpz_class p = detail::random_prime(rng, half, budget);
    const mpz_class q = detail::random_prime(rng, half, budget);
    if (p == q) continue;
    const mpz_class n = p * q;
    const mpz_class phi = (p - 1) * (q - 1);
    mpz_class common;
    mpz_gcd(common.get_mpz_t(), n.get_mpz_t(), phi.get_mpz_t());
    if (common != 1) continue;
    return keypair_from_primes(p, q);
  }
  throw RngExhaustedError("keygen: could not find a valid prime pair");
}

// Draws r uniformly from Z_N^* by rejection sampling on [1, N).
inline mpz_class sample_nonce(const PublicKey& pk, Rng& rng) {
  for (;;) {
    mpz_class r = uniform_below(rng, pk.n);
    if (r == 0) continue;
    mpz_class common;
    mpz_gcd(common.get_mpz_t(), r.get_mpz_t(), pk.n.get_mpz_t());
    if (common == 1) return r;
  }
}

// g^m * r^N mod N^2, with g^m = 1 + mN since g = N + 1.
inline Ciphertext encrypt_with_nonce(const PublicKey& pk, const mpz_class& m,
                                     const mpz_class& r) {
  if (m < 0 || m >= pk.n) {
    throw DomainError("encrypt: plaintext " + m.get_str() + " outside Z_N");
  }
  if (r <= 0 || r >= pk.n) throw DomainError("encrypt: nonce outside [1, N)");
  mpz_class gm = (1 + m * pk.n) % pk.n_squared;
  mpz_class rn;
  mpz_powm(rn.get_mpz_t(), r.get_mpz_t(), pk.n.get_mpz_t(), pk.n_squared.get_mpz_t());
  Ciphertext out;
  out.value = (gm * rn) % pk.n_squared;
  out.key_id = pk.id();
  return out;
}

inline Ciphertext encrypt(const PublicKey& pk, const mpz_class& m, Rng& rng,
                          MagnitudeTap* tap = nullptr) {
  if (m < 0 || m >= pk.n) {
    throw DomainError("encrypt: plaintext " + m.get_str() + " outside Z_N");
  }
  const mpz_class r = sample_nonce(pk, rng);
  if (tap != nullptr) tap->observe(r);
  return encrypt_with_nonce(pk, m, r);
}

inline mpz_class decrypt(const PrivateKey& sk, const Ciphertext& c) {
  if (c.key_id != 0 && c.key_id != sk.id()) {
    throw KeyMismatchError("decrypt: ciphertext was produced under another key");
  }
  const mpz_class n_squared = sk.n * sk.n;
  if (c.value <= 0 || c.value >= n_squared) {
    throw KeyMismatchError("decrypt: ciphertext is not an element of Z_{N^2}");
  }
  mpz_class x;
  mpz_powm(x.get_mpz_t(), c.value.get_mpz_t(), sk.lambda.get_mpz_t(), n_squared.get_mpz_t());
  return (detail::l_function(x, sk.n) * sk.mu) % sk.n;
}

// Enc(m1) * Enc(m2) mod N^2 = Enc(m1 + m2 mod N)
inline Ciphertext hom_add(const PublicKey& pk, const Ciphertext& c1, const Ciphertext& c2) {
  detail::check_bound(pk, c1, "hom_add");
  detail::check_bound(pk, c2, "hom_add");
  Ciphertext out;
  out.value = (c1.value * c2.value) % pk.n_squared;
  out.key_id = pk.id();
  return out;
}

// Enc(m)^k mod N^2 = Enc(k * m mod N)
inline Ciphertext hom_scalar_mul(const PublicKey& pk, const Ciphertext& c, const mpz_class& k) {
  detail::check_bound(pk, c, "hom_scalar_mul");
  if (k < 0 || k >= pk.n) throw DomainError("hom_scalar_mul: scalar outside Z_N");
  Ciphertext out;
  mpz_powm(out.value.get_mpz_t(), c.value.get_mpz_t(), k.get_mpz_t(), pk.n_squared.get_mpz_t());
  out.key_id = pk.id();
  return out;
}

// Debug fixture format: {"n", "g", "lambda", "mu"} as base-10 strings.
inline nlohmann::json to_json(const Keypair& keys) {
  return nlohmann::json{{"n", keys.public_key.n.get_str()},
                        {"g", keys.public_key.g.get_str()},
                        {"lambda", keys.private_key.lambda.get_str()},
                        {"mu", keys.private_key.mu.get_str()}};
}

inline Keypair keypair_from_json(const nlohmann::json& j) {
  auto field = [&](const char* name) {
    if (!j.contains(name) || !j.at(name).is_string()) {
      throw ParameterError(std::string("key json: missing string field '") + name + "'");
    }
    mpz_class value;
    if (value.set_str(j.at(name).get<std::string>(), 10) != 0) {
      throw ParameterError(std::string("key json: field '") + name + "' is not base-10");
    }
    return value;
  };
  Keypair keys;
  keys.public_key.n = field("n");
  keys.public_key.g = field("g");
  if (keys.public_key.n < 15) throw ParameterError("key json: N too small");
  if (keys.public_key.g != keys.public_key.n + 1) {
    throw ParameterError("key json: g must equal N + 1");
  }
  keys.public_key.n_squared = keys.public_key.n * keys.public_key.n;
  keys.private_key.lambda = field("lambda");
  keys.private_key.mu = field("mu");
  keys.private_key.n = keys.public_key.n;
  return keys;
}

}  // namespace ppbench::paillier
