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

#include <cstddef>
#include <cstdint>
#include <span>
#include <string>
#include <vector>

#include "ppbench/errors.hpp"
#include "ppbench/modular.hpp"
#include "ppbench/random.hpp"

// Additive secret sharing over Z_q with local addition and Beaver-triple
// multiplication. Party indices are 1-based throughout.
namespace ppbench::sharing {

struct ShareSet {
  std::vector<std::uint64_t> shares;
  std::uint64_t q = kDefaultShareModulus;

  std::size_t parties() const noexcept { return shares.size(); }
  // Share held by party `i` (1-based).
  std::uint64_t at(std::size_t i) const { return shares.at(i - 1); }
};

// Writes n = out.size() shares of x into `out` without allocating.
inline void share_into(std::uint64_t x, const ZqRing& ring, Rng& rng, std::span<std::uint64_t> out,
                       MagnitudeTap* tap = nullptr) {
  if (out.size() < 2) throw ParameterError("share: need at least two parties");
  if (!ring.contains(x)) {
    throw DomainError("share: secret " + std::to_string(x) + " outside Z_" +
                      std::to_string(ring.modulus()));
  }
  std::uint64_t sum = 0;
  for (std::size_t i = 0; i + 1 < out.size(); ++i) {
    const std::uint64_t s = ring.uniform(rng);
    if (tap != nullptr) tap->observe(s);
    out[i] = s;
    sum = ring.add(sum, s);
  }
  out.back() = ring.sub(x, sum);
}

inline ShareSet share(std::uint64_t x, std::size_t n, std::uint64_t q, Rng& rng,
                      MagnitudeTap* tap = nullptr) {
  const ZqRing ring(q);
  if (n < 2) throw ParameterError("share: need at least two parties");
  ShareSet out;
  out.q = q;
  out.shares.resize(n);
  share_into(x, ring, rng, out.shares, tap);
  return out;
}

inline std::uint64_t reconstruct(const ShareSet& s) {
  if (s.shares.empty()) throw MalformedSharingError("reconstruct: empty share list");
  const ZqRing ring(s.q);
  std::uint64_t sum = 0;
  for (const std::uint64_t v : s.shares) sum = ring.add(sum, ring.reduce(v));
  return sum;
}

// Protocol 1: every party adds its own shares locally.
inline ShareSet pi_add(std::span<const ShareSet> inputs) {
  if (inputs.empty()) throw ParameterError("pi_add: no inputs");
  const std::uint64_t q = inputs.front().q;
  const std::size_t n = inputs.front().parties();
  for (const ShareSet& in : inputs) {
    if (in.q != q || in.parties() != n) {
      throw MalformedSharingError("pi_add: inputs disagree on modulus or party count");
    }
  }
  const ZqRing ring(q);
  ShareSet out;
  out.q = q;
  out.shares.assign(n, 0);
  for (const ShareSet& in : inputs) {
    for (std::size_t i = 0; i < n; ++i) out.shares[i] = ring.add(out.shares[i], in.shares[i]);
  }
  return out;
}

// Correlated randomness from the Trusted Initializer. `iota` is the 1-based
// index of the party holding the asymmetric bit.
struct BeaverTriple {
  ShareSet u;
  ShareSet v;
  ShareSet w;
  std::size_t iota = 0;

  std::size_t parties() const noexcept { return u.parties(); }
  std::uint64_t modulus() const noexcept { return u.q; }
  bool asymmetric_bit(std::size_t party) const noexcept { return party == iota; }
};

inline BeaverTriple ti_gen_triple(std::size_t n, std::uint64_t q, Rng& rng,
                                  MagnitudeTap* tap = nullptr) {
  const ZqRing ring(q);
  if (n < 2) throw ParameterError("ti_gen_triple: need at least two parties");
  const std::uint64_t u = ring.uniform(rng);
  const std::uint64_t v = ring.uniform(rng);
  BeaverTriple t;
  t.u = share(u, n, q, rng, tap);
  t.v = share(v, n, q, rng, tap);
  t.w = share(ring.mul(u, v), n, q, rng, tap);
  t.iota = static_cast<std::size_t>(uniform_below(rng, n)) + 1;
  return t;
}

// What one party receives from the Trusted Initializer.
struct TripleShare {
  std::uint64_t u = 0;
  std::uint64_t v = 0;
  std::uint64_t w = 0;
  bool asymmetric_bit = false;
};

inline TripleShare triple_share_for(const BeaverTriple& t, std::size_t party) {
  return {t.u.at(party), t.v.at(party), t.w.at(party), t.asymmetric_bit(party)};
}

// The (d_i, e_i) pair a party broadcasts in step 2.
struct MulOpening {
  std::size_t party = 0;
  std::uint64_t d = 0;
  std::uint64_t e = 0;
};

// Step 1: d_i = x_i - u_i, e_i = y_i - v_i.
inline MulOpening mul_open(const ZqRing& ring, std::size_t party, std::uint64_t x_i,
                           std::uint64_t y_i, const TripleShare& t) {
  return {party, ring.sub(x_i, t.u), ring.sub(y_i, t.v)};
}

// Steps 3-5: combine all n openings into d, e and compute z_i.
inline std::uint64_t mul_close(const ZqRing& ring, std::size_t n, const TripleShare& t,
                               std::span<const MulOpening> openings) {
  if (openings.size() != n) {
    throw WiringError("pi_mul: expected " + std::to_string(n) + " openings, got " +
                      std::to_string(openings.size()));
  }
  std::vector<bool> seen(n + 1, false);
  std::uint64_t d = 0;
  std::uint64_t e = 0;
  for (const MulOpening& o : openings) {
    if (o.party < 1 || o.party > n || seen[o.party]) {
      throw WiringError("pi_mul: opening from unexpected party " + std::to_string(o.party));
    }
    seen[o.party] = true;
    d = ring.add(d, o.d);
    e = ring.add(e, o.e);
  }
  std::uint64_t z = ring.add(t.w, ring.add(ring.mul(d, t.v), ring.mul(e, t.u)));
  if (t.asymmetric_bit) z = ring.add(z, ring.mul(d, e));
  return z;
}

// Local view of one party during pi_mul.
struct PartyState {
  std::size_t index = 0;
  std::uint64_t x = 0;
  std::uint64_t y = 0;
  TripleShare triple;
  std::vector<MulOpening> received;
};

struct MulTranscript {
  std::vector<MulOpening> broadcasts;

  // Each opening carries two ring elements.
  std::size_t broadcast_values() const noexcept { return 2 * broadcasts.size(); }
};

inline void check_compatible(const ShareSet& x, const ShareSet& y, const BeaverTriple& t) {
  const std::size_t n = x.parties();
  const std::uint64_t q = x.q;
  for (const ShareSet* s : {&y, &t.u, &t.v, &t.w}) {
    if (s->q != q || s->parties() != n) {
      throw MalformedSharingError("pi_mul: operands disagree on modulus or party count");
    }
  }
  if (n < 2) throw MalformedSharingError("pi_mul: need at least two parties");
  if (t.iota < 1 || t.iota > n) {
    throw MalformedSharingError("pi_mul: triple carries no asymmetric bit holder");
  }
}

// Protocol 2, run party by party with an explicit broadcast exchange.
inline ShareSet pi_mul(const ShareSet& x, const ShareSet& y, const BeaverTriple& triple,
                       MulTranscript* transcript = nullptr) {
  check_compatible(x, y, triple);
  const std::size_t n = x.parties();
  const ZqRing ring(x.q);

  std::vector<PartyState> parties(n);
  for (std::size_t i = 1; i <= n; ++i) {
    parties[i - 1] = {i, x.at(i), y.at(i), triple_share_for(triple, i), {}};
  }
  for (const PartyState& sender : parties) {
    const MulOpening opening = mul_open(ring, sender.index, sender.x, sender.y, sender.triple);
    if (transcript != nullptr) transcript->broadcasts.push_back(opening);
    for (PartyState& receiver : parties) receiver.received.push_back(opening);
  }
  ShareSet z;
  z.q = x.q;
  z.shares.resize(n);
  for (const PartyState& p : parties) {
    z.shares[p.index - 1] = mul_close(ring, n, p.triple, p.received);
  }
  return z;
}

}  // namespace ppbench::sharing
