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
#include <memory>
#include <numeric>
#include <span>
#include <string>
#include <vector>

#include "ppbench/errors.hpp"
#include "ppbench/modular.hpp"
#include "ppbench/paillier.hpp"
#include "ppbench/random.hpp"
#include "ppbench/secret_sharing.hpp"
#include "ppbench/sim_harness.hpp"

// Floor-mean protocols over encrypted values (HE) and additive shares (MPC),
// split into client-prepare, server-compute and client-finish phases.
namespace ppbench::mean {

enum class Protocol { kHe, kMpc };

// kPaperFaithful multiplies the sum by the inverse of the dataset size inside
// the protocol, which equals the mean only when the size divides the sum.
// kExact returns the sum and lets the client take the floor of the quotient.
enum class Mode { kPaperFaithful, kExact };

inline const char* protocol_name(Protocol p) { return p == Protocol::kHe ? "HE" : "MPC"; }
inline const char* mode_name(Mode m) { return m == Mode::kExact ? "exact" : "paper_faithful"; }

struct MeanProtocolConfig {
  Protocol protocol = Protocol::kMpc;
  std::size_t parties = 3;
  std::size_t key_bits = paillier::kBenchmarkKeyBits;
  std::uint64_t q = kDefaultShareModulus;
  Mode mode = Mode::kExact;
};

inline void validate(const MeanProtocolConfig& cfg) {
  if (cfg.protocol == Protocol::kMpc) {
    if (cfg.parties < 2) throw ParameterError("MPC mean needs at least two parties");
    if (cfg.q < 2) throw ParameterError("share modulus must be at least 2");
  } else if (cfg.key_bits < 16 || cfg.key_bits % 2 != 0) {
    throw ParameterError("HE key size must be even and at least 16 bits");
  }
}

struct MeanResult {
  mpz_class value;
  sim::RuntimeSample timings;
  std::vector<sim::PhaseRecord> phases;
  // Mean msb position of the uniform values the client drew.
  double h_u = 0.0;
};

// ---------------------------------------------------------------------------
// HE

inline std::vector<paillier::Ciphertext> he_client_prepare(std::span<const std::uint64_t> dataset,
                                                           const paillier::PublicKey& pk, Rng& rng,
                                                           MagnitudeTap* tap = nullptr) {
  std::vector<paillier::Ciphertext> out;
  out.reserve(dataset.size());
  for (const std::uint64_t x : dataset) {
    const mpz_class m(static_cast<unsigned long>(x));
    if (m >= pk.n) {
      throw DomainError("he_client_prepare: value " + std::to_string(x) + " does not fit in Z_N");
    }
    out.push_back(paillier::encrypt(pk, m, rng, tap));
  }
  return out;
}

inline paillier::Ciphertext he_server_compute(std::span<const paillier::Ciphertext> cts,
                                              std::size_t ell, const paillier::PublicKey& pk,
                                              Mode mode) {
  if (cts.empty()) throw ParameterError("he_server_compute: no ciphertexts");
  if (ell == 0) throw ParameterError("he_server_compute: dataset size must be positive");
  paillier::Ciphertext acc = cts.front();
  for (std::size_t i = 1; i < cts.size(); ++i) acc = paillier::hom_add(pk, acc, cts[i]);
  if (mode == Mode::kExact) return acc;
  const mpz_class inverse = mod_inverse(mpz_class(static_cast<unsigned long>(ell)), pk.n);
  return paillier::hom_scalar_mul(pk, acc, inverse);
}

inline mpz_class he_client_finish(const paillier::PrivateKey& sk, const paillier::Ciphertext& c,
                                  std::size_t ell, Mode mode) {
  if (ell == 0) throw ParameterError("he_client_finish: dataset size must be positive");
  const mpz_class plain = paillier::decrypt(sk, c);
  if (mode == Mode::kPaperFaithful) return plain;
  mpz_class out;
  mpz_fdiv_q_ui(out.get_mpz_t(), plain.get_mpz_t(), ell);
  return out;
}

// ---------------------------------------------------------------------------
// MPC

// Everything the client sends to one computing party.
struct MpcPartyInput {
  std::size_t index = 0;
  std::vector<std::uint64_t> shares;
  // Present only in paper_faithful mode.
  sharing::TripleShare triple;
  std::uint64_t inverse_share = 0;
};

struct MpcClientBundle {
  std::uint64_t q = kDefaultShareModulus;
  std::size_t ell = 0;
  Mode mode = Mode::kExact;
  std::vector<MpcPartyInput> party_inputs;
  // Kept by the client (who also plays the Trusted Initializer).
  sharing::BeaverTriple triple;
  sharing::ShareSet inverse;
};

inline MpcClientBundle mpc_client_prepare(std::span<const std::uint64_t> dataset, std::size_t k,
                                          std::uint64_t q, Mode mode, Rng& rng,
                                          MagnitudeTap* tap = nullptr) {
  const ZqRing ring(q);
  if (k < 2) throw ParameterError("mpc_client_prepare: need at least two parties");
  MpcClientBundle bundle;
  bundle.q = q;
  bundle.ell = dataset.size();
  bundle.mode = mode;
  bundle.party_inputs.resize(k);
  for (std::size_t i = 0; i < k; ++i) {
    bundle.party_inputs[i].index = i + 1;
    bundle.party_inputs[i].shares.reserve(dataset.size());
  }
  std::vector<std::uint64_t> scratch(k);
  for (const std::uint64_t x : dataset) {
    sharing::share_into(x, ring, rng, scratch, tap);
    for (std::size_t i = 0; i < k; ++i) bundle.party_inputs[i].shares.push_back(scratch[i]);
  }
  if (mode == Mode::kPaperFaithful) {
    if (bundle.ell == 0) throw ParameterError("mpc_client_prepare: empty dataset");
    const std::uint64_t inverse = mod_inverse(static_cast<std::uint64_t>(bundle.ell), q);
    bundle.triple = sharing::ti_gen_triple(k, q, rng, tap);
    bundle.inverse = sharing::share(inverse, k, q, rng, tap);
    for (std::size_t i = 1; i <= k; ++i) {
      bundle.party_inputs[i - 1].triple = sharing::triple_share_for(bundle.triple, i);
      bundle.party_inputs[i - 1].inverse_share = bundle.inverse.at(i);
    }
  }
  return bundle;
}

// Local step of pi_ADD over the party's shares.
inline std::uint64_t mpc_party_local_sum(const ZqRing& ring, std::span<const std::uint64_t> shares) {
  std::uint64_t sum = 0;
  for (const std::uint64_t s : shares) sum = ring.add(sum, s);
  return sum;
}

// Party's share of mu once every opening of the pi_MUL round is known. In
// exact mode there is no multiplication and the share of the sum is returned.
inline std::uint64_t mpc_server_party(const ZqRing& ring, std::size_t k, const MpcPartyInput& in,
                                      Mode mode, std::span<const sharing::MulOpening> openings) {
  const std::uint64_t sum = mpc_party_local_sum(ring, in.shares);
  if (mode == Mode::kExact) return sum;
  return sharing::mul_close(ring, k, in.triple, openings);
}

// Per-party program: step 0 sums locally and broadcasts (d_i, e_i); step 1
// combines the openings into z_i. `outputs[i-1]` receives party i's result.
inline sim::ProgramFactory mpc_server_program(const MpcClientBundle& bundle,
                                              std::vector<std::uint64_t>& outputs) {
  outputs.assign(bundle.party_inputs.size(), 0);
  return [&bundle, &outputs](std::size_t party) {
    const MpcPartyInput& in = bundle.party_inputs.at(party - 1);
    const ZqRing ring(bundle.q);
    const std::size_t k = bundle.party_inputs.size();
    auto local_sum = std::make_shared<std::uint64_t>(0);
    sim::PartyProgram program;
    program.push_back([&in, ring, local_sum, &outputs, mode = bundle.mode](sim::PartyHandle& self) {
      *local_sum = mpc_party_local_sum(ring, in.shares);
      if (mode == Mode::kExact) {
        outputs[self.index() - 1] = *local_sum;
        return;
      }
      const sharing::MulOpening o =
          sharing::mul_open(ring, self.index(), *local_sum, in.inverse_share, in.triple);
      self.broadcast("open", {o.d, o.e});
    });
    if (bundle.mode == Mode::kPaperFaithful) {
      program.push_back([&in, ring, k, &outputs](sim::PartyHandle& self) {
        std::vector<sharing::MulOpening> openings;
        for (const sim::Message& m : self.received("open")) {
          if (m.payload.size() != 2) throw WiringError("malformed opening message");
          openings.push_back({m.sender, m.payload[0], m.payload[1]});
        }
        outputs[self.index() - 1] = sharing::mul_close(ring, k, in.triple, openings);
      });
    }
    return program;
  };
}

// Runs every computing party under `harness` and collects the shares of mu.
inline sharing::ShareSet mpc_server_run(const MpcClientBundle& bundle, sim::Harness& harness) {
  std::vector<std::uint64_t> outputs;
  harness.spawn(bundle.party_inputs.size(), mpc_server_program(bundle, outputs));
  harness.run();
  return sharing::ShareSet{std::move(outputs), bundle.q};
}

inline mpz_class mpc_client_finish(const sharing::ShareSet& z, std::size_t ell, Mode mode) {
  const std::uint64_t value = sharing::reconstruct(z);
  if (mode == Mode::kPaperFaithful) return mpz_class(static_cast<unsigned long>(value));
  if (ell == 0) throw ParameterError("mpc_client_finish: dataset size must be positive");
  return mpz_class(static_cast<unsigned long>(value / ell));
}

// ---------------------------------------------------------------------------
// Orchestration

// Resources for one protocol run. `keys` is required for HE.
struct RunEnvironment {
  sim::Clock* clock = nullptr;
  Rng* rng = nullptr;
  sim::Scheduling scheduling = sim::Scheduling::kConcurrent;
  const paillier::Keypair* keys = nullptr;
  std::size_t iteration = 0;
  // Receives the server-phase message transcript when set.
  std::vector<sim::TranscriptEntry>* transcript = nullptr;
};

namespace detail {

inline void check_exact_sum_fits(std::span<const std::uint64_t> dataset, const mpz_class& bound) {
  mpz_class sum = 0;
  for (const std::uint64_t x : dataset) sum += static_cast<unsigned long>(x);
  if (sum >= bound) {
    throw DomainError("exact mode: dataset sum " + sum.get_str() +
                      " does not fit in the plaintext space");
  }
}

}  // namespace detail

inline MeanResult run_protocol(std::span<const std::uint64_t> dataset,
                               const MeanProtocolConfig& cfg, RunEnvironment& env) {
  validate(cfg);
  if (env.clock == nullptr || env.rng == nullptr) {
    throw ParameterError("run_protocol: environment needs a clock and an rng");
  }
  if (dataset.empty()) throw ParameterError("run_protocol: empty dataset");
  const std::size_t ell = dataset.size();
  sim::RoleTimer timer(*env.clock, env.iteration);
  MagnitudeTap tap;
  MeanResult result;

  if (cfg.protocol == Protocol::kHe) {
    if (env.keys == nullptr) throw ParameterError("run_protocol: HE run without a keypair");
    const paillier::PublicKey& pk = env.keys->public_key;
    if (cfg.mode == Mode::kExact) detail::check_exact_sum_fits(dataset, pk.n);
    auto cts = sim::time_role(
        timer, sim::Role::kClient, [&] { return he_client_prepare(dataset, pk, *env.rng, &tap); },
        "he_client_prepare");
    auto encrypted_mean = sim::time_role(
        timer, sim::Role::kServer, [&] { return he_server_compute(cts.value, ell, pk, cfg.mode); },
        "he_server_compute");
    result.value = sim::time_role(
                       timer, sim::Role::kClient,
                       [&] {
                         return he_client_finish(env.keys->private_key, encrypted_mean.value, ell,
                                                 cfg.mode);
                       },
                       "he_client_finish")
                       .value;
  } else {
    if (cfg.mode == Mode::kExact) detail::check_exact_sum_fits(dataset, mpz_class(
                                                  static_cast<unsigned long>(cfg.q)));
    auto bundle = sim::time_role(
        timer, sim::Role::kClient,
        [&] { return mpc_client_prepare(dataset, cfg.parties, cfg.q, cfg.mode, *env.rng, &tap); },
        "mpc_client_prepare");
    sim::Harness harness(env.scheduling);
    auto z = sim::time_role(
        timer, sim::Role::kServer, [&] { return mpc_server_run(bundle.value, harness); },
        "mpc_server");
    if (env.transcript != nullptr) *env.transcript = harness.transcript();
    result.value = sim::time_role(
                       timer, sim::Role::kClient,
                       [&] { return mpc_client_finish(z.value, ell, cfg.mode); },
                       "mpc_client_finish")
                       .value;
  }
  result.timings = timer.sample();
  result.phases = timer.phases();
  result.h_u = tap.mean();
  return result;
}

}  // namespace ppbench::mean
