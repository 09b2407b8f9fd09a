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
#include <exception>
#include <limits>
#include <memory>
#include <optional>
#include <ostream>
#include <span>
#include <string>
#include <utility>
#include <variant>
#include <vector>

#include "ppbench/data_gen.hpp"
#include "ppbench/errors.hpp"
#include "ppbench/mean_protocols.hpp"
#include "ppbench/paillier.hpp"
#include "ppbench/random.hpp"
#include "ppbench/sim_harness.hpp"

// Monte Carlo estimation of expected client and server runtimes.
namespace ppbench::mc {

using sim::Role;

struct McEstimate {
  // (1/M) sum t_i, in ms.
  double theta_hat = 0.0;
  // Variance of the estimator, (1/M^2) sum (t_i - theta_hat)^2, in ms^2.
  double var_hat = 0.0;
  // Diagnostic only: the unbiased sample variance of t, 1/(M-1) normalization.
  double sample_variance = 0.0;
  std::size_t m = 0;
  Role role = Role::kClient;
};

// One row of raw output.
struct IterationRecord {
  std::size_t iteration = 0;
  double t_cli_ms = 0.0;
  double t_srv_ms = 0.0;
  double h_u = 0.0;
};

inline double sample_mean(std::span<const double> samples) {
  double sum = 0.0;
  for (const double t : samples) sum += t;
  return sum / static_cast<double>(samples.size());
}

inline double sum_squared_deviations(std::span<const double> samples, double center) {
  double sum = 0.0;
  for (const double t : samples) {
    const double dev = t - center;
    sum += dev * dev;
  }
  return sum;
}

inline McEstimate summarize(std::span<const double> samples, Role role) {
  if (samples.empty()) throw ParameterError("summarize: need at least one sample");
  const auto m = static_cast<double>(samples.size());
  McEstimate est;
  est.role = role;
  est.m = samples.size();
  est.theta_hat = sample_mean(samples);
  const double ss = sum_squared_deviations(samples, est.theta_hat);
  est.var_hat = ss / (m * m);
  est.sample_variance = samples.size() > 1 ? ss / (m - 1.0) : 0.0;
  return est;
}

// h(U): mean msb position over U, 0 for an empty list.
inline double msb_magnitude(std::span<const std::uint64_t> values) {
  MagnitudeTap tap;
  for (const std::uint64_t u : values) tap.observe(u);
  return tap.mean();
}

inline double msb_magnitude(std::span<const mpz_class> values) {
  MagnitudeTap tap;
  for (const mpz_class& u : values) tap.observe(u);
  return tap.mean();
}

struct McRun {
  McEstimate client;
  McEstimate server;
  std::vector<IterationRecord> samples;

  std::vector<double> client_times() const {
    std::vector<double> out;
    out.reserve(samples.size());
    for (const IterationRecord& r : samples) out.push_back(r.t_cli_ms);
    return out;
  }
  std::vector<double> server_times() const {
    std::vector<double> out;
    out.reserve(samples.size());
    for (const IterationRecord& r : samples) out.push_back(r.t_srv_ms);
    return out;
  }
};

// Runs `runner(i)` for i in [0, m) and aggregates both roles. The runner
// returns an IterationRecord; a throwing iteration aborts the estimate.
template <typename Runner>
McRun estimate(Runner&& runner, std::size_t m) {
  if (m < 1) throw ParameterError("estimate: M must be at least 1");
  McRun run;
  run.samples.reserve(m);
  for (std::size_t i = 0; i < m; ++i) {
    try {
      IterationRecord rec = runner(i);
      rec.iteration = i;
      run.samples.push_back(rec);
    } catch (const std::exception& e) {
      throw IterationError(i, e.what());
    }
  }
  run.client = summarize(run.client_times(), Role::kClient);
  run.server = summarize(run.server_times(), Role::kServer);
  return run;
}

// One estimate per entry of `m_list`, each starting from iteration 0 so all
// rows share the runner's seed family.
template <typename Runner>
std::vector<McRun> convergence_report(Runner&& runner, std::span<const std::size_t> m_list) {
  if (m_list.empty()) throw ParameterError("convergence_report: empty M list");
  for (std::size_t i = 1; i < m_list.size(); ++i) {
    if (m_list[i] <= m_list[i - 1]) {
      throw ParameterError("convergence_report: M list must be strictly ascending");
    }
  }
  std::vector<McRun> out;
  out.reserve(m_list.size());
  for (const std::size_t m : m_list) out.push_back(estimate(runner, m));
  return out;
}

inline void write_samples_csv(std::ostream& out, std::span<const IterationRecord> samples) {
  out << "iteration,t_cli_ms,t_srv_ms,h_U\n";
  const auto old_precision = out.precision(std::numeric_limits<double>::max_digits10);
  for (const IterationRecord& r : samples) {
    out << r.iteration << ',' << r.t_cli_ms << ',' << r.t_srv_ms << ',' << r.h_u << '\n';
  }
  out.precision(old_precision);
}

// ---------------------------------------------------------------------------
// Protocol-backed runner

struct RunnerSpec {
  mean::MeanProtocolConfig protocol;
  // Fixed dataset, or a distribution redrawn every iteration.
  std::variant<data::Dataset, data::DistSpec> source;
  std::uint64_t master_seed = 1;
  sim::Scheduling scheduling = sim::Scheduling::kConcurrent;
  // Defaults to the steady clock when null. Not owned.
  sim::Clock* clock = nullptr;
  // HE key to reuse; generated from the master seed when null.
  std::shared_ptr<const paillier::Keypair> keys;
};

// Stream assignment under a master seed: iteration i uses stream 2i for
// protocol randomness and 2i+1 for its dataset; the HE key uses the last stream.
inline std::uint64_t protocol_seed(std::uint64_t master, std::size_t i) {
  return split_seed(master, 2 * static_cast<std::uint64_t>(i));
}
inline std::uint64_t dataset_seed(std::uint64_t master, std::size_t i) {
  return split_seed(master, 2 * static_cast<std::uint64_t>(i) + 1);
}
inline std::uint64_t key_seed(std::uint64_t master) {
  return split_seed(master, std::numeric_limits<std::uint64_t>::max());
}

class ProtocolRunner {
 public:
  explicit ProtocolRunner(RunnerSpec spec) : spec_(std::move(spec)) {
    mean::validate(spec_.protocol);
    if (const auto* dist = std::get_if<data::DistSpec>(&spec_.source)) data::validate(*dist);
    if (spec_.protocol.protocol == mean::Protocol::kHe) {
      if (spec_.keys) {
        keys_ = *spec_.keys;
      } else {
        Rng key_rng(key_seed(spec_.master_seed));
        keys_ = paillier::keygen(spec_.protocol.key_bits, key_rng);
      }
    }
  }

  IterationRecord operator()(std::size_t iteration) {
    const data::Dataset* dataset = std::get_if<data::Dataset>(&spec_.source);
    data::Dataset drawn;
    if (dataset == nullptr) {
      drawn = data::sample(std::get<data::DistSpec>(spec_.source),
                           dataset_seed(spec_.master_seed, iteration));
      dataset = &drawn;
    }
    Rng rng(protocol_seed(spec_.master_seed, iteration));
    mean::RunEnvironment env;
    env.clock = spec_.clock != nullptr ? spec_.clock : &steady_;
    env.rng = &rng;
    env.scheduling = spec_.scheduling;
    env.keys = keys_ ? &*keys_ : nullptr;
    env.iteration = iteration;
    const mean::MeanResult result = mean::run_protocol(dataset->values, spec_.protocol, env);
    last_value_ = result.value;
    return {iteration, result.timings.t_cli_ms, result.timings.t_srv_ms, result.h_u};
  }

  const RunnerSpec& spec() const noexcept { return spec_; }
  const std::optional<paillier::Keypair>& keys() const noexcept { return keys_; }
  const mpz_class& last_value() const noexcept { return last_value_; }

 private:
  RunnerSpec spec_;
  std::optional<paillier::Keypair> keys_;
  sim::SteadyClock steady_;
  mpz_class last_value_;
};

}  // namespace ppbench::mc
