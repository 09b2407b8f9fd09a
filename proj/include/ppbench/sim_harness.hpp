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

#include <algorithm>
#include <atomic>
#include <barrier>
#include <chrono>
#include <cstddef>
#include <cstdint>
#include <cstdio>
#include <exception>
#include <functional>
#include <memory>
#include <mutex>
#include <ostream>
#include <span>
#include <string>
#include <string_view>
#include <thread>
#include <type_traits>
#include <utility>
#include <vector>

#include "json.hpp"
#include "ppbench/errors.hpp"

// In-process multi-party execution: parties are isolated workers that talk
// only through broadcast messages, plus role-scoped timing.
namespace ppbench::sim {

// ---------------------------------------------------------------------------
// Clocks

class Clock {
 public:
  virtual ~Clock() = default;
  // Monotonic timestamp in nanoseconds.
  virtual std::int64_t now_ns() = 0;
};

class SteadyClock final : public Clock {
 public:
  std::int64_t now_ns() override {
    return std::chrono::duration_cast<std::chrono::nanoseconds>(
               std::chrono::steady_clock::now().time_since_epoch())
        .count();
  }
};

// Test clock. Moves only when advanced, plus `tick_ns` after every reading.
class FakeClock final : public Clock {
 public:
  explicit FakeClock(std::int64_t tick_ns = 0, std::int64_t start_ns = 0)
      : now_(start_ns), tick_(tick_ns) {}

  std::int64_t now_ns() override { return now_.fetch_add(tick_); }
  void advance(std::int64_t ns) { now_.fetch_add(ns); }

 private:
  std::atomic<std::int64_t> now_;
  std::int64_t tick_;
};

// ---------------------------------------------------------------------------
// Role timing

enum class Role { kClient, kServer };

inline const char* role_name(Role role) { return role == Role::kClient ? "client" : "server"; }

struct RuntimeSample {
  double t_cli_ms = 0.0;
  double t_srv_ms = 0.0;
  std::size_t iteration = 0;
};

struct PhaseRecord {
  std::string phase;
  Role role;
  double ms;
};

template <typename T>
struct Timed {
  T value;
  double ms;
};

// Books elapsed time of phases to the client or server column of one sample.
class RoleTimer {
 public:
  explicit RoleTimer(Clock& clock, std::size_t iteration = 0) : clock_(&clock) {
    sample_.iteration = iteration;
  }

  Clock& clock() noexcept { return *clock_; }
  const RuntimeSample& sample() const noexcept { return sample_; }
  const std::vector<PhaseRecord>& phases() const noexcept { return phases_; }

  // Starts timing `role`; throws if that role is already being timed.
  class Scope {
   public:
    Scope(RoleTimer& timer, Role role, std::string_view phase)
        : timer_(timer), role_(role), phase_(phase) {
      bool& active = timer_.active(role_);
      if (active) {
        throw TimingError(std::string("nested timing of role '") + role_name(role_) + "'");
      }
      active = true;
      start_ = timer_.clock_->now_ns();
    }
    Scope(const Scope&) = delete;
    Scope& operator=(const Scope&) = delete;
    ~Scope() {
      if (!done_) timer_.active(role_) = false;
    }

    double stop() {
      const std::int64_t end = timer_.clock_->now_ns();
      const double ms = static_cast<double>(end - start_) / 1e6;
      timer_.book(role_, phase_, ms);
      timer_.active(role_) = false;
      done_ = true;
      return ms;
    }

   private:
    RoleTimer& timer_;
    Role role_;
    std::string phase_;
    std::int64_t start_ = 0;
    bool done_ = false;
  };

 private:
  bool& active(Role role) { return role == Role::kClient ? client_active_ : server_active_; }

  void book(Role role, std::string_view phase, double ms) {
    (role == Role::kClient ? sample_.t_cli_ms : sample_.t_srv_ms) += ms;
    phases_.push_back({std::string(phase), role, ms});
  }

  Clock* clock_;
  RuntimeSample sample_;
  std::vector<PhaseRecord> phases_;
  bool client_active_ = false;
  bool server_active_ = false;
};

// Runs `thunk` under `role`. Returns the elapsed milliseconds, paired with the
// thunk's result when it has one.
template <typename F>
auto time_role(RoleTimer& timer, Role role, F&& thunk, std::string_view phase = "") {
  using R = std::invoke_result_t<F&>;
  RoleTimer::Scope scope(timer, role, phase.empty() ? role_name(role) : phase);
  if constexpr (std::is_void_v<R>) {
    thunk();
    return scope.stop();
  } else {
    R value = thunk();
    const double ms = scope.stop();
    return Timed<R>{std::move(value), ms};
  }
}

// ---------------------------------------------------------------------------
// Messages and transcripts

struct Message {
  std::size_t sender = 0;
  std::string type;
  std::vector<std::uint64_t> payload;
};

// FNV-1a over the payload words.
inline std::uint64_t payload_digest(std::span<const std::uint64_t> payload) {
  std::uint64_t h = 0xcbf29ce484222325ULL;
  for (std::uint64_t word : payload) {
    for (int b = 0; b < 8; ++b) {
      h ^= (word >> (8 * b)) & 0xff;
      h *= 0x100000001b3ULL;
    }
  }
  return h;
}

struct TranscriptEntry {
  std::size_t step = 0;
  std::size_t party = 0;
  std::string msg_type;
  std::uint64_t payload_digest = 0;
};

inline std::string to_json_line(const TranscriptEntry& e) {
  char digest[19];
  std::snprintf(digest, sizeof digest, "%016llx", static_cast<unsigned long long>(e.payload_digest));
  return nlohmann::json{{"step", e.step},
                        {"party", e.party},
                        {"msg_type", e.msg_type},
                        {"payload_digest", digest}}
      .dump();
}

inline void write_transcript(std::ostream& out, std::span<const TranscriptEntry> entries) {
  for (const TranscriptEntry& e : entries) out << to_json_line(e) << '\n';
}

// Placeholder for link latency modeling. Not supported by the harness.
class DelayModel {
 public:
  virtual ~DelayModel() = default;
  virtual std::chrono::nanoseconds delay(std::size_t from, std::size_t to,
                                         std::size_t payload_words) const = 0;
};

// ---------------------------------------------------------------------------
// Parties

enum class Scheduling { kSequential, kConcurrent };

class Harness;

namespace detail {
inline thread_local const void* current_party = nullptr;
}  // namespace detail

// A party's only window onto the simulation: its own inbox and a broadcast
// facility. Every broadcast is delivered once to every party's inbox
// (the sender included) at the end of the step it was sent in.
class PartyHandle {
 public:
  std::size_t index() const { return touch(), index_; }
  std::size_t parties() const;

  void broadcast(std::string type, std::vector<std::uint64_t> payload);

  const std::vector<Message>& inbox() const { return touch(), inbox_; }

  // Delivered messages of `type`, in arrival order.
  std::vector<Message> received(std::string_view type) const {
    touch();
    std::vector<Message> out;
    for (const Message& m : inbox_) {
      if (m.type == type) out.push_back(m);
    }
    return out;
  }

 private:
  friend class Harness;

  PartyHandle(Harness& harness, std::size_t index) : harness_(&harness), index_(index) {}

  void touch() const;

  Harness* harness_;
  std::size_t index_;
  std::vector<Message> inbox_;
};

using Step = std::function<void(PartyHandle&)>;
using PartyProgram = std::vector<Step>;
// Builds the program for one party from its 1-based index.
using ProgramFactory = std::function<PartyProgram(std::size_t party)>;

class Harness {
 public:
  explicit Harness(Scheduling scheduling = Scheduling::kSequential, Clock* clock = nullptr)
      : scheduling_(scheduling), clock_(clock) {}

  Harness(const Harness&) = delete;
  Harness& operator=(const Harness&) = delete;

  // Creates k parties wired for all-to-all broadcast. Returns their handles.
  std::span<PartyHandle> spawn(std::size_t k, ProgramFactory factory) {
    if (k < 1) throw ParameterError("spawn: need at least one party");
    parties_.clear();
    programs_.clear();
    parties_.reserve(k);
    for (std::size_t i = 1; i <= k; ++i) {
      parties_.push_back(PartyHandle(*this, i));
      programs_.push_back(factory(i));
    }
    party_ns_.assign(k, 0);
    shut_down_ = false;
    return parties_;
  }

  // Executes every party's program in lockstep rounds, then shuts down.
  void run() {
    std::size_t rounds = 0;
    for (const PartyProgram& p : programs_) rounds = std::max(rounds, p.size());
    if (scheduling_ == Scheduling::kSequential) {
      run_sequential(rounds);
    } else {
      run_concurrent(rounds);
    }
    shutdown();
    if (failed_) {
      failed_ = false;
      std::rethrow_exception(std::exchange(failure_, nullptr));
    }
  }

  void shutdown() { shut_down_ = true; }
  bool is_shut_down() const noexcept { return shut_down_; }

  [[noreturn]] void set_delay_model(std::shared_ptr<const DelayModel>) {
    throw Error("network delay injection is not implemented");
  }

  Scheduling scheduling() const noexcept { return scheduling_; }
  std::span<PartyHandle> parties() noexcept { return parties_; }
  std::size_t party_count() const noexcept { return parties_.size(); }

  std::size_t messages_broadcast() const noexcept { return broadcasts_; }
  std::size_t messages_delivered() const noexcept { return deliveries_; }
  std::size_t cross_party_accesses() const noexcept { return cross_access_.load(); }
  const std::vector<TranscriptEntry>& transcript() const noexcept { return transcript_; }
  // Busy time per party in nanoseconds; zero unless a clock was supplied.
  const std::vector<std::int64_t>& party_elapsed_ns() const noexcept { return party_ns_; }

 private:
  friend class PartyHandle;

  struct Pending {
    std::size_t sequence;
    Message message;
  };

  void enqueue(Message message) {
    if (shut_down_) throw HarnessShutdownError("broadcast after harness shutdown");
    std::lock_guard lock(pending_mutex_);
    pending_.push_back({pending_.size(), std::move(message)});
  }

  // Delivers the current step's broadcasts in (sender, send order) order, so
  // inbox contents do not depend on scheduling.
  void flush(std::size_t step) {
    std::stable_sort(pending_.begin(), pending_.end(), [](const Pending& a, const Pending& b) {
      return a.message.sender < b.message.sender;
    });
    for (Pending& p : pending_) {
      transcript_.push_back({step, p.message.sender, p.message.type,
                             payload_digest(p.message.payload)});
      ++broadcasts_;
      for (PartyHandle& receiver : parties_) {
        receiver.inbox_.push_back(p.message);
        ++deliveries_;
      }
    }
    pending_.clear();
  }

  void run_step(std::size_t party, std::size_t round) {
    const PartyProgram& program = programs_[party];
    if (round >= program.size() || !program[round]) return;
    PartyHandle& handle = parties_[party];
    detail::current_party = &handle;
    const std::int64_t start = clock_ != nullptr ? clock_->now_ns() : 0;
    try {
      program[round](handle);
    } catch (...) {
      std::lock_guard lock(failure_mutex_);
      if (!failure_) failure_ = std::current_exception();
      failed_ = true;
    }
    if (clock_ != nullptr) party_ns_[party] += clock_->now_ns() - start;
    detail::current_party = nullptr;
  }

  void run_sequential(std::size_t rounds) {
    for (std::size_t r = 0; r < rounds && !failed_; ++r) {
      for (std::size_t p = 0; p < parties_.size(); ++p) run_step(p, r);
      flush(r);
    }
  }

  void run_concurrent(std::size_t rounds) {
    std::size_t round = 0;
    auto on_round_end = [this, &round]() noexcept { flush(round++); };
    std::barrier sync(static_cast<std::ptrdiff_t>(parties_.size()), on_round_end);
    std::vector<std::thread> workers;
    workers.reserve(parties_.size());
    for (std::size_t p = 0; p < parties_.size(); ++p) {
      workers.emplace_back([this, p, rounds, &sync] {
        for (std::size_t r = 0; r < rounds; ++r) {
          if (!failed_) run_step(p, r);
          sync.arrive_and_wait();
        }
      });
    }
    for (std::thread& t : workers) t.join();
  }

  Scheduling scheduling_;
  Clock* clock_;
  std::vector<PartyHandle> parties_;
  std::vector<PartyProgram> programs_;
  std::vector<std::int64_t> party_ns_;
  std::vector<Pending> pending_;
  std::mutex pending_mutex_;
  std::vector<TranscriptEntry> transcript_;
  std::size_t broadcasts_ = 0;
  std::size_t deliveries_ = 0;
  std::atomic<std::size_t> cross_access_{0};
  std::atomic<bool> shut_down_{false};
  std::exception_ptr failure_;
  std::atomic<bool> failed_{false};
  std::mutex failure_mutex_;
};

inline std::size_t PartyHandle::parties() const {
  touch();
  return harness_->party_count();
}

inline void PartyHandle::broadcast(std::string type, std::vector<std::uint64_t> payload) {
  touch();
  harness_->enqueue(Message{index_, std::move(type), std::move(payload)});
}

// Counts uses of this handle from inside another party's step.
inline void PartyHandle::touch() const {
  const void* current = detail::current_party;
  if (current != nullptr && current != this) harness_->cross_access_.fetch_add(1);
}

}  // namespace ppbench::sim
