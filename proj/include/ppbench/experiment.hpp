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
#include <chrono>
#include <cstddef>
#include <cstdint>
#include <ctime>
#include <filesystem>
#include <fstream>
#include <future>
#include <map>
#include <memory>
#include <optional>
#include <sstream>
#include <string>
#include <string_view>
#include <variant>
#include <vector>

#include "json.hpp"
#include "ppbench/data_gen.hpp"
#include "ppbench/errors.hpp"
#include "ppbench/mean_protocols.hpp"
#include "ppbench/modular.hpp"
#include "ppbench/monte_carlo.hpp"
#include "ppbench/paillier.hpp"
#include "ppbench/sim_harness.hpp"
#include "ppbench/stats_report.hpp"

// Experiment orchestration: the fixed-dataset experiment (type1), the
// distribution x size sweep (type2) and single-cell ad hoc runs.
namespace ppbench::experiment {

enum class Kind { kType1, kType2, kAdhoc };
enum class ClockKind { kSteady, kFake };

inline const char* kind_name(Kind k) {
  switch (k) {
    case Kind::kType1: return "type1";
    case Kind::kType2: return "type2";
    case Kind::kAdhoc: return "adhoc";
  }
  return "?";
}

struct DatasetRef {
  std::string name;
  std::string path;
  std::string column;
};

struct ExperimentConfig {
  Kind experiment = Kind::kAdhoc;
  std::vector<mean::Protocol> protocols{mean::Protocol::kHe, mean::Protocol::kMpc};
  std::vector<std::size_t> m_list{1000, 5000};
  std::vector<DatasetRef> datasets{
      {"Dow Jones Index", "data/dow_jones_index.csv", "volume"},
      {"Bank Marketing", "data/bank.csv", "balance"},
  };
  std::vector<data::DistSpec> distributions = data::default_sweep_distributions();
  std::vector<std::size_t> sizes{50, 500, 1000};
  std::size_t parties = 3;
  std::size_t key_bits = paillier::kBenchmarkKeyBits;
  std::uint64_t q = kDefaultShareModulus;
  mean::Mode mode = mean::Mode::kPaperFaithful;
  std::uint64_t seed = 1;
  std::string out_dir;
  stats::Format format = stats::Format::kMarkdown;
  bool smoke = false;
  bool parallel_cells = false;
  // Regression on raw per-iteration samples (true) or on per-cell means.
  bool pooled_regression = true;
  sim::Scheduling scheduling = sim::Scheduling::kConcurrent;
  ClockKind clock = ClockKind::kSteady;
  // Used in output file names; the current UTC time when empty.
  std::string timestamp;
  bool verbose = false;
  // Ad hoc dataset: explicit values, else the first distribution at sizes[0],
  // else the first CSV dataset.
  std::vector<std::uint64_t> values;
};

// ---------------------------------------------------------------------------
// Parsing helpers shared by the JSON config and the command line

inline std::optional<mean::Protocol> parse_protocol(std::string_view s) {
  if (s == "HE" || s == "he") return mean::Protocol::kHe;
  if (s == "MPC" || s == "mpc") return mean::Protocol::kMpc;
  return std::nullopt;
}

inline std::optional<mean::Mode> parse_mode(std::string_view s) {
  if (s == "exact") return mean::Mode::kExact;
  if (s == "paper_faithful") return mean::Mode::kPaperFaithful;
  return std::nullopt;
}

inline std::optional<Kind> parse_kind(std::string_view s) {
  if (s == "type1") return Kind::kType1;
  if (s == "type2") return Kind::kType2;
  if (s == "adhoc") return Kind::kAdhoc;
  return std::nullopt;
}

inline std::optional<stats::Format> parse_format(std::string_view s) {
  if (s == "markdown" || s == "md") return stats::Format::kMarkdown;
  if (s == "csv") return stats::Format::kCsv;
  if (s == "json") return stats::Format::kJson;
  return std::nullopt;
}

inline std::vector<std::string> split(std::string_view s, char sep) {
  std::vector<std::string> out;
  std::size_t start = 0;
  while (start <= s.size()) {
    const std::size_t end = s.find(sep, start);
    const std::size_t stop = end == std::string_view::npos ? s.size() : end;
    if (stop > start) out.emplace_back(s.substr(start, stop - start));
    if (end == std::string_view::npos) break;
    start = end + 1;
  }
  return out;
}

// "family:p1:p2[:scale]", e.g. "gamma:2:2:120".
inline data::DistSpec parse_dist(std::string_view text) {
  const auto parts = split(text, ':');
  if (parts.size() < 3 || parts.size() > 4) {
    throw ParameterError("--dist expects family:p1:p2[:scale], got '" + std::string(text) + "'");
  }
  const auto family = data::parse_family(parts[0]);
  if (!family) throw ParameterError("unknown distribution family '" + parts[0] + "'");
  data::DistSpec spec;
  spec.family = *family;
  try {
    spec.p1 = std::stod(parts[1]);
    spec.p2 = std::stod(parts[2]);
    if (parts.size() == 4) spec.scale_factor = std::stod(parts[3]);
  } catch (const std::exception&) {
    throw ParameterError("non-numeric distribution parameter in '" + std::string(text) + "'");
  }
  return spec;
}

// "name=path:column" or "path:column".
inline DatasetRef parse_dataset(std::string_view text) {
  DatasetRef ref;
  std::string_view rest = text;
  if (const auto eq = rest.find('='); eq != std::string_view::npos) {
    ref.name = std::string(rest.substr(0, eq));
    rest.remove_prefix(eq + 1);
  }
  const auto colon = rest.rfind(':');
  if (colon == std::string_view::npos) {
    throw ParameterError("--dataset expects [name=]path:column, got '" + std::string(text) + "'");
  }
  ref.path = std::string(rest.substr(0, colon));
  ref.column = std::string(rest.substr(colon + 1));
  if (ref.name.empty()) ref.name = std::filesystem::path(ref.path).stem().string();
  return ref;
}

// Applies the keys present in `j` on top of `cfg`.
inline void apply_json(ExperimentConfig& cfg, const nlohmann::json& j) {
  auto require = [](bool ok, const std::string& what) {
    if (!ok) throw ParameterError("config: " + what);
  };
  if (j.contains("experiment")) {
    const auto k = parse_kind(j.at("experiment").get<std::string>());
    require(k.has_value(), "experiment must be type1, type2 or adhoc");
    cfg.experiment = *k;
  }
  if (j.contains("protocols")) {
    cfg.protocols.clear();
    for (const auto& p : j.at("protocols")) {
      const auto proto = parse_protocol(p.get<std::string>());
      require(proto.has_value(), "protocols entries must be HE or MPC");
      cfg.protocols.push_back(*proto);
    }
  }
  if (j.contains("m")) cfg.m_list = j.at("m").get<std::vector<std::size_t>>();
  if (j.contains("sizes")) cfg.sizes = j.at("sizes").get<std::vector<std::size_t>>();
  if (j.contains("distributions")) {
    cfg.distributions.clear();
    for (const auto& d : j.at("distributions")) {
      if (d.is_string()) {
        cfg.distributions.push_back(parse_dist(d.get<std::string>()));
        continue;
      }
      data::DistSpec spec;
      const auto family = data::parse_family(d.at("family").get<std::string>());
      require(family.has_value(), "unknown distribution family");
      spec.family = *family;
      spec.p1 = d.at("p1").get<double>();
      spec.p2 = d.at("p2").get<double>();
      spec.scale_factor = d.value("scale", 1.0);
      cfg.distributions.push_back(spec);
    }
  }
  if (j.contains("datasets")) {
    cfg.datasets.clear();
    for (const auto& d : j.at("datasets")) {
      cfg.datasets.push_back({d.value("name", std::string()), d.at("path").get<std::string>(),
                              d.at("column").get<std::string>()});
      if (cfg.datasets.back().name.empty()) {
        cfg.datasets.back().name =
            std::filesystem::path(cfg.datasets.back().path).stem().string();
      }
    }
  }
  if (j.contains("parties")) cfg.parties = j.at("parties").get<std::size_t>();
  if (j.contains("key_bits")) cfg.key_bits = j.at("key_bits").get<std::size_t>();
  if (j.contains("modulus")) {
    const auto& m = j.at("modulus");
    cfg.q = m.is_string() ? std::stoull(m.get<std::string>()) : m.get<std::uint64_t>();
  }
  if (j.contains("mode")) {
    const auto mode = parse_mode(j.at("mode").get<std::string>());
    require(mode.has_value(), "mode must be exact or paper_faithful");
    cfg.mode = *mode;
  }
  if (j.contains("seed")) cfg.seed = j.at("seed").get<std::uint64_t>();
  if (j.contains("out")) cfg.out_dir = j.at("out").get<std::string>();
  if (j.contains("format")) {
    const auto f = parse_format(j.at("format").get<std::string>());
    require(f.has_value(), "format must be markdown, csv or json");
    cfg.format = *f;
  }
  if (j.contains("smoke")) cfg.smoke = j.at("smoke").get<bool>();
  if (j.contains("parallel_cells")) cfg.parallel_cells = j.at("parallel_cells").get<bool>();
  if (j.contains("fit_on")) {
    const std::string fit_on = j.at("fit_on").get<std::string>();
    require(fit_on == "samples" || fit_on == "means", "fit_on must be samples or means");
    cfg.pooled_regression = fit_on == "samples";
  }
  if (j.contains("scheduling")) {
    const std::string s = j.at("scheduling").get<std::string>();
    require(s == "sequential" || s == "concurrent", "scheduling must be sequential or concurrent");
    cfg.scheduling = s == "sequential" ? sim::Scheduling::kSequential : sim::Scheduling::kConcurrent;
  }
  if (j.contains("clock")) {
    const std::string c = j.at("clock").get<std::string>();
    require(c == "steady" || c == "fake", "clock must be steady or fake");
    cfg.clock = c == "fake" ? ClockKind::kFake : ClockKind::kSteady;
  }
  if (j.contains("timestamp")) cfg.timestamp = j.at("timestamp").get<std::string>();
  if (j.contains("verbose")) cfg.verbose = j.at("verbose").get<bool>();
  if (j.contains("values")) cfg.values = j.at("values").get<std::vector<std::uint64_t>>();
}

// Scales M values and sweep sizes down 100x (minimum 1) for quick runs.
inline void apply_smoke(ExperimentConfig& cfg) {
  auto shrink = [](std::size_t v) { return std::max<std::size_t>(1, v / 100); };
  for (std::size_t& m : cfg.m_list) m = shrink(m);
  for (std::size_t& s : cfg.sizes) s = shrink(s);
  cfg.m_list.erase(std::unique(cfg.m_list.begin(), cfg.m_list.end()), cfg.m_list.end());
  cfg.sizes.erase(std::unique(cfg.sizes.begin(), cfg.sizes.end()), cfg.sizes.end());
}

// Every problem with the configuration, not just the first.
inline std::vector<std::string> validate(const ExperimentConfig& cfg) {
  std::vector<std::string> errors;
  if (cfg.protocols.empty()) errors.emplace_back("no protocol selected");
  if (cfg.m_list.empty()) errors.emplace_back("M list is empty");
  for (const std::size_t m : cfg.m_list) {
    if (m < 1) errors.emplace_back("M must be at least 1");
  }
  for (std::size_t i = 1; i < cfg.m_list.size(); ++i) {
    if (cfg.m_list[i] <= cfg.m_list[i - 1]) errors.emplace_back("M list must be ascending");
  }
  if (cfg.parties < 2) errors.emplace_back("parties must be at least 2");
  if (cfg.key_bits < 16 || cfg.key_bits % 2 != 0) {
    errors.emplace_back("key bits must be even and at least 16");
  }
  if (cfg.q < 2) errors.emplace_back("modulus must be at least 2");

  const bool has_mpc = std::find(cfg.protocols.begin(), cfg.protocols.end(), mean::Protocol::kMpc) !=
                       cfg.protocols.end();
  auto check_size = [&](std::size_t ell, const std::string& where) {
    if (ell < 1) {
      errors.push_back(where + ": dataset size must be at least 1");
    } else if (has_mpc && cfg.mode == mean::Mode::kPaperFaithful && cfg.q >= 2 &&
               gcd_u64(ell, cfg.q) != 1) {
      errors.push_back(where + ": size " + std::to_string(ell) +
                       " is not invertible modulo " + std::to_string(cfg.q));
    }
  };

  switch (cfg.experiment) {
    case Kind::kType1:
      if (cfg.datasets.empty()) errors.emplace_back("type1 needs at least one dataset");
      for (const DatasetRef& d : cfg.datasets) {
        if (!std::filesystem::exists(d.path)) {
          errors.push_back("dataset file not found: " + d.path);
        }
      }
      break;
    case Kind::kType2:
      if (cfg.distributions.empty()) errors.emplace_back("type2 needs at least one distribution");
      if (cfg.sizes.empty()) errors.emplace_back("type2 needs at least one size");
      for (const std::size_t s : cfg.sizes) check_size(s, "sizes");
      for (data::DistSpec d : cfg.distributions) {
        d.size = 1;
        try {
          data::validate(d);
        } catch (const Error& e) {
          errors.emplace_back(e.what());
        }
      }
      break;
    case Kind::kAdhoc:
      if (cfg.protocols.size() > 1) errors.emplace_back("adhoc runs exactly one protocol");
      if (!cfg.values.empty()) {
        check_size(cfg.values.size(), "values");
      } else if (!cfg.distributions.empty() && !cfg.sizes.empty()) {
        check_size(cfg.sizes.front(), "sizes");
      } else if (!cfg.datasets.empty()) {
        if (!std::filesystem::exists(cfg.datasets.front().path)) {
          errors.push_back("dataset file not found: " + cfg.datasets.front().path);
        }
      } else {
        errors.emplace_back("adhoc needs values, a distribution and size, or a dataset");
      }
      break;
  }
  return errors;
}

// ---------------------------------------------------------------------------
// Grid execution

// One (dataset, size, protocol) combination, estimated at every M.
struct Cell {
  std::string dataset;
  std::size_t size = 0;
  mean::Protocol protocol = mean::Protocol::kMpc;
  std::variant<data::Dataset, data::DistSpec> source;
  std::uint64_t seed = 0;

  std::string slug() const {
    std::string out;
    for (const char c : dataset) {
      const bool keep = (c >= 'a' && c <= 'z') || (c >= 'A' && c <= 'Z') || (c >= '0' && c <= '9');
      out += keep ? c : '_';
    }
    return out + "_n" + std::to_string(size) + "_" + mean::protocol_name(protocol);
  }
};

struct CellResult {
  Cell cell;
  std::vector<mc::McRun> runs;  // one per M
  std::optional<std::string> error;
  std::vector<sim::TranscriptEntry> transcript;
};

struct ExperimentResult {
  stats::ReportTable table;
  std::vector<CellResult> cells;
  std::vector<std::string> failed_cells;
  std::vector<std::string> written_files;

  bool ok() const noexcept { return failed_cells.empty(); }
};

inline std::uint64_t fnv1a(std::string_view s) {
  std::uint64_t h = 0xcbf29ce484222325ULL;
  for (const char c : s) {
    h ^= static_cast<unsigned char>(c);
    h *= 0x100000001b3ULL;
  }
  return h;
}

// Cells sharing (dataset, size) share a seed, so HE and MPC see the same data.
inline std::uint64_t cell_seed(std::uint64_t master, const std::string& dataset, std::size_t size) {
  return split_seed(master, fnv1a(dataset + "#" + std::to_string(size)));
}

inline mean::MeanProtocolConfig protocol_config(const ExperimentConfig& cfg, mean::Protocol p) {
  mean::MeanProtocolConfig pc;
  pc.protocol = p;
  pc.parties = cfg.parties;
  pc.key_bits = cfg.key_bits;
  pc.q = cfg.q;
  pc.mode = cfg.mode;
  return pc;
}

inline CellResult run_cell(const ExperimentConfig& cfg, const Cell& cell,
                           std::shared_ptr<const paillier::Keypair> keys) {
  CellResult out;
  out.cell = cell;
  try {
    sim::FakeClock fake(1000);
    mc::RunnerSpec spec;
    spec.protocol = protocol_config(cfg, cell.protocol);
    spec.source = cell.source;
    spec.master_seed = cell.seed;
    spec.scheduling = cfg.scheduling;
    spec.clock = cfg.clock == ClockKind::kFake ? &fake : nullptr;
    spec.keys = std::move(keys);
    mc::ProtocolRunner runner(std::move(spec));
    out.runs = mc::convergence_report(runner, std::span<const std::size_t>(cfg.m_list));

    if (cfg.verbose && cell.protocol == mean::Protocol::kMpc) {
      // Replay iteration 0 sequentially to capture its message transcript.
      const data::Dataset* fixed = std::get_if<data::Dataset>(&cell.source);
      data::Dataset drawn = fixed != nullptr
                                ? *fixed
                                : data::sample(std::get<data::DistSpec>(cell.source),
                                               mc::dataset_seed(cell.seed, 0));
      Rng rng(mc::protocol_seed(cell.seed, 0));
      mean::RunEnvironment env;
      env.clock = &fake;
      env.rng = &rng;
      env.scheduling = sim::Scheduling::kSequential;
      env.transcript = &out.transcript;
      mean::run_protocol(drawn.values, protocol_config(cfg, cell.protocol), env);
    }
  } catch (const std::exception& e) {
    out.error = e.what();
  }
  return out;
}

inline std::vector<CellResult> run_cells(const ExperimentConfig& cfg, const std::vector<Cell>& cells) {
  std::shared_ptr<const paillier::Keypair> keys;
  const bool needs_key = std::any_of(cells.begin(), cells.end(), [](const Cell& c) {
    return c.protocol == mean::Protocol::kHe;
  });
  if (needs_key) {
    Rng key_rng(mc::key_seed(cfg.seed));
    keys = std::make_shared<const paillier::Keypair>(paillier::keygen(cfg.key_bits, key_rng));
  }
  std::vector<CellResult> results;
  if (cfg.parallel_cells) {
    std::vector<std::future<CellResult>> pending;
    for (const Cell& c : cells) {
      pending.push_back(std::async(std::launch::async, [&cfg, c, keys] { return run_cell(cfg, c, keys); }));
    }
    for (auto& f : pending) results.push_back(f.get());
  } else {
    for (const Cell& c : cells) results.push_back(run_cell(cfg, c, keys));
  }
  return results;
}

inline void collect_rows(ExperimentResult& result, const ExperimentConfig& cfg) {
  for (const CellResult& cr : result.cells) {
    if (cr.error) {
      result.failed_cells.push_back(cr.cell.slug() + ": " + *cr.error);
      continue;
    }
    for (std::size_t i = 0; i < cr.runs.size(); ++i) {
      const mc::McRun& run = cr.runs[i];
      result.table.rows.push_back({cr.cell.dataset, cr.cell.size,
                                   mean::protocol_name(cr.cell.protocol), cfg.m_list[i],
                                   run.client.theta_hat, run.client.var_hat,
                                   run.server.theta_hat, run.server.var_hat});
    }
  }
  stats::sort_rows(result.table);
}

inline std::string utc_timestamp() {
  const std::time_t now = std::chrono::system_clock::to_time_t(std::chrono::system_clock::now());
  std::tm tm{};
  gmtime_r(&now, &tm);
  char buf[32];
  std::strftime(buf, sizeof buf, "%Y%m%dT%H%M%SZ", &tm);
  return buf;
}

// Writes the report as {experiment}-{timestamp}.{ext} plus raw samples under
// {experiment}-{timestamp}-samples/.
inline void write_outputs(ExperimentResult& result, const ExperimentConfig& cfg) {
  if (cfg.out_dir.empty()) return;
  namespace fs = std::filesystem;
  const std::string stamp = cfg.timestamp.empty() ? utc_timestamp() : cfg.timestamp;
  const std::string base = std::string(kind_name(cfg.experiment)) + "-" + stamp;
  const fs::path dir(cfg.out_dir);
  fs::create_directories(dir);

  const fs::path report = dir / (base + "." + stats::format_extension(cfg.format));
  std::ofstream(report, std::ios::binary) << stats::render(result.table, cfg.format);
  result.written_files.push_back(report.string());

  const fs::path samples_dir = dir / (base + "-samples");
  fs::create_directories(samples_dir);
  for (const CellResult& cr : result.cells) {
    for (std::size_t i = 0; i < cr.runs.size(); ++i) {
      const fs::path p =
          samples_dir / (cr.cell.slug() + "_M" + std::to_string(cfg.m_list[i]) + ".csv");
      std::ofstream out(p, std::ios::binary);
      mc::write_samples_csv(out, cr.runs[i].samples);
      result.written_files.push_back(p.string());
    }
    if (!cr.transcript.empty()) {
      const fs::path p = samples_dir / (cr.cell.slug() + "_transcript.jsonl");
      std::ofstream out(p, std::ios::binary);
      sim::write_transcript(out, cr.transcript);
      result.written_files.push_back(p.string());
    }
  }
}

inline std::size_t smoke_truncate(std::size_t n) { return std::max<std::size_t>(1, (n + 99) / 100); }

// Fixed datasets x protocols x M.
inline ExperimentResult cmd_type1(const ExperimentConfig& cfg) {
  ExperimentResult result;
  result.table.title = "Experiment Type I - Runtimes in Milliseconds";
  std::vector<Cell> cells;
  for (const DatasetRef& ref : cfg.datasets) {
    data::Dataset ds = data::load_csv(ref.path, ref.column);
    if (cfg.smoke) ds.values.resize(smoke_truncate(ds.values.size()));
    const std::string label = ref.name + " (" + std::to_string(ds.size()) + " instances)";
    for (const mean::Protocol p : cfg.protocols) {
      cells.push_back({label, ds.size(), p, ds, cell_seed(cfg.seed, label, ds.size())});
    }
  }
  result.cells = run_cells(cfg, cells);
  collect_rows(result, cfg);
  return result;
}

// Distributions x sizes x protocols x M, plus t_cli ~ size fits per protocol.
inline ExperimentResult cmd_type2(const ExperimentConfig& cfg) {
  ExperimentResult result;
  result.table.title = "Experiment Type II - Runtimes in Milliseconds";
  std::vector<Cell> cells;
  for (const data::DistSpec& base : cfg.distributions) {
    for (const std::size_t size : cfg.sizes) {
      data::DistSpec spec = base;
      spec.size = size;
      const std::string label = base.label();
      for (const mean::Protocol p : cfg.protocols) {
        cells.push_back({label, size, p, spec, cell_seed(cfg.seed, label, size)});
      }
    }
  }
  result.cells = run_cells(cfg, cells);
  collect_rows(result, cfg);

  for (const mean::Protocol p : cfg.protocols) {
    std::vector<stats::SizedSamples> groups;
    for (const CellResult& cr : result.cells) {
      if (cr.error || cr.cell.protocol != p || cr.runs.empty()) continue;
      groups.push_back({cr.cell.size, cr.runs.back().client_times()});
    }
    try {
      result.table.regressions.push_back({mean::protocol_name(p), cfg.pooled_regression,
                                          stats::fit_runtime_vs_size(groups, cfg.pooled_regression)});
    } catch (const Error& e) {
      // Too few distinct sizes or points; the table is still reported.
      if (cfg.verbose) result.failed_cells.push_back(std::string("regression ") +
                                                     mean::protocol_name(p) + ": " + e.what());
    }
  }
  return result;
}

struct AdhocResult {
  mc::McRun run;
  mpz_class value;
  std::string dataset;
  std::size_t size = 0;
};

// Single (protocol, dataset) estimate at the first M.
inline AdhocResult cmd_adhoc(const ExperimentConfig& cfg) {
  std::variant<data::Dataset, data::DistSpec> source;
  std::string label;
  std::size_t size = 0;
  if (!cfg.values.empty()) {
    source = data::Dataset{cfg.values, "values"};
    label = "values";
    size = cfg.values.size();
  } else if (!cfg.distributions.empty() && !cfg.sizes.empty()) {
    data::DistSpec spec = cfg.distributions.front();
    spec.size = cfg.sizes.front();
    label = spec.label();
    size = spec.size;
    source = spec;
  } else {
    data::Dataset ds = data::load_csv(cfg.datasets.front().path, cfg.datasets.front().column);
    label = cfg.datasets.front().name;
    size = ds.size();
    source = std::move(ds);
  }
  sim::FakeClock fake(1000);
  mc::RunnerSpec spec;
  spec.protocol = protocol_config(cfg, cfg.protocols.front());
  spec.source = std::move(source);
  spec.master_seed = cell_seed(cfg.seed, label, size);
  spec.scheduling = cfg.scheduling;
  spec.clock = cfg.clock == ClockKind::kFake ? &fake : nullptr;
  if (spec.protocol.protocol == mean::Protocol::kHe) {
    Rng key_rng(mc::key_seed(cfg.seed));
    spec.keys = std::make_shared<const paillier::Keypair>(paillier::keygen(cfg.key_bits, key_rng));
  }
  mc::ProtocolRunner runner(std::move(spec));
  AdhocResult out;
  out.run = mc::estimate(runner, cfg.m_list.front());
  out.value = runner.last_value();
  out.dataset = label;
  out.size = size;
  return out;
}

}  // namespace ppbench::experiment
