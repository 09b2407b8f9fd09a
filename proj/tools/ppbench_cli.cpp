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

#include <cstdio>
#include <exception>
#include <fstream>
#include <iostream>
#include <string>
#include <vector>

#include "CLI11.hpp"
#include "json.hpp"
#include "ppbench/ppbench.hpp"

namespace {

constexpr int kExitOk = 0;
constexpr int kExitValidation = 1;
constexpr int kExitRuntime = 2;

using ppbench::experiment::ExperimentConfig;

struct Flags {
  std::string config;
  std::string experiment;
  std::vector<std::string> protocols;
  std::vector<std::size_t> m_list;
  std::vector<std::size_t> sizes;
  std::vector<std::string> dists;
  std::vector<std::string> datasets;
  std::vector<std::uint64_t> values;
  std::size_t parties = 0;
  std::size_t key_bits = 0;
  std::string modulus;
  std::string mode;
  std::uint64_t seed = 0;
  std::string out;
  std::string format;
  std::string fit_on;
  std::string scheduling;
  std::string clock;
  std::string timestamp;
  bool smoke = false;
  bool parallel_cells = false;
  bool verbose = false;
};

// Folds command-line overrides into a JSON object shaped like the config file.
nlohmann::json overrides(const Flags& f, const CLI::App& app) {
  nlohmann::json j = nlohmann::json::object();
  auto given = [&](const char* name) { return app.count(name) > 0; };
  if (given("--experiment")) j["experiment"] = f.experiment;
  if (given("--protocol")) {
    std::vector<std::string> list;
    for (const std::string& p : f.protocols) {
      if (p == "both" || p == "all") {
        list.insert(list.end(), {"HE", "MPC"});
      } else {
        list.push_back(p);
      }
    }
    j["protocols"] = list;
  }
  if (given("--m")) j["m"] = f.m_list;
  if (given("--sizes")) j["sizes"] = f.sizes;
  if (given("--dist")) j["distributions"] = f.dists;
  if (given("--dataset")) {
    j["datasets"] = nlohmann::json::array();
    for (const std::string& d : f.datasets) {
      const auto ref = ppbench::experiment::parse_dataset(d);
      j["datasets"].push_back({{"name", ref.name}, {"path", ref.path}, {"column", ref.column}});
    }
  }
  if (given("--values")) j["values"] = f.values;
  if (given("--parties")) j["parties"] = f.parties;
  if (given("--key-bits")) j["key_bits"] = f.key_bits;
  if (given("--modulus")) j["modulus"] = f.modulus;
  if (given("--mode")) j["mode"] = f.mode;
  if (given("--seed")) j["seed"] = f.seed;
  if (given("--out")) j["out"] = f.out;
  if (given("--format")) j["format"] = f.format;
  if (given("--fit-on")) j["fit_on"] = f.fit_on;
  if (given("--scheduling")) j["scheduling"] = f.scheduling;
  if (given("--clock")) j["clock"] = f.clock;
  if (given("--timestamp")) j["timestamp"] = f.timestamp;
  if (f.smoke) j["smoke"] = true;
  if (f.parallel_cells) j["parallel_cells"] = true;
  if (f.verbose) j["verbose"] = true;
  return j;
}

void print_adhoc(const ppbench::experiment::AdhocResult& r, const ExperimentConfig& cfg) {
  using ppbench::stats::format_number;
  std::cout << "protocol: " << ppbench::mean::protocol_name(cfg.protocols.front()) << " ("
            << ppbench::mean::mode_name(cfg.mode) << ")\n"
            << "dataset: " << r.dataset << " (" << r.size << " values)\n"
            << "mean: " << r.value.get_str() << "\n"
            << "M: " << r.run.client.m << "\n"
            << "theta_cli_ms: " << format_number(r.run.client.theta_hat)
            << "  var: " << format_number(r.run.client.var_hat) << "\n"
            << "theta_srv_ms: " << format_number(r.run.server.theta_hat)
            << "  var: " << format_number(r.run.server.var_hat) << "\n";
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Monte Carlo runtime estimation for privacy-preserving mean protocols"};
  Flags f;
  app.add_option("--config", f.config, "JSON configuration file; flags override its keys")
      ->check(CLI::ExistingFile);
  app.add_option("--experiment", f.experiment, "type1 | type2 | adhoc")
      ->check(CLI::IsMember({"type1", "type2", "adhoc"}));
  app.add_option("--protocol", f.protocols, "HE, MPC or both (comma separated)")
      ->delimiter(',')
      ->check(CLI::IsMember({"HE", "MPC", "he", "mpc", "both", "all"}));
  app.add_option("--m", f.m_list, "Monte Carlo iteration counts, ascending")->delimiter(',');
  app.add_option("--sizes", f.sizes, "dataset sizes for the sweep")->delimiter(',');
  app.add_option("--dist", f.dists, "family:p1:p2[:scale], repeatable");
  app.add_option("--dataset", f.datasets, "[name=]path:column, repeatable");
  app.add_option("--values", f.values, "explicit dataset for adhoc runs")->delimiter(',');
  app.add_option("--parties", f.parties, "computing parties for MPC");
  app.add_option("--key-bits", f.key_bits, "Paillier modulus size in bits");
  app.add_option("--modulus", f.modulus, "share modulus q");
  app.add_option("--mode", f.mode, "paper_faithful | exact")
      ->check(CLI::IsMember({"paper_faithful", "exact"}));
  app.add_option("--seed", f.seed, "master seed");
  app.add_option("--out", f.out, "output directory for reports and raw samples");
  app.add_option("--format", f.format, "markdown | csv | json")
      ->check(CLI::IsMember({"markdown", "md", "csv", "json"}));
  app.add_option("--fit-on", f.fit_on, "regress on raw samples or on cell means")
      ->check(CLI::IsMember({"samples", "means"}));
  app.add_option("--scheduling", f.scheduling, "party scheduling: concurrent | sequential")
      ->check(CLI::IsMember({"concurrent", "sequential"}));
  app.add_option("--clock", f.clock, "steady | fake (deterministic timings)")
      ->check(CLI::IsMember({"steady", "fake"}));
  app.add_option("--timestamp", f.timestamp, "timestamp used in output file names");
  app.add_flag("--smoke", f.smoke, "scale M and sizes down 100x");
  app.add_flag("--parallel-cells", f.parallel_cells, "run grid cells concurrently");
  app.add_flag("--verbose", f.verbose, "write MPC message transcripts");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    if (e.get_exit_code() == 0) return app.exit(e);  // --help
    std::cerr << "error: " << e.what() << "\n\n" << app.help();
    return kExitValidation;
  }

  ExperimentConfig cfg;
  try {
    nlohmann::json file_json = nlohmann::json::object();
    if (!f.config.empty()) {
      std::ifstream in(f.config);
      file_json = nlohmann::json::parse(in);
      ppbench::experiment::apply_json(cfg, file_json);
    }
    const nlohmann::json flag_json = overrides(f, app);
    ppbench::experiment::apply_json(cfg, flag_json);
    auto chosen = [&](const char* key) { return file_json.contains(key) || flag_json.contains(key); };
    // Ad hoc runs report a mean, so they default to one protocol and the
    // exact floor mean rather than the benchmark settings.
    if (cfg.experiment == ppbench::experiment::Kind::kAdhoc) {
      if (!chosen("protocols") && cfg.protocols.size() > 1) {
        cfg.protocols = {ppbench::mean::Protocol::kMpc};
      }
      if (!chosen("mode")) cfg.mode = ppbench::mean::Mode::kExact;
    }
    if (cfg.experiment == ppbench::experiment::Kind::kAdhoc && !cfg.values.empty() &&
        (app.count("--dist") > 0 || app.count("--dataset") > 0)) {
      throw ppbench::ParameterError("--values cannot be combined with --dist or --dataset");
    }
    if (cfg.smoke) ppbench::experiment::apply_smoke(cfg);
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n\n" << app.help();
    return kExitValidation;
  }

  const auto problems = ppbench::experiment::validate(cfg);
  if (!problems.empty()) {
    for (const std::string& p : problems) std::cerr << "error: " << p << "\n";
    std::cerr << "\n" << app.help();
    return kExitValidation;
  }

  try {
    using ppbench::experiment::Kind;
    if (cfg.experiment == Kind::kAdhoc) {
      print_adhoc(ppbench::experiment::cmd_adhoc(cfg), cfg);
      return kExitOk;
    }
    auto result = cfg.experiment == Kind::kType1 ? ppbench::experiment::cmd_type1(cfg)
                                                 : ppbench::experiment::cmd_type2(cfg);
    ppbench::experiment::write_outputs(result, cfg);
    std::cout << ppbench::stats::render(result.table, cfg.format);
    for (const std::string& path : result.written_files) std::cerr << "wrote " << path << "\n";
    if (!result.ok()) {
      for (const std::string& cell : result.failed_cells) std::cerr << "failed: " << cell << "\n";
      return kExitRuntime;
    }
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kExitRuntime;
  }
  return kExitOk;
}
