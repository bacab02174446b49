// Copyright 2026 The qss Authors
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//      http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

#include <CLI11.hpp>

#include <fstream>
#include <iostream>
#include <sstream>

#include "qss/errors.hpp"
#include "qss/harness.hpp"
#include "qss/mqsts.hpp"

namespace qss::harness {

namespace {

constexpr int kExitOk = 0;
constexpr int kExitAbort = 1;
constexpr int kExitConfig = 2;

void emit(const std::string& text, const std::string& path) {
  if (path.empty()) {
    std::cout << text;
    return;
  }
  std::ofstream out(path);
  if (!out) throw ConfigError("cannot write '" + path + "'");
  out << text;
}

std::vector<std::string> split_values(const std::string& list) {
  std::vector<std::string> out;
  std::stringstream ss(list);
  std::string item;
  while (std::getline(ss, item, ',')) {
    if (!item.empty()) out.push_back(item);
  }
  return out;
}

int verify_table_command() {
  int failures = 0;
  for (const auto& c : mqsts::verify_table()) {
    std::cout << to_string(c.row.first) << ' ' << to_string(c.row.second) << "  correction "
              << to_string(c.row.correction.first) << to_string(c.row.correction.second)
              << "  deviation " << c.max_deviation << "  fidelity " << c.corrected_fidelity
              << "  " << (c.pass ? "PASS" : "FAIL") << '\n';
    failures += c.pass ? 0 : 1;
  }
  return failures == 0 ? kExitOk : kExitAbort;
}

}  // namespace

int cli_main(int argc, char** argv) {
  CLI::App app{"Simulator for multiparty quantum secret splitting and state sharing"};
  app.require_subcommand(1);

  std::string config_path;
  std::optional<std::uint64_t> seed;
  std::size_t trials = 1;
  std::string out_path;
  std::string format = "json";
  std::string transcript_path;
  std::string transcript_out;
  std::string param;
  std::string values;

  auto* run = app.add_subcommand("run", "execute a configuration and write a report");
  run->add_option("--config", config_path, "run configuration (JSON)")->required();
  run->add_option("--seed", seed, "override the configured seed");
  run->add_option("--trials", trials, "independent trials, seeded seed, seed+1, ...")
      ->check(CLI::PositiveNumber);
  run->add_option("--out", out_path, "write the report here instead of stdout");
  run->add_option("--format", format, "json or csv")->check(CLI::IsMember({"json", "csv"}));
  run->add_option("--transcript-out", transcript_out, "write the first trial's transcript");

  auto* table = app.add_subcommand("verify-table", "check the 16 two-qubit teleportation rows");

  auto* rep = app.add_subcommand("replay", "recompute a run's message from its transcript");
  rep->add_option("--transcript", transcript_path, "transcript JSON")->required();

  auto* sw = app.add_subcommand("sweep", "vary one parameter and tabulate campaign statistics");
  sw->add_option("--config", config_path, "base configuration (JSON)")->required();
  sw->add_option("--param", param, "dotted config key, e.g. channels.default.loss_prob")
      ->required();
  sw->add_option("--values", values, "comma-separated values")->required();
  sw->add_option("--seed", seed, "override the configured seed");
  sw->add_option("--trials", trials, "trials per value")->check(CLI::PositiveNumber);
  sw->add_option("--out", out_path, "write the table here instead of stdout");
  sw->add_option("--format", format, "csv or json")->check(CLI::IsMember({"json", "csv"}));
  sw->callback([&format, sw]() {
    if (sw->count("--format") == 0) format = "csv";
  });

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? kExitOk : kExitConfig;
  }

  try {
    if (table->parsed()) return verify_table_command();

    if (rep->parsed()) {
      std::ifstream in(transcript_path);
      if (!in) throw ConfigError("cannot open transcript '" + transcript_path + "'");
      nlohmann::json j;
      try {
        in >> j;
      } catch (const nlohmann::json::parse_error& e) {
        throw ConfigError(std::string("transcript is not valid JSON: ") + e.what());
      }
      const ReplayResult r = replay(Transcript::from_json(j));
      if (!r.applicable) {
        std::cout << "nothing to replay: the run did not reach decoding\n";
        return kExitAbort;
      }
      std::cout << "recovered " << r.recovered.size() << " bits; "
                << (r.matches ? "MATCH" : "MISMATCH") << '\n';
      return r.matches ? kExitOk : kExitAbort;
    }

    ProtocolConfig config = load_config(config_path);
    if (seed) config.seed = *seed;

    if (sw->parsed()) {
      const auto rows = sweep(config, param, split_values(values), trials);
      if (format == "csv") {
        emit(sweep_csv(rows), out_path);
      } else {
        nlohmann::json j = nlohmann::json::array();
        for (const auto& r : rows) {
          j.push_back({{"param", r.value}, {"summary", campaign_to_json(r.stats)}});
        }
        emit(j.dump(2) + "\n", out_path);
      }
      return kExitOk;
    }

    RunResult first = run_once(config);
    const CampaignStats stats =
        trials == 1 ? fold({summarize(first.outcome)}) : run_campaign(config, trials);
    if (!transcript_out.empty()) emit(first.transcript.to_json().dump(2) + "\n", transcript_out);
    if (format == "csv") {
      emit(sweep_csv({{"run", stats}}), out_path);
    } else {
      emit(make_report(config, stats, first.outcome).dump(2) + "\n", out_path);
    }
    if (stats.aborts > 0) {
      std::cerr << "aborted: " << stats.aborts << " of " << stats.trials << " trial(s)";
      for (const auto& [stage, n] : stats.abort_stages) std::cerr << "; " << stage << " x" << n;
      std::cerr << '\n';
      return kExitAbort;
    }
    return kExitOk;
  } catch (const ConfigError& e) {
    std::cerr << "config error: " << e.what() << '\n';
    return kExitConfig;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << '\n';
    return kExitConfig;
  }
}

}  // namespace qss::harness
