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

#include <doctest.h>

#include <cstdio>
#include <filesystem>
#include <fstream>
#include <string>
#include <vector>

#include "qss/errors.hpp"
#include "qss/harness.hpp"

using namespace qss;
using namespace qss::harness;
using nlohmann::json;

namespace {

std::string temp_path(const std::string& name) {
  return (std::filesystem::temp_directory_path() / ("qss_test_" + name)).string();
}

void write_file(const std::string& path, const std::string& text) { std::ofstream(path) << text; }

int cli(std::vector<std::string> args) {
  args.insert(args.begin(), "qss");
  std::vector<char*> argv;
  for (auto& a : args) argv.push_back(a.data());
  return cli_main(static_cast<int>(argv.size()), argv.data());
}

}  // namespace

TEST_CASE("config parsing") {
  const json j = json::parse(R"({
    "protocol": "mqssp_n", "n_agents": 4, "n_pairs": 300, "decoy_count": 6, "seed": 42,
    "withheld_agents": [2],
    "channels": {
      "default": {"loss_prob": 0.01},
      "sc_hops": {"2": {"adversary": {"kind": "intercept_resend", "basis": "x"}}},
      "sc_final": {"adversary": {"kind": "fake_bell_signal"}, "trojan_leak": true}
    }
  })");
  const ProtocolConfig c = config_from_json(j);
  CHECK(c.protocol == ProtocolKind::MqsspN);
  CHECK(c.n_agents == 4);
  CHECK(c.j == 6u);
  CHECK(c.seed == 42u);
  CHECK(c.withheld_agents == std::vector<std::size_t>{2});
  CHECK(c.channels.sa_first.loss_prob == 0.01);
  CHECK(c.channels.sc_hops.size() == 2);
  CHECK(c.channels.sc_hops[0].loss_prob == 0.01);
  CHECK(std::holds_alternative<channel::InterceptResend>(c.channels.sc_hops[1].adversary));
  CHECK(c.channels.sc_hops[1].loss_prob == 0.01);
  CHECK(std::holds_alternative<channel::FakeBellSignal>(c.channels.sc_final.adversary));
  CHECK(c.channels.sc_final.trojan_leak);

  // Round trip.
  const ProtocolConfig back = config_from_json(config_to_json(c));
  CHECK(config_to_json(back) == config_to_json(c));
}

TEST_CASE("config errors") {
  auto bad = [](const char* text) { return config_from_json(json::parse(text)); };
  CHECK_THROWS_AS(bad(R"({"protocol": "bb84"})"), ConfigError);
  CHECK_THROWS_AS(bad(R"({"n_pairs": -3})"), ConfigError);
  CHECK_THROWS_AS(bad(R"({"n_pairs": "ten"})"), ConfigError);
  CHECK_THROWS_AS(bad(R"({"threshold": 1.0})"), ConfigError);
  CHECK_THROWS_AS(bad(R"({"typo": 1})"), ConfigError);
  CHECK_THROWS_AS(bad(R"({"j": 1, "decoy_count": 1})"), ConfigError);
  CHECK_THROWS_AS(bad(R"({"n_pairs": 10, "first_check": 20})"), ConfigError);
  CHECK_THROWS_AS(bad(R"({"payload": "01a"})"), ConfigError);
  CHECK_THROWS_AS(bad(R"({"withheld_agents": [2]})"), ConfigError);
  CHECK_THROWS_AS(bad(R"({"channels": {"sa_first": {"loss_prob": 2}}})"), ConfigError);
  CHECK_THROWS_AS(bad(R"({"channels": {"sc_hops": {"1": {}}}})"), ConfigError);
  CHECK_THROWS_AS(bad(R"({"channels": {"sa_first": {"adversary": {"kind": "pns"}}}})"),
                  ConfigError);
  CHECK_THROWS_AS(bad(R"({"protocol": "mqsts", "m": 6})"), ConfigError);
  CHECK_THROWS_AS(load_config(temp_path("does_not_exist.json")), ConfigError);
}

TEST_CASE("check_fraction is split over the stages") {
  ProtocolConfig c;
  c.n_pairs = 1000;
  c.check_fraction = 0.1;
  auto counts = resolve_counts(c);
  CHECK(counts.total(c.protocol, c.n_agents) == 100);
  c.protocol = ProtocolKind::MqsspN;
  c.n_agents = 4;
  counts = resolve_counts(c);
  CHECK(counts.total(c.protocol, c.n_agents) == 100);
  c.k = 7;
  CHECK(resolve_counts(c).k == 7);
}

TEST_CASE("efficiency figures are integer ratios") {
  ProtocolConfig c;
  c.n_pairs = 1000;
  c.check_fraction = 0.1;
  const RunResult r = run_once(c);
  const auto e = compute_efficiency(r.outcome);
  const auto& k = r.outcome.counts;
  CHECK(k.q_t == 2000);
  CHECK(k.q_u == 1800);
  CHECK(k.b_m == 1800);
  CHECK(k.b_t == 1);
  CHECK(e.eta_q == double(k.q_u) / double(k.q_t));
  CHECK(e.eta_t == double(k.b_m) / double(k.q_t + k.b_t));
  CHECK(e.eta_t_strict < e.eta_t);

  ProtocolConfig attacked = c;
  attacked.channels.sa_first.adversary = channel::InterceptResend{};
  const RunResult a = run_once(attacked);
  CHECK_THROWS_AS(compute_efficiency(a.outcome), EfficiencyUndefinedError);

  ProtocolConfig all_checks = c;
  all_checks.n_pairs = 20;
  all_checks.check_fraction = 1.0;
  const RunResult z = run_once(all_checks);
  REQUIRE(z.outcome.verdict.completed);
  CHECK(compute_efficiency(z.outcome).eta_q == 0.0);
}

TEST_CASE("campaigns are deterministic and independent of execution mode") {
  ProtocolConfig c;
  c.n_pairs = 200;
  c.channels.sa_final.depolarize_prob = 0.02;
  c.threshold = 0.3;
  std::vector<TrialSummary> serial_trials;
  std::vector<TrialSummary> parallel_trials;
  const auto s = run_campaign(c, 24, Execution::Serial, &serial_trials);
  const auto p = run_campaign(c, 24, Execution::Parallel, &parallel_trials);
  CHECK(campaign_to_json(s).dump() == campaign_to_json(p).dump());
  for (std::size_t i = 0; i < 24; ++i) {
    CHECK(serial_trials[i].seed == c.seed + i);
    CHECK(serial_trials[i].error_rate == parallel_trials[i].error_rate);
  }
  CHECK(campaign_to_json(run_campaign(c, 24)).dump() == campaign_to_json(p).dump());
  CHECK_THROWS_AS(run_campaign(c, 0), ConfigError);

  ProtocolConfig clean;
  clean.n_pairs = 100;
  const auto stats = run_campaign(clean, 100);
  CHECK(stats.abort_rate == 0.0);
  CHECK(stats.recovery_rate == 1.0);
}

TEST_CASE("sweeps") {
  ProtocolConfig c;
  c.n_pairs = 200;
  const auto rows = sweep(c, "check_fraction", {"0.05", "0.2"}, 3);
  REQUIRE(rows.size() == 2);
  CHECK(*rows[0].stats.eta_q > *rows[1].stats.eta_q);
  const std::string csv = sweep_csv(rows);
  CHECK(csv.rfind("param,abort_rate,mean_error,recovery_rate,mean_fidelity,eta_q,eta_t\n", 0) == 0);
  CHECK(std::count(csv.begin(), csv.end(), '\n') == 3);
  const auto lossy = sweep(c, "channels.default.loss_prob", {"0", "0.2"}, 2);
  CHECK(*lossy[1].stats.eta_q < *lossy[0].stats.eta_q);
  CHECK_THROWS_AS(sweep(c, "no_such_key", {"1"}, 1), ConfigError);
}

TEST_CASE("replay reproduces the recovered message") {
  ProtocolConfig c;
  c.protocol = ProtocolKind::MqsspN;
  c.n_agents = 3;
  c.n_pairs = 150;
  const RunResult r = run_once(c);
  const Transcript copy = Transcript::from_json(json::parse(r.transcript.to_json().dump()));
  const ReplayResult rep = replay(copy);
  CHECK(rep.applicable);
  CHECK(rep.matches);
  CHECK(rep.recovered == *r.outcome.recovered);

  // Tampering with a disclosed operation breaks the match.
  json j = r.transcript.to_json();
  for (auto& e : j.at("events")) {
    if (e.at("action") == "disclose_ops" && e.at("traffic") == "cooperation") {
      auto& op = e.at("detail").at("ops").at(0);
      op = op == "U0" ? "U1" : "U0";
      break;
    }
  }
  CHECK_FALSE(replay(Transcript::from_json(j)).matches);
}

TEST_CASE("command line") {
  const std::string clean = temp_path("clean.json");
  const std::string attack = temp_path("attack.json");
  const std::string broken = temp_path("broken.json");
  const std::string report = temp_path("report.json");
  const std::string transcript = temp_path("transcript.json");
  const std::string table = temp_path("sweep.csv");
  write_file(clean, R"({"protocol": "mqssp3", "n_pairs": 200})");
  write_file(attack, R"({"protocol": "mqssp3", "n_pairs": 200,
      "channels": {"sa_first": {"adversary": {"kind": "intercept_resend"}}}})");
  write_file(broken, R"({"protocol": "mqssp3", "n_pairs": )");

  CHECK(cli({"run", "--config", clean, "--out", report, "--transcript-out", transcript}) == 0);
  const json rep = json::parse(std::ifstream(report));
  CHECK(rep.at("summary").at("recovery_rate") == 1.0);
  CHECK(rep.at("first_run").at("verdict").at("completed") == true);
  CHECK(cli({"replay", "--transcript", transcript}) == 0);

  CHECK(cli({"run", "--config", attack, "--out", report}) == 1);
  const json rep2 = json::parse(std::ifstream(report));
  CHECK(rep2.at("first_run").at("verdict").at("stage") == "first_check");

  CHECK(cli({"run", "--config", broken}) == 2);
  CHECK(cli({"run", "--config", temp_path("missing.json")}) == 2);
  CHECK(cli({"run"}) == 2);
  CHECK(cli({"frobnicate"}) == 2);
  CHECK(cli({"run", "--config", clean, "--format", "xml"}) == 2);

  CHECK(cli({"sweep", "--config", clean, "--param", "threshold", "--values", "0.05,0.1",
             "--trials", "2", "--out", table}) == 0);
  std::ifstream in(table);
  std::string header;
  std::getline(in, header);
  CHECK(header == "param,abort_rate,mean_error,recovery_rate,mean_fidelity,eta_q,eta_t");
  CHECK(cli({"run", "--config", clean, "--trials", "3", "--seed", "9", "--format", "csv",
             "--out", table}) == 0);
}
