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

#include <array>
#include <cmath>
#include <set>

#include "oracle.hpp"
#include "qss/errors.hpp"
#include "qss/mqssp.hpp"

using namespace qss;
using namespace qss::mqssp;

namespace {

ProtocolConfig small(std::size_t n_agents, std::size_t n_pairs = 120) {
  ProtocolConfig c;
  c.protocol = n_agents == 2 ? ProtocolKind::Mqssp3 : ProtocolKind::MqsspN;
  c.n_agents = n_agents;
  c.n_pairs = n_pairs;
  return c;
}

std::pair<RunOutcome, Transcript> run(const ProtocolConfig& c, std::uint64_t seed = 1,
                                      SessionHooks hooks = {}) {
  RandomSource rng(seed);
  return c.n_agents == 2 ? run_three_party(c, rng, std::move(hooks))
                         : run_n_party(c, rng, std::move(hooks));
}

}  // namespace

TEST_CASE("party names") {
  CHECK(party_name(0, 2) == "Alice");
  CHECK(party_name(1, 2) == "Bob");
  CHECK(party_name(2, 2) == "Charlie");
  CHECK(party_name(3, 3) == "Zach");
  CHECK(party_name(2, 3) == "Charlie");
  CHECK(party_name(9, 12) == "Agent9");
  CHECK(PartyId::agent(2, 4).name == "Charlie");
  CHECK_THROWS_AS(PartyId::agent(5, 4), ArgumentError);
}

TEST_CASE("decoding inverts the encoding for every op combination") {
  for (auto alice : kAllPauliOps) {
    for (auto agents : kAllPauliOps) {
      // The receiver's Bell outcome after both ops act on a singlet.
      oracle::Vec v = oracle::bell(3);
      v = oracle::apply(oracle::kron(oracle::pauli(int(alice)), oracle::identity(2)), v);
      v = oracle::apply(oracle::kron(oracle::identity(2), oracle::pauli(int(agents))), v);
      int kind = -1;
      for (int k = 0; k < 4; ++k) {
        if (oracle::fidelity(v, oracle::bell(k)) > 1 - 1e-12) kind = k;
      }
      REQUIRE(kind >= 0);
      CHECK(decode_block(static_cast<BellKind>(kind), agents) == frame::code_of(alice));
    }
  }
}

TEST_CASE("clean runs recover the message for 2 to 5 agents") {
  for (std::size_t n : {2U, 3U, 4U, 5U}) {
    CAPTURE(n);
    auto [o, t] = run(small(n), 10 + n);
    CHECK(o.verdict.completed);
    CHECK(o.recovered_matches());
    CHECK(o.decoding_complete);
    CHECK(o.erased_blocks == 0);
    CHECK(o.delivered.size() == o.payload.size());
    CHECK(o.counts.q_t == 2 * 120);
    CHECK(o.counts.q_u == o.delivered.size());
    for (const auto& s : o.stages) CHECK(s.errors == 0);
    // Every hop is checked.
    for (std::size_t a = 2; a < n; ++a) CHECK(o.stage("hop_check:" + std::to_string(a)));
    CHECK(o.stage("first_check"));
    CHECK(o.stage("second_check"));
    CHECK(o.stage("decoy_check"));
    CHECK(o.stage("final_check"));
    for (const auto& e : t.events()) {
      if (e.traffic == Traffic::Private) CHECK(e.bits.empty());
    }
  }
}

TEST_CASE("literal payloads and the capacity limit") {
  auto c = small(2, 60);
  c.payload = "0110110001";
  auto [o, t] = run(c);
  CHECK(o.recovered_matches());
  CHECK(*o.recovered == "0110110001");

  c.payload = "random:400";  // more than the pairs can carry
  CHECK_THROWS_AS(validate(c), ConfigError);

  // Fits on paper, but losses on the way leave too few pairs.
  c.payload = "random:" + std::to_string(2 * (60 - resolve_counts(c).total(c.protocol, 2)));
  CHECK_NOTHROW(validate(c));
  c.channels.sc_final.loss_prob = 0.3;
  auto [o2, t2] = run(c);
  CHECK_FALSE(o2.verdict.completed);
  CHECK(o2.verdict.stage == "capacity");
  CHECK_FALSE(o2.detected());
}

TEST_CASE("steps run only in order") {
  auto c = small(2, 40);
  RandomSource rng(3);
  Session s(c, rng);
  CHECK_THROWS_AS(s.encode("00"), ProtocolOrderError);
  CHECK_THROWS_AS(s.send_sa(), ProtocolOrderError);
  s.prepare_pairs();
  CHECK_THROWS_AS(s.relay_sc(), ProtocolOrderError);
  s.send_sa();
  CHECK(s.run_first_check());
  CHECK_THROWS_AS(s.encode("00"), ProtocolOrderError);
  CHECK(s.relay_sc());
  CHECK(s.run_second_check());
  CHECK_THROWS_AS(s.encode("00"), ProtocolOrderError);
  CHECK(s.send_sc_with_decoys());
  CHECK_THROWS_AS(s.encode("001"), ArgumentError);
  CHECK(s.encode("0011"));
  CHECK_THROWS_AS(s.decode(), ProtocolOrderError);
  s.send_sa_final();
  s.bell_measure_all();
  CHECK(s.run_final_check());
  s.decode();
  CHECK(s.phase() == Session::Phase::Decoded);
  const RunOutcome o = s.finish();
  CHECK(*o.recovered == "0011");
}

TEST_CASE("usable pairs sit with the sender and the last agent only") {
  auto c = small(4, 80);
  RandomSource rng(4);
  Session s(c, rng);
  REQUIRE(s.distribute());
  const auto usable = s.usable_pairs();
  CHECK_FALSE(usable.empty());
  for (const auto& p : s.pairs()) {
    if (p.status != PairStatus::Held) continue;
    CHECK(p.a_holder == 0);
    CHECK(p.c_holder == 4);
    // Each intermediate agent and agent 1 applied exactly one op.
    for (std::size_t a = 1; a <= 3; ++a) CHECK(s.pairs().op_by(p.index, a).has_value());
    CHECK_FALSE(s.pairs().op_by(p.index, 4).has_value());
  }
}

TEST_CASE("check functions") {
  PairRegister pairs(10, 16);
  RandomSource rng(6);
  CHECK_THROWS_AS(first_check(pairs, {}, rng), StatisticsError);
  CHECK_THROWS_AS(CheckResult{}.error_rate(), StatisticsError);

  const std::vector<std::size_t> sample = {0, 1, 2, 3};
  const auto r = first_check(pairs, sample, rng);
  CHECK(r.errors == 0);
  CHECK(r.error_rate() == 0.0);
  for (auto i : sample) CHECK(pairs[i].status == PairStatus::Sample);

  pairs.apply(4, 1, PauliOp::U2);
  pairs.apply(5, 1, PauliOp::U3);
  const std::vector<std::size_t> more = {4, 5};
  std::map<std::size_t, PauliOp> disclosed = {{4, PauliOp::U2}};
  CHECK_THROWS_AS(correlation_check(pairs, more, disclosed, rng), ProtocolOrderError);
  CHECK(pairs[5].status == PairStatus::Held);  // nothing measured on failure
  disclosed[5] = PauliOp::U3;
  CHECK(correlation_check(pairs, more, disclosed, rng).errors == 0);

  // A wrong disclosure is caught in one basis or the other.
  std::size_t errors = 0;
  for (int i = 0; i < 40; ++i) {
    PairRegister fresh(1, 16);
    fresh.apply(0, 1, PauliOp::U1);
    const std::vector<std::size_t> one = {0};
    errors += correlation_check(fresh, one, {{0, PauliOp::U0}}, rng).errors;
  }
  CHECK(errors > 5);
  CHECK(errors < 35);

  const std::vector<std::size_t> single = {6, 7};
  const std::vector<std::size_t> none;
  auto second = second_check(pairs, none, single,
                             {{6, PauliOp::U0}, {7, PauliOp::U0}}, rng);
  REQUIRE(second.decoys.size() == 2);
  second.decoys[0].position = 0;
  second.decoys[1].position = 3;
  const std::vector<std::size_t> payload_positions = {1, 2};
  CHECK(decoy_check(pairs, second.decoys, payload_positions, rng).errors == 0);
  const std::vector<std::size_t> clash = {3};
  CHECK_THROWS_AS(decoy_check(pairs, second.decoys, clash, rng), std::logic_error);
}

TEST_CASE("a withheld agent leaves the message unrecoverable") {
  for (std::size_t n : {2U, 4U}) {
    auto c = small(n, 400);
    c.withheld_agents = {1};
    std::array<int, 4> diff{};
    std::size_t blocks = 0;
    for (std::uint64_t seed = 0; seed < 6; ++seed) {
      auto [o, t] = run(c, seed);
      REQUIRE(o.verdict.completed);
      CHECK_FALSE(o.decoding_complete);
      for (std::size_t b = 0; 2 * b < o.delivered.size(); ++b) {
        const unsigned x = unsigned((o.delivered[2 * b] - '0') << 1 | (o.delivered[2 * b + 1] - '0'));
        const unsigned y = unsigned(((*o.recovered)[2 * b] - '0') << 1 | ((*o.recovered)[2 * b + 1] - '0'));
        ++diff[x ^ y];
        ++blocks;
      }
    }
    double chi2 = 0;
    for (int d : diff) chi2 += (d - blocks / 4.0) * (d - blocks / 4.0) / (blocks / 4.0);
    CHECK(chi2 < oracle::chi2_crit_01(3));
  }
}

TEST_CASE("losses erase blocks but never corrupt them") {
  auto c = small(3, 300);
  c.channels.sa_first.loss_prob = 0.1;
  c.channels.sc_final.loss_prob = 0.1;
  c.channels.sa_final.loss_prob = 0.1;
  c.channels.at({LegKind::ScHop, 1}).loss_prob = 0.1;
  auto [o, t] = run(c, 8);
  REQUIRE(o.verdict.completed);
  CHECK(o.erased_blocks > 0);
  CHECK(o.recovered_matches());
  CHECK(o.delivered.size() + 2 * o.erased_blocks <= o.payload.size());
  CHECK(o.counts.b_t > 1);  // loss announcements are protocol traffic
}

TEST_CASE("intercept-resend on any leg is caught") {
  const std::array<LegId, 5> legs = {LegId{LegKind::SaFirst}, LegId{LegKind::ScHop, 1},
                                     LegId{LegKind::ScReturn}, LegId{LegKind::ScFinal},
                                     LegId{LegKind::SaFinal}};
  for (const auto& leg : legs) {
    CAPTURE(leg.name());
    auto c = small(3, 400);
    c.check_fraction = 0.4;
    c.channels.at(leg).adversary = channel::InterceptResend{};
    auto [o, t] = run(c, 12);
    CHECK(o.detected());
  }
}

TEST_CASE("fake-signal substitution on a hop is caught by the hop check") {
  auto c = small(4, 200);
  c.hop_check = 10;
  c.hadamard_samples = 10;
  c.channels.at({LegKind::ScHop, 2}).adversary = channel::FakeBellSignal{};
  auto [o, t] = run(c, 13);
  CHECK(o.detected());
  CHECK(o.verdict.stage == "hop_check:3");
}

TEST_CASE("unchecked fake-signal attacks learn the agents' ops undetected") {
  auto c = small(2, 60);
  c.k = 2;
  c.j = 0;
  c.channels.sc_final.adversary = channel::FakeBellSignal{};
  auto [o, t] = run(c, 14);
  CHECK(o.verdict.completed);
  CHECK(o.recovered_matches());
  REQUIRE_FALSE(o.insights.empty());
  for (const auto& i : o.insights) CHECK(i.learned == i.actual);
}

TEST_CASE("the trojan-horse flag leaks the receiving party's operations") {
  auto c = small(3, 60);
  c.channels.at({LegKind::ScHop, 1}).trojan_leak = true;
  auto [o, t] = run(c, 15);
  std::size_t leaks = 0;
  for (const auto& e : o.tamper_log) {
    if (e.action != channel::TamperAction::TrojanLeak) continue;
    ++leaks;
    CHECK(e.leg == "sc_hop_1_2");
    CHECK(e.learned_op.has_value());
  }
  CHECK(leaks > 0);
  CHECK(o.recovered_matches());
}

TEST_CASE("hooks fix the operations") {
  auto c = small(2, 40);
  c.payload = "00";
  SessionHooks hooks;
  hooks.agent_op = [](std::size_t, std::size_t, RandomSource&) { return PauliOp::U2; };
  auto [o, t] = run(c, 16, hooks);
  CHECK(o.recovered_matches());
  for (const auto& e : t.events()) {
    if (e.action == "disclose_ops" && e.traffic == Traffic::Cooperation) {
      for (const auto& op : e.detail.at("ops")) CHECK(op.get<std::string>() == "U2");
    }
  }
}
