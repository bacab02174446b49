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

#include "oracle.hpp"
#include "qss/errors.hpp"
#include "qss/mqsts.hpp"

using namespace qss;
using namespace qss::mqsts;

namespace {

oracle::Vec to_vec(const StateVector& s) { return {s.amplitudes().begin(), s.amplitudes().end()}; }

std::vector<std::optional<PauliOp>> all_disclosed(const std::vector<PauliOp>& ops) {
  return {ops.begin(), ops.end()};
}

}  // namespace

TEST_CASE("the reference rows agree with a brute-force teleportation oracle") {
  const oracle::Vec input = oracle::normalize({{0.3, 0.1}, {-0.2, 0.5}, {0.4, -0.35}, {0.15, 0.55}});
  for (const auto& row : reference_table()) {
    const auto pre = oracle::teleport(input, {0, 0}, {int(row.first), int(row.second)});
    oracle::Vec printed(4);
    for (std::size_t i = 0; i < 4; ++i) printed[row.terms[i].ket] = double(row.terms[i].sign) * input[i];
    CHECK(oracle::fidelity(pre, printed) == doctest::Approx(1.0).epsilon(1e-12));
    const auto corr = oracle::kron(oracle::pauli(int(row.correction.first)),
                                   oracle::pauli(int(row.correction.second)));
    CHECK(oracle::fidelity(oracle::apply(corr, pre), input) == doctest::Approx(1.0).epsilon(1e-12));
  }
}

TEST_CASE("verify_table passes every row") {
  const auto checks = verify_table();
  REQUIRE(checks.size() == 16);
  for (const auto& c : checks) {
    CHECK(c.pass);
    CHECK(c.max_deviation < 1e-9);
  }
}

TEST_CASE("teleport_share reproduces the oracle's pre-correction state") {
  RandomSource rng(2);
  const StateVector x = random_state(2, rng);
  for (int o1 = 0; o1 < 4; ++o1) {
    for (int o2 = 0; o2 < 4; ++o2) {
      const std::array<BellKind, 2> forced = {BellKind(o1), BellKind(o2)};
      const SharePlan plan{2, {0, 1}, {PauliOp::U3, PauliOp::U1}};
      const auto r = teleport_share(x, plan, rng, std::span<const BellKind>(forced));
      const auto expected = oracle::teleport(to_vec(x), {3, 1}, {o1, o2});
      CHECK(oracle::fidelity(to_vec(receiver_state(r)), expected) ==
            doctest::Approx(1.0).epsilon(1e-12));
    }
  }
}

TEST_CASE("exhaustive reconstruction at m = 2") {
  RandomSource rng(3);
  const StateVector x = random_state(2, rng);
  int cases = 0;
  for (int o = 0; o < 16; ++o) {
    for (int b = 0; b < 16; ++b) {
      const std::array<BellKind, 2> forced = {BellKind(o / 4), BellKind(o % 4)};
      const std::vector<PauliOp> ops = {PauliOp(b / 4), PauliOp(b % 4)};
      const auto r = teleport_share(x, {2, {0, 1}, ops}, rng, std::span<const BellKind>(forced));
      const auto disclosed = all_disclosed(ops);
      ReconstructionRecord rec;
      const StateVector y = reconstruct(receiver_state(r), r.outcomes, disclosed, &rec);
      CHECK(std::abs(1.0 - fidelity(y, x)) < 1e-9);
      CHECK(rec.complete);
      ++cases;
    }
  }
  CHECK(cases == 256);
}

TEST_CASE("sampled reconstruction for m = 1, 2, 3") {
  RandomSource rng(4);
  for (std::size_t m = 1; m <= 3; ++m) {
    for (int trial = 0; trial < 200; ++trial) {
      const StateVector x = random_state(m, rng);
      std::vector<PauliOp> ops;
      for (std::size_t k = 0; k < m; ++k) ops.push_back(PauliOp(rng.below(4)));
      const auto r = teleport_share(x, {m, {}, ops}, rng);
      const StateVector y = reconstruct(receiver_state(r), r.outcomes, all_disclosed(ops));
      CHECK(std::abs(1.0 - fidelity(y, x)) < 1e-9);
    }
  }
}

TEST_CASE("Bell outcomes are uniform whatever the state") {
  RandomSource rng(5);
  std::array<int, 4> first{};
  std::array<int, 4> second{};
  const int n = 40000;
  for (int i = 0; i < n; ++i) {
    const StateVector x = random_state(2, rng);
    const auto r = teleport_share(x, {2, {}, {PauliOp::U0, PauliOp::U2}}, rng);
    ++first[int(r.outcomes[0])];
    ++second[int(r.outcomes[1])];
  }
  for (const auto* counts : {&first, &second}) {
    double chi2 = 0;
    for (int c : *counts) chi2 += (c - n / 4.0) * (c - n / 4.0) / (n / 4.0);
    CHECK(chi2 < oracle::chi2_crit_01(3));
  }
}

TEST_CASE("before correction the receiver's statistics carry no information") {
  RandomSource rng(6);
  for (const auto& x : {StateVector(1), StateVector::basis_state(1, 1),
                        apply_hadamard(StateVector(1), 0)}) {
    int z_ones = 0;
    int x_ones = 0;
    const int n = 8000;
    for (int i = 0; i < n; ++i) {
      auto r = teleport_share(x, {1, {}, {PauliOp::U0}}, rng);
      const StateVector recv = receiver_state(r);
      z_ones += measure(recv, 0, Basis::Z, rng).bit;
      x_ones += measure(recv, 0, Basis::X, rng).bit;
    }
    const double sigma = std::sqrt(0.25 / n);
    CHECK(std::abs(z_ones / double(n) - 0.5) < 3 * sigma);
    CHECK(std::abs(x_ones / double(n) - 0.5) < 3 * sigma);
  }
}

TEST_CASE("reconstruction without the agents' operations") {
  RandomSource rng(7);
  const StateVector x = random_state(1, rng);
  const auto r = teleport_share(x, {1, {}, {PauliOp::U1}}, rng);
  const std::vector<std::optional<PauliOp>> missing = {std::nullopt};
  CHECK_THROWS_AS(reconstruct(receiver_state(r), r.outcomes, missing), IncompleteCooperationError);
  ReconstructionRecord rec;
  CHECK_NOTHROW(reconstruct(receiver_state(r), r.outcomes, missing, &rec, true));
  CHECK_FALSE(rec.complete);

  // Guessing uniformly: mean fidelity 1/2 for uniformly random states, and a
  // wrong guess (3 in 4) almost never lands near 1.
  double sum = 0;
  int below = 0;
  const int n = 20000;
  for (int i = 0; i < n; ++i) {
    const StateVector s = random_state(1, rng);
    const PauliOp op = PauliOp(rng.below(4));
    const auto t = teleport_share(s, {1, {}, {op}}, rng);
    const std::vector<std::optional<PauliOp>> guess = {PauliOp(rng.below(4))};
    const double f = fidelity(reconstruct(receiver_state(t), t.outcomes, guess), s);
    sum += f;
    below += f < 0.99 ? 1 : 0;
  }
  CHECK(std::abs(sum / n - 0.5) < 0.01);
  CHECK(std::abs(below / double(n) - 0.75) < 0.02);
}

TEST_CASE("capacity and argument errors") {
  RandomSource rng(8);
  const StateVector x = random_state(2, rng);
  CHECK_THROWS_AS(teleport_share(x, {2, {}, {PauliOp::U0}}, rng), CapacityError);
  CHECK_THROWS_AS(teleport_share(x, {1, {}, {PauliOp::U0}}, rng), ArgumentError);
  std::vector<ChannelPair> one;
  one.push_back(encrypted_pair(PauliOp::U0));
  CHECK_THROWS_AS(teleport_through(x, std::move(one), rng), CapacityError);
}

TEST_CASE("full state-sharing runs") {
  for (std::size_t n : {2U, 3U, 4U}) {
    ProtocolConfig c;
    c.protocol = ProtocolKind::Mqsts;
    c.n_agents = n;
    c.n_pairs = 120;
    c.m = 3;
    RandomSource rng(20 + n);
    const auto run = run_state_sharing(c, rng);
    REQUIRE(run.outcome.verdict.completed);
    CHECK_FALSE(run.outcome.fidelities.empty());
    for (double f : run.outcome.fidelities) CHECK(std::abs(1.0 - f) < 1e-9);
    CHECK(run.records.size() == run.outcome.fidelities.size());
    CHECK(run.outcome.counts.b_m == 2 * 3 * run.records.size());
    CHECK(run.outcome.counts.b_t == run.outcome.counts.b_m);
  }

  ProtocolConfig c;
  c.protocol = ProtocolKind::Mqsts;
  c.n_agents = 3;
  c.n_pairs = 100;
  c.m = 1;
  c.blocks = 5;
  c.withheld_agents = {2};
  RandomSource rng(9);
  const auto run = run_state_sharing(c, rng);
  REQUIRE(run.outcome.fidelities.size() == 5);
  CHECK_FALSE(run.outcome.decoding_complete);

  c.withheld_agents.clear();
  c.channels.sa_first.adversary = channel::InterceptResend{};
  RandomSource rng2(10);
  CHECK(run_state_sharing(c, rng2).outcome.detected());

  c.protocol = ProtocolKind::Mqssp3;
  CHECK_THROWS_AS(run_state_sharing(c, rng2), ConfigError);
}
