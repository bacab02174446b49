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
#include <limits>
#include <vector>

#include "oracle.hpp"
#include "qss/errors.hpp"
#include "qss/random_source.hpp"
#include "qss/state_vector.hpp"

using namespace qss;

namespace {

oracle::Vec to_vec(const StateVector& s) { return {s.amplitudes().begin(), s.amplitudes().end()}; }

StateVector from_vec(const oracle::Vec& v) { return StateVector::from_amplitudes(v); }

oracle::Mat to_mat(const kernels::Mat2& m) { return oracle::mat2(m.m00, m.m01, m.m10, m.m11); }

void check_close(const oracle::Vec& a, const oracle::Vec& b, double tol = 1e-12) {
  REQUIRE(a.size() == b.size());
  for (std::size_t i = 0; i < a.size(); ++i) CHECK(std::abs(a[i] - b[i]) < tol);
}

}  // namespace

TEST_CASE("RandomSource matches the SplitMix64 reference stream") {
  RandomSource zero(0);
  CHECK(zero.next() == 0xe220a8397b1dcdafULL);
  CHECK(zero.next() == 0x6e789e6aa1b965f4ULL);
  CHECK(zero.next() == 0x06c45d188009454fULL);
  RandomSource other(12345);
  CHECK(other.next() == 0x22118258a9d111a0ULL);
  CHECK(other.counter() == 1);
}

TEST_CASE("RandomSource draws stay in range and are reproducible") {
  RandomSource a(99);
  RandomSource b(99);
  for (int i = 0; i < 1000; ++i) {
    const double u = a.uniform();
    CHECK(u >= 0.0);
    CHECK(u < 1.0);
    CHECK(b.uniform() == u);
  }
  CHECK_THROWS_AS(a.below(0), ArgumentError);
  CHECK_FALSE(a.bernoulli(0.0));
  std::array<int, 6> counts{};
  for (int i = 0; i < 60000; ++i) ++counts[a.below(6)];
  double chi2 = 0;
  for (int c : counts) chi2 += (c - 10000.0) * (c - 10000.0) / 10000.0;
  CHECK(chi2 < 15.086);  // 5 dof, alpha = 0.01

  double sum = 0;
  double sq = 0;
  const int n = 40000;
  for (int i = 0; i < n; ++i) {
    const double x = a.normal();
    sum += x;
    sq += x * x;
  }
  CHECK(std::abs(sum / n) < 0.03);
  CHECK(std::abs(sq / n - 1.0) < 0.03);
}

TEST_CASE("construction validates size, norm and finiteness") {
  StateVector s(3);
  CHECK(s.n_qubits() == 3);
  CHECK(s.size() == 8);
  CHECK(s[0] == Amplitude{1.0});
  CHECK_THROWS_AS(StateVector(17), CapacityError);
  CHECK_NOTHROW(StateVector(17, 20));
  CHECK_THROWS_AS(StateVector::from_amplitudes({1.0, 1.0}), InvalidStateError);
  CHECK_THROWS_AS(StateVector::from_amplitudes({1.0, 0.0, 0.0}), std::exception);
  CHECK_THROWS_AS(
      StateVector::from_amplitudes({std::numeric_limits<double>::quiet_NaN(), 0.0}),
      InvalidStateError);
  CHECK_THROWS_AS(StateVector::normalized({0.0, 0.0}), InvalidStateError);
  CHECK_THROWS_AS(s.mask_of(3), IndexError);
  CHECK(s.mask_of(0) == 4);
  CHECK(s.mask_of(2) == 1);
  CHECK_THROWS_AS(StateVector::basis_state(2, 4), IndexError);
  CHECK(StateVector::basis_state(2, 2)[2] == Amplitude{1.0});
}

TEST_CASE("single-qubit gates and CNOT agree with Kronecker-product matrices") {
  RandomSource rng(5);
  for (int trial = 0; trial < 5; ++trial) {
    const StateVector s = random_state(3, rng);
    const oracle::Vec v = to_vec(s);
    for (std::size_t q = 0; q < 3; ++q) {
      for (auto op : kAllPauliOps) {
        const auto expected = oracle::apply(oracle::on_qubit(to_mat(matrix_of(op)), q, 3), v);
        check_close(to_vec(apply_pauli(s, q, op)), expected);
      }
      check_close(to_vec(apply_hadamard(s, q)),
                  oracle::apply(oracle::on_qubit(oracle::hadamard(), q, 3), v));
      for (std::size_t t = 0; t < 3; ++t) {
        if (t == q) continue;
        StateVector c = s;
        c.apply_cnot(q, t);
        check_close(to_vec(c), oracle::apply(oracle::cnot(q, t, 3), v));
      }
    }
  }
  StateVector s(2);
  CHECK_THROWS_AS(s.apply_cnot(1, 1), ArgumentError);
  CHECK_THROWS_AS(apply_pauli(s, 2, PauliOp::U1), IndexError);
}

TEST_CASE("the Pauli matrices are the stated ones") {
  for (int k = 0; k < 4; ++k) {
    const auto m = to_mat(matrix_of(static_cast<PauliOp>(k)));
    CHECK(m.a == oracle::pauli(k).a);
  }
  CHECK(pauli_from_string("U3") == PauliOp::U3);
  CHECK_THROWS_AS(pauli_from_string("X"), ArgumentError);
}

TEST_CASE("Bell states and tensor products") {
  for (int k = 0; k < 4; ++k) {
    check_close(to_vec(make_bell(static_cast<BellKind>(k))), oracle::bell(k));
  }
  CHECK(bell_from_string("psi-") == BellKind::PsiMinus);
  CHECK(to_string(BellKind::PhiPlus) == "phi+");
  CHECK_THROWS_AS(bell_from_string("psi"), ArgumentError);

  RandomSource rng(8);
  const StateVector a = random_state(2, rng);
  const StateVector b = random_state(3, rng);
  check_close(to_vec(tensor(a, b)), oracle::kron(to_vec(a), to_vec(b)));
  CHECK_THROWS_AS(tensor(StateVector(9), StateVector(8)), CapacityError);
}

TEST_CASE("single-qubit measurement follows the Born rule and collapses") {
  RandomSource rng(17);
  const StateVector s = random_state(3, rng);
  const oracle::Vec v = to_vec(s);
  for (std::size_t q = 0; q < 3; ++q) {
    double p1 = 0;
    for (std::size_t i = 0; i < v.size(); ++i) {
      if (oracle::bit_of(i, q, 3)) p1 += std::norm(v[i]);
    }
    CHECK(probability_of_one(s, q, Basis::Z) == doctest::Approx(p1).epsilon(1e-12));
    const auto hv = oracle::apply(oracle::on_qubit(oracle::hadamard(), q, 3), v);
    double px = 0;
    for (std::size_t i = 0; i < hv.size(); ++i) {
      if (oracle::bit_of(i, q, 3)) px += std::norm(hv[i]);
    }
    CHECK(probability_of_one(s, q, Basis::X) == doctest::Approx(px).epsilon(1e-12));
  }

  auto [bit, post] = measure(s, 1, Basis::Z, rng);
  CHECK(probability_of_one(post, 1, Basis::Z) == doctest::Approx(bit));
  CHECK(post.norm_squared() == doctest::Approx(1.0));

  const StateVector plus = apply_hadamard(StateVector(1), 0);
  for (int i = 0; i < 20; ++i) CHECK(measure(plus, 0, Basis::X, rng).bit == 0);

  // Frequencies over many draws.
  const StateVector tilted =
      StateVector::normalized({std::sqrt(0.3), Amplitude{0.0, std::sqrt(0.7)}});
  int ones = 0;
  const int n = 20000;
  for (int i = 0; i < n; ++i) ones += measure(tilted, 0, Basis::Z, rng).bit;
  CHECK(std::abs(ones / double(n) - 0.7) < 3 * std::sqrt(0.21 / n));
}

TEST_CASE("Bell measurement probabilities and post-measurement states") {
  RandomSource rng(23);
  const StateVector s = random_state(4, rng);
  const oracle::Vec v = to_vec(s);
  const std::vector<std::pair<std::size_t, std::size_t>> pairs = {{0, 1}, {2, 0}, {1, 3}, {3, 2}};
  for (auto [qa, qb] : pairs) {
    const auto probs = bell_probabilities(s, qa, qb);
    double total = 0;
    for (int k = 0; k < 4; ++k) {
      const auto projected = oracle::bell_project(v, qa, qb, k, 4);
      CHECK(probs[k] == doctest::Approx(oracle::norm2(projected)).epsilon(1e-12));
      total += probs[k];
      const StateVector forced = bell_project(s, qa, qb, static_cast<BellKind>(k));
      CHECK(oracle::fidelity(to_vec(forced), oracle::normalize(projected)) ==
            doctest::Approx(1.0).epsilon(1e-12));
      // Same state, not just same ray.
      check_close(to_vec(forced), oracle::normalize(projected), 1e-12);
    }
    CHECK(total == doctest::Approx(1.0));
    for (int rep = 0; rep < 8; ++rep) {
      auto [kind, post] = bell_measure(s, qa, qb, rng);
      const auto expected =
          oracle::normalize(oracle::bell_project(v, qa, qb, static_cast<int>(kind), 4));
      check_close(to_vec(post), expected, 1e-12);
    }
  }
  CHECK_THROWS_AS(bell_measure(s, 1, 1, rng), ArgumentError);
  CHECK_THROWS_AS(bell_project(make_bell(BellKind::PsiMinus), 0, 1, BellKind::PhiPlus),
                  InvalidStateError);
}

TEST_CASE("Bell outcomes on a fresh singlet are deterministic") {
  RandomSource rng(2);
  for (int i = 0; i < 50; ++i) {
    CHECK(bell_measure(make_bell(BellKind::PsiMinus), 0, 1, rng).kind == BellKind::PsiMinus);
  }
}

TEST_CASE("fidelity, random states and factor extraction") {
  RandomSource rng(31);
  const StateVector a = random_state(2, rng);
  const StateVector b = random_state(1, rng);
  CHECK(a.norm_squared() == doctest::Approx(1.0).epsilon(1e-12));
  CHECK(fidelity(a, a) == doctest::Approx(1.0));
  CHECK_THROWS_AS(fidelity(a, b), ArgumentError);

  const StateVector joint = tensor(a, b);
  const std::array<std::size_t, 2> keep_a = {0, 1};
  const std::array<std::size_t, 1> keep_b = {2};
  CHECK(fidelity(extract_factor(joint, keep_a), a) == doctest::Approx(1.0).epsilon(1e-12));
  CHECK(fidelity(extract_factor(joint, keep_b), b) == doctest::Approx(1.0).epsilon(1e-12));
  CHECK(reduced_fidelity(joint, keep_a, a) == doctest::Approx(1.0).epsilon(1e-12));

  const StateVector bell = make_bell(BellKind::PhiPlus);
  const std::array<std::size_t, 1> first = {0};
  CHECK_THROWS_AS(extract_factor(bell, first), InvalidStateError);
  CHECK(reduced_fidelity(bell, first, StateVector(1)) == doctest::Approx(0.5));

  // Reordered keep list returns the factor in that order.
  const StateVector ab = tensor(StateVector::basis_state(1, 1), StateVector(1));
  const std::array<std::size_t, 2> swapped = {1, 0};
  CHECK(fidelity(extract_factor(ab, swapped), StateVector::basis_state(2, 1)) ==
        doctest::Approx(1.0));
}

TEST_CASE("property: gate sequences preserve the norm") {
  RandomSource rng(41);
  StateVector s = random_state(6, rng);
  for (int step = 0; step < 300; ++step) {
    const auto q = static_cast<std::size_t>(rng.below(6));
    switch (rng.below(3)) {
      case 0: s = apply_pauli(std::move(s), q, static_cast<PauliOp>(rng.below(4))); break;
      case 1: s = apply_hadamard(std::move(s), q); break;
      default: s.apply_cnot(q, (q + 1 + rng.below(5)) % 6); break;
    }
  }
  CHECK(std::abs(s.norm_squared() - 1.0) < kNormTolerance);
}
