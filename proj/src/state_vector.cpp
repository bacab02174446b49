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

#include "qss/state_vector.hpp"

#include <algorithm>
#include <bit>
#include <cmath>
#include <numbers>
#include <string>

#include "qss/errors.hpp"

namespace qss {

namespace kp = kernels::parallel;

namespace {

constexpr double kInvSqrt2 = 0.70710678118654752440;
const kernels::Mat2 kHadamard{kInvSqrt2, kInvSqrt2, kInvSqrt2, -kInvSqrt2};

void check_capacity(std::size_t n_qubits, std::size_t max_qubits) {
  if (n_qubits > max_qubits) {
    throw CapacityError("register of " + std::to_string(n_qubits) +
                        " qubits exceeds capacity " + std::to_string(max_qubits));
  }
}

std::size_t qubits_for_length(std::size_t length) {
  if (length == 0 || (length & (length - 1)) != 0) {
    throw ArgumentError("amplitude count " + std::to_string(length) + " is not a power of two");
  }
  return static_cast<std::size_t>(std::countr_zero(length));
}

// Offsets in the full index for every configuration of `qubits`, where the
// first listed qubit is the most significant bit of the configuration.
std::vector<std::size_t> offsets_for(const StateVector& s, std::span<const std::size_t> qubits) {
  std::vector<std::size_t> masks;
  masks.reserve(qubits.size());
  for (auto q : qubits) masks.push_back(s.mask_of(q));
  std::vector<std::size_t> out(std::size_t{1} << qubits.size(), 0);
  for (std::size_t x = 0; x < out.size(); ++x) {
    std::size_t idx = 0;
    for (std::size_t t = 0; t < masks.size(); ++t) {
      if ((x >> (masks.size() - 1 - t)) & 1U) idx |= masks[t];
    }
    out[x] = idx;
  }
  return out;
}

struct Split {
  std::vector<std::size_t> keep_offsets;
  std::vector<std::size_t> rest_offsets;
};

Split split_register(const StateVector& s, std::span<const std::size_t> keep) {
  std::vector<bool> used(s.n_qubits(), false);
  for (auto q : keep) {
    s.mask_of(q);
    if (used[q]) throw ArgumentError("duplicate qubit in keep list");
    used[q] = true;
  }
  std::vector<std::size_t> rest;
  for (std::size_t q = 0; q < s.n_qubits(); ++q) {
    if (!used[q]) rest.push_back(q);
  }
  return {offsets_for(s, keep), offsets_for(s, rest)};
}

}  // namespace

std::string_view to_string(BellKind kind) {
  switch (kind) {
    case BellKind::PhiPlus: return "phi+";
    case BellKind::PhiMinus: return "phi-";
    case BellKind::PsiPlus: return "psi+";
    case BellKind::PsiMinus: return "psi-";
  }
  return "?";
}

BellKind bell_from_string(std::string_view text) {
  for (BellKind k : kAllBellKinds) {
    if (to_string(k) == text) return k;
  }
  throw ArgumentError("unknown Bell state '" + std::string(text) + "'");
}

std::string_view to_string(Basis basis) { return basis == Basis::Z ? "Z" : "X"; }

StateVector::StateVector(std::size_t n_qubits, std::size_t max_qubits)
    : n_qubits_(n_qubits), max_qubits_(max_qubits) {
  check_capacity(n_qubits, max_qubits);
  amps_.assign(std::size_t{1} << n_qubits, Amplitude{});
  amps_[0] = 1.0;
}

StateVector::StateVector(std::vector<Amplitude> amps, std::size_t n_qubits,
                         std::size_t max_qubits)
    : n_qubits_(n_qubits), max_qubits_(max_qubits), amps_(std::move(amps)) {}

StateVector StateVector::from_amplitudes(std::vector<Amplitude> amps, std::size_t max_qubits) {
  const std::size_t n = qubits_for_length(amps.size());
  check_capacity(n, max_qubits);
  for (const auto& a : amps) {
    if (!std::isfinite(a.real()) || !std::isfinite(a.imag())) {
      throw InvalidStateError("non-finite amplitude");
    }
  }
  const double norm = kp::norm_squared(amps);
  if (std::abs(norm - 1.0) > kNormTolerance) {
    throw InvalidStateError("state is not normalized (norm^2 = " + std::to_string(norm) + ")");
  }
  return StateVector(std::move(amps), n, max_qubits);
}

StateVector StateVector::normalized(std::vector<Amplitude> amps, std::size_t max_qubits) {
  const double norm = kp::norm_squared(amps);
  if (!(norm > 0.0) || !std::isfinite(norm)) throw InvalidStateError("cannot normalize state");
  kp::scale(amps, 1.0 / std::sqrt(norm));
  return from_amplitudes(std::move(amps), max_qubits);
}

StateVector StateVector::basis_state(std::size_t n_qubits, std::size_t index,
                                     std::size_t max_qubits) {
  StateVector s(n_qubits, max_qubits);
  if (index >= s.size()) throw IndexError("basis index out of range");
  s.amps_[0] = 0.0;
  s.amps_[index] = 1.0;
  return s;
}

double StateVector::norm_squared() const { return kp::norm_squared(amps_); }

std::size_t StateVector::mask_of(std::size_t qubit) const {
  if (qubit >= n_qubits_) {
    throw IndexError("qubit " + std::to_string(qubit) + " out of range for " +
                     std::to_string(n_qubits_) + "-qubit register");
  }
  return std::size_t{1} << (n_qubits_ - 1 - qubit);
}

void StateVector::apply_matrix(std::size_t qubit, const kernels::Mat2& u) {
  kp::apply_1q(amps_, mask_of(qubit), u);
}

void StateVector::apply_cnot(std::size_t control, std::size_t target) {
  if (control == target) throw ArgumentError("CNOT control equals target");
  kp::apply_cnot(amps_, mask_of(control), mask_of(target));
}

void StateVector::collapse(std::size_t mask, std::size_t pattern) {
  const double weight = kp::masked_weight(amps_, mask, pattern);
  if (!(weight > 0.0)) throw InvalidStateError("collapse onto a zero-weight branch");
  kp::project(amps_, mask, pattern, 1.0 / std::sqrt(weight));
}

StateVector make_bell(BellKind kind) {
  std::vector<Amplitude> amps(4);
  switch (kind) {
    case BellKind::PhiPlus: amps = {kInvSqrt2, 0.0, 0.0, kInvSqrt2}; break;
    case BellKind::PhiMinus: amps = {kInvSqrt2, 0.0, 0.0, -kInvSqrt2}; break;
    case BellKind::PsiPlus: amps = {0.0, kInvSqrt2, kInvSqrt2, 0.0}; break;
    case BellKind::PsiMinus: amps = {0.0, kInvSqrt2, -kInvSqrt2, 0.0}; break;
  }
  return StateVector::from_amplitudes(std::move(amps));
}

StateVector tensor(const StateVector& a, const StateVector& b) {
  const std::size_t n = a.n_qubits() + b.n_qubits();
  const std::size_t cap = std::max(a.max_qubits(), b.max_qubits());
  check_capacity(n, cap);
  std::vector<Amplitude> out(std::size_t{1} << n);
  kp::kron(a.amplitudes(), b.amplitudes(), out);
  return StateVector::from_amplitudes(std::move(out), cap);
}

StateVector apply_pauli(StateVector state, std::size_t qubit, PauliOp op) {
  state.apply_matrix(qubit, matrix_of(op));
  return state;
}

StateVector apply_hadamard(StateVector state, std::size_t qubit) {
  state.apply_matrix(qubit, kHadamard);
  return state;
}

double probability_of_one(const StateVector& state, std::size_t qubit, Basis basis) {
  const std::size_t mask = state.mask_of(qubit);
  if (basis == Basis::Z) return kp::masked_weight(state.amplitudes(), mask, mask);
  StateVector rotated = apply_hadamard(state, qubit);
  return kp::masked_weight(rotated.amplitudes(), mask, mask);
}

MeasureResult measure(StateVector state, std::size_t qubit, Basis basis, RandomSource& rng) {
  const std::size_t mask = state.mask_of(qubit);
  if (basis == Basis::X) state.apply_matrix(qubit, kHadamard);
  const double p1 = kp::masked_weight(state.amplitudes(), mask, mask);
  if (!(p1 >= -kNormTolerance && p1 <= 1.0 + kNormTolerance)) {
    throw InvalidStateError("measurement probability out of range");
  }
  const int bit = rng.uniform() < p1 ? 1 : 0;
  state.collapse(mask, bit ? mask : 0);
  if (basis == Basis::X) state.apply_matrix(qubit, kHadamard);
  return {bit, std::move(state)};
}

namespace {

// CNOT(qa->qb) then H(qa) maps phi+,psi+,phi-,psi- onto |00>,|01>,|10>,|11>.
constexpr std::array<BellKind, 4> kBellOfPattern = {BellKind::PhiPlus, BellKind::PsiPlus,
                                                    BellKind::PhiMinus, BellKind::PsiMinus};

void rotate_to_bell_frame(StateVector& s, std::size_t qa, std::size_t qb) {
  s.apply_cnot(qa, qb);
  s.apply_matrix(qa, kHadamard);
}

void rotate_from_bell_frame(StateVector& s, std::size_t qa, std::size_t qb) {
  s.apply_matrix(qa, kHadamard);
  s.apply_cnot(qa, qb);
}

}  // namespace

std::array<double, 4> bell_probabilities(const StateVector& state, std::size_t qa,
                                         std::size_t qb) {
  if (qa == qb) throw ArgumentError("Bell measurement needs two distinct qubits");
  StateVector rotated = state;
  rotate_to_bell_frame(rotated, qa, qb);
  const std::size_t ma = rotated.mask_of(qa);
  const std::size_t mb = rotated.mask_of(qb);
  std::array<double, 4> probs{};
  for (std::size_t pattern = 0; pattern < 4; ++pattern) {
    const std::size_t bits = ((pattern & 2U) ? ma : 0) | ((pattern & 1U) ? mb : 0);
    probs[static_cast<std::size_t>(kBellOfPattern[pattern])] =
        kp::masked_weight(rotated.amplitudes(), ma | mb, bits);
  }
  return probs;
}

BellResult bell_measure(StateVector state, std::size_t qa, std::size_t qb, RandomSource& rng) {
  if (qa == qb) throw ArgumentError("Bell measurement needs two distinct qubits");
  rotate_to_bell_frame(state, qa, qb);
  const std::size_t ma = state.mask_of(qa);
  const std::size_t mb = state.mask_of(qb);
  std::array<double, 4> weight{};
  for (std::size_t pattern = 0; pattern < 4; ++pattern) {
    const std::size_t bits = ((pattern & 2U) ? ma : 0) | ((pattern & 1U) ? mb : 0);
    weight[pattern] = kp::masked_weight(state.amplitudes(), ma | mb, bits);
  }
  const double u = rng.uniform();
  double acc = 0.0;
  std::size_t chosen = 3;
  for (std::size_t pattern = 0; pattern < 4; ++pattern) {
    acc += weight[pattern];
    if (u < acc && weight[pattern] > 0.0) {
      chosen = pattern;
      break;
    }
  }
  while (weight[chosen] <= 0.0) --chosen;  // guards u landing in rounding slack
  const std::size_t bits = ((chosen & 2U) ? ma : 0) | ((chosen & 1U) ? mb : 0);
  state.collapse(ma | mb, bits);
  rotate_from_bell_frame(state, qa, qb);
  return {kBellOfPattern[chosen], std::move(state)};
}

StateVector bell_project(StateVector state, std::size_t qa, std::size_t qb, BellKind kind) {
  if (qa == qb) throw ArgumentError("Bell projection needs two distinct qubits");
  std::size_t pattern = 0;
  while (kBellOfPattern[pattern] != kind) ++pattern;
  rotate_to_bell_frame(state, qa, qb);
  const std::size_t ma = state.mask_of(qa);
  const std::size_t mb = state.mask_of(qb);
  state.collapse(ma | mb, ((pattern & 2U) ? ma : 0) | ((pattern & 1U) ? mb : 0));
  rotate_from_bell_frame(state, qa, qb);
  return state;
}

double fidelity(const StateVector& a, const StateVector& b) {
  if (a.n_qubits() != b.n_qubits()) throw ArgumentError("fidelity: qubit count mismatch");
  return std::clamp(std::norm(kp::inner(a.amplitudes(), b.amplitudes())), 0.0, 1.0);
}

StateVector random_state(std::size_t m, RandomSource& rng, std::size_t max_qubits) {
  if (m == 0) throw ArgumentError("random_state: need at least one qubit");
  check_capacity(m, max_qubits);
  std::vector<Amplitude> amps(std::size_t{1} << m);
  for (auto& a : amps) {
    const double re = rng.normal();
    const double im = rng.normal();
    a = {re, im};
  }
  return StateVector::normalized(std::move(amps), max_qubits);
}

StateVector extract_factor(const StateVector& state, std::span<const std::size_t> keep) {
  const Split split = split_register(state, keep);
  std::size_t best = 0;
  double best_weight = -1.0;
  for (std::size_t r = 0; r < split.rest_offsets.size(); ++r) {
    double w = 0.0;
    for (auto off : split.keep_offsets) w += std::norm(state[off | split.rest_offsets[r]]);
    if (w > best_weight) {
      best_weight = w;
      best = r;
    }
  }
  std::vector<Amplitude> slice;
  slice.reserve(split.keep_offsets.size());
  for (auto off : split.keep_offsets) slice.push_back(state[off | split.rest_offsets[best]]);
  StateVector factor = StateVector::normalized(std::move(slice), state.max_qubits());
  if (std::abs(reduced_fidelity(state, keep, factor) - 1.0) > kFidelityTolerance) {
    throw InvalidStateError("requested qubits are entangled with the rest of the register");
  }
  return factor;
}

double reduced_fidelity(const StateVector& state, std::span<const std::size_t> keep,
                        const StateVector& target) {
  if (target.n_qubits() != keep.size()) {
    throw ArgumentError("reduced_fidelity: target size does not match kept qubits");
  }
  const Split split = split_register(state, keep);
  double total = 0.0;
  for (auto rest : split.rest_offsets) {
    Amplitude overlap{};
    for (std::size_t x = 0; x < split.keep_offsets.size(); ++x) {
      overlap += std::conj(target[x]) * state[split.keep_offsets[x] | rest];
    }
    total += std::norm(overlap);
  }
  return std::clamp(total, 0.0, 1.0);
}

}  // namespace qss
