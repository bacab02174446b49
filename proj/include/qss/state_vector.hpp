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

#pragma once

#include <array>
#include <cstddef>
#include <cstdint>
#include <span>
#include <string_view>
#include <vector>

#include "qss/kernels.hpp"
#include "qss/pauli_op.hpp"
#include "qss/random_source.hpp"

namespace qss {

using Amplitude = kernels::Amplitude;

enum class BellKind : std::uint8_t { PhiPlus = 0, PhiMinus = 1, PsiPlus = 2, PsiMinus = 3 };

inline constexpr std::array<BellKind, 4> kAllBellKinds = {
    BellKind::PhiPlus, BellKind::PhiMinus, BellKind::PsiPlus, BellKind::PsiMinus};

std::string_view to_string(BellKind kind);
BellKind bell_from_string(std::string_view text);

/// Z = {|0>, |1>}, X = {|+x>, |-x>}. Outcome bit 0 is |0> or |+x>.
enum class Basis : std::uint8_t { Z = 0, X = 1 };

std::string_view to_string(Basis basis);

inline constexpr double kNormTolerance = 1e-10;
inline constexpr double kFidelityTolerance = 1e-9;

/// Pure state of n qubits as 2^n dense amplitudes.
///
/// Amplitude index bits are big-endian over qubit labels: qubit 0 is the most
/// significant bit, so |q0 q1 ... q(n-1)> sits at index sum q_k 2^(n-1-k).
/// Every instance is normalized to within kNormTolerance and finite.
class StateVector {
 public:
  static constexpr std::size_t kDefaultMaxQubits = 16;

  /// |0...0> on `n_qubits` qubits.
  explicit StateVector(std::size_t n_qubits, std::size_t max_qubits = kDefaultMaxQubits);

  /// Validates length (power of two), finiteness and norm.
  static StateVector from_amplitudes(std::vector<Amplitude> amps,
                                     std::size_t max_qubits = kDefaultMaxQubits);
  /// As from_amplitudes but rescales to unit norm first.
  static StateVector normalized(std::vector<Amplitude> amps,
                                std::size_t max_qubits = kDefaultMaxQubits);
  static StateVector basis_state(std::size_t n_qubits, std::size_t index,
                                 std::size_t max_qubits = kDefaultMaxQubits);

  std::size_t n_qubits() const { return n_qubits_; }
  std::size_t size() const { return amps_.size(); }
  std::size_t max_qubits() const { return max_qubits_; }
  std::span<const Amplitude> amplitudes() const { return amps_; }
  Amplitude operator[](std::size_t index) const { return amps_[index]; }
  double norm_squared() const;

  /// Bit mask of `qubit` in the amplitude index; throws IndexError.
  std::size_t mask_of(std::size_t qubit) const;

  // In-place primitives. The free functions below are the value-semantic API.
  void apply_matrix(std::size_t qubit, const kernels::Mat2& u);
  void apply_cnot(std::size_t control, std::size_t target);
  /// Keeps the amplitudes matching `pattern` under `mask` and renormalizes;
  /// throws InvalidStateError when that branch has zero weight.
  void collapse(std::size_t mask, std::size_t pattern);

 private:
  StateVector(std::vector<Amplitude> amps, std::size_t n_qubits, std::size_t max_qubits);

  std::size_t n_qubits_;
  std::size_t max_qubits_;
  std::vector<Amplitude> amps_;
};

struct MeasureResult {
  int bit;
  StateVector state;
};

struct BellResult {
  BellKind kind;
  StateVector state;
};

StateVector make_bell(BellKind kind);
StateVector tensor(const StateVector& a, const StateVector& b);
StateVector apply_pauli(StateVector state, std::size_t qubit, PauliOp op);
StateVector apply_hadamard(StateVector state, std::size_t qubit);

/// Born-rule probability that measuring `qubit` in `basis` yields 1.
double probability_of_one(const StateVector& state, std::size_t qubit, Basis basis);
MeasureResult measure(StateVector state, std::size_t qubit, Basis basis, RandomSource& rng);

/// Born probabilities of the four Bell outcomes on (qa, qb), indexed by BellKind.
std::array<double, 4> bell_probabilities(const StateVector& state, std::size_t qa,
                                         std::size_t qb);
/// Projects (qa, qb) onto a Bell state. The collapsed pair is left in the
/// register in exactly make_bell(kind) form.
BellResult bell_measure(StateVector state, std::size_t qa, std::size_t qb, RandomSource& rng);

/// Post-selects the Bell outcome `kind` on (qa, qb) and renormalizes;
/// throws InvalidStateError when that outcome has zero probability.
StateVector bell_project(StateVector state, std::size_t qa, std::size_t qb, BellKind kind);

/// |<a|b>|^2.
double fidelity(const StateVector& a, const StateVector& b);

/// Independent standard-normal real and imaginary parts, then normalized.
StateVector random_state(std::size_t m, RandomSource& rng,
                         std::size_t max_qubits = StateVector::kDefaultMaxQubits);

/// Returns the factor on `keep` (in the given order) of a state that is a
/// product between `keep` and the remaining qubits. Throws InvalidStateError
/// when the two parts are entangled.
StateVector extract_factor(const StateVector& state, std::span<const std::size_t> keep);

/// <target| rho_keep |target>, where rho_keep is the reduced state on `keep`.
/// Works for entangled registers.
double reduced_fidelity(const StateVector& state, std::span<const std::size_t> keep,
                        const StateVector& target);

}  // namespace qss
