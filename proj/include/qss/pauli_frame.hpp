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

#include <cstdint>
#include <span>
#include <string>

#include "qss/pauli_op.hpp"
#include "qss/state_vector.hpp"

// Classical bookkeeping for the four encoding operations. Everything here is
// modulo global phase: the four ops form Z2 x Z2 under composition, and the
// two-bit code is the isomorphism that turns composition into XOR.

namespace qss::frame {

struct TwoBits {
  std::uint8_t hi = 0;
  std::uint8_t lo = 0;

  constexpr unsigned value() const { return (static_cast<unsigned>(hi) << 1) | lo; }
  static constexpr TwoBits from_value(unsigned v) {
    return {static_cast<std::uint8_t>((v >> 1) & 1U), static_cast<std::uint8_t>(v & 1U)};
  }
  friend constexpr bool operator==(TwoBits, TwoBits) = default;
  friend constexpr TwoBits operator^(TwoBits a, TwoBits b) {
    return from_value(a.value() ^ b.value());
  }
  std::string str() const { return std::string{char('0' + hi), char('0' + lo)}; }
};

/// U0 -> 00, U1 -> 11, U2 -> 01, U3 -> 10.
TwoBits code_of(PauliOp op);
PauliOp op_of(TwoBits code);

PauliOp compose(PauliOp a, PauliOp b);
PauliOp compose_all(std::span<const PauliOp> ops);
/// Every op is its own inverse modulo phase.
constexpr PauliOp inverse(PauliOp op) { return op; }

/// Bell state reached by applying `op` to either qubit of `start`.
BellKind bell_after(BellKind start, PauliOp op);

/// The op with bell_after(PsiMinus, op) == kind.
PauliOp frame_of(BellKind kind);

/// Receiver-side correction for a teleportation outcome over a psi- channel.
PauliOp correction_for(BellKind outcome);

struct CorrectionPair {
  PauliOp first;
  PauliOp second;
  friend bool operator==(const CorrectionPair&, const CorrectionPair&) = default;
};

CorrectionPair table_one(BellKind outcome1, BellKind outcome2);

/// True when same-basis measurements on the two halves of `kind` agree.
bool correlated(BellKind kind, Basis basis);

}  // namespace qss::frame
