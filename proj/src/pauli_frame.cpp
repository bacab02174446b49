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

#include "qss/pauli_frame.hpp"

#include <array>

namespace qss::frame {

namespace {

// Indexed by PauliOp.
constexpr std::array<unsigned, 4> kCodeOfOp = {0b00, 0b11, 0b01, 0b10};
// Indexed by code value.
constexpr std::array<PauliOp, 4> kOpOfCode = {PauliOp::U0, PauliOp::U2, PauliOp::U3,
                                              PauliOp::U1};
// Indexed by BellKind: psi- is the identity frame.
constexpr std::array<PauliOp, 4> kFrameOfBell = {PauliOp::U3, PauliOp::U2, PauliOp::U1,
                                                 PauliOp::U0};

BellKind bell_of_frame(PauliOp op) {
  for (BellKind k : kAllBellKinds) {
    if (kFrameOfBell[static_cast<std::size_t>(k)] == op) return k;
  }
  return BellKind::PsiMinus;
}

}  // namespace

TwoBits code_of(PauliOp op) { return TwoBits::from_value(kCodeOfOp[static_cast<std::size_t>(op)]); }

PauliOp op_of(TwoBits code) { return kOpOfCode[code.value()]; }

PauliOp compose(PauliOp a, PauliOp b) { return op_of(code_of(a) ^ code_of(b)); }

PauliOp compose_all(std::span<const PauliOp> ops) {
  PauliOp acc = PauliOp::U0;
  for (PauliOp op : ops) acc = compose(acc, op);
  return acc;
}

PauliOp frame_of(BellKind kind) { return kFrameOfBell[static_cast<std::size_t>(kind)]; }

BellKind bell_after(BellKind start, PauliOp op) { return bell_of_frame(compose(frame_of(start), op)); }

PauliOp correction_for(BellKind outcome) { return frame_of(outcome); }

CorrectionPair table_one(BellKind outcome1, BellKind outcome2) {
  return {correction_for(outcome1), correction_for(outcome2)};
}

bool correlated(BellKind kind, Basis basis) {
  if (basis == Basis::Z) return kind == BellKind::PhiPlus || kind == BellKind::PhiMinus;
  return kind == BellKind::PhiPlus || kind == BellKind::PsiPlus;
}

}  // namespace qss::frame
