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
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "qss/config.hpp"
#include "qss/mqssp.hpp"
#include "qss/outcome.hpp"
#include "qss/pauli_frame.hpp"
#include "qss/pauli_op.hpp"
#include "qss/random_source.hpp"
#include "qss/state_vector.hpp"
#include "qss/transcript.hpp"

// Sharing an unknown m-qubit state: the sender teleports it through m
// agent-encrypted psi- pairs, the last agent undoes the Bell-outcome frame
// and, with every other agent's disclosure, the agents' operations.

namespace qss::mqsts {

struct SharePlan {
  std::size_t m = 0;
  std::vector<std::size_t> pair_indices;
  /// Composed agent operation on the C half of each selected pair.
  std::vector<PauliOp> agent_ops;
};

/// One teleportation channel: a register holding the pair (and anything it is
/// entangled with) with the positions of its two halves.
struct ChannelPair {
  StateVector state{2};
  std::size_t a_qubit = 0;
  std::size_t c_qubit = 1;
};

ChannelPair encrypted_pair(PauliOp agent_op, std::size_t max_qubits = StateVector::kDefaultMaxQubits);

struct TeleportResult {
  std::vector<BellKind> outcomes;
  /// unknown qubits, then each channel register in order.
  StateVector joint{1};
  /// Positions of the receiver's halves in `joint`, in unknown-qubit order.
  std::vector<std::size_t> receiver_qubits;
};

/// Bell-measures (x_k, A_k) for k = 0..m-1 in order. With `forced` set, the
/// outcomes are post-selected instead of sampled.
TeleportResult teleport_through(const StateVector& unknown, std::vector<ChannelPair> channels,
                                RandomSource& rng,
                                std::optional<std::span<const BellKind>> forced = std::nullopt);

/// The receiver's pre-correction m-qubit state; throws InvalidStateError if it
/// is still entangled with other qubits.
StateVector receiver_state(const TeleportResult& result);

/// Teleports `unknown` through fresh psi- pairs carrying `plan.agent_ops`.
/// Throws CapacityError when the plan selects fewer than m pairs.
TeleportResult teleport_share(const StateVector& unknown, const SharePlan& plan,
                              RandomSource& rng,
                              std::optional<std::span<const BellKind>> forced = std::nullopt);

struct ReconstructionRecord {
  std::vector<BellKind> bell_outcomes;
  std::vector<std::optional<PauliOp>> disclosed;
  std::vector<PauliOp> corrections;
  bool complete = true;
  double fidelity = 0.0;
};

/// Per-qubit correction: correction_for(outcome) composed with the inverse of
/// the disclosed agent operation.
std::vector<PauliOp> corrections_for(std::span<const BellKind> outcomes,
                                     std::span<const std::optional<PauliOp>> disclosed);

/// Applies the corrections to the receiver's state. A missing disclosure
/// throws IncompleteCooperationError unless `allow_incomplete`, in which case
/// the missing op is taken as U0 and the result is flagged incomplete.
StateVector reconstruct(StateVector received, std::span<const BellKind> outcomes,
                        std::span<const std::optional<PauliOp>> disclosed,
                        ReconstructionRecord* record = nullptr, bool allow_incomplete = false);

// ------------------------------------------------------------- the table ----

struct TableTerm {
  int sign;             // +1 or -1
  unsigned ket;         // 0..3 for |00>, |01>, |10>, |11>
};

/// Pre-correction receiver state for one pair of outcomes, written as the
/// images of a, b, c, d, plus the listed correction pair.
struct TableRow {
  BellKind first;
  BellKind second;
  std::array<TableTerm, 4> terms;
  frame::CorrectionPair correction;
};

const std::array<TableRow, 16>& reference_table();

struct TableCheck {
  TableRow row;
  double max_deviation = 0.0;  // after aligning the global phase
  double corrected_fidelity = 0.0;
  bool pass = false;
};

/// Teleports a fixed 2-qubit state through identity-encrypted pairs with each
/// row's outcomes forced, and compares against the reference rows.
std::vector<TableCheck> verify_table();

// -------------------------------------------------------------- full run ----

struct SharingRun {
  RunOutcome outcome;
  Transcript transcript;
  std::vector<ReconstructionRecord> records;
};

/// Distribution as in secret splitting, then floor(usable / m) blocks (or
/// `config.blocks`) of random m-qubit states teleported to the last agent.
SharingRun run_state_sharing(const ProtocolConfig& config, RandomSource& rng,
                             mqssp::SessionHooks hooks = {});

}  // namespace qss::mqsts
