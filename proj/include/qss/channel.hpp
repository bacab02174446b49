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

#include <cstddef>
#include <map>
#include <optional>
#include <string>
#include <utility>
#include <variant>
#include <vector>

#include "qss/pauli_op.hpp"
#include "qss/random_source.hpp"
#include "qss/state_vector.hpp"

namespace qss::channel {

enum class InterceptBasis { FixedZ, FixedX, Random };

/// Measure each transiting qubit and forward the collapsed eigenstate.
struct InterceptResend {
  InterceptBasis basis = InterceptBasis::Random;
};

/// A dishonest party keeps every transiting qubit and forwards one half of a
/// freshly prepared psi- pair instead.
struct FakeBellSignal {};

struct NoAdversary {};

using Adversary = std::variant<NoAdversary, InterceptResend, FakeBellSignal>;

std::string describe(const Adversary& adversary);

struct ChannelModel {
  double loss_prob = 0.0;
  double depolarize_prob = 0.0;
  Adversary adversary = NoAdversary{};
  /// Abstract Trojan-horse capability: the operations the receiving party
  /// applies after this leg are leaked to the adversary. No optics modeled.
  bool trojan_leak = false;

  /// Throws ConfigError when a probability is outside [0, 1].
  void validate() const;
  bool is_ideal() const;
};

enum class SlotStatus { Delivered, Lost };

enum class TamperAction { Intercept, Substitute, Recapture, SwapBack, TrojanLeak };

std::string_view to_string(TamperAction action);

/// One thing the adversary did, and what it learned from it.
struct TamperEntry {
  std::string leg;
  std::string slot;
  TamperAction action;
  std::optional<Basis> basis;
  std::optional<int> learned_bit;
  std::optional<PauliOp> learned_op;
};

struct TransmitResult {
  SlotStatus status = SlotStatus::Delivered;
  /// Where the transiting photon sits in the returned register.
  std::size_t forwarded_qubit = 0;
  std::optional<PauliOp> noise;
  std::vector<TamperEntry> tamper_log;
};

struct InterceptResult {
  StateVector state;
  int learned_bit;
  Basis basis_used;
};

InterceptResult intercept_resend(StateVector joint, std::size_t qubit, InterceptBasis strategy,
                                 RandomSource& rng);

/// Reservoir and private register of a fake-Bell-signal adversary for one run.
///
/// Substituted qubits stay inside the slot's joint register; the store only
/// remembers which positions the adversary owns.
class FakeSignalStore {
 public:
  explicit FakeSignalStore(std::size_t reservoir) : remaining_(reservoir) {}

  struct Held {
    std::size_t kept_qubit;  // the genuine photon
    std::size_t own_half;    // adversary's half of its own pair
  };

  struct Forwarded {
    StateVector state;
    std::size_t forwarded_qubit;
    std::optional<PauliOp> learned;
  };

  std::size_t remaining() const { return remaining_; }
  std::size_t substitutions() const { return held_.size(); }
  const Held* find(const std::string& slot) const;

  /// Keeps `incoming_qubit` and forwards a fresh psi- half appended to the
  /// register. Throws ConfigError when the reservoir is empty.
  Forwarded substitute(StateVector joint, std::size_t incoming_qubit, const std::string& slot);

  /// The fake half comes back carrying the honest parties' operations: Bell
  /// measuring it with the adversary's own half reveals their composition,
  /// which is then applied to the genuine photon before it is forwarded.
  Forwarded recapture(StateVector joint, std::size_t incoming_qubit, const std::string& slot,
                      RandomSource& rng);

  /// The partner of the kept photon arrives on another sequence: Bell
  /// measuring (partner, kept) reveals the composed operation on that pair,
  /// which is written onto the adversary's own half and forwarded in place of
  /// the partner so the receiver's Bell measurement stays consistent.
  Forwarded swap_back(StateVector joint, std::size_t incoming_partner, const std::string& slot,
                      RandomSource& rng);

 private:
  std::size_t remaining_;
  std::map<std::string, Held> held_;
};

/// Per-transmission context: which leg and slot this is, and the adversary
/// register when the model needs one.
struct TransmitContext {
  std::string leg;
  std::string slot;
  FakeSignalStore* store = nullptr;
};

/// Loss first (measure in Z and discard), then depolarizing noise (uniform
/// U1/U2/U3), then the adversary on delivered photons.
std::pair<StateVector, TransmitResult> transmit(StateVector joint, std::size_t slot_qubit,
                                                const ChannelModel& model, RandomSource& rng,
                                                const TransmitContext& context = {});

}  // namespace qss::channel
