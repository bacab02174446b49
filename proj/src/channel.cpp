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

#include "qss/channel.hpp"

#include "qss/errors.hpp"
#include "qss/pauli_frame.hpp"

namespace qss::channel {

namespace {

Basis pick_basis(InterceptBasis strategy, RandomSource& rng) {
  switch (strategy) {
    case InterceptBasis::FixedZ: return Basis::Z;
    case InterceptBasis::FixedX: return Basis::X;
    case InterceptBasis::Random: return rng.bit() ? Basis::X : Basis::Z;
  }
  return Basis::Z;
}

}  // namespace

std::string describe(const Adversary& adversary) {
  if (std::holds_alternative<NoAdversary>(adversary)) return "none";
  if (std::holds_alternative<FakeBellSignal>(adversary)) return "fake_bell_signal";
  switch (std::get<InterceptResend>(adversary).basis) {
    case InterceptBasis::FixedZ: return "intercept_resend(z)";
    case InterceptBasis::FixedX: return "intercept_resend(x)";
    case InterceptBasis::Random: return "intercept_resend(random)";
  }
  return "?";
}

void ChannelModel::validate() const {
  auto in_unit = [](double p) { return p >= 0.0 && p <= 1.0; };
  if (!in_unit(loss_prob)) throw ConfigError("loss_prob must be in [0, 1]");
  if (!in_unit(depolarize_prob)) throw ConfigError("depolarize_prob must be in [0, 1]");
}

bool ChannelModel::is_ideal() const {
  return loss_prob == 0.0 && depolarize_prob == 0.0 &&
         std::holds_alternative<NoAdversary>(adversary) && !trojan_leak;
}

std::string_view to_string(TamperAction action) {
  switch (action) {
    case TamperAction::Intercept: return "intercept";
    case TamperAction::Substitute: return "substitute";
    case TamperAction::Recapture: return "recapture";
    case TamperAction::SwapBack: return "swap_back";
    case TamperAction::TrojanLeak: return "trojan_leak";
  }
  return "?";
}

InterceptResult intercept_resend(StateVector joint, std::size_t qubit, InterceptBasis strategy,
                                 RandomSource& rng) {
  joint.mask_of(qubit);
  const Basis basis = pick_basis(strategy, rng);
  auto [bit, collapsed] = measure(std::move(joint), qubit, basis, rng);
  return {std::move(collapsed), bit, basis};
}

const FakeSignalStore::Held* FakeSignalStore::find(const std::string& slot) const {
  auto it = held_.find(slot);
  return it == held_.end() ? nullptr : &it->second;
}

FakeSignalStore::Forwarded FakeSignalStore::substitute(StateVector joint,
                                                       std::size_t incoming_qubit,
                                                       const std::string& slot) {
  joint.mask_of(incoming_qubit);
  if (remaining_ == 0) throw ConfigError("fake-signal reservoir exhausted");
  if (held_.contains(slot)) throw ArgumentError("slot '" + slot + "' already substituted");
  --remaining_;
  const std::size_t own = joint.n_qubits();
  StateVector extended = tensor(joint, make_bell(BellKind::PsiMinus));
  held_[slot] = Held{incoming_qubit, own};
  return {std::move(extended), own + 1, std::nullopt};
}

FakeSignalStore::Forwarded FakeSignalStore::recapture(StateVector joint,
                                                      std::size_t incoming_qubit,
                                                      const std::string& slot,
                                                      RandomSource& rng) {
  auto it = held_.find(slot);
  if (it == held_.end()) throw ArgumentError("no substitution recorded for '" + slot + "'");
  const Held held = it->second;
  auto [kind, measured] = bell_measure(std::move(joint), held.own_half, incoming_qubit, rng);
  const PauliOp learned = frame::frame_of(kind);
  StateVector restored = apply_pauli(std::move(measured), held.kept_qubit, learned);
  held_.erase(it);
  return {std::move(restored), held.kept_qubit, learned};
}

FakeSignalStore::Forwarded FakeSignalStore::swap_back(StateVector joint,
                                                      std::size_t incoming_partner,
                                                      const std::string& slot,
                                                      RandomSource& rng) {
  auto it = held_.find(slot);
  if (it == held_.end()) throw ArgumentError("no substitution recorded for '" + slot + "'");
  const Held held = it->second;
  auto [kind, measured] = bell_measure(std::move(joint), incoming_partner, held.kept_qubit, rng);
  const PauliOp learned = frame::frame_of(kind);
  StateVector forged = apply_pauli(std::move(measured), held.own_half, learned);
  held_.erase(it);
  return {std::move(forged), held.own_half, learned};
}

std::pair<StateVector, TransmitResult> transmit(StateVector joint, std::size_t slot_qubit,
                                                const ChannelModel& model, RandomSource& rng,
                                                const TransmitContext& context) {
  joint.mask_of(slot_qubit);
  TransmitResult result;
  result.forwarded_qubit = slot_qubit;
  if (model.is_ideal()) return {std::move(joint), std::move(result)};

  if (rng.bernoulli(model.loss_prob)) {
    auto [bit, collapsed] = measure(std::move(joint), slot_qubit, Basis::Z, rng);
    (void)bit;
    result.status = SlotStatus::Lost;
    return {std::move(collapsed), std::move(result)};
  }
  if (rng.bernoulli(model.depolarize_prob)) {
    const auto op = static_cast<PauliOp>(1 + rng.below(3));
    joint = apply_pauli(std::move(joint), slot_qubit, op);
    result.noise = op;
  }
  if (const auto* ir = std::get_if<InterceptResend>(&model.adversary)) {
    auto out = intercept_resend(std::move(joint), slot_qubit, ir->basis, rng);
    joint = std::move(out.state);
    result.tamper_log.push_back(
        {context.leg, context.slot, TamperAction::Intercept, out.basis_used, out.learned_bit, {}});
  } else if (std::holds_alternative<FakeBellSignal>(model.adversary)) {
    if (context.store == nullptr) {
      throw ConfigError("fake_bell_signal adversary on leg '" + context.leg +
                        "' has no adversary register");
    }
    auto out = context.store->substitute(std::move(joint), slot_qubit, context.slot);
    joint = std::move(out.state);
    result.forwarded_qubit = out.forwarded_qubit;
    result.tamper_log.push_back(
        {context.leg, context.slot, TamperAction::Substitute, {}, {}, {}});
  }
  return {std::move(joint), std::move(result)};
}

}  // namespace qss::channel
