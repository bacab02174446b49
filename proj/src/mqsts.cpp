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

#include "qss/mqsts.hpp"

#include <algorithm>
#include <cmath>
#include <complex>

#include "qss/errors.hpp"

namespace qss::mqsts {

using BK = BellKind;

ChannelPair encrypted_pair(PauliOp agent_op, std::size_t max_qubits) {
  const StateVector bell = make_bell(BK::PsiMinus);
  ChannelPair pair{StateVector::from_amplitudes(
      {bell.amplitudes().begin(), bell.amplitudes().end()}, max_qubits)};
  pair.state = apply_pauli(std::move(pair.state), pair.c_qubit, agent_op);
  return pair;
}

TeleportResult teleport_through(const StateVector& unknown, std::vector<ChannelPair> channels,
                                RandomSource& rng,
                                std::optional<std::span<const BellKind>> forced) {
  const std::size_t m = unknown.n_qubits();
  if (channels.size() < m) {
    throw CapacityError("teleporting " + std::to_string(m) + " qubits needs " +
                        std::to_string(m) + " pairs, got " + std::to_string(channels.size()));
  }
  if (forced && forced->size() != m) throw ArgumentError("one forced outcome per qubit");
  TeleportResult out;
  out.joint = unknown;
  std::vector<std::size_t> a_positions;
  std::size_t offset = m;
  for (std::size_t k = 0; k < m; ++k) {
    out.joint = tensor(out.joint, channels[k].state);
    a_positions.push_back(offset + channels[k].a_qubit);
    out.receiver_qubits.push_back(offset + channels[k].c_qubit);
    offset += channels[k].state.n_qubits();
  }
  for (std::size_t k = 0; k < m; ++k) {
    if (forced) {
      out.joint = bell_project(std::move(out.joint), k, a_positions[k], (*forced)[k]);
      out.outcomes.push_back((*forced)[k]);
    } else {
      auto [kind, state] = bell_measure(std::move(out.joint), k, a_positions[k], rng);
      out.joint = std::move(state);
      out.outcomes.push_back(kind);
    }
  }
  return out;
}

StateVector receiver_state(const TeleportResult& result) {
  return extract_factor(result.joint, result.receiver_qubits);
}

TeleportResult teleport_share(const StateVector& unknown, const SharePlan& plan,
                              RandomSource& rng,
                              std::optional<std::span<const BellKind>> forced) {
  if (plan.m != unknown.n_qubits()) throw ArgumentError("plan size differs from the state size");
  if (plan.agent_ops.size() < plan.m) {
    throw CapacityError("share plan selects fewer pairs than qubits to teleport");
  }
  std::vector<ChannelPair> channels;
  for (std::size_t k = 0; k < plan.m; ++k) {
    channels.push_back(encrypted_pair(plan.agent_ops[k], unknown.max_qubits()));
  }
  return teleport_through(unknown, std::move(channels), rng, forced);
}

std::vector<PauliOp> corrections_for(std::span<const BellKind> outcomes,
                                     std::span<const std::optional<PauliOp>> disclosed) {
  std::vector<PauliOp> out;
  for (std::size_t k = 0; k < outcomes.size(); ++k) {
    const PauliOp agents = k < disclosed.size() ? disclosed[k].value_or(PauliOp::U0) : PauliOp::U0;
    out.push_back(frame::compose(frame::correction_for(outcomes[k]), frame::inverse(agents)));
  }
  return out;
}

StateVector reconstruct(StateVector received, std::span<const BellKind> outcomes,
                        std::span<const std::optional<PauliOp>> disclosed,
                        ReconstructionRecord* record, bool allow_incomplete) {
  if (outcomes.size() != received.n_qubits()) {
    throw ArgumentError("one Bell outcome per received qubit is required");
  }
  bool complete = disclosed.size() == outcomes.size();
  for (const auto& d : disclosed) complete = complete && d.has_value();
  if (!complete && !allow_incomplete) {
    throw IncompleteCooperationError("reconstruction needs every agent's disclosed operations");
  }
  const auto corrections = corrections_for(outcomes, disclosed);
  for (std::size_t k = 0; k < corrections.size(); ++k) {
    received = apply_pauli(std::move(received), k, corrections[k]);
  }
  if (record != nullptr) {
    record->bell_outcomes.assign(outcomes.begin(), outcomes.end());
    record->disclosed.assign(disclosed.begin(), disclosed.end());
    record->corrections = corrections;
    record->complete = complete;
  }
  return received;
}

// ------------------------------------------------------------- the table ----

namespace {

using U = PauliOp;

constexpr TableRow row(BK o1, BK o2, std::array<TableTerm, 4> terms, U c1, U c2) {
  return {o1, o2, terms, {c1, c2}};
}

// Ket codes: 0 = |00>, 1 = |01>, 2 = |10>, 3 = |11>.
constexpr std::array<TableRow, 16> kTable = {{
    row(BK::PhiPlus, BK::PhiPlus, {{{1, 3}, {-1, 2}, {-1, 1}, {1, 0}}}, U::U3, U::U3),
    row(BK::PhiPlus, BK::PhiMinus, {{{1, 3}, {1, 2}, {-1, 1}, {-1, 0}}}, U::U3, U::U2),
    row(BK::PhiPlus, BK::PsiPlus, {{{1, 2}, {-1, 3}, {-1, 0}, {1, 1}}}, U::U3, U::U1),
    row(BK::PhiPlus, BK::PsiMinus, {{{1, 2}, {1, 3}, {-1, 0}, {-1, 1}}}, U::U3, U::U0),
    row(BK::PhiMinus, BK::PhiPlus, {{{1, 3}, {-1, 2}, {1, 1}, {-1, 0}}}, U::U2, U::U3),
    row(BK::PhiMinus, BK::PhiMinus, {{{1, 3}, {1, 2}, {1, 1}, {1, 0}}}, U::U2, U::U2),
    row(BK::PhiMinus, BK::PsiPlus, {{{1, 2}, {-1, 3}, {1, 0}, {-1, 1}}}, U::U2, U::U1),
    row(BK::PhiMinus, BK::PsiMinus, {{{1, 2}, {1, 3}, {1, 0}, {1, 1}}}, U::U2, U::U0),
    row(BK::PsiPlus, BK::PhiPlus, {{{1, 1}, {-1, 0}, {-1, 3}, {1, 2}}}, U::U1, U::U3),
    row(BK::PsiPlus, BK::PhiMinus, {{{1, 1}, {1, 0}, {-1, 3}, {-1, 2}}}, U::U1, U::U2),
    row(BK::PsiPlus, BK::PsiPlus, {{{1, 0}, {-1, 1}, {-1, 2}, {1, 3}}}, U::U1, U::U1),
    row(BK::PsiPlus, BK::PsiMinus, {{{1, 0}, {1, 1}, {-1, 2}, {-1, 3}}}, U::U1, U::U0),
    row(BK::PsiMinus, BK::PhiPlus, {{{1, 1}, {-1, 0}, {1, 3}, {-1, 2}}}, U::U0, U::U3),
    row(BK::PsiMinus, BK::PhiMinus, {{{1, 1}, {1, 0}, {1, 3}, {1, 2}}}, U::U0, U::U2),
    row(BK::PsiMinus, BK::PsiPlus, {{{1, 0}, {-1, 1}, {1, 2}, {-1, 3}}}, U::U0, U::U1),
    row(BK::PsiMinus, BK::PsiMinus, {{{1, 0}, {1, 1}, {1, 2}, {1, 3}}}, U::U0, U::U0),
}};

}  // namespace

const std::array<TableRow, 16>& reference_table() { return kTable; }

std::vector<TableCheck> verify_table() {
  const StateVector input = StateVector::normalized(
      {{0.3, 0.1}, {-0.2, 0.5}, {0.4, -0.35}, {0.15, 0.55}});
  RandomSource unused(0);
  std::vector<TableCheck> checks;
  for (const auto& row : kTable) {
    TableCheck check{row};
    const std::array<BellKind, 2> forced = {row.first, row.second};
    const SharePlan plan{2, {0, 1}, {PauliOp::U0, PauliOp::U0}};
    const StateVector got =
        receiver_state(teleport_share(input, plan, unused, std::span<const BellKind>(forced)));

    std::vector<Amplitude> predicted(4);
    for (std::size_t i = 0; i < 4; ++i) {
      predicted[row.terms[i].ket] += static_cast<double>(row.terms[i].sign) * input[i];
    }
    Amplitude overlap{};
    for (std::size_t i = 0; i < 4; ++i) overlap += std::conj(predicted[i]) * got[i];
    const Amplitude phase = std::abs(overlap) > 0 ? overlap / std::abs(overlap) : Amplitude{1};
    for (std::size_t i = 0; i < 4; ++i) {
      check.max_deviation = std::max(check.max_deviation, std::abs(got[i] - phase * predicted[i]));
    }

    StateVector corrected = apply_pauli(got, 0, row.correction.first);
    corrected = apply_pauli(std::move(corrected), 1, row.correction.second);
    check.corrected_fidelity = fidelity(corrected, input);
    check.pass = check.max_deviation <= kFidelityTolerance &&
                 std::abs(1.0 - check.corrected_fidelity) <= kFidelityTolerance &&
                 frame::table_one(row.first, row.second) == row.correction;
    checks.push_back(check);
  }
  return checks;
}

// -------------------------------------------------------------- full run ----

SharingRun run_state_sharing(const ProtocolConfig& config, RandomSource& rng,
                             mqssp::SessionHooks hooks) {
  if (config.protocol != ProtocolKind::Mqsts) throw ConfigError("not a state sharing config");
  mqssp::Session session(config, rng, std::move(hooks));
  SharingRun run;
  if (session.distribute()) {
    const auto usable = session.usable_pairs();
    const std::size_t m = config.m;
    const std::size_t blocks = config.blocks > 0 ? config.blocks : usable.size() / m;
    if (blocks == 0 || blocks * m > usable.size()) {
      session.abort_run("capacity", 0.0);
    } else {
      auto& pairs = session.pairs();
      auto& transcript = session.transcript();
      const std::string alice = mqssp::party_name(mqssp::kSender, config.n_agents);
      const std::string last = mqssp::party_name(config.n_agents, config.n_agents);
      for (std::size_t b = 0; b < blocks; ++b) {
        const std::vector<std::size_t> selected(usable.begin() + static_cast<std::ptrdiff_t>(b * m),
                                                usable.begin() + static_cast<std::ptrdiff_t>((b + 1) * m));
        const StateVector unknown = random_state(m, rng, config.max_qubits);
        std::vector<ChannelPair> channels;
        for (auto idx : selected) {
          channels.push_back({pairs[idx].state, pairs[idx].a_qubit, pairs[idx].c_qubit});
        }
        TeleportResult tr = teleport_through(unknown, std::move(channels), rng);

        std::string bits;
        std::vector<std::string> names;
        for (std::size_t k = 0; k < m; ++k) {
          auto& p = pairs[selected[k]];
          p.bell_outcome = tr.outcomes[k];
          p.status = mqssp::PairStatus::Consumed;
          append_bits(bits, static_cast<unsigned>(tr.outcomes[k]), 2);
          names.emplace_back(to_string(tr.outcomes[k]));
        }
        transcript.record("IV", alice, "bell_measure", Traffic::Private, {}, 0,
                          {{"block", b}, {"pairs", selected}});
        transcript.record("V", alice, "publish_bell_outcomes", Traffic::Protocol, std::move(bits),
                          0, {{"block", b}, {"outcomes", names}});

        const auto composed = session.cooperative_ops(selected, "V");
        std::vector<std::optional<PauliOp>> disclosed;
        for (auto idx : selected) disclosed.push_back(composed.at(idx));

        ReconstructionRecord record;
        const auto corrections = corrections_for(tr.outcomes, disclosed);
        StateVector joint = std::move(tr.joint);
        for (std::size_t k = 0; k < m; ++k) {
          joint = apply_pauli(std::move(joint), tr.receiver_qubits[k], corrections[k]);
        }
        record.bell_outcomes = tr.outcomes;
        record.disclosed = disclosed;
        record.corrections = corrections;
        record.complete = session.outcome().decoding_complete;
        record.fidelity = reduced_fidelity(joint, tr.receiver_qubits, unknown);
        transcript.record("V", last, "reconstruct", Traffic::Private, {}, 0,
                          {{"block", b}, {"fidelity", record.fidelity}});
        session.outcome().fidelities.push_back(record.fidelity);
        run.records.push_back(std::move(record));
      }
      for (std::size_t i = blocks * m; i < usable.size(); ++i) {
        pairs[usable[i]].status = mqssp::PairStatus::Discarded;
      }
      session.outcome().verdict = {true, {}, 0.0};
    }
  }
  run.outcome = session.finish();
  run.transcript = session.take_transcript();
  return run;
}

}  // namespace qss::mqsts
