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

#include "qss/mqssp.hpp"

#include <algorithm>
#include <array>
#include <set>

#include "qss/errors.hpp"
#include "qss/pauli_frame.hpp"

namespace qss::mqssp {

// ------------------------------------------------------------- parties ----

std::string party_name(std::size_t ordinal, std::size_t n_agents) {
  static constexpr std::array<const char*, 8> kNames = {"Alice", "Bob",   "Charlie", "Dick",
                                                        "Emma",  "Frank", "Grace",   "Henry"};
  if (ordinal == 0) return kNames[0];
  if (n_agents >= 3 && ordinal == n_agents) return "Zach";
  if (ordinal < kNames.size()) return kNames[ordinal];
  return "Agent" + std::to_string(ordinal);
}

PartyId PartyId::sender() { return {PartyRole::Sender, kSender, party_name(kSender, 2)}; }

PartyId PartyId::agent(std::size_t ordinal, std::size_t n_agents) {
  if (ordinal < 1 || ordinal > n_agents) throw ArgumentError("agent ordinal out of range");
  return {PartyRole::Agent, ordinal, party_name(ordinal, n_agents)};
}

std::string_view to_string(PairStatus status) {
  switch (status) {
    case PairStatus::InTransit: return "in_transit";
    case PairStatus::Held: return "held";
    case PairStatus::Consumed: return "consumed";
    case PairStatus::Lost: return "lost";
    case PairStatus::Sample: return "sample";
    case PairStatus::Discarded: return "discarded";
  }
  return "?";
}

// ------------------------------------------------------------ register ----

PairRegister::PairRegister(std::size_t n_pairs, std::size_t max_qubits) {
  const StateVector bell = make_bell(BellKind::PsiMinus);
  const StateVector state = StateVector::from_amplitudes(
      {bell.amplitudes().begin(), bell.amplitudes().end()}, max_qubits);
  pairs_.resize(n_pairs);
  for (std::size_t i = 0; i < n_pairs; ++i) {
    pairs_[i].index = i;
    pairs_[i].state = state;
    pairs_[i].a_holder = 1;
    pairs_[i].c_holder = 1;
  }
}

std::vector<std::size_t> PairRegister::with_status(PairStatus status) const {
  std::vector<std::size_t> out;
  for (const auto& p : pairs_) {
    if (p.status == status) out.push_back(p.index);
  }
  return out;
}

std::vector<std::size_t> PairRegister::held_where(
    const std::function<bool(const PairRecord&)>& pred) const {
  std::vector<std::size_t> out;
  for (const auto& p : pairs_) {
    if (p.status == PairStatus::Held && (!pred || pred(p))) out.push_back(p.index);
  }
  return out;
}

PauliOp PairRegister::agent_ops(std::size_t index, std::size_t first, std::size_t last) const {
  PauliOp acc = PauliOp::U0;
  for (const auto& applied : pairs_.at(index).applied_ops) {
    if (applied.party >= first && applied.party <= last) acc = frame::compose(acc, applied.op);
  }
  return acc;
}

PauliOp PairRegister::all_ops(std::size_t index) const {
  PauliOp acc = PauliOp::U0;
  for (const auto& applied : pairs_.at(index).applied_ops) acc = frame::compose(acc, applied.op);
  return acc;
}

std::optional<PauliOp> PairRegister::op_by(std::size_t index, std::size_t party) const {
  std::optional<PauliOp> found;
  for (const auto& applied : pairs_.at(index).applied_ops) {
    if (applied.party == party) found = frame::compose(found.value_or(PauliOp::U0), applied.op);
  }
  return found;
}

void PairRegister::apply(std::size_t index, std::size_t party, PauliOp op) {
  auto& p = pairs_.at(index);
  const std::size_t qubit = party == kSender ? p.a_qubit : p.c_qubit;
  p.state = apply_pauli(std::move(p.state), qubit, op);
  p.applied_ops.push_back({party, op});
}

// -------------------------------------------------------------- checks ----

double CheckResult::error_rate() const {
  if (samples.empty()) throw StatisticsError("error rate over an empty sample");
  return static_cast<double>(errors) / static_cast<double>(samples.size());
}

namespace {

Basis random_basis(RandomSource& rng) { return rng.bit() ? Basis::X : Basis::Z; }

int measure_in_place(PairRecord& p, std::size_t qubit, Basis basis, RandomSource& rng) {
  auto [bit, collapsed] = measure(std::move(p.state), qubit, basis, rng);
  p.state = std::move(collapsed);
  return bit;
}

PauliOp disclosed_frame(const std::map<std::size_t, PauliOp>& disclosed, std::size_t pair) {
  auto it = disclosed.find(pair);
  if (it == disclosed.end()) {
    throw ProtocolOrderError("operation disclosure missing for pair " + std::to_string(pair));
  }
  return it->second;
}

}  // namespace

CheckResult first_check(PairRegister& pairs, std::span<const std::size_t> sample,
                        RandomSource& rng) {
  if (sample.empty()) throw StatisticsError("first check needs at least one sample");
  CheckResult result;
  for (auto idx : sample) {
    auto& p = pairs[idx];
    CheckSample s{.pair = idx, .basis = random_basis(rng)};
    s.partner_bit = measure_in_place(p, p.c_qubit, s.basis, rng);
    s.checker_bit = measure_in_place(p, p.a_qubit, s.basis, rng);
    s.expect_equal = false;
    s.error = s.checker_bit == s.partner_bit;
    p.status = PairStatus::Sample;
    result.errors += s.error ? 1 : 0;
    result.samples.push_back(s);
  }
  return result;
}

CheckResult correlation_check(PairRegister& pairs, std::span<const std::size_t> sample,
                              const std::map<std::size_t, PauliOp>& disclosed,
                              RandomSource& rng) {
  for (auto idx : sample) disclosed_frame(disclosed, idx);
  CheckResult result;
  for (auto idx : sample) {
    auto& p = pairs[idx];
    const BellKind expected = frame::bell_after(BellKind::PsiMinus, disclosed_frame(disclosed, idx));
    CheckSample s{.pair = idx, .basis = random_basis(rng), .hadamard = p.hadamard_marked};
    s.checker_bit = measure_in_place(p, p.a_qubit, s.basis, rng);
    if (p.hadamard_marked) p.state = apply_hadamard(std::move(p.state), p.c_qubit);
    s.partner_bit = measure_in_place(p, p.c_qubit, s.basis, rng);
    s.expect_equal = frame::correlated(expected, s.basis);
    s.error = (s.checker_bit == s.partner_bit) != s.expect_equal;
    p.status = PairStatus::Sample;
    result.errors += s.error ? 1 : 0;
    result.samples.push_back(s);
  }
  return result;
}

SecondCheckResult second_check(PairRegister& pairs, std::span<const std::size_t> both,
                               std::span<const std::size_t> single,
                               const std::map<std::size_t, PauliOp>& disclosed,
                               RandomSource& rng) {
  for (auto idx : single) disclosed_frame(disclosed, idx);
  SecondCheckResult out;
  out.pairs_checked = correlation_check(pairs, both, disclosed, rng);
  for (auto idx : single) {
    auto& p = pairs[idx];
    const BellKind kind = frame::bell_after(BellKind::PsiMinus, disclosed_frame(disclosed, idx));
    Decoy d{.pair = idx, .basis = random_basis(rng)};
    const int a_bit = measure_in_place(p, p.a_qubit, d.basis, rng);
    d.expected_bit = frame::correlated(kind, d.basis) ? a_bit : 1 - a_bit;
    p.status = PairStatus::Sample;
    out.decoys.push_back(d);
  }
  return out;
}

CheckResult decoy_check(PairRegister& pairs, std::span<const Decoy> decoys,
                        std::span<const std::size_t> payload_positions, RandomSource& rng) {
  std::set<std::size_t> taken(payload_positions.begin(), payload_positions.end());
  for (const auto& d : decoys) {
    if (!taken.insert(d.position).second) {
      throw std::logic_error("decoy position " + std::to_string(d.position) +
                             " collides with another slot");
    }
  }
  CheckResult result;
  for (const auto& d : decoys) {
    if (d.lost) continue;
    auto& p = pairs[d.pair];
    CheckSample s{.pair = d.pair, .basis = d.basis, .checker_bit = d.expected_bit};
    s.partner_bit = measure_in_place(p, p.c_qubit, d.basis, rng);
    s.expect_equal = true;
    s.error = s.partner_bit != d.expected_bit;
    result.errors += s.error ? 1 : 0;
    result.samples.push_back(s);
  }
  return result;
}

frame::TwoBits decode_block(BellKind outcome, PauliOp agents_composed) {
  return frame::code_of(frame::compose(frame::frame_of(outcome), frame::inverse(agents_composed)));
}

// ------------------------------------------------------------- session ----

namespace {

const char* phase_name(Session::Phase phase) {
  switch (phase) {
    case Session::Phase::Created: return "created";
    case Session::Phase::PairsPrepared: return "pairs-prepared";
    case Session::Phase::SaDelivered: return "sa-delivered";
    case Session::Phase::FirstChecked: return "first-checked";
    case Session::Phase::ScReturned: return "sc-returned";
    case Session::Phase::SecondChecked: return "second-checked";
    case Session::Phase::DecoysChecked: return "decoys-checked";
    case Session::Phase::Encoded: return "encoded";
    case Session::Phase::SaFinalDelivered: return "sa-final-delivered";
    case Session::Phase::BellMeasured: return "bell-measured";
    case Session::Phase::FinalChecked: return "final-checked";
    case Session::Phase::Decoded: return "decoded";
    case Session::Phase::Aborted: return "aborted";
  }
  return "?";
}

std::vector<std::size_t> merged(std::vector<std::size_t> a, std::span<const std::size_t> b) {
  a.insert(a.end(), b.begin(), b.end());
  std::sort(a.begin(), a.end());
  a.erase(std::unique(a.begin(), a.end()), a.end());
  return a;
}

std::vector<std::size_t> without(std::span<const std::size_t> all,
                                 std::span<const std::size_t> removed) {
  std::set<std::size_t> drop(removed.begin(), removed.end());
  std::vector<std::size_t> out;
  for (auto x : all) {
    if (!drop.contains(x)) out.push_back(x);
  }
  return out;
}

std::string slot_of(std::size_t pair) { return "pair:" + std::to_string(pair); }

nlohmann::json ops_json(std::span<const PauliOp> ops) {
  nlohmann::json j = nlohmann::json::array();
  for (auto op : ops) j.push_back(std::string(to_string(op)));
  return j;
}

}  // namespace

Session::Session(ProtocolConfig config, RandomSource& rng, SessionHooks hooks)
    : config_(std::move(config)), rng_(rng), hooks_(std::move(hooks)) {
  validate(config_);
  counts_ = resolve_counts(config_);
  outcome_.protocol = config_.protocol;
  outcome_.seed = config_.seed;
  transcript_.header() = {{"protocol", std::string(to_string(config_.protocol))},
                          {"n_agents", config_.n_agents},
                          {"n_pairs", config_.n_pairs},
                          {"seed", config_.seed},
                          {"threshold", config_.threshold}};
}

void Session::require(Phase expected, const char* what) const {
  if (phase_ == Phase::Aborted) {
    throw ProtocolOrderError(std::string(what) + ": session has aborted");
  }
  if (phase_ != expected) {
    throw ProtocolOrderError(std::string(what) + " requires phase '" + phase_name(expected) +
                             "' but the session is at '" + phase_name(phase_) + "'");
  }
}

std::vector<std::size_t> Session::choose(std::vector<std::size_t> candidates,
                                         std::size_t count) {
  count = std::min(count, candidates.size());
  for (std::size_t i = 0; i < count; ++i) {
    const std::size_t j = i + static_cast<std::size_t>(rng_.below(candidates.size() - i));
    std::swap(candidates[i], candidates[j]);
  }
  candidates.resize(count);
  std::sort(candidates.begin(), candidates.end());
  return candidates;
}

void Session::announce_positions(const std::string& step, std::size_t party,
                                 const std::string& action,
                                 std::span<const std::size_t> positions,
                                 std::size_t stream_length, Traffic traffic) {
  std::string bits;
  const std::size_t width = position_width(stream_length);
  for (auto pos : positions) append_bits(bits, pos, width);
  transcript_.record(step, name(party), action, traffic, std::move(bits), 0,
                     {{"positions", std::vector<std::size_t>(positions.begin(), positions.end())}});
}

void Session::publish_check_outcomes(const std::string& step, std::size_t party,
                                     const CheckResult& result, bool partner_side) {
  std::string bits;
  nlohmann::json outcomes = nlohmann::json::array();
  for (const auto& s : result.samples) {
    const int bit = partner_side ? s.partner_bit : s.checker_bit;
    bits.push_back(bit ? '1' : '0');
    outcomes.push_back(bit);
  }
  transcript_.record(step, name(party), "publish_outcomes", Traffic::Check, std::move(bits), 0,
                     {{"outcomes", std::move(outcomes)}});
}

std::map<std::size_t, PauliOp> Session::disclose(std::span<const std::size_t> pair_indices,
                                                 std::size_t last, const std::string& step,
                                                 Traffic traffic) {
  std::map<std::size_t, PauliOp> composed;
  for (auto idx : pair_indices) composed[idx] = PauliOp::U0;
  for (std::size_t agent = 1; agent <= last; ++agent) {
    std::string bits;
    std::vector<PauliOp> ops;
    for (auto idx : pair_indices) {
      const PauliOp op = pairs_.op_by(idx, agent).value_or(PauliOp::U0);
      ops.push_back(op);
      append_bits(bits, frame::code_of(op).value(), 2);
      composed[idx] = frame::compose(composed[idx], op);
    }
    if (pair_indices.empty()) continue;
    transcript_.record(step, name(agent), "disclose_ops", traffic, std::move(bits), 0,
                       {{"agent", agent},
                        {"pairs", std::vector<std::size_t>(pair_indices.begin(), pair_indices.end())},
                        {"ops", ops_json(ops)}});
  }
  return composed;
}

std::map<std::size_t, PauliOp> Session::cooperative_ops(std::span<const std::size_t> pair_indices,
                                                        const std::string& step) {
  std::map<std::size_t, PauliOp> composed;
  for (auto idx : pair_indices) composed[idx] = PauliOp::U0;
  const std::set<std::size_t> withheld(config_.withheld_agents.begin(),
                                       config_.withheld_agents.end());
  for (std::size_t agent = 1; agent < config_.n_agents; ++agent) {
    std::vector<PauliOp> ops;
    std::string bits;
    const bool guessing = withheld.contains(agent);
    for (auto idx : pair_indices) {
      const PauliOp op =
          guessing ? random_op() : pairs_.op_by(idx, agent).value_or(PauliOp::U0);
      ops.push_back(op);
      if (!guessing) append_bits(bits, frame::code_of(op).value(), 2);
      composed[idx] = frame::compose(composed[idx], op);
    }
    nlohmann::json detail = {
        {"agent", agent},
        {"pairs", std::vector<std::size_t>(pair_indices.begin(), pair_indices.end())},
        {"ops", ops_json(ops)}};
    if (guessing) {
      outcome_.decoding_complete = false;
      transcript_.record(step, name(config_.n_agents), "guess_ops", Traffic::Private, {}, 0,
                         std::move(detail));
    } else {
      transcript_.record(step, name(agent), "disclose_ops", Traffic::Cooperation,
                         std::move(bits), 0, std::move(detail));
    }
  }
  return composed;
}

std::vector<std::size_t> Session::usable_pairs() const {
  const auto last = static_cast<int>(config_.n_agents);
  return pairs_.held_where([last](const PairRecord& p) {
    return p.a_holder == static_cast<int>(kSender) && p.c_holder == last;
  });
}

bool Session::conclude_stage(const std::string& stage, const std::string& step,
                             const CheckResult& result) {
  StageStats stats{stage, result.samples.size(), result.errors};
  outcome_.stages.push_back(stats);
  const double rate = result.error_rate();
  const bool pass = rate <= config_.threshold;
  transcript_.record(step, name(kSender), "verdict", Traffic::Check, pass ? "1" : "0", 0,
                     {{"stage", stage},
                      {"samples", stats.samples},
                      {"errors", stats.errors},
                      {"error_rate", rate}});
  if (!pass) abort_run(stage, rate);
  return pass;
}

void Session::abort_run(const std::string& stage, double error_rate) {
  outcome_.verdict = {false, stage, error_rate};
  phase_ = Phase::Aborted;
  transcript_.record("-", name(kSender), "abort", Traffic::Private, {}, 0,
                     {{"stage", stage}, {"error_rate", error_rate}});
}

std::optional<Session::Recapture> Session::recapture_leg_for(const LegId& leg) const {
  const bool splitting = config_.protocol != ProtocolKind::Mqsts;
  const std::size_t n = config_.n_agents;
  switch (leg.kind) {
    case LegKind::SaFirst:
      if (splitting) return Recapture{{LegKind::SaFinal}, false};
      return std::nullopt;
    case LegKind::ScHop:
      if (leg.from_agent + 1 < n - 1) return Recapture{{LegKind::ScHop, leg.from_agent + 1}, false};
      return Recapture{{LegKind::ScReturn}, false};
    case LegKind::ScReturn: return Recapture{{LegKind::ScFinal}, false};
    case LegKind::ScFinal:
      if (splitting) return Recapture{{LegKind::SaFinal}, true};
      return std::nullopt;
    case LegKind::SaFinal: return std::nullopt;
  }
  return std::nullopt;
}

std::vector<std::size_t> Session::transmit_leg(const LegId& leg,
                                               std::span<const std::size_t> stream,
                                               bool sa_photon, std::size_t receiver) {
  const channel::ChannelModel& model = config_.channels.at(leg);
  const std::string leg_name = leg.name();
  channel::FakeSignalStore* store = nullptr;
  if (std::holds_alternative<channel::FakeBellSignal>(model.adversary)) {
    store = &stores_.try_emplace(leg_name, config_.reservoir.value_or(config_.n_pairs))
                 .first->second;
  }
  // Adversaries substituting on an earlier leg that pick their photons up here.
  std::vector<std::pair<std::string, Recapture>> recapturing;
  for (auto& [sub_leg, st] : stores_) {
    if (sub_leg == leg_name) continue;
    for (const LegId candidate :
         {LegId{LegKind::SaFirst}, LegId{LegKind::ScReturn}, LegId{LegKind::ScFinal}}) {
      if (candidate.name() != sub_leg) continue;
      if (auto r = recapture_leg_for(candidate); r && r->leg == leg) {
        recapturing.emplace_back(sub_leg, *r);
      }
    }
    for (std::size_t from = 1; from + 1 < config_.n_agents; ++from) {
      const LegId candidate{LegKind::ScHop, from};
      if (candidate.name() != sub_leg) continue;
      if (auto r = recapture_leg_for(candidate); r && r->leg == leg) {
        recapturing.emplace_back(sub_leg, *r);
      }
    }
  }

  std::vector<std::size_t> lost;
  for (auto idx : stream) {
    auto& p = pairs_[idx];
    const std::string slot = slot_of(idx);
    std::size_t& photon = sa_photon ? p.a_qubit : p.c_qubit;

    for (const auto& [sub_leg, how] : recapturing) {
      auto& st = stores_.at(sub_leg);
      if (st.find(slot) == nullptr) continue;
      const std::string key = sub_leg + "|" + slot;
      PauliOp actual = PauliOp::U0;
      if (how.swap_back) {
        actual = pairs_.all_ops(idx);
      } else {
        // Only operations on the substituted photon's side reach the fake half.
        const bool sender_side = sub_leg == LegId{LegKind::SaFirst}.name();
        const std::size_t since = ops_at_substitution_[key];
        for (std::size_t i = since; i < p.applied_ops.size(); ++i) {
          if ((p.applied_ops[i].party == kSender) == sender_side) {
            actual = frame::compose(actual, p.applied_ops[i].op);
          }
        }
      }
      auto fw = how.swap_back ? st.swap_back(std::move(p.state), photon, slot, rng_)
                              : st.recapture(std::move(p.state), photon, slot, rng_);
      p.state = std::move(fw.state);
      photon = fw.forwarded_qubit;
      outcome_.insights.push_back({idx, sub_leg, *fw.learned, actual, false});
      outcome_.tamper_log.push_back({leg_name, slot,
                                     how.swap_back ? channel::TamperAction::SwapBack
                                                   : channel::TamperAction::Recapture,
                                     std::nullopt, std::nullopt, fw.learned});
    }

    auto [state, result] = channel::transmit(std::move(p.state), photon, model, rng_,
                                             {leg_name, slot, store});
    p.state = std::move(state);
    photon = result.forwarded_qubit;
    for (auto& entry : result.tamper_log) {
      if (entry.action == channel::TamperAction::Substitute) {
        ops_at_substitution_[leg_name + "|" + slot] = p.applied_ops.size();
      }
      outcome_.tamper_log.push_back(std::move(entry));
    }
    int& holder = sa_photon ? p.a_holder : p.c_holder;
    if (result.status == channel::SlotStatus::Lost) {
      holder = kNobody;
      if (p.status == PairStatus::Held) p.status = PairStatus::Lost;
      lost.push_back(idx);
    } else {
      holder = static_cast<int>(receiver);
    }
  }
  return lost;
}

void Session::leak_ops(const LegId& into, std::size_t party,
                       std::span<const std::size_t> pair_indices) {
  if (!config_.channels.at(into).trojan_leak) return;
  for (auto idx : pair_indices) {
    outcome_.tamper_log.push_back({into.name(), slot_of(idx), channel::TamperAction::TrojanLeak,
                                   std::nullopt, std::nullopt, pairs_.op_by(idx, party)});
  }
}

void Session::prepare_pairs() {
  require(Phase::Created, "prepare_pairs");
  pairs_ = PairRegister(config_.n_pairs, config_.max_qubits);
  transcript_.record("2", name(1), "prepare_pairs", Traffic::Private, {}, 0,
                     {{"n_pairs", config_.n_pairs}, {"state", "psi-"}});
  phase_ = Phase::PairsPrepared;
}

void Session::send_sa() {
  require(Phase::PairsPrepared, "send_sa");
  std::vector<std::size_t> stream(pairs_.size());
  for (std::size_t i = 0; i < stream.size(); ++i) stream[i] = i;
  const auto lost = transmit_leg({LegKind::SaFirst}, stream, true, kSender);
  transcript_.record("4", name(1), "send_sa", Traffic::Private, {}, stream.size(),
                     {{"leg", "sa_first"}});
  if (!lost.empty()) {
    announce_positions("4", kSender, "announce_lost", lost, pairs_.size(), Traffic::Protocol);
  }
  phase_ = Phase::SaDelivered;
}

bool Session::run_first_check() {
  require(Phase::SaDelivered, "first_check");
  const auto sample = choose(pairs_.held_where({}), counts_.first_check);
  if (!sample.empty()) {
    announce_positions("4a", kSender, "choose_samples", sample, pairs_.size(), Traffic::Check);
    const CheckResult result = first_check(pairs_, sample, rng_);
    std::string bits;
    for (const auto& s : result.samples) {
      bits.push_back(s.basis == Basis::X ? '1' : '0');
      bits.push_back(s.partner_bit ? '1' : '0');
    }
    transcript_.record("4c", name(1), "publish_bases_outcomes", Traffic::Check, std::move(bits));
    if (!conclude_stage("first_check", "4d", result)) return false;
  }
  phase_ = Phase::FirstChecked;
  return true;
}

bool Session::relay_sc() {
  require(Phase::FirstChecked, "relay_sc");
  const std::size_t n = config_.n_agents;
  for (std::size_t agent = 1; agent <= n - 1; ++agent) {
    const std::string step = agent == 1 ? "5" : (agent == 2 ? "6'" : "7'");
    if (agent >= 2) {
      const auto marked = pairs_.held_where([agent](const PairRecord& p) {
        return p.hadamard_marked && p.hadamard_by == agent - 1;
      });
      const auto regular = choose(
          pairs_.held_where([](const PairRecord& p) { return !p.hadamard_marked; }),
          counts_.hop_check);
      const auto sample = merged(regular, marked);
      if (!sample.empty()) {
        announce_positions(step, kSender, "choose_samples", regular, pairs_.size(), Traffic::Check);
        if (!marked.empty()) {
          announce_positions(step, agent - 1, "publish_hadamard_positions", marked,
                             pairs_.size(), Traffic::Check);
        }
        const auto disclosed = disclose(sample, agent - 1, step, Traffic::Check);
        const CheckResult result = correlation_check(pairs_, sample, disclosed, rng_);
        std::string bases;
        for (const auto& s : result.samples) bases.push_back(s.basis == Basis::X ? '1' : '0');
        transcript_.record(step, name(kSender), "publish_bases", Traffic::Check, std::move(bases));
        publish_check_outcomes(step, agent, result, true);
        if (!conclude_stage("hop_check:" + std::to_string(agent), step, result)) return false;
      }
    }

    const auto held = pairs_.held_where({});
    for (auto idx : held) {
      const PauliOp op = hooks_.agent_op ? hooks_.agent_op(agent, idx, rng_) : random_op();
      pairs_.apply(idx, agent, op);
    }
    transcript_.record(step, name(agent), "encrypt", Traffic::Private, {}, 0,
                       {{"pairs", held.size()}});
    if (agent >= 2) leak_ops({LegKind::ScHop, agent - 1}, agent, held);

    if (agent >= 2 && counts_.hadamard_samples > 0) {
      const auto marks = choose(
          pairs_.held_where([](const PairRecord& p) { return !p.hadamard_marked; }),
          counts_.hadamard_samples);
      for (auto idx : marks) {
        auto& p = pairs_[idx];
        p.state = apply_hadamard(std::move(p.state), p.c_qubit);
        p.hadamard_marked = true;
        p.hadamard_by = agent;
      }
      transcript_.record(step, name(agent), "hadamard_mark", Traffic::Private, {}, 0,
                         {{"pairs", marks}});
    }

    const bool to_sender = agent == n - 1;
    const LegId leg = to_sender ? LegId{LegKind::ScReturn} : LegId{LegKind::ScHop, agent};
    const std::size_t receiver = to_sender ? kSender : agent + 1;
    const auto stream = pairs_.held_where({});
    const auto lost = transmit_leg(leg, stream, false, receiver);
    transcript_.record(step, name(agent), "send_sc", Traffic::Private, {}, stream.size(),
                       {{"leg", leg.name()}});
    if (!lost.empty()) {
      announce_positions(step, receiver, "announce_lost", lost, pairs_.size(), Traffic::Protocol);
    }
  }
  phase_ = Phase::ScReturned;
  return true;
}

bool Session::run_second_check() {
  require(Phase::ScReturned, "second_check");
  const std::size_t n = config_.n_agents;
  const std::string step = n == 2 ? "6" : "9'";
  std::vector<std::size_t> marked;
  if (n >= 3) {
    marked = pairs_.held_where([n](const PairRecord& p) {
      return p.hadamard_marked && p.hadamard_by == n - 1;
    });
  }
  const auto picked =
      choose(pairs_.held_where([](const PairRecord& p) { return !p.hadamard_marked; }),
             counts_.k + counts_.j);
  const auto both_regular = choose(picked, std::min(counts_.k, picked.size()));
  const auto single = without(picked, both_regular);
  const auto both = merged(both_regular, marked);
  const auto all_samples = merged(picked, marked);
  if (!all_samples.empty()) {
    announce_positions(step, kSender, "choose_samples", picked, pairs_.size(), Traffic::Check);
    if (!marked.empty()) {
      announce_positions(step, n - 1, "publish_hadamard_positions", marked, pairs_.size(),
                         Traffic::Check);
    }
  }
  const auto disclosed = disclose(all_samples, n - 1, step, Traffic::Check);
  SecondCheckResult res = second_check(pairs_, both, single, disclosed, rng_);
  decoys_ = std::move(res.decoys);
  transcript_.record(step, name(kSender), "measure_samples", Traffic::Private, {}, 0,
                     {{"both", both}, {"single", single}});
  if (!both.empty() && !conclude_stage("second_check", step, res.pairs_checked)) return false;
  phase_ = Phase::SecondChecked;
  return true;
}

bool Session::send_sc_with_decoys() {
  require(Phase::SecondChecked, "send_sc_with_decoys");
  const std::size_t n = config_.n_agents;
  const std::string step = n == 2 ? "7" : "10'";
  std::vector<std::size_t> stream = pairs_.held_where({});
  for (const auto& d : decoys_) {
    const auto pos = static_cast<std::ptrdiff_t>(rng_.below(stream.size() + 1));
    stream.insert(stream.begin() + pos, d.pair);
  }
  std::map<std::size_t, std::size_t> position_of;
  for (std::size_t pos = 0; pos < stream.size(); ++pos) position_of[stream[pos]] = pos;
  std::vector<std::size_t> payload_positions;
  std::set<std::size_t> decoy_pairs;
  for (auto& d : decoys_) {
    d.position = position_of.at(d.pair);
    decoy_pairs.insert(d.pair);
  }
  for (std::size_t pos = 0; pos < stream.size(); ++pos) {
    if (!decoy_pairs.contains(stream[pos])) payload_positions.push_back(pos);
  }

  const auto lost = transmit_leg({LegKind::ScFinal}, stream, false, n);
  transcript_.record(step, name(kSender), "send_sc", Traffic::Private, {}, stream.size(),
                     {{"leg", "sc_final"}, {"decoys", decoys_.size()}});
  if (!lost.empty()) {
    std::vector<std::size_t> lost_positions;
    for (auto idx : lost) lost_positions.push_back(position_of.at(idx));
    std::sort(lost_positions.begin(), lost_positions.end());
    announce_positions(step, n, "announce_lost", lost_positions, stream.size(),
                       Traffic::Protocol);
    const std::set<std::size_t> lost_set(lost.begin(), lost.end());
    for (auto& d : decoys_) d.lost = lost_set.contains(d.pair);
  }

  if (!decoys_.empty()) {
    std::vector<std::size_t> positions;
    std::string bases;
    for (const auto& d : decoys_) {
      positions.push_back(d.position);
      bases.push_back(d.basis == Basis::X ? '1' : '0');
    }
    announce_positions(step, kSender, "announce_decoys", positions, stream.size(), Traffic::Check);
    transcript_.record(step, name(kSender), "announce_decoy_bases", Traffic::Check,
                       std::move(bases));
    const CheckResult result = decoy_check(pairs_, decoys_, payload_positions, rng_);
    publish_check_outcomes(step, n, result, true);
    if (!result.samples.empty() && !conclude_stage("decoy_check", step, result)) return false;
  }
  phase_ = Phase::DecoysChecked;
  return true;
}

bool Session::distribute() {
  prepare_pairs();
  send_sa();
  return run_first_check() && relay_sc() && run_second_check() && send_sc_with_decoys();
}

bool Session::encode() {
  if (phase_ != Phase::DecoysChecked) return encode(std::string{});
  const std::size_t usable = usable_pairs().size();
  const std::size_t capacity = usable - std::min(usable, counts_.final_check);
  std::string bits;
  const std::string& payload = config_.payload;
  if (payload == "random" || payload.rfind("random:", 0) == 0) {
    const std::size_t length =
        payload == "random" ? 2 * capacity : std::stoull(payload.substr(7));
    bits.reserve(length);
    for (std::size_t i = 0; i < length; ++i) bits.push_back(rng_.bit() ? '1' : '0');
  } else {
    bits = payload;
  }
  return encode(bits);
}

bool Session::encode(const std::string& message_bits) {
  if (config_.protocol == ProtocolKind::Mqsts) {
    throw ProtocolOrderError("state sharing runs do not encode a classical message");
  }
  if (phase_ != Phase::DecoysChecked) {
    throw ProtocolOrderError(
        "message encoding is only allowed after S_C has returned to the sender, passed its "
        "checks and reached the last agent (session at '" +
        std::string(phase_name(phase_)) + "')");
  }
  if (message_bits.size() % 2 != 0) throw ArgumentError("message length must be even");
  const std::string step = config_.n_agents == 2 ? "8" : "11'";
  const auto candidates = usable_pairs();
  final_samples_ = choose(candidates, counts_.final_check);
  const auto rest = without(candidates, final_samples_);
  const std::size_t blocks = message_bits.size() / 2;
  outcome_.payload = message_bits;
  if (blocks > rest.size()) {
    abort_run("capacity", 0.0);
    return false;
  }
  payload_pairs_.assign(rest.begin(), rest.begin() + static_cast<std::ptrdiff_t>(blocks));
  for (std::size_t i = blocks; i < rest.size(); ++i) {
    auto& p = pairs_[rest[i]];
    p.status = PairStatus::Discarded;
  }
  for (auto idx : final_samples_) {
    const PauliOp op = hooks_.sample_op ? hooks_.sample_op(idx, rng_) : random_op();
    pairs_.apply(idx, kSender, op);
    pairs_[idx].final_sample = true;
  }
  for (std::size_t b = 0; b < blocks; ++b) {
    const frame::TwoBits code{static_cast<std::uint8_t>(message_bits[2 * b] - '0'),
                              static_cast<std::uint8_t>(message_bits[2 * b + 1] - '0')};
    pairs_.apply(payload_pairs_[b], kSender, frame::op_of(code));
  }
  transcript_.record(step, name(kSender), "encode", Traffic::Private, {}, 0,
                     {{"payload_pairs", payload_pairs_}, {"samples", final_samples_}});
  leak_ops({LegKind::SaFirst}, kSender, merged(payload_pairs_, final_samples_));
  phase_ = Phase::Encoded;
  return true;
}

void Session::send_sa_final() {
  require(Phase::Encoded, "send_sa_final");
  const std::size_t n = config_.n_agents;
  const auto stream = merged(payload_pairs_, final_samples_);
  const auto lost = transmit_leg({LegKind::SaFinal}, stream, true, n);
  const std::string step = n == 2 ? "8" : "11'";
  transcript_.record(step, name(kSender), "send_sa", Traffic::Private, {}, stream.size(),
                     {{"leg", "sa_final"}});
  if (!lost.empty()) {
    announce_positions(step, n, "announce_lost", lost, pairs_.size(), Traffic::Protocol);
  }
  phase_ = Phase::SaFinalDelivered;
}

void Session::bell_measure_all() {
  require(Phase::SaFinalDelivered, "bell_measure_all");
  const std::size_t n = config_.n_agents;
  std::vector<std::size_t> measured;
  std::vector<std::string> outcomes;
  for (auto idx : merged(payload_pairs_, final_samples_)) {
    auto& p = pairs_[idx];
    if (p.status != PairStatus::Held) continue;
    auto [kind, state] = bell_measure(std::move(p.state), p.a_qubit, p.c_qubit, rng_);
    p.state = std::move(state);
    p.bell_outcome = kind;
    measured.push_back(idx);
    outcomes.emplace_back(to_string(kind));
  }
  transcript_.record(n == 2 ? "9" : "12'", name(n), "bell_measure", Traffic::Private, {}, 0,
                     {{"pairs", measured}, {"outcomes", outcomes}});
  phase_ = Phase::BellMeasured;
}

bool Session::run_final_check() {
  require(Phase::BellMeasured, "final_check");
  const std::size_t n = config_.n_agents;
  const std::string step = n == 2 ? "10" : "13'";
  std::vector<std::size_t> samples;
  for (auto idx : final_samples_) {
    if (pairs_[idx].status == PairStatus::Held && pairs_[idx].bell_outcome) samples.push_back(idx);
  }
  if (!samples.empty()) {
    announce_positions(step, kSender, "announce_samples", samples, pairs_.size(), Traffic::Check);
    const auto disclosed = disclose(samples, n - 1, step, Traffic::Check);
    std::string bits;
    CheckResult result;
    for (auto idx : samples) {
      auto& p = pairs_[idx];
      append_bits(bits, static_cast<unsigned>(*p.bell_outcome), 2);
      const PauliOp expected =
          frame::compose(pairs_.op_by(idx, kSender).value_or(PauliOp::U0), disclosed.at(idx));
      CheckSample s{.pair = idx};
      s.error = frame::frame_of(*p.bell_outcome) != expected;
      result.errors += s.error ? 1 : 0;
      result.samples.push_back(s);
      p.status = PairStatus::Sample;
    }
    transcript_.record(step, name(n), "publish_bell_outcomes", Traffic::Check, std::move(bits));
    if (!conclude_stage("final_check", step, result)) return false;
  }
  phase_ = Phase::FinalChecked;
  return true;
}

void Session::decode() {
  require(Phase::FinalChecked, "decode");
  const std::size_t n = config_.n_agents;
  const std::string step = n == 2 ? "10" : "13'";
  std::vector<std::size_t> delivered_pairs;
  std::string delivered;
  for (std::size_t b = 0; b < payload_pairs_.size(); ++b) {
    const auto& p = pairs_[payload_pairs_[b]];
    if (p.status != PairStatus::Held || !p.bell_outcome) continue;
    delivered_pairs.push_back(payload_pairs_[b]);
    delivered += outcome_.payload.substr(2 * b, 2);
  }
  const auto agents = cooperative_ops(delivered_pairs, step);
  std::string recovered;
  for (auto idx : delivered_pairs) {
    recovered += decode_block(*pairs_[idx].bell_outcome, agents.at(idx)).str();
    pairs_[idx].status = PairStatus::Consumed;
  }
  transcript_.record(step, name(n), "decode", Traffic::Private, {}, 0,
                     {{"pairs", delivered_pairs}, {"recovered", recovered}});
  transcript_.record(step, name(kSender), "collaborate", Traffic::Protocol, "1");
  outcome_.delivered = std::move(delivered);
  outcome_.recovered = std::move(recovered);
  outcome_.erased_blocks = payload_pairs_.size() - delivered_pairs.size();
  outcome_.verdict = {true, {}, 0.0};
  phase_ = Phase::Decoded;
}

RunOutcome Session::finish() {
  std::size_t consumed = 0;
  for (const auto& p : pairs_) consumed += p.status == PairStatus::Consumed ? 1 : 0;
  auto& c = outcome_.counts;
  c.q_t = 2 * config_.n_pairs;
  c.q_u = 2 * consumed;
  c.b_m = config_.protocol == ProtocolKind::Mqsts ? 2 * consumed : outcome_.delivered.size();
  c.b_t = transcript_.bits_of(Traffic::Protocol);
  c.b_t_strict = transcript_.published_bits();
  for (auto& insight : outcome_.insights) {
    insight.payload = pairs_[insight.pair].status == PairStatus::Consumed;
  }
  transcript_.header()["completed"] = outcome_.verdict.completed;
  transcript_.header()["recovered"] =
      outcome_.recovered ? nlohmann::json(*outcome_.recovered) : nlohmann::json(nullptr);
  return std::move(outcome_);
}

namespace {

std::pair<RunOutcome, Transcript> run_splitting(const ProtocolConfig& config, RandomSource& rng,
                                                SessionHooks hooks) {
  Session session(config, rng, std::move(hooks));
  if (session.distribute() && session.encode()) {
    session.send_sa_final();
    session.bell_measure_all();
    if (session.run_final_check()) session.decode();
  }
  RunOutcome outcome = session.finish();
  return {std::move(outcome), session.take_transcript()};
}

}  // namespace

std::pair<RunOutcome, Transcript> run_three_party(const ProtocolConfig& config,
                                                  RandomSource& rng, SessionHooks hooks) {
  if (config.n_agents != 2) throw ConfigError("the three-party protocol has exactly two agents");
  return run_splitting(config, rng, std::move(hooks));
}

std::pair<RunOutcome, Transcript> run_n_party(const ProtocolConfig& config, RandomSource& rng,
                                              SessionHooks hooks) {
  if (config.n_agents < 3) throw ConfigError("the N-party protocol needs at least three agents");
  return run_splitting(config, rng, std::move(hooks));
}

}  // namespace qss::mqssp
