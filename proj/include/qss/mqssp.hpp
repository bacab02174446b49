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
#include <functional>
#include <map>
#include <optional>
#include <span>
#include <string>
#include <utility>
#include <vector>

#include "qss/channel.hpp"
#include "qss/config.hpp"
#include "qss/outcome.hpp"
#include "qss/pauli_frame.hpp"
#include "qss/pauli_op.hpp"
#include "qss/random_source.hpp"
#include "qss/state_vector.hpp"
#include "qss/transcript.hpp"

// Multiparty secret splitting over ordered psi- pairs.
//
// Parties are numbered by ordinal: 0 is the sender (Alice), 1..N are the
// agents. Agent 1 prepares the pairs, agents 2..N-1 relay the S_C sequence,
// agent N performs the Bell measurements. With N = 2 this is the three-party
// protocol (Bob prepares, Charlie measures).

namespace qss::mqssp {

inline constexpr std::size_t kSender = 0;
inline constexpr int kNobody = -1;

enum class PartyRole { Sender, Agent };

struct PartyId {
  PartyRole role = PartyRole::Sender;
  std::size_t ordinal = 0;
  std::string name;

  static PartyId sender();
  static PartyId agent(std::size_t ordinal, std::size_t n_agents);
};

/// "Alice", then "Bob", "Charlie", ...; the last agent of a chain longer than
/// the name list is "Zach".
std::string party_name(std::size_t ordinal, std::size_t n_agents);

enum class PairStatus { InTransit, Held, Consumed, Lost, Sample, Discarded };

std::string_view to_string(PairStatus status);

struct AppliedOp {
  std::size_t party;
  PauliOp op;
};

struct PairRecord {
  std::size_t index = 0;
  /// Every qubit entangled with this pair: 2 normally, 4 once an adversary
  /// has swapped in half of its own pair.
  StateVector state{2};
  std::size_t a_qubit = 0;  // position of the S_A photon in `state`
  std::size_t c_qubit = 1;  // position of the S_C photon in `state`
  PairStatus status = PairStatus::Held;
  int a_holder = kNobody;
  int c_holder = kNobody;
  std::vector<AppliedOp> applied_ops;  // in application order
  bool hadamard_marked = false;
  std::size_t hadamard_by = 0;
  bool final_sample = false;
  std::optional<BellKind> bell_outcome;
};

class PairRegister {
 public:
  PairRegister() = default;
  /// `n_pairs` psi- pairs, both halves held by agent 1.
  PairRegister(std::size_t n_pairs, std::size_t max_qubits);

  std::size_t size() const { return pairs_.size(); }
  PairRecord& operator[](std::size_t i) { return pairs_.at(i); }
  const PairRecord& operator[](std::size_t i) const { return pairs_.at(i); }
  auto begin() { return pairs_.begin(); }
  auto end() { return pairs_.end(); }
  auto begin() const { return pairs_.begin(); }
  auto end() const { return pairs_.end(); }

  std::vector<std::size_t> with_status(PairStatus status) const;
  /// Held pairs satisfying `pred`, in index order.
  std::vector<std::size_t> held_where(const std::function<bool(const PairRecord&)>& pred) const;

  /// Composition of the operations agents first..last applied to pair `index`.
  PauliOp agent_ops(std::size_t index, std::size_t first, std::size_t last) const;
  /// Composition of every operation on pair `index` (sender included).
  PauliOp all_ops(std::size_t index) const;
  std::optional<PauliOp> op_by(std::size_t index, std::size_t party) const;

  /// Applies `op` to the photon of `party`'s half (S_A if sender, else S_C).
  void apply(std::size_t index, std::size_t party, PauliOp op);

 private:
  std::vector<PairRecord> pairs_;
};

// ---------------------------------------------------------------- checks ----

struct CheckSample {
  std::size_t pair = 0;
  Basis basis = Basis::Z;
  int checker_bit = 0;  // the sender's A photon (or agent 1's announced bit in the first check)
  int partner_bit = 0;  // the C photon
  bool expect_equal = false;
  bool hadamard = false;
  bool error = false;
};

struct CheckResult {
  std::vector<CheckSample> samples;
  std::size_t errors = 0;

  /// Throws StatisticsError when no sample was checked.
  double error_rate() const;
};

/// Agent 1 measures the C photon of each sample in a random basis and
/// announces basis and bit; the sender measures the A photon in the same
/// basis. An error is any outcome pair that is not opposite.
CheckResult first_check(PairRegister& pairs, std::span<const std::size_t> sample,
                        RandomSource& rng);

/// Checker and partner measure in one random common basis. The expected
/// correlation comes from the disclosed composed operation on each pair;
/// Hadamard-marked C photons are rotated back before measuring.
CheckResult correlation_check(PairRegister& pairs, std::span<const std::size_t> sample,
                              const std::map<std::size_t, PauliOp>& disclosed,
                              RandomSource& rng);

struct Decoy {
  std::size_t pair = 0;
  Basis basis = Basis::Z;
  int expected_bit = 0;
  std::size_t position = 0;  // in the S_C stream towards the last agent
  bool lost = false;
};

struct SecondCheckResult {
  CheckResult pairs_checked;
  std::vector<Decoy> decoys;
};

/// The sender's check on the returned S_C sequence: `both` pairs are measured
/// on both halves, `single` pairs on the A half only, leaving the C half as a
/// decoy in a known eigenstate. Throws ProtocolOrderError when an operation
/// disclosure is missing.
SecondCheckResult second_check(PairRegister& pairs, std::span<const std::size_t> both,
                               std::span<const std::size_t> single,
                               const std::map<std::size_t, PauliOp>& disclosed,
                               RandomSource& rng);

/// The receiver measures every delivered decoy at its announced position and
/// basis. Lost decoys are left out. Throws std::logic_error when a decoy
/// position coincides with a payload position.
CheckResult decoy_check(PairRegister& pairs, std::span<const Decoy> decoys,
                        std::span<const std::size_t> payload_positions, RandomSource& rng);

// --------------------------------------------------------------- session ----

struct SessionHooks {
  /// Operation agent `agent` applies to pair `pair`. Uniform when unset.
  std::function<PauliOp(std::size_t agent, std::size_t pair, RandomSource& rng)> agent_op;
  /// Operation the sender applies to a final-check sample. Uniform when unset.
  std::function<PauliOp(std::size_t pair, RandomSource& rng)> sample_op;
};

/// One run of the protocol as an explicit state machine. Every step checks
/// that the previous one has completed and throws ProtocolOrderError
/// otherwise; a failed eavesdropping check moves the session to Aborted.
class Session {
 public:
  enum class Phase {
    Created,
    PairsPrepared,
    SaDelivered,
    FirstChecked,
    ScReturned,
    SecondChecked,
    DecoysChecked,
    Encoded,
    SaFinalDelivered,
    BellMeasured,
    FinalChecked,
    Decoded,
    Aborted,
  };

  Session(ProtocolConfig config, RandomSource& rng, SessionHooks hooks = {});

  Phase phase() const { return phase_; }
  bool aborted() const { return phase_ == Phase::Aborted; }
  const ProtocolConfig& config() const { return config_; }
  const SampleCounts& counts() const { return counts_; }
  std::size_t n_agents() const { return config_.n_agents; }
  std::size_t last_agent() const { return config_.n_agents; }
  RandomSource& rng() { return rng_; }

  PairRegister& pairs() { return pairs_; }
  const PairRegister& pairs() const { return pairs_; }
  Transcript& transcript() { return transcript_; }
  const Transcript& transcript() const { return transcript_; }
  RunOutcome& outcome() { return outcome_; }
  const std::vector<Decoy>& decoys() const { return decoys_; }

  // Distribution, shared with state sharing.
  void prepare_pairs();
  void send_sa();
  bool run_first_check();
  bool relay_sc();
  bool run_second_check();
  bool send_sc_with_decoys();
  /// prepare_pairs .. send_sc_with_decoys; false on abort.
  bool distribute();

  // Secret splitting only.
  /// Encodes the configured payload. Rejected unless the S_C sequence has
  /// been returned, checked and delivered with decoys.
  bool encode();
  bool encode(const std::string& message_bits);
  void send_sa_final();
  void bell_measure_all();
  bool run_final_check();
  void decode();

  /// Fills in the efficiency counts and moves the outcome out.
  RunOutcome finish();
  Transcript take_transcript() { return std::move(transcript_); }

  /// Operations the decoders use for `agent` on the given pairs: disclosed
  /// ones, or uniform guesses when the agent withholds (recorded privately).
  std::map<std::size_t, PauliOp> cooperative_ops(std::span<const std::size_t> pair_indices,
                                                  const std::string& step);

  /// Published composed operations of agents 1..last on `pair_indices`.
  std::map<std::size_t, PauliOp> disclose(std::span<const std::size_t> pair_indices,
                                          std::size_t last, const std::string& step,
                                          Traffic traffic);

  /// Pairs whose A and C photons are with the sender and last agent.
  std::vector<std::size_t> usable_pairs() const;

  /// Records a stage; aborts when its error rate exceeds the threshold.
  bool conclude_stage(const std::string& stage, const std::string& step,
                      const CheckResult& result);
  void abort_run(const std::string& stage, double error_rate);

 private:
  struct Recapture {
    LegId leg;
    bool swap_back;
  };

  void require(Phase expected, const char* what) const;
  std::string name(std::size_t party) const { return party_name(party, config_.n_agents); }
  std::optional<Recapture> recapture_leg_for(const LegId& substitution_leg) const;
  /// Sends one photon per pair over `leg`; returns positions reported lost.
  std::vector<std::size_t> transmit_leg(const LegId& leg, std::span<const std::size_t> stream,
                                        bool sa_photon, std::size_t receiver);
  void leak_ops(const LegId& into, std::size_t party, std::span<const std::size_t> pair_indices);
  void announce_positions(const std::string& step, std::size_t party, const std::string& action,
                          std::span<const std::size_t> positions, std::size_t stream_length,
                          Traffic traffic);
  void publish_check_outcomes(const std::string& step, std::size_t party,
                              const CheckResult& result, bool partner_side);
  std::vector<std::size_t> choose(std::vector<std::size_t> candidates, std::size_t count);
  PauliOp random_op() { return static_cast<PauliOp>(rng_.below(4)); }

  ProtocolConfig config_;
  SampleCounts counts_;
  RandomSource& rng_;
  SessionHooks hooks_;
  Phase phase_ = Phase::Created;
  PairRegister pairs_;
  Transcript transcript_;
  RunOutcome outcome_;
  std::vector<Decoy> decoys_;
  std::vector<std::size_t> payload_pairs_;
  std::vector<std::size_t> final_samples_;
  std::map<std::string, channel::FakeSignalStore> stores_;
  std::map<std::string, std::size_t> ops_at_substitution_;
};

/// Three-party run (two agents).
std::pair<RunOutcome, Transcript> run_three_party(const ProtocolConfig& config,
                                                  RandomSource& rng, SessionHooks hooks = {});
/// N-party run, N >= 3 agents.
std::pair<RunOutcome, Transcript> run_n_party(const ProtocolConfig& config, RandomSource& rng,
                                              SessionHooks hooks = {});

/// Two message bits recovered from the receiver's Bell outcome and the
/// agents' composed operation on that pair.
frame::TwoBits decode_block(BellKind outcome, PauliOp agents_composed);

}  // namespace qss::mqssp
