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
#include <cstdint>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "qss/channel.hpp"

namespace qss {

enum class ProtocolKind { Mqssp3, MqsspN, Mqsts };

std::string_view to_string(ProtocolKind kind);
ProtocolKind protocol_from_string(std::string_view text);

/// Which way a quantum leg carries photons.
enum class LegKind {
  SaFirst,   // pair source (agent 1) -> sender, S_A
  ScHop,     // agent i -> agent i+1 for intermediate agents, S_C
  ScReturn,  // agent N-1 -> sender, S_C
  ScFinal,   // sender -> agent N, S_C plus decoys
  SaFinal,   // sender -> agent N, S_A (secret splitting only)
};

struct LegId {
  LegKind kind;
  std::size_t from_agent = 0;  // ScHop only: the sending agent ordinal

  std::string name() const;
  friend bool operator==(const LegId&, const LegId&) = default;
};

/// Channel model per leg. `sc_hops[i]` is the hop agent (i+1) -> agent (i+2).
struct LegModels {
  channel::ChannelModel sa_first;
  std::vector<channel::ChannelModel> sc_hops;
  channel::ChannelModel sc_return;
  channel::ChannelModel sc_final;
  channel::ChannelModel sa_final;

  /// Ideal channel for hops that were not configured.
  const channel::ChannelModel& at(const LegId& leg) const;
  channel::ChannelModel& at(const LegId& leg);
  void validate() const;
};

/// Everything one protocol run needs. Optional counts override the defaults
/// derived from `check_fraction`.
struct ProtocolConfig {
  ProtocolKind protocol = ProtocolKind::Mqssp3;
  std::size_t n_pairs = 1000;
  std::size_t n_agents = 2;
  std::size_t m = 2;       // qubits per shared unknown state
  std::size_t blocks = 0;  // states shared per run; 0 uses every usable pair
  /// Fraction of all pairs spent on eavesdropping checks, split evenly over
  /// the check stages of the run.
  double check_fraction = 0.1;
  std::optional<std::size_t> first_check;
  std::optional<std::size_t> hop_check;
  std::optional<std::size_t> hadamard_samples;
  std::optional<std::size_t> k;
  std::optional<std::size_t> j;
  std::optional<std::size_t> final_check;
  double threshold = 0.05;
  /// "random" fills every payload pair, "random:<bits>" draws that many bits,
  /// otherwise a literal string of '0'/'1' of even length.
  std::string payload = "random";
  std::uint64_t seed = 1;
  std::size_t max_qubits = 16;
  std::optional<std::size_t> reservoir;
  /// Agents whose operations are not disclosed at decoding time.
  std::vector<std::size_t> withheld_agents;
  LegModels channels;
};

/// Sample counts after applying defaults.
struct SampleCounts {
  std::size_t first_check = 0;
  std::size_t hop_check = 0;         // per intermediate hop
  std::size_t hadamard_samples = 0;  // per marking agent
  std::size_t k = 0;
  std::size_t j = 0;
  std::size_t final_check = 0;

  /// All pairs consumed by checks in an N-agent run of `protocol`.
  std::size_t total(ProtocolKind protocol, std::size_t n_agents) const;
};

SampleCounts resolve_counts(const ProtocolConfig& config);

/// Throws ConfigError on any inconsistency.
void validate(const ProtocolConfig& config);

}  // namespace qss
