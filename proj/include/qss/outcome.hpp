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
#include <vector>

#include "qss/channel.hpp"
#include "qss/config.hpp"

namespace qss {

struct StageStats {
  std::string name;
  std::size_t samples = 0;
  std::size_t errors = 0;

  double error_rate() const {
    return samples == 0 ? 0.0 : static_cast<double>(errors) / static_cast<double>(samples);
  }
};

struct Verdict {
  bool completed = false;
  std::string stage;  // aborting stage; empty when completed
  double error_rate = 0.0;
};

/// What a fake-signal adversary extracted from one slot, next to the truth.
struct AdversaryInsight {
  std::size_t pair = 0;
  std::string leg;
  PauliOp learned = PauliOp::U0;
  PauliOp actual = PauliOp::U0;
  bool payload = false;  // the pair went on to carry message bits or a shared state
};

/// Integer inputs of the efficiency figures.
struct EfficiencyCounts {
  std::size_t q_u = 0;         // qubits carrying payload
  std::size_t q_t = 0;         // qubits sent over quantum channels
  std::size_t b_m = 0;         // message bits delivered
  std::size_t b_t = 0;         // classical bits outside checks and agent cooperation
  std::size_t b_t_strict = 0;  // every published classical bit
};

struct RunOutcome {
  ProtocolKind protocol = ProtocolKind::Mqssp3;
  std::uint64_t seed = 0;
  Verdict verdict;
  std::vector<StageStats> stages;
  std::string payload;    // message the sender set out to send
  std::string delivered;  // the part of it carried by pairs that reached the receiver
  std::optional<std::string> recovered;
  std::size_t erased_blocks = 0;
  bool decoding_complete = true;  // false when some agent withheld its operations
  std::vector<double> fidelities;  // state sharing: one per shared state
  EfficiencyCounts counts;
  std::vector<channel::TamperEntry> tamper_log;
  std::vector<AdversaryInsight> insights;

  bool recovered_matches() const { return recovered && *recovered == delivered; }
  const StageStats* stage(const std::string& name) const;
  /// True when the run aborted at an eavesdropping check.
  bool detected() const { return !verdict.completed && verdict.stage != "capacity"; }
  /// Errors over samples across every performed check.
  double overall_error_rate() const;
};

}  // namespace qss
