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
#include <map>
#include <optional>
#include <string>
#include <vector>

#include <json.hpp>

#include "qss/config.hpp"
#include "qss/outcome.hpp"
#include "qss/transcript.hpp"

namespace qss::harness {

// ---------------------------------------------------------------- config ----

/// Parses a run configuration. Unknown keys and wrong types are ConfigError.
ProtocolConfig config_from_json(const nlohmann::json& j);
nlohmann::json config_to_json(const ProtocolConfig& config);
ProtocolConfig load_config(const std::string& path);

// ------------------------------------------------------------ efficiency ----

struct EfficiencyReport {
  EfficiencyCounts counts;
  double eta_q = 0.0;         // q_u / q_t
  double eta_t = 0.0;         // b_m / (q_t + b_t), check and cooperation bits excluded
  double eta_t_strict = 0.0;  // b_m / (q_t + b_t_strict)
};

/// Throws EfficiencyUndefinedError for an aborted run.
EfficiencyReport compute_efficiency(const RunOutcome& outcome);

// ------------------------------------------------------------------- run ----

struct RunResult {
  RunOutcome outcome;
  Transcript transcript;
};

/// One run of whichever protocol `config` names, seeded with `config.seed`.
RunResult run_once(const ProtocolConfig& config);

/// A completed secret-splitting run recovered the delivered message, or a
/// completed state-sharing run reconstructed every state.
bool recovered(const RunOutcome& outcome);

nlohmann::json outcome_to_json(const RunOutcome& outcome);

// -------------------------------------------------------------- campaign ----

struct TrialSummary {
  std::uint64_t seed = 0;
  bool completed = false;
  bool detected = false;
  std::string abort_stage;
  bool has_error_rate = false;
  double error_rate = 0.0;
  bool recovered = false;
  std::optional<double> mean_fidelity;
  std::optional<EfficiencyReport> efficiency;
};

TrialSummary summarize(const RunOutcome& outcome);

struct CampaignStats {
  std::size_t trials = 0;
  std::size_t aborts = 0;
  double abort_rate = 0.0;
  double mean_error = 0.0;
  double sd_error = 0.0;
  double recovery_rate = 0.0;
  std::optional<double> mean_fidelity;
  std::optional<double> eta_q;
  std::optional<double> eta_t;
  std::optional<double> eta_t_strict;
  std::map<std::string, std::size_t> abort_stages;
};

enum class Execution { Serial, Parallel };

/// Runs trials with seeds seed, seed+1, ... and folds them in trial order, so
/// the result does not depend on the execution mode or thread count.
CampaignStats run_campaign(const ProtocolConfig& config, std::size_t trials,
                           Execution execution = Execution::Parallel,
                           std::vector<TrialSummary>* per_trial = nullptr);

CampaignStats fold(const std::vector<TrialSummary>& trials);

nlohmann::json campaign_to_json(const CampaignStats& stats);

/// The full report written by `run`.
nlohmann::json make_report(const ProtocolConfig& config, const CampaignStats& stats,
                           const RunOutcome& first_run);

// ----------------------------------------------------------------- sweep ----

struct SweepRow {
  std::string value;
  CampaignStats stats;
};

/// Sets the config key `param` (a dotted path such as "check_fraction" or
/// "channels.default.loss_prob") to each value in turn.
std::vector<SweepRow> sweep(const ProtocolConfig& base, const std::string& param,
                            const std::vector<std::string>& values, std::size_t trials);

std::string sweep_csv(const std::vector<SweepRow>& rows);

// ---------------------------------------------------------------- replay ----

struct ReplayResult {
  bool applicable = false;  // secret splitting runs that reached decoding
  std::string recovered;
  std::optional<std::string> expected;
  bool matches = false;
};

/// Recomputes the recovered message from the transcript's Bell outcomes and
/// the operations the decoders used.
ReplayResult replay(const Transcript& transcript);

// ------------------------------------------------------------------- cli ----

int cli_main(int argc, char** argv);

}  // namespace qss::harness
