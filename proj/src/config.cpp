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

#include "qss/config.hpp"

#include <algorithm>
#include <cctype>
#include <cmath>

#include "qss/errors.hpp"

namespace qss {

std::string_view to_string(ProtocolKind kind) {
  switch (kind) {
    case ProtocolKind::Mqssp3: return "mqssp3";
    case ProtocolKind::MqsspN: return "mqssp_n";
    case ProtocolKind::Mqsts: return "mqsts";
  }
  return "?";
}

ProtocolKind protocol_from_string(std::string_view text) {
  for (auto k : {ProtocolKind::Mqssp3, ProtocolKind::MqsspN, ProtocolKind::Mqsts}) {
    if (to_string(k) == text) return k;
  }
  throw ConfigError("unknown protocol '" + std::string(text) + "'");
}

std::string LegId::name() const {
  switch (kind) {
    case LegKind::SaFirst: return "sa_first";
    case LegKind::ScHop:
      return "sc_hop_" + std::to_string(from_agent) + "_" + std::to_string(from_agent + 1);
    case LegKind::ScReturn: return "sc_return";
    case LegKind::ScFinal: return "sc_final";
    case LegKind::SaFinal: return "sa_final";
  }
  return "?";
}

const channel::ChannelModel& LegModels::at(const LegId& leg) const {
  static const channel::ChannelModel kIdeal{};
  switch (leg.kind) {
    case LegKind::SaFirst: return sa_first;
    case LegKind::ScHop: {
      const std::size_t i = leg.from_agent - 1;
      return i < sc_hops.size() ? sc_hops[i] : kIdeal;
    }
    case LegKind::ScReturn: return sc_return;
    case LegKind::ScFinal: return sc_final;
    case LegKind::SaFinal: return sa_final;
  }
  return kIdeal;
}

channel::ChannelModel& LegModels::at(const LegId& leg) {
  switch (leg.kind) {
    case LegKind::SaFirst: return sa_first;
    case LegKind::ScHop: {
      const std::size_t i = leg.from_agent - 1;
      if (sc_hops.size() <= i) sc_hops.resize(i + 1);
      return sc_hops[i];
    }
    case LegKind::ScReturn: return sc_return;
    case LegKind::ScFinal: return sc_final;
    case LegKind::SaFinal: return sa_final;
  }
  return sa_first;
}

void LegModels::validate() const {
  sa_first.validate();
  for (const auto& hop : sc_hops) hop.validate();
  sc_return.validate();
  sc_final.validate();
  sa_final.validate();
}

std::size_t SampleCounts::total(ProtocolKind protocol, std::size_t n_agents) const {
  const std::size_t hops = n_agents > 2 ? n_agents - 2 : 0;
  std::size_t t = first_check + hops * (hop_check + hadamard_samples) + k + j;
  if (protocol != ProtocolKind::Mqsts) t += final_check;
  return t;
}

SampleCounts resolve_counts(const ProtocolConfig& config) {
  const std::size_t hops = config.n_agents > 2 ? config.n_agents - 2 : 0;
  // first, one per intermediate hop, second, and the final check (MQSSP only).
  const std::size_t stages = 2 + hops + (config.protocol == ProtocolKind::Mqsts ? 0 : 1);
  const auto budget = static_cast<std::size_t>(
      std::llround(std::clamp(config.check_fraction, 0.0, 1.0) * double(config.n_pairs)));
  const std::size_t per_stage = budget / stages;
  std::size_t remainder = budget % stages;
  auto take_extra = [&]() -> std::size_t {
    if (remainder == 0) return 0;
    --remainder;
    return 1;
  };

  SampleCounts c;
  c.first_check = per_stage + take_extra();
  const std::size_t hop_stage = per_stage;
  c.hop_check = hop_stage - hop_stage / 2;
  c.hadamard_samples = hop_stage / 2;
  const std::size_t second = per_stage + take_extra();
  c.k = second - second / 2;
  c.j = second / 2;
  c.final_check = config.protocol == ProtocolKind::Mqsts ? 0 : per_stage + take_extra();

  if (config.first_check) c.first_check = *config.first_check;
  if (config.hop_check) c.hop_check = *config.hop_check;
  if (config.hadamard_samples) c.hadamard_samples = *config.hadamard_samples;
  if (config.k) c.k = *config.k;
  if (config.j) c.j = *config.j;
  if (config.final_check) c.final_check = *config.final_check;
  if (hops == 0) {
    c.hop_check = 0;
    c.hadamard_samples = 0;
  }
  return c;
}

namespace {

std::optional<std::size_t> literal_payload_bits(const std::string& payload) {
  if (payload == "random") return std::nullopt;
  if (payload.rfind("random:", 0) == 0) {
    const std::string digits = payload.substr(7);
    if (digits.empty() || !std::all_of(digits.begin(), digits.end(), ::isdigit)) {
      throw ConfigError("payload 'random:<bits>' needs a bit count");
    }
    return std::stoull(digits);
  }
  if (!std::all_of(payload.begin(), payload.end(), [](char ch) { return ch == '0' || ch == '1'; })) {
    throw ConfigError("payload must be 'random', 'random:<bits>' or a string of 0/1");
  }
  return payload.size();
}

}  // namespace

void validate(const ProtocolConfig& config) {
  if (config.n_pairs == 0) throw ConfigError("n_pairs must be positive");
  if (config.n_agents < 2) throw ConfigError("at least two agents are required");
  if (config.protocol == ProtocolKind::Mqssp3 && config.n_agents != 2) {
    throw ConfigError("mqssp3 runs with exactly two agents");
  }
  if (config.protocol == ProtocolKind::MqsspN && config.n_agents < 3) {
    throw ConfigError("mqssp_n needs at least three agents");
  }
  if (!(config.threshold > 0.0 && config.threshold < 1.0)) {
    throw ConfigError("threshold must be in (0, 1)");
  }
  if (!(config.check_fraction >= 0.0 && config.check_fraction <= 1.0)) {
    throw ConfigError("check_fraction must be in [0, 1]");
  }
  if (config.max_qubits < 2 || config.max_qubits > 30) {
    throw ConfigError("max_qubits must be in [2, 30]");
  }
  config.channels.validate();
  if (config.channels.sc_hops.size() > (config.n_agents > 2 ? config.n_agents - 2 : 0)) {
    throw ConfigError("more sc_hop channels configured than the agent chain has");
  }
  for (auto a : config.withheld_agents) {
    if (a < 1 || a >= config.n_agents) {
      throw ConfigError("withheld agent " + std::to_string(a) +
                        " must be one of the disclosing agents 1.." +
                        std::to_string(config.n_agents - 1));
    }
  }

  const SampleCounts counts = resolve_counts(config);
  const std::size_t samples = counts.total(config.protocol, config.n_agents);
  if (samples > config.n_pairs) {
    throw ConfigError("check samples (" + std::to_string(samples) + ") exceed n_pairs (" +
                      std::to_string(config.n_pairs) + ")");
  }
  const std::size_t usable = config.n_pairs - samples;

  if (config.protocol == ProtocolKind::Mqsts) {
    if (config.m == 0) throw ConfigError("m must be at least 1");
    if (3 * config.m > config.max_qubits) {
      throw ConfigError("m = " + std::to_string(config.m) + " needs " +
                        std::to_string(3 * config.m) + " qubits, above max_qubits");
    }
    const std::size_t wanted = (config.blocks == 0 ? 1 : config.blocks) * config.m;
    if (wanted > usable) {
      throw ConfigError("not enough pairs left after checks to share the requested blocks");
    }
  } else {
    if (auto bits = literal_payload_bits(config.payload)) {
      if (*bits % 2 != 0) throw ConfigError("payload length must be even");
      if (*bits / 2 > usable) {
        throw ConfigError("payload needs " + std::to_string(*bits / 2) + " pairs but only " +
                          std::to_string(usable) + " remain after checks");
      }
    }
  }
}

}  // namespace qss
