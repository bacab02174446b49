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

#include "qss/harness.hpp"

#include <omp.h>

#include <cmath>
#include <exception>
#include <fstream>
#include <set>
#include <sstream>

#include "qss/errors.hpp"
#include "qss/mqssp.hpp"
#include "qss/mqsts.hpp"
#include "qss/pauli_frame.hpp"

namespace qss::harness {

using nlohmann::json;

// ---------------------------------------------------------------- config ----

namespace {

void require_keys(const json& j, const std::set<std::string>& allowed, const std::string& where) {
  if (!j.is_object()) throw ConfigError(where + " must be a JSON object");
  for (const auto& [key, _] : j.items()) {
    if (!allowed.contains(key)) throw ConfigError("unknown key '" + key + "' in " + where);
  }
}

template <typename T>
T get_as(const json& j, const std::string& key) {
  try {
    return j.at(key).get<T>();
  } catch (const json::exception& e) {
    throw ConfigError("bad value for '" + key + "': " + e.what());
  }
}

std::size_t get_count(const json& j, const std::string& key) {
  const json& v = j.at(key);
  if (!v.is_number_integer() || v.get<long long>() < 0) {
    throw ConfigError("'" + key + "' must be a non-negative integer");
  }
  return v.get<std::size_t>();
}

channel::InterceptBasis basis_from(const std::string& s) {
  if (s == "z") return channel::InterceptBasis::FixedZ;
  if (s == "x") return channel::InterceptBasis::FixedX;
  if (s == "random") return channel::InterceptBasis::Random;
  throw ConfigError("intercept basis must be z, x or random");
}

std::string basis_name(channel::InterceptBasis b) {
  switch (b) {
    case channel::InterceptBasis::FixedZ: return "z";
    case channel::InterceptBasis::FixedX: return "x";
    case channel::InterceptBasis::Random: return "random";
  }
  return "random";
}

channel::ChannelModel channel_from(const json& j, channel::ChannelModel base,
                                   const std::string& where) {
  require_keys(j, {"loss_prob", "depolarize_prob", "adversary", "trojan_leak"}, where);
  if (j.contains("loss_prob")) base.loss_prob = get_as<double>(j, "loss_prob");
  if (j.contains("depolarize_prob")) base.depolarize_prob = get_as<double>(j, "depolarize_prob");
  if (j.contains("trojan_leak")) base.trojan_leak = get_as<bool>(j, "trojan_leak");
  if (j.contains("adversary")) {
    const json& a = j.at("adversary");
    require_keys(a, {"kind", "basis"}, where + ".adversary");
    const auto kind = get_as<std::string>(a, "kind");
    if (kind == "none") {
      base.adversary = channel::NoAdversary{};
    } else if (kind == "intercept_resend") {
      base.adversary = channel::InterceptResend{
          a.contains("basis") ? basis_from(get_as<std::string>(a, "basis"))
                              : channel::InterceptBasis::Random};
    } else if (kind == "fake_bell_signal") {
      base.adversary = channel::FakeBellSignal{};
    } else {
      throw ConfigError("unknown adversary kind '" + kind + "'");
    }
  }
  return base;
}

json channel_to_json(const channel::ChannelModel& c) {
  json adversary = {{"kind", "none"}};
  if (const auto* ir = std::get_if<channel::InterceptResend>(&c.adversary)) {
    adversary = {{"kind", "intercept_resend"}, {"basis", basis_name(ir->basis)}};
  } else if (std::holds_alternative<channel::FakeBellSignal>(c.adversary)) {
    adversary = {{"kind", "fake_bell_signal"}};
  }
  return {{"loss_prob", c.loss_prob},
          {"depolarize_prob", c.depolarize_prob},
          {"adversary", adversary},
          {"trojan_leak", c.trojan_leak}};
}

}  // namespace

ProtocolConfig config_from_json(const json& j) {
  require_keys(j,
               {"protocol", "n_pairs", "n_agents", "m", "blocks", "check_fraction", "first_check",
                "hop_check", "hadamard_samples", "k", "j", "decoy_count", "final_check",
                "threshold", "payload", "seed", "max_qubits", "reservoir", "withheld_agents",
                "channels"},
               "config");
  ProtocolConfig c;
  if (j.contains("protocol")) c.protocol = protocol_from_string(get_as<std::string>(j, "protocol"));
  if (c.protocol == ProtocolKind::MqsspN) c.n_agents = 3;
  for (const auto* key : {"n_pairs", "n_agents", "m", "blocks", "max_qubits"}) {
    if (!j.contains(key)) continue;
    const std::size_t v = get_count(j, key);
    const std::string k = key;
    if (k == "n_pairs") c.n_pairs = v;
    if (k == "n_agents") c.n_agents = v;
    if (k == "m") c.m = v;
    if (k == "blocks") c.blocks = v;
    if (k == "max_qubits") c.max_qubits = v;
  }
  if (j.contains("check_fraction")) c.check_fraction = get_as<double>(j, "check_fraction");
  if (j.contains("threshold")) c.threshold = get_as<double>(j, "threshold");
  if (j.contains("first_check")) c.first_check = get_count(j, "first_check");
  if (j.contains("hop_check")) c.hop_check = get_count(j, "hop_check");
  if (j.contains("hadamard_samples")) c.hadamard_samples = get_count(j, "hadamard_samples");
  if (j.contains("k")) c.k = get_count(j, "k");
  if (j.contains("j") && j.contains("decoy_count")) {
    throw ConfigError("'j' and 'decoy_count' name the same count; give one");
  }
  if (j.contains("j")) c.j = get_count(j, "j");
  if (j.contains("decoy_count")) c.j = get_count(j, "decoy_count");
  if (j.contains("final_check")) c.final_check = get_count(j, "final_check");
  if (j.contains("payload")) c.payload = get_as<std::string>(j, "payload");
  if (j.contains("seed")) {
    if (!j.at("seed").is_number_unsigned() && !j.at("seed").is_number_integer()) {
      throw ConfigError("'seed' must be an unsigned integer");
    }
    c.seed = j.at("seed").get<std::uint64_t>();
  }
  if (j.contains("reservoir")) c.reservoir = get_count(j, "reservoir");
  if (j.contains("withheld_agents")) {
    c.withheld_agents = get_as<std::vector<std::size_t>>(j, "withheld_agents");
  }
  if (j.contains("channels")) {
    const json& ch = j.at("channels");
    require_keys(ch, {"default", "sa_first", "sc_hops", "sc_return", "sc_final", "sa_final"},
                 "channels");
    channel::ChannelModel base;
    if (ch.contains("default")) base = channel_from(ch.at("default"), {}, "channels.default");
    auto leg = [&](const char* key) {
      return ch.contains(key) ? channel_from(ch.at(key), base, std::string("channels.") + key)
                              : base;
    };
    c.channels.sa_first = leg("sa_first");
    c.channels.sc_return = leg("sc_return");
    c.channels.sc_final = leg("sc_final");
    c.channels.sa_final = leg("sa_final");
    const std::size_t hops = c.n_agents > 2 ? c.n_agents - 2 : 0;
    c.channels.sc_hops.assign(hops, base);
    if (ch.contains("sc_hops")) {
      const json& h = ch.at("sc_hops");
      if (!h.is_object()) throw ConfigError("channels.sc_hops must map sending agent to a channel");
      for (const auto& [key, value] : h.items()) {
        std::size_t from = 0;
        try {
          from = std::stoull(key);
        } catch (const std::exception&) {
          throw ConfigError("channels.sc_hops key '" + key + "' is not an agent number");
        }
        if (from < 1 || from > hops) {
          throw ConfigError("channels.sc_hops: agent " + key + " has no outgoing hop");
        }
        c.channels.sc_hops[from - 1] = channel_from(value, base, "channels.sc_hops." + key);
      }
    }
  }
  validate(c);
  return c;
}

json config_to_json(const ProtocolConfig& c) {
  json j = {{"protocol", std::string(to_string(c.protocol))},
            {"n_pairs", c.n_pairs},
            {"n_agents", c.n_agents},
            {"m", c.m},
            {"blocks", c.blocks},
            {"check_fraction", c.check_fraction},
            {"threshold", c.threshold},
            {"payload", c.payload},
            {"seed", c.seed},
            {"max_qubits", c.max_qubits},
            {"withheld_agents", c.withheld_agents}};
  auto put = [&](const char* key, const std::optional<std::size_t>& v) {
    if (v) j[key] = *v;
  };
  put("first_check", c.first_check);
  put("hop_check", c.hop_check);
  put("hadamard_samples", c.hadamard_samples);
  put("k", c.k);
  put("j", c.j);
  put("final_check", c.final_check);
  put("reservoir", c.reservoir);
  json hops = json::object();
  for (std::size_t i = 0; i < c.channels.sc_hops.size(); ++i) {
    hops[std::to_string(i + 1)] = channel_to_json(c.channels.sc_hops[i]);
  }
  j["channels"] = {{"sa_first", channel_to_json(c.channels.sa_first)},
                   {"sc_hops", hops},
                   {"sc_return", channel_to_json(c.channels.sc_return)},
                   {"sc_final", channel_to_json(c.channels.sc_final)},
                   {"sa_final", channel_to_json(c.channels.sa_final)}};
  return j;
}

ProtocolConfig load_config(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw ConfigError("cannot open config '" + path + "'");
  json j;
  try {
    in >> j;
  } catch (const json::parse_error& e) {
    throw ConfigError("config '" + path + "' is not valid JSON: " + e.what());
  }
  return config_from_json(j);
}

// ------------------------------------------------------------ efficiency ----

EfficiencyReport compute_efficiency(const RunOutcome& outcome) {
  if (!outcome.verdict.completed) {
    throw EfficiencyUndefinedError("efficiency is undefined for a run aborted at '" +
                                   outcome.verdict.stage + "'");
  }
  const auto& c = outcome.counts;
  auto ratio = [](std::size_t num, std::size_t den) {
    return den == 0 ? 0.0 : static_cast<double>(num) / static_cast<double>(den);
  };
  return {c, ratio(c.q_u, c.q_t), ratio(c.b_m, c.q_t + c.b_t), ratio(c.b_m, c.q_t + c.b_t_strict)};
}

// ------------------------------------------------------------------- run ----

RunResult run_once(const ProtocolConfig& config) {
  RandomSource rng(config.seed);
  switch (config.protocol) {
    case ProtocolKind::Mqssp3: {
      auto [o, t] = mqssp::run_three_party(config, rng);
      return {std::move(o), std::move(t)};
    }
    case ProtocolKind::MqsspN: {
      auto [o, t] = mqssp::run_n_party(config, rng);
      return {std::move(o), std::move(t)};
    }
    case ProtocolKind::Mqsts: {
      auto run = mqsts::run_state_sharing(config, rng);
      return {std::move(run.outcome), std::move(run.transcript)};
    }
  }
  throw ConfigError("unknown protocol");
}

bool recovered(const RunOutcome& o) {
  if (!o.verdict.completed) return false;
  if (o.protocol == ProtocolKind::Mqsts) {
    if (o.fidelities.empty()) return false;
    for (double f : o.fidelities) {
      if (std::abs(1.0 - f) > kFidelityTolerance) return false;
    }
    return true;
  }
  return o.recovered_matches();
}

json outcome_to_json(const RunOutcome& o) {
  json stages = json::array();
  for (const auto& s : o.stages) {
    stages.push_back({{"name", s.name},
                      {"samples", s.samples},
                      {"errors", s.errors},
                      {"error_rate", s.error_rate()}});
  }
  json j = {{"protocol", std::string(to_string(o.protocol))},
            {"seed", o.seed},
            {"verdict",
             {{"completed", o.verdict.completed},
              {"stage", o.verdict.stage},
              {"error_rate", o.verdict.error_rate},
              {"detected", o.detected()}}},
            {"stages", stages},
            {"recovered_ok", recovered(o)},
            {"erased_blocks", o.erased_blocks},
            {"decoding_complete", o.decoding_complete},
            {"tamper_events", o.tamper_log.size()}};
  if (o.protocol != ProtocolKind::Mqsts) {
    j["payload_bits"] = o.payload.size();
    j["delivered"] = o.delivered;
    j["recovered"] = o.recovered ? json(*o.recovered) : json(nullptr);
  } else {
    j["fidelities"] = o.fidelities;
  }
  const auto& c = o.counts;
  json eff = {{"q_u", c.q_u}, {"q_t", c.q_t}, {"b_m", c.b_m}, {"b_t", c.b_t},
              {"b_t_strict", c.b_t_strict}};
  if (o.verdict.completed) {
    const auto e = compute_efficiency(o);
    eff["eta_q"] = e.eta_q;
    eff["eta_t"] = e.eta_t;
    eff["eta_t_strict"] = e.eta_t_strict;
  } else {
    eff["eta_q"] = nullptr;
    eff["eta_t"] = nullptr;
    eff["eta_t_strict"] = nullptr;
  }
  j["efficiency"] = eff;
  std::size_t learned_right = 0;
  for (const auto& i : o.insights) learned_right += i.learned == i.actual ? 1 : 0;
  j["adversary"] = {{"insights", o.insights.size()}, {"learned_correctly", learned_right}};
  return j;
}

// -------------------------------------------------------------- campaign ----

TrialSummary summarize(const RunOutcome& o) {
  TrialSummary t;
  t.seed = o.seed;
  t.completed = o.verdict.completed;
  t.detected = o.detected();
  t.abort_stage = o.verdict.stage;
  std::size_t samples = 0;
  for (const auto& s : o.stages) samples += s.samples;
  t.has_error_rate = samples > 0;
  t.error_rate = o.overall_error_rate();
  t.recovered = recovered(o);
  if (o.protocol == ProtocolKind::Mqsts && !o.fidelities.empty()) {
    double sum = 0.0;
    for (double f : o.fidelities) sum += f;
    t.mean_fidelity = sum / static_cast<double>(o.fidelities.size());
  }
  if (o.verdict.completed) t.efficiency = compute_efficiency(o);
  return t;
}

CampaignStats fold(const std::vector<TrialSummary>& trials) {
  CampaignStats s;
  s.trials = trials.size();
  std::size_t with_error = 0;
  std::size_t recovered_count = 0;
  std::size_t with_fidelity = 0;
  std::size_t with_eff = 0;
  double err_sum = 0.0;
  double err_sq = 0.0;
  double fid_sum = 0.0;
  double eq = 0.0;
  double et = 0.0;
  double ets = 0.0;
  for (const auto& t : trials) {
    if (!t.completed) {
      ++s.aborts;
      ++s.abort_stages[t.abort_stage];
    }
    if (t.has_error_rate) {
      ++with_error;
      err_sum += t.error_rate;
      err_sq += t.error_rate * t.error_rate;
    }
    recovered_count += t.recovered ? 1 : 0;
    if (t.mean_fidelity) {
      ++with_fidelity;
      fid_sum += *t.mean_fidelity;
    }
    if (t.efficiency) {
      ++with_eff;
      eq += t.efficiency->eta_q;
      et += t.efficiency->eta_t;
      ets += t.efficiency->eta_t_strict;
    }
  }
  if (s.trials > 0) {
    s.abort_rate = static_cast<double>(s.aborts) / static_cast<double>(s.trials);
    s.recovery_rate = static_cast<double>(recovered_count) / static_cast<double>(s.trials);
  }
  if (with_error > 0) {
    const double n = static_cast<double>(with_error);
    s.mean_error = err_sum / n;
    s.sd_error = std::sqrt(std::max(0.0, err_sq / n - s.mean_error * s.mean_error));
  }
  if (with_fidelity > 0) s.mean_fidelity = fid_sum / static_cast<double>(with_fidelity);
  if (with_eff > 0) {
    const double n = static_cast<double>(with_eff);
    s.eta_q = eq / n;
    s.eta_t = et / n;
    s.eta_t_strict = ets / n;
  }
  return s;
}

CampaignStats run_campaign(const ProtocolConfig& config, std::size_t trials,
                           Execution execution, std::vector<TrialSummary>* per_trial) {
  if (trials == 0) throw ConfigError("a campaign needs at least one trial");
  validate(config);
  std::vector<TrialSummary> summaries(trials);
  std::vector<std::exception_ptr> failures(trials);
  auto one = [&](std::size_t i) {
    try {
      ProtocolConfig c = config;
      c.seed = config.seed + i;
      summaries[i] = summarize(run_once(c).outcome);
    } catch (...) {
      failures[i] = std::current_exception();
    }
  };
  if (execution == Execution::Parallel) {
    const auto n = static_cast<std::ptrdiff_t>(trials);
#pragma omp parallel for schedule(dynamic) if (trials > 1)
    for (std::ptrdiff_t i = 0; i < n; ++i) one(static_cast<std::size_t>(i));
  } else {
    for (std::size_t i = 0; i < trials; ++i) one(i);
  }
  for (const auto& f : failures) {
    if (f) std::rethrow_exception(f);
  }
  if (per_trial != nullptr) *per_trial = summaries;
  return fold(summaries);
}

json campaign_to_json(const CampaignStats& s) {
  auto opt = [](const std::optional<double>& v) { return v ? json(*v) : json(nullptr); };
  return {{"trials", s.trials},
          {"aborts", s.aborts},
          {"abort_rate", s.abort_rate},
          {"abort_stages", s.abort_stages},
          {"mean_error", s.mean_error},
          {"sd_error", s.sd_error},
          {"recovery_rate", s.recovery_rate},
          {"mean_fidelity", opt(s.mean_fidelity)},
          {"eta_q", opt(s.eta_q)},
          {"eta_t", opt(s.eta_t)},
          {"eta_t_strict", opt(s.eta_t_strict)}};
}

json make_report(const ProtocolConfig& config, const CampaignStats& stats,
                 const RunOutcome& first_run) {
  return {{"schema", "qss.report/1"},
          {"config", config_to_json(config)},
          {"summary", campaign_to_json(stats)},
          {"first_run", outcome_to_json(first_run)}};
}

// ----------------------------------------------------------------- sweep ----

std::vector<SweepRow> sweep(const ProtocolConfig& base, const std::string& param,
                            const std::vector<std::string>& values, std::size_t trials) {
  if (values.empty()) throw ConfigError("sweep needs at least one value");
  std::string pointer = "/" + param;
  for (auto& ch : pointer) {
    if (ch == '.') ch = '/';
  }
  const json::json_pointer ptr(pointer);
  std::vector<SweepRow> rows;
  for (const auto& value : values) {
    json j = config_to_json(base);
    if (param.rfind("channels.default.", 0) == 0) {
      // Applies to every leg.
      const std::string field = param.substr(17);
      json parsed = json::parse(value, nullptr, false);
      if (parsed.is_discarded()) parsed = value;
      for (const auto* leg : {"sa_first", "sc_return", "sc_final", "sa_final"}) {
        j["channels"][leg][field] = parsed;
      }
      for (auto& [_, hop] : j["channels"]["sc_hops"].items()) hop[field] = parsed;
    } else {
      if (!j.contains(ptr) && param.find('.') == std::string::npos &&
          !std::set<std::string>{"first_check", "hop_check", "hadamard_samples", "k", "j",
                                 "final_check", "reservoir"}
               .contains(param)) {
        throw ConfigError("unknown sweep parameter '" + param + "'");
      }
      json parsed = json::parse(value, nullptr, false);
      if (parsed.is_discarded()) parsed = value;
      j[ptr] = parsed;
    }
    const ProtocolConfig c = config_from_json(j);
    rows.push_back({value, run_campaign(c, trials)});
  }
  return rows;
}

std::string sweep_csv(const std::vector<SweepRow>& rows) {
  std::ostringstream out;
  out.precision(10);
  auto opt = [&](const std::optional<double>& v) {
    if (v) {
      out << *v;
    } else {
      out << "nan";
    }
  };
  out << "param,abort_rate,mean_error,recovery_rate,mean_fidelity,eta_q,eta_t\n";
  for (const auto& r : rows) {
    out << r.value << ',' << r.stats.abort_rate << ',' << r.stats.mean_error << ','
        << r.stats.recovery_rate << ',';
    opt(r.stats.mean_fidelity);
    out << ',';
    opt(r.stats.eta_q);
    out << ',';
    opt(r.stats.eta_t);
    out << '\n';
  }
  return out.str();
}

// ---------------------------------------------------------------- replay ----

ReplayResult replay(const Transcript& transcript) {
  ReplayResult r;
  const json& header = transcript.header();
  if (header.contains("recovered") && header.at("recovered").is_string()) {
    r.expected = header.at("recovered").get<std::string>();
  }
  std::map<std::size_t, BellKind> outcomes;
  std::map<std::size_t, PauliOp> composed;
  const json* decoded = nullptr;
  for (const auto& e : transcript.events()) {
    if (e.action == "bell_measure" && e.detail.contains("outcomes")) {
      const auto& pairs = e.detail.at("pairs");
      const auto& kinds = e.detail.at("outcomes");
      for (std::size_t i = 0; i < pairs.size(); ++i) {
        outcomes[pairs[i].get<std::size_t>()] = bell_from_string(kinds[i].get<std::string>());
      }
    } else if ((e.action == "disclose_ops" && e.traffic == Traffic::Cooperation) ||
               e.action == "guess_ops") {
      const auto& pairs = e.detail.at("pairs");
      const auto& ops = e.detail.at("ops");
      for (std::size_t i = 0; i < pairs.size(); ++i) {
        auto& acc = composed.try_emplace(pairs[i].get<std::size_t>(), PauliOp::U0).first->second;
        acc = frame::compose(acc, pauli_from_string(ops[i].get<std::string>()));
      }
    } else if (e.action == "decode") {
      decoded = &e.detail;
    }
  }
  if (decoded == nullptr) return r;
  r.applicable = true;
  for (const auto& p : decoded->at("pairs")) {
    const auto idx = p.get<std::size_t>();
    const auto it = outcomes.find(idx);
    if (it == outcomes.end()) {
      throw ProtocolOrderError("transcript lacks the Bell outcome of pair " + std::to_string(idx));
    }
    const auto op = composed.find(idx);
    r.recovered +=
        mqssp::decode_block(it->second, op == composed.end() ? PauliOp::U0 : op->second).str();
  }
  r.matches = r.expected && *r.expected == r.recovered;
  return r;
}

}  // namespace qss::harness
