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

#include "qss/transcript.hpp"

#include <bit>

#include "qss/errors.hpp"

namespace qss {

std::string_view to_string(Traffic traffic) {
  switch (traffic) {
    case Traffic::Private: return "private";
    case Traffic::Protocol: return "protocol";
    case Traffic::Check: return "check";
    case Traffic::Cooperation: return "cooperation";
  }
  return "?";
}

Traffic traffic_from_string(std::string_view text) {
  for (auto t : {Traffic::Private, Traffic::Protocol, Traffic::Check, Traffic::Cooperation}) {
    if (to_string(t) == text) return t;
  }
  throw ArgumentError("unknown traffic class '" + std::string(text) + "'");
}

Event& Transcript::record(std::string step, std::string actor, std::string action,
                          Traffic traffic, std::string bits, std::size_t qubits_moved,
                          nlohmann::json detail) {
  if (traffic == Traffic::Private && !bits.empty()) {
    throw ArgumentError("private events cannot publish bits");
  }
  Event e;
  e.seq = events_.size();
  e.step = std::move(step);
  e.actor = std::move(actor);
  e.action = std::move(action);
  e.traffic = traffic;
  e.bits = std::move(bits);
  e.qubits_moved = qubits_moved;
  e.detail = std::move(detail);
  events_.push_back(std::move(e));
  return events_.back();
}

std::size_t Transcript::published_bits() const {
  std::size_t n = 0;
  for (const auto& e : events_) n += e.bits.size();
  return n;
}

std::size_t Transcript::bits_of(Traffic traffic) const {
  std::size_t n = 0;
  for (const auto& e : events_) {
    if (e.traffic == traffic) n += e.bits.size();
  }
  return n;
}

std::size_t Transcript::qubits_moved() const {
  std::size_t n = 0;
  for (const auto& e : events_) n += e.qubits_moved;
  return n;
}

nlohmann::json Transcript::to_json() const {
  nlohmann::json events = nlohmann::json::array();
  for (const auto& e : events_) {
    events.push_back({{"seq", e.seq},
                      {"step", e.step},
                      {"actor", e.actor},
                      {"action", e.action},
                      {"traffic", to_string(e.traffic)},
                      {"bits", e.bits},
                      {"qubits_moved", e.qubits_moved},
                      {"detail", e.detail}});
  }
  return {{"header", header_}, {"events", std::move(events)}};
}

Transcript Transcript::from_json(const nlohmann::json& j) {
  Transcript t;
  t.header_ = j.value("header", nlohmann::json::object());
  for (const auto& e : j.at("events")) {
    t.record(e.at("step").get<std::string>(), e.at("actor").get<std::string>(),
             e.at("action").get<std::string>(),
             traffic_from_string(e.at("traffic").get<std::string>()),
             e.value("bits", std::string{}), e.value("qubits_moved", std::size_t{0}),
             e.value("detail", nlohmann::json::object()));
  }
  return t;
}

void append_bits(std::string& out, std::uint64_t value, std::size_t width) {
  for (std::size_t i = width; i-- > 0;) out.push_back(((value >> i) & 1U) ? '1' : '0');
}

std::size_t position_width(std::size_t count) {
  if (count <= 2) return 1;
  return static_cast<std::size_t>(std::bit_width(count - 1));
}

}  // namespace qss
