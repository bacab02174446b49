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
#include <string>
#include <string_view>
#include <vector>

#include <json.hpp>

namespace qss {

/// Who gets to see an event. Private events are local measurement records and
/// operations; they carry no published bits.
enum class Traffic { Private, Protocol, Check, Cooperation };

std::string_view to_string(Traffic traffic);
Traffic traffic_from_string(std::string_view text);

struct Event {
  std::size_t seq = 0;
  std::string step;  // protocol step label, e.g. "4", "9'", "IV"
  std::string actor;
  std::string action;
  Traffic traffic = Traffic::Private;
  std::string bits;  // published classical bits as '0'/'1'
  std::size_t qubits_moved = 0;
  nlohmann::json detail = nlohmann::json::object();
};

/// Ordered, append-only record of one protocol run.
class Transcript {
 public:
  Transcript() = default;

  Event& record(std::string step, std::string actor, std::string action, Traffic traffic,
                std::string bits = {}, std::size_t qubits_moved = 0,
                nlohmann::json detail = nlohmann::json::object());

  const std::vector<Event>& events() const { return events_; }
  nlohmann::json& header() { return header_; }
  const nlohmann::json& header() const { return header_; }

  /// Total published bits (everything except Private).
  std::size_t published_bits() const;
  std::size_t bits_of(Traffic traffic) const;
  std::size_t qubits_moved() const;

  nlohmann::json to_json() const;
  static Transcript from_json(const nlohmann::json& j);

 private:
  nlohmann::json header_ = nlohmann::json::object();
  std::vector<Event> events_;
};

/// Appends `value` as `width` bits, most significant first.
void append_bits(std::string& out, std::uint64_t value, std::size_t width);
/// Bits needed to name one of `count` positions (at least 1).
std::size_t position_width(std::size_t count);

}  // namespace qss
