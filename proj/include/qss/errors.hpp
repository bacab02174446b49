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

#include <stdexcept>
#include <string>

namespace qss {

// Register would exceed the configured qubit capacity.
class CapacityError : public std::length_error {
 public:
  using std::length_error::length_error;
};

// Qubit index outside the register.
class IndexError : public std::out_of_range {
 public:
  using std::out_of_range::out_of_range;
};

class ArgumentError : public std::invalid_argument {
 public:
  using std::invalid_argument::invalid_argument;
};

// State with zero norm or non-finite amplitudes, or a factorization request
// on an entangled state.
class InvalidStateError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

// Bad run configuration; surfaced before any trial executes.
class ConfigError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

// A protocol step was invoked out of order, or a required disclosure is missing.
class ProtocolOrderError : public std::logic_error {
 public:
  using std::logic_error::logic_error;
};

// A statistic was requested over an empty sample.
class StatisticsError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

// Efficiency figures are only defined for completed runs.
class EfficiencyUndefinedError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

// State reconstruction attempted without every agent's disclosure.
class IncompleteCooperationError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

}  // namespace qss
