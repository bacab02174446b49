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

#include "qss/outcome.hpp"

namespace qss {

const StageStats* RunOutcome::stage(const std::string& name) const {
  for (const auto& s : stages) {
    if (s.name == name) return &s;
  }
  return nullptr;
}

double RunOutcome::overall_error_rate() const {
  std::size_t samples = 0;
  std::size_t errors = 0;
  for (const auto& s : stages) {
    samples += s.samples;
    errors += s.errors;
  }
  return samples == 0 ? 0.0 : static_cast<double>(errors) / static_cast<double>(samples);
}

}  // namespace qss
