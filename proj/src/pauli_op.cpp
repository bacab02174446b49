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

#include "qss/pauli_op.hpp"

#include <string>

#include "qss/errors.hpp"

namespace qss {

kernels::Mat2 matrix_of(PauliOp op) {
  switch (op) {
    case PauliOp::U0: return {1.0, 0.0, 0.0, 1.0};
    case PauliOp::U1: return {1.0, 0.0, 0.0, -1.0};
    case PauliOp::U2: return {0.0, 1.0, 1.0, 0.0};
    case PauliOp::U3: return {0.0, 1.0, -1.0, 0.0};
  }
  throw ArgumentError("matrix_of: invalid PauliOp");
}

std::string_view to_string(PauliOp op) {
  switch (op) {
    case PauliOp::U0: return "U0";
    case PauliOp::U1: return "U1";
    case PauliOp::U2: return "U2";
    case PauliOp::U3: return "U3";
  }
  return "?";
}

PauliOp pauli_from_string(std::string_view text) {
  for (PauliOp op : kAllPauliOps) {
    if (to_string(op) == text) return op;
  }
  throw ArgumentError("unknown Pauli operation '" + std::string(text) + "'");
}

}  // namespace qss
