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

#include <array>
#include <cstdint>
#include <string_view>

#include "qss/kernels.hpp"

namespace qss {

/// The four local encoding operations: U0 = I, U1 = sigma_z, U2 = sigma_x,
/// U3 = i*sigma_y = |0><1| - |1><0|.
enum class PauliOp : std::uint8_t { U0 = 0, U1 = 1, U2 = 2, U3 = 3 };

inline constexpr std::array<PauliOp, 4> kAllPauliOps = {PauliOp::U0, PauliOp::U1,
                                                        PauliOp::U2, PauliOp::U3};

/// The exact 2x2 matrix of `op` (phase included).
kernels::Mat2 matrix_of(PauliOp op);

std::string_view to_string(PauliOp op);
/// Accepts "U0".."U3"; throws ArgumentError otherwise.
PauliOp pauli_from_string(std::string_view text);

}  // namespace qss
