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

#include "qss/kernels.hpp"

namespace qss::kernels::serial {

void apply_1q(std::span<Amplitude> amps, std::size_t mask, const Mat2& u) {
  for (std::size_t i = 0; i < amps.size(); ++i) {
    if (i & mask) continue;
    const std::size_t j = i | mask;
    const Amplitude a0 = amps[i];
    const Amplitude a1 = amps[j];
    amps[i] = u.m00 * a0 + u.m01 * a1;
    amps[j] = u.m10 * a0 + u.m11 * a1;
  }
}

void apply_cnot(std::span<Amplitude> amps, std::size_t control_mask,
                std::size_t target_mask) {
  for (std::size_t i = 0; i < amps.size(); ++i) {
    if ((i & control_mask) && !(i & target_mask)) std::swap(amps[i], amps[i | target_mask]);
  }
}

double norm_squared(std::span<const Amplitude> amps) {
  double acc = 0.0;
  for (const auto& a : amps) acc += std::norm(a);
  return acc;
}

double masked_weight(std::span<const Amplitude> amps, std::size_t mask,
                     std::size_t pattern) {
  double acc = 0.0;
  for (std::size_t i = 0; i < amps.size(); ++i) {
    if ((i & mask) == pattern) acc += std::norm(amps[i]);
  }
  return acc;
}

void project(std::span<Amplitude> amps, std::size_t mask, std::size_t pattern,
             double scale) {
  for (std::size_t i = 0; i < amps.size(); ++i) {
    amps[i] = ((i & mask) == pattern) ? amps[i] * scale : Amplitude{};
  }
}

void scale(std::span<Amplitude> amps, double factor) {
  for (auto& a : amps) a *= factor;
}

Amplitude inner(std::span<const Amplitude> a, std::span<const Amplitude> b) {
  Amplitude acc{};
  for (std::size_t i = 0; i < a.size(); ++i) acc += std::conj(a[i]) * b[i];
  return acc;
}

void kron(std::span<const Amplitude> a, std::span<const Amplitude> b,
          std::span<Amplitude> out) {
  for (std::size_t i = 0; i < a.size(); ++i) {
    for (std::size_t j = 0; j < b.size(); ++j) out[i * b.size() + j] = a[i] * b[j];
  }
}

}  // namespace qss::kernels::serial
