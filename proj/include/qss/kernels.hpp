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

#include <complex>
#include <cstddef>
#include <span>

// Dense amplitude kernels. Every kernel exists twice with the same signature:
// `serial` is the straightforward reference kept for testing and benchmarks,
// `parallel` is the OpenMP implementation used by StateVector.
//
// Masks select qubits by bit position in the amplitude index. Reductions in
// the parallel namespace sum fixed-size chunks and then fold the partial sums
// in index order, so their result does not depend on the thread count.

namespace qss::kernels {

using Amplitude = std::complex<double>;

struct Mat2 {
  Amplitude m00, m01, m10, m11;
};

/// Parallel loops are only opened for registers with at least this many
/// amplitudes; below it the OpenMP fork costs more than the loop.
inline constexpr std::size_t kParallelMinSize = std::size_t{1} << 12;
/// Chunk length for deterministic parallel reductions.
inline constexpr std::size_t kReduceChunk = std::size_t{1} << 12;

#define QSS_KERNEL_DECLS                                                            \
  void apply_1q(std::span<Amplitude> amps, std::size_t mask, const Mat2& u);        \
  void apply_cnot(std::span<Amplitude> amps, std::size_t control_mask,              \
                  std::size_t target_mask);                                         \
  double norm_squared(std::span<const Amplitude> amps);                             \
  double masked_weight(std::span<const Amplitude> amps, std::size_t mask,           \
                       std::size_t pattern);                                        \
  void project(std::span<Amplitude> amps, std::size_t mask, std::size_t pattern,    \
               double scale);                                                       \
  void scale(std::span<Amplitude> amps, double factor);                             \
  Amplitude inner(std::span<const Amplitude> a, std::span<const Amplitude> b);      \
  void kron(std::span<const Amplitude> a, std::span<const Amplitude> b,             \
            std::span<Amplitude> out);

namespace serial {
QSS_KERNEL_DECLS
}  // namespace serial

namespace parallel {
QSS_KERNEL_DECLS
}  // namespace parallel

#undef QSS_KERNEL_DECLS

}  // namespace qss::kernels
