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

#include <omp.h>

#include <cstdint>
#include <vector>

#include "qss/kernels.hpp"

namespace qss::kernels::parallel {

namespace {

using Index = std::int64_t;

// Index of the k-th amplitude whose `mask` bit is clear.
inline std::size_t insert_zero(std::size_t k, std::size_t mask) {
  const std::size_t low = k & (mask - 1);
  return ((k - low) << 1) | low;
}

template <typename Term>
double chunked_sum(std::size_t n, Term term) {
  const std::size_t chunks = (n + kReduceChunk - 1) / kReduceChunk;
  if (chunks <= 1) {
    double acc = 0.0;
    for (std::size_t i = 0; i < n; ++i) acc += term(i);
    return acc;
  }
  std::vector<double> partial(chunks, 0.0);
#pragma omp parallel for schedule(static)
  for (Index c = 0; c < static_cast<Index>(chunks); ++c) {
    const std::size_t begin = static_cast<std::size_t>(c) * kReduceChunk;
    const std::size_t end = std::min(n, begin + kReduceChunk);
    double acc = 0.0;
    for (std::size_t i = begin; i < end; ++i) acc += term(i);
    partial[c] = acc;
  }
  double total = 0.0;
  for (double p : partial) total += p;
  return total;
}

}  // namespace

void apply_1q(std::span<Amplitude> amps, std::size_t mask, const Mat2& u) {
  const Index half = static_cast<Index>(amps.size() / 2);
  // Plain real arithmetic: std::complex's operator* carries NaN-recovery
  // branches that the outlined loop body does not optimize away. Same
  // rounding as the serial kernel for finite inputs.
  const double r00 = u.m00.real(), i00 = u.m00.imag(), r01 = u.m01.real(), i01 = u.m01.imag();
  const double r10 = u.m10.real(), i10 = u.m10.imag(), r11 = u.m11.real(), i11 = u.m11.imag();
  Amplitude* const data = amps.data();
#pragma omp parallel for schedule(static) if (amps.size() >= kParallelMinSize)
  for (Index k = 0; k < half; ++k) {
    const std::size_t i = insert_zero(static_cast<std::size_t>(k), mask);
    const std::size_t j = i | mask;
    const double x0 = data[i].real(), y0 = data[i].imag();
    const double x1 = data[j].real(), y1 = data[j].imag();
    data[i] = {(r00 * x0 - i00 * y0) + (r01 * x1 - i01 * y1),
               (r00 * y0 + i00 * x0) + (r01 * y1 + i01 * x1)};
    data[j] = {(r10 * x0 - i10 * y0) + (r11 * x1 - i11 * y1),
               (r10 * y0 + i10 * x0) + (r11 * y1 + i11 * x1)};
  }
}

void apply_cnot(std::span<Amplitude> amps, std::size_t control_mask,
                std::size_t target_mask) {
  const Index half = static_cast<Index>(amps.size() / 2);
#pragma omp parallel for schedule(static) if (amps.size() >= kParallelMinSize)
  for (Index k = 0; k < half; ++k) {
    const std::size_t i = insert_zero(static_cast<std::size_t>(k), target_mask);
    if (i & control_mask) std::swap(amps[i], amps[i | target_mask]);
  }
}

double norm_squared(std::span<const Amplitude> amps) {
  return chunked_sum(amps.size(), [&](std::size_t i) { return std::norm(amps[i]); });
}

double masked_weight(std::span<const Amplitude> amps, std::size_t mask,
                     std::size_t pattern) {
  return chunked_sum(amps.size(), [&](std::size_t i) {
    return (i & mask) == pattern ? std::norm(amps[i]) : 0.0;
  });
}

void project(std::span<Amplitude> amps, std::size_t mask, std::size_t pattern,
             double scale) {
  const Index n = static_cast<Index>(amps.size());
#pragma omp parallel for schedule(static) if (amps.size() >= kParallelMinSize)
  for (Index k = 0; k < n; ++k) {
    const auto i = static_cast<std::size_t>(k);
    amps[i] = ((i & mask) == pattern) ? amps[i] * scale : Amplitude{};
  }
}

void scale(std::span<Amplitude> amps, double factor) {
  const Index n = static_cast<Index>(amps.size());
#pragma omp parallel for schedule(static) if (amps.size() >= kParallelMinSize)
  for (Index k = 0; k < n; ++k) amps[static_cast<std::size_t>(k)] *= factor;
}

Amplitude inner(std::span<const Amplitude> a, std::span<const Amplitude> b) {
  const double re = chunked_sum(a.size(), [&](std::size_t i) {
    return (std::conj(a[i]) * b[i]).real();
  });
  const double im = chunked_sum(a.size(), [&](std::size_t i) {
    return (std::conj(a[i]) * b[i]).imag();
  });
  return {re, im};
}

void kron(std::span<const Amplitude> a, std::span<const Amplitude> b,
          std::span<Amplitude> out) {
  const Index n = static_cast<Index>(out.size());
  const std::size_t nb = b.size();
#pragma omp parallel for schedule(static) if (out.size() >= kParallelMinSize)
  for (Index k = 0; k < n; ++k) {
    const auto idx = static_cast<std::size_t>(k);
    out[idx] = a[idx / nb] * b[idx % nb];
  }
}

}  // namespace qss::kernels::parallel
