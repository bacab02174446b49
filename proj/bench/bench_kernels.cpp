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

// Serial vs OpenMP kernels, and serial vs parallel campaign execution.

#include <benchmark/benchmark.h>

#include <vector>

#include "qss/harness.hpp"
#include "qss/kernels.hpp"
#include "qss/random_source.hpp"

namespace {

using qss::kernels::Amplitude;

std::vector<Amplitude> random_amps(std::size_t n_qubits) {
  qss::RandomSource rng(n_qubits);
  std::vector<Amplitude> a(std::size_t{1} << n_qubits);
  for (auto& x : a) x = {rng.uniform() - 0.5, rng.uniform() - 0.5};
  return a;
}

const qss::kernels::Mat2 kH{M_SQRT1_2, M_SQRT1_2, M_SQRT1_2, -M_SQRT1_2};

template <bool Parallel>
void BM_apply_1q(benchmark::State& state) {
  const auto n = static_cast<std::size_t>(state.range(0));
  auto a = random_amps(n);
  std::size_t q = 0;
  for (auto _ : state) {
    const std::size_t mask = std::size_t{1} << (q++ % n);
    if constexpr (Parallel) {
      qss::kernels::parallel::apply_1q(a, mask, kH);
    } else {
      qss::kernels::serial::apply_1q(a, mask, kH);
    }
    benchmark::ClobberMemory();
  }
  state.SetItemsProcessed(state.iterations() * static_cast<std::int64_t>(a.size()));
}

template <bool Parallel>
void BM_apply_cnot(benchmark::State& state) {
  const auto n = static_cast<std::size_t>(state.range(0));
  auto a = random_amps(n);
  for (auto _ : state) {
    if constexpr (Parallel) {
      qss::kernels::parallel::apply_cnot(a, 1, std::size_t{1} << (n - 1));
    } else {
      qss::kernels::serial::apply_cnot(a, 1, std::size_t{1} << (n - 1));
    }
    benchmark::ClobberMemory();
  }
  state.SetItemsProcessed(state.iterations() * static_cast<std::int64_t>(a.size()));
}

template <bool Parallel>
void BM_norm(benchmark::State& state) {
  const auto a = random_amps(static_cast<std::size_t>(state.range(0)));
  for (auto _ : state) {
    double v = Parallel ? qss::kernels::parallel::norm_squared(a)
                        : qss::kernels::serial::norm_squared(a);
    benchmark::DoNotOptimize(v);
  }
  state.SetItemsProcessed(state.iterations() * static_cast<std::int64_t>(a.size()));
}

template <qss::harness::Execution Exec>
void BM_campaign(benchmark::State& state) {
  qss::ProtocolConfig c;
  c.n_agents = 2;
  c.n_pairs = 200;
  for (auto _ : state) {
    auto stats = qss::harness::run_campaign(c, static_cast<std::size_t>(state.range(0)), Exec);
    benchmark::DoNotOptimize(stats);
  }
}

}  // namespace

BENCHMARK(BM_apply_1q<false>)->DenseRange(12, 22, 5);
BENCHMARK(BM_apply_1q<true>)->DenseRange(12, 22, 5);
BENCHMARK(BM_apply_cnot<false>)->DenseRange(12, 22, 5);
BENCHMARK(BM_apply_cnot<true>)->DenseRange(12, 22, 5);
BENCHMARK(BM_norm<false>)->DenseRange(12, 22, 5);
BENCHMARK(BM_norm<true>)->DenseRange(12, 22, 5);
BENCHMARK(BM_campaign<qss::harness::Execution::Serial>)->Arg(64)->Unit(benchmark::kMillisecond);
BENCHMARK(BM_campaign<qss::harness::Execution::Parallel>)->Arg(64)->Unit(benchmark::kMillisecond);

BENCHMARK_MAIN();
