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

#include <doctest.h>
#include <omp.h>

#include <cmath>
#include <vector>

#include "qss/kernels.hpp"
#include "qss/random_source.hpp"

using namespace qss;
using namespace qss::kernels;

namespace {

std::vector<Amplitude> random_amps(std::size_t n, std::uint64_t seed) {
  RandomSource rng(seed);
  std::vector<Amplitude> v(std::size_t{1} << n);
  for (auto& a : v) a = {rng.normal(), rng.normal()};
  return v;
}

const Mat2 kGate{{0.6, 0.1}, {-0.2, 0.7}, {0.3, -0.4}, {0.5, 0.25}};

}  // namespace

TEST_CASE("parallel kernels reproduce the serial reference") {
  for (std::size_t n : {1U, 3U, 11U, 12U, 13U, 15U}) {
    CAPTURE(n);
    const auto base = random_amps(n, 100 + n);
    const std::size_t dim = base.size();
    for (std::size_t q = 0; q < n; ++q) {
      const std::size_t mask = std::size_t{1} << q;
      auto s = base;
      auto p = base;
      serial::apply_1q(s, mask, kGate);
      parallel::apply_1q(p, mask, kGate);
      CHECK(s == p);
      if (n > 1) {
        const std::size_t tmask = std::size_t{1} << ((q + 1) % n);
        s = base;
        p = base;
        serial::apply_cnot(s, mask, tmask);
        parallel::apply_cnot(p, mask, tmask);
        CHECK(s == p);
      }
    }
    const std::size_t mask = n > 1 ? 0b11 : 0b1;
    const double ws = serial::masked_weight(base, mask, 1);
    const double wp = parallel::masked_weight(base, mask, 1);
    const double ns = serial::norm_squared(base);
    const double np = parallel::norm_squared(base);
    const auto other = random_amps(n, 7);
    const Amplitude is = serial::inner(base, other);
    const Amplitude ip = parallel::inner(base, other);
    if (dim <= kReduceChunk) {
      // One chunk: identical summation order.
      CHECK(ws == wp);
      CHECK(ns == np);
      CHECK(is == ip);
    } else {
      CHECK(wp == doctest::Approx(ws).epsilon(1e-12));
      CHECK(np == doctest::Approx(ns).epsilon(1e-12));
      CHECK(std::abs(ip - is) < 1e-9 * std::abs(is) + 1e-12);
    }
    auto s = base;
    auto p = base;
    serial::project(s, mask, 1, 2.0);
    parallel::project(p, mask, 1, 2.0);
    CHECK(s == p);
    serial::scale(s, 0.5);
    parallel::scale(p, 0.5);
    CHECK(s == p);
  }
}

TEST_CASE("kron kernels agree") {
  const auto a = random_amps(6, 1);
  const auto b = random_amps(8, 2);
  std::vector<Amplitude> s(a.size() * b.size());
  std::vector<Amplitude> p(s.size());
  serial::kron(a, b, s);
  parallel::kron(a, b, p);
  CHECK(s == p);
  CHECK(s[3 * b.size() + 5] == a[3] * b[5]);
}

TEST_CASE("parallel reductions do not depend on the thread count") {
  const auto base = random_amps(16, 9);
  const int saved = omp_get_max_threads();
  omp_set_num_threads(1);
  const double one = parallel::norm_squared(base);
  const Amplitude inner_one = parallel::inner(base, base);
  omp_set_num_threads(4);
  const double four = parallel::norm_squared(base);
  const Amplitude inner_four = parallel::inner(base, base);
  omp_set_num_threads(saved);
  CHECK(one == four);
  CHECK(inner_one == inner_four);
}

TEST_CASE("masked weight and projection select the right amplitudes") {
  std::vector<Amplitude> v = {1.0, 2.0, 3.0, 4.0};  // |00>,|01>,|10>,|11>
  CHECK(serial::masked_weight(v, 0b10, 0b10) == doctest::Approx(25.0));
  parallel::project(v, 0b01, 0b00, 1.0);
  CHECK(v == std::vector<Amplitude>{1.0, 0.0, 3.0, 0.0});
}
