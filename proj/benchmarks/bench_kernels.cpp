/*
 * Copyright 2026 The mtagg Authors
 *
 * Licensed under the Apache License, Version 2.0 (the "License");
 * you may not use this file except in compliance with the License.
 * You may obtain a copy of the License at
 *
 *     http://www.apache.org/licenses/LICENSE-2.0
 *
 * Unless required by applicable law or agreed to in writing, software
 * distributed under the License is distributed on an "AS IS" BASIS,
 * WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
 * See the License for the specific language governing permissions and
 * limitations under the License.
 */

#include <random>
#include <vector>

#include <benchmark/benchmark.h>

#include "mtagg/kernels.hpp"
#include "mtagg/lmc.hpp"

namespace {

using namespace mtagg;

void BM_IntervalInterval(benchmark::State &state) {
  double a = 0.0;
  for (auto _ : state) {
    benchmark::DoNotOptimize(k_interval_interval_1d(a, a + 1.3, 0.4, 2.1, 0.7));
    a += 1e-9;
  }
}
BENCHMARK(BM_IntervalInterval);

void BM_IntervalPoint(benchmark::State &state) {
  double x = 0.0;
  for (auto _ : state) {
    benchmark::DoNotOptimize(k_interval_point_1d(0.0, 1.3, x, 0.7));
    x += 1e-9;
  }
}
BENCHMARK(BM_IntervalPoint);

enum class Kind { Point, Box, Triangle };

void BM_SupportPair(benchmark::State &state, Kind kind) {
  std::mt19937_64 rng(1);
  std::uniform_real_distribution<double> u(0.0, 5.0);
  auto make = [&] {
    const Eigen::Vector2d lo(u(rng), u(rng));
    switch (kind) {
    case Kind::Point:
      return Support::point(lo);
    case Kind::Box:
      return Support::box(lo, lo + Eigen::Vector2d(1.0, 0.5));
    default:
      return Support::polygon({lo, lo + Eigen::Vector2d(1.0, 0.0),
                               lo + Eigen::Vector2d(0.3, 0.8)});
    }
  };
  const Support s = make();
  const Support s2 = make();
  EQParams p;
  p.lengthscales = Eigen::Vector2d(1.2, 0.8);
  for (auto _ : state) {
    benchmark::DoNotOptimize(k_support(s, s2, p));
  }
}
BENCHMARK_CAPTURE(BM_SupportPair, point, Kind::Point);
BENCHMARK_CAPTURE(BM_SupportPair, box, Kind::Box);
BENCHMARK_CAPTURE(BM_SupportPair, triangle, Kind::Triangle);

void BM_BoxGram(benchmark::State &state) {
  const auto n = static_cast<int>(state.range(0));
  std::mt19937_64 rng(2);
  std::uniform_real_distribution<double> u(0.0, 10.0);
  std::vector<Support> supports;
  for (int i = 0; i < n; ++i) {
    const Eigen::Vector2d lo(u(rng), u(rng));
    supports.push_back(Support::box(lo, lo + Eigen::Vector2d(0.5, 0.5)));
  }
  std::vector<LatentRow> rows;
  for (const auto &s : supports) {
    rows.push_back({0, s});
  }
  LmcParams params;
  LatentKernel l;
  l.kernel.lengthscales = Eigen::Vector2d(1.0, 1.0);
  l.mixing = Eigen::MatrixXd::Ones(1, 1);
  params.latents.push_back(l);
  for (auto _ : state) {
    benchmark::DoNotOptimize(build_kff(rows, params).data());
  }
  state.SetComplexityN(n);
}
BENCHMARK(BM_BoxGram)->RangeMultiplier(2)->Range(32, 256)->Complexity();

} // namespace

BENCHMARK_MAIN();
