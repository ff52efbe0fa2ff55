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

#include <vector>

#include <benchmark/benchmark.h>

#include "mtagg/synthetic.hpp"
#include "mtagg/trainer.hpp"
#include "mtagg/variational.hpp"

namespace {

using namespace mtagg;

struct Problem {
  std::vector<TaskDataset> data;
  Model model;
};

Problem poisson_problem(Eigen::Index num_inducing) {
  const auto s = synth_poisson_two_task(1);
  Problem p{{s.train[0], s.train[1]}, {}};
  ModelSpec spec;
  spec.num_inducing = num_inducing;
  spec.init_lengthscales = {Eigen::VectorXd::Constant(1, 10.0)};
  p.model = initialize_model(p.data, spec, 0);
  return p;
}

void BM_FullElbo(benchmark::State &state) {
  const auto p = poisson_problem(state.range(0));
  for (auto _ : state) {
    benchmark::DoNotOptimize(full_elbo(p.model, p.data));
  }
}
BENCHMARK(BM_FullElbo)->Arg(20)->Arg(50)->Arg(100)->Unit(benchmark::kMillisecond);

void BM_ElboGradients(benchmark::State &state) {
  const auto p = poisson_problem(state.range(0));
  const auto rows = all_rows(p.data);
  const std::vector<double> scale(p.data.size(), 1.0);
  for (auto _ : state) {
    benchmark::DoNotOptimize(elbo_gradients(p.model, p.data, rows, scale).elbo);
  }
}
BENCHMARK(BM_ElboGradients)->Arg(20)->Arg(50)->Arg(100)->Unit(benchmark::kMillisecond);

void BM_TrainCycle(benchmark::State &state) {
  const auto p = poisson_problem(50);
  TrainConfig cfg;
  cfg.cycles = 1;
  cfg.e_steps = 20;
  cfg.m_steps = 10;
  cfg.tolerance = 0.0;
  for (auto _ : state) {
    benchmark::DoNotOptimize(train(p.model, p.data, cfg).trace.size());
  }
}
BENCHMARK(BM_TrainCycle)->Unit(benchmark::kMillisecond);

} // namespace

BENCHMARK_MAIN();
