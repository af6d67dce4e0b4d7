/* Copyright 2026 The qmetro Authors. All Rights Reserved.

Licensed under the Apache License, Version 2.0 (the "License");
you may not use this file except in compliance with the License.
You may obtain a copy of the License at

    http://www.apache.org/licenses/LICENSE-2.0

Unless required by applicable law or agreed to in writing, software
distributed under the License is distributed on an "AS IS" BASIS,
WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
See the License for the specific language governing permissions and
limitations under the License.
==============================================================================*/
#include <benchmark/benchmark.h>

#include "qmetro/adaptive.hpp"
#include "qmetro/qfim.hpp"
#include "qmetro/robustness.hpp"
#include "qmetro/simulator.hpp"

namespace qmetro {
namespace {

const Vector3 kAlpha(1.1, 0.4, -0.7);

void BM_Generator(benchmark::State& state) {
  for (auto _ : state) benchmark::DoNotOptimize(generator(btp_model(), kAlpha, 1, 3.7));
}
BENCHMARK(BM_Generator);

void BM_QfimEntangled(benchmark::State& state) {
  for (auto _ : state) benchmark::DoNotOptimize(qfim_entangled(btp_model(), kAlpha, 3.7));
}
BENCHMARK(BM_QfimEntangled);

void BM_SolveG0(benchmark::State& state) {
  for (auto _ : state) benchmark::DoNotOptimize(solve_g0(1e-6));
}
BENCHMARK(BM_SolveG0);

void BM_PlanSchedule(benchmark::State& state) {
  const int m = static_cast<int>(state.range(0));
  for (auto _ : state) benchmark::DoNotOptimize(plan_schedule(1.0, 1000.0, TargetIterations{m}));
}
BENCHMARK(BM_PlanSchedule)->Arg(4)->Arg(64);

void BM_RobustnessMc(benchmark::State& state) {
  for (auto _ : state) benchmark::DoNotOptimize(robustness_mc(4, state.range(0), 1));
  state.SetItemsProcessed(state.iterations() * state.range(0));
}
BENCHMARK(BM_RobustnessMc)->Arg(10000)->Arg(100000)->Unit(benchmark::kMillisecond);

void BM_Simulate(benchmark::State& state) {
  ExperimentConfig c;
  c.beta_true = Vector3(0.8, -0.4, 0.3);
  c.iterations = 4;
  c.trials = 1000;
  c.backend = state.range(0) == 0 ? Backend::Gaussian : Backend::Bell;
  std::uint64_t stream = 0;
  for (auto _ : state) {
    CounterRng rng(7, stream++);
    benchmark::DoNotOptimize(run_adaptive_experiment(c, rng));
  }
}
BENCHMARK(BM_Simulate)->Arg(0)->Arg(1);

}  // namespace
}  // namespace qmetro

BENCHMARK_MAIN();
