// Copyright 2026 The datamarket Authors.
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//     http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

// Serial reference kernels against their OpenMP counterparts.

#include <vector>

#include <benchmark/benchmark.h>

#include "datamarket/audit.hpp"
#include "datamarket/kernels.hpp"
#include "datamarket/markets.hpp"
#include "datamarket/payments.hpp"

namespace datamarket {
namespace {

Execution mode(const benchmark::State& state) {
  return state.range(0) == 0 ? Execution::kSerial : Execution::kParallel;
}

void label(benchmark::State& state) {
  state.SetLabel(state.range(0) == 0 ? "serial" : "parallel");
}

void BM_CoalitionValues(benchmark::State& state) {
  const auto m = build_random_mean_market(5, 10, 3, 1);
  std::vector<Index> players(10);
  for (Index j = 0; j < 10; ++j) players[static_cast<std::size_t>(j)] = j;
  for (auto _ : state) {
    benchmark::DoNotOptimize(coalition_values(m, m.true_costs(), players, mode(state)));
  }
  label(state);
}
BENCHMARK(BM_CoalitionValues)->Arg(0)->Arg(1)->Unit(benchmark::kMillisecond);

void BM_SampledShapley(benchmark::State& state) {
  const auto m = build_random_mean_market(5, 10, 3, 2);
  std::vector<Index> players(10);
  for (Index j = 0; j < 10; ++j) players[static_cast<std::size_t>(j)] = j;
  for (auto _ : state) {
    benchmark::DoNotOptimize(sampled_shapley(m, m.true_costs(), players, 500, 7, mode(state)));
  }
  label(state);
}
BENCHMARK(BM_SampledShapley)->Arg(0)->Arg(1)->Unit(benchmark::kMillisecond);

void BM_MyersonPayment(benchmark::State& state) {
  const auto m = build_random_mixture_market(8, 3);
  for (auto _ : state) {
    benchmark::DoNotOptimize(myerson_payment(m, m.true_costs(), {}, mode(state)));
  }
  label(state);
}
BENCHMARK(BM_MyersonPayment)->Arg(0)->Arg(1)->Unit(benchmark::kMillisecond);

void BM_ShapleySweep(benchmark::State& state) {
  const auto m = build_random_mean_market(5, 8, 3, 4);
  GridSpec grid;
  grid.points = 20;
  PaymentOptions options;
  options.execution = mode(state);
  const std::vector<double> points = grid.points_for(m.true_costs()[0]);
  for (auto _ : state) {
    benchmark::DoNotOptimize(misreport_sweep(m, Rule::kShapley, 0, points, options));
  }
  label(state);
}
BENCHMARK(BM_ShapleySweep)->Arg(0)->Arg(1)->Unit(benchmark::kMillisecond);

}  // namespace
}  // namespace datamarket

BENCHMARK_MAIN();
