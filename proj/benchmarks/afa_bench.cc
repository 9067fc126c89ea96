// Copyright 2026 The AFA Authors
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//     https://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.
//
// Serial-reference vs OpenMP comparison for the data-parallel kernels: grid
// construction, grid phi evaluation, and an end-to-end Levy CDF query.

#include <benchmark/benchmark.h>

#include "afa/grid_pld.h"
#include "afa/levy.h"
#include "afa/parallel.h"
#include "afa/phi.h"

namespace {

afa::SubsampledGaussianSpec Exp3Spec() {
  afa::SubsampledGaussianSpec spec;
  spec.sigma = 2.0;
  spec.gamma = 0.01;
  spec.direction = afa::MixtureDirection::kRemove;
  return spec;
}

void BM_BuildGrid(benchmark::State& state, bool parallel) {
  afa::SetParallelEnabled(parallel);
  const long n = state.range(0);
  for (auto _ : state) {
    afa::GridPld grid = afa::BuildGrid(Exp3Spec(), 100.0, n);
    benchmark::DoNotOptimize(grid.mass_p);
  }
  afa::SetParallelEnabled(true);
}

void BM_GridPhi(benchmark::State& state, bool parallel) {
  afa::SetParallelEnabled(true);
  const long n = state.range(0);
  const afa::GridPld grid = afa::BuildGrid(Exp3Spec(), 100.0, n);
  const afa::PhiTerm& term = grid.Term(afa::Side::kLo);
  afa::SetParallelEnabled(parallel);
  double t = 0.1;
  for (auto _ : state) {
    // Fresh t every iteration to bypass the per-term cache.
    benchmark::DoNotOptimize(term.LogPhi(t, afa::Direction::kP));
    t += 1e-7;
  }
  afa::SetParallelEnabled(true);
}

void BM_LevyCdf(benchmark::State& state, bool parallel) {
  afa::SetParallelEnabled(parallel);
  const long n = state.range(0);
  for (auto _ : state) {
    state.PauseTiming();
    const afa::GridPld grid = afa::BuildGrid(Exp3Spec(), 100.0, n);
    afa::LogPhiLedger ledger;
    ledger = ledger.Append(grid.Term(afa::Side::kLo), 100);
    state.ResumeTiming();
    const afa::LevyResult r = afa::LevyCdf(ledger, afa::Direction::kP, 1.0);
    benchmark::DoNotOptimize(r.value);
  }
  afa::SetParallelEnabled(true);
}

}  // namespace

BENCHMARK_CAPTURE(BM_BuildGrid, serial, false)->Arg(100000)->Unit(benchmark::kMillisecond);
BENCHMARK_CAPTURE(BM_BuildGrid, openmp, true)->Arg(100000)->Unit(benchmark::kMillisecond);
BENCHMARK_CAPTURE(BM_GridPhi, serial, false)->Arg(100000)->Unit(benchmark::kMillisecond);
BENCHMARK_CAPTURE(BM_GridPhi, openmp, true)->Arg(100000)->Unit(benchmark::kMillisecond);
BENCHMARK_CAPTURE(BM_LevyCdf, serial, false)->Arg(10000)->Unit(benchmark::kMillisecond);
BENCHMARK_CAPTURE(BM_LevyCdf, openmp, true)->Arg(10000)->Unit(benchmark::kMillisecond);

BENCHMARK_MAIN();
