// Copyright 2026 The maevo Authors
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

#include <benchmark/benchmark.h>

#include "maevo/doa.hpp"
#include "maevo/lifecycle.hpp"
#include "maevo/optimizer.hpp"

namespace {

using namespace maevo;

const DoASet kThree({40.0, 85.0, 130.0});

void BM_PrincipalEigenpair(benchmark::State& state) {
  const ArrayConstraints c = ArrayConstraints::for_wavelength(kDefaultWavelength, static_cast<int>(state.range(0)));
  const auto a = gain_matrix(ArrayGeometry::uniform(c), kThree);
  for (auto _ : state) benchmark::DoNotOptimize(principal_eigenpair(a));
}
BENCHMARK(BM_PrincipalEigenpair)->Arg(4)->Arg(8)->Arg(16);

void BM_ProjectPositions(benchmark::State& state) {
  const ArrayConstraints c;
  const std::vector<double> raw{-0.7, -0.1, -0.09, 0.0, 0.01, 0.02, 0.4, 0.9};
  for (auto _ : state) benchmark::DoNotOptimize(project_positions(raw, c));
}
BENCHMARK(BM_ProjectPositions);

void BM_OptimizeMovable(benchmark::State& state) {
  OptimizerConfig cfg;
  cfg.strategy = state.range(0) == 0 ? Strategy::GradientAlternating : Strategy::CoordinateSearch;
  cfg.seed = 1;
  for (auto _ : state) benchmark::DoNotOptimize(optimize_movable(kThree, cfg, ArrayConstraints{}));
  state.SetLabel(std::string(to_string(cfg.strategy)));
}
BENCHMARK(BM_OptimizeMovable)->Arg(0)->Arg(1)->Unit(benchmark::kMillisecond);

void BM_EstimateDoas(benchmark::State& state) {
  const auto g = ArrayGeometry::uniform(ArrayConstraints{});
  const auto r = sample_covariance(synthesize_csi(g, kThree, 20.0, kDefaultSnapshots, 3));
  EstimationOptions opt;
  opt.method = state.range(0) == 0 ? DoaMethod::Bartlett : DoaMethod::Music;
  for (auto _ : state) benchmark::DoNotOptimize(estimate_doas(r, g, 3, opt));
  state.SetLabel(std::string(to_string(opt.method)));
}
BENCHMARK(BM_EstimateDoas)->Arg(0)->Arg(1)->Unit(benchmark::kMicrosecond);

void BM_Episode(benchmark::State& state) {
  ScenarioConfig cfg = default_scenario();
  cfg.trajectory.num_steps = static_cast<int>(state.range(0));
  for (auto _ : state) benchmark::DoNotOptimize(run_episode(cfg));
}
BENCHMARK(BM_Episode)->Arg(10)->Arg(50)->Unit(benchmark::kMillisecond);

}  // namespace

BENCHMARK_MAIN();
