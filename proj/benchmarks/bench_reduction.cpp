// Copyright 2026 The OrbitCAD Authors
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

#include "orbitcad/reduction/plan.hpp"
#include "orbitcad/scene/synthetic.hpp"

#include <benchmark/benchmark.h>

using namespace orbitcad;

static void BM_ApplyPlan(benchmark::State& state) {
  SyntheticAssemblySpec spec;
  spec.target_triangles = static_cast<std::uint64_t>(state.range(0));
  const SceneModel model = synthetic_assembly(spec);
  reduction::ReductionPlan plan;
  plan.steps = {reduction::RemoveBySize{0.05}, reduction::RemoveByName{"washer", false},
                reduction::ApplyLod{std::nullopt, {0.6}, 1}};
  for (auto _ : state) benchmark::DoNotOptimize(reduction::apply_plan(model, plan));
  state.SetItemsProcessed(state.iterations() * state.range(0));
}
BENCHMARK(BM_ApplyPlan)->Arg(350'000)->Arg(3'500'000)->Unit(benchmark::kMillisecond);

static void BM_VisibilityCull(benchmark::State& state) {
  SyntheticAssemblySpec spec;
  spec.target_triangles = 200'000;
  const SceneModel model = synthetic_assembly(spec);
  const Aabb b = compute_world_bounds(model, *model.root());
  const Vec3 center = 0.5 * (b.min + b.max);
  const double radius = 0.5 * (b.max - b.min).norm() * 1.05;
  for (auto _ : state) {
    benchmark::DoNotOptimize(reduction::visibility_cull(model, center, radius, static_cast<int>(state.range(0))));
  }
}
BENCHMARK(BM_VisibilityCull)->Arg(16)->Arg(64)->Unit(benchmark::kMillisecond);

BENCHMARK_MAIN();
