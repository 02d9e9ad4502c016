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

#include "orbitcad/render/draw_plan.hpp"
#include "orbitcad/render/raster.hpp"
#include "orbitcad/render/sprite_sheet.hpp"
#include "orbitcad/scene/synthetic.hpp"

#include <benchmark/benchmark.h>

#include <random>

using namespace orbitcad;

static void BM_DrawPlan(benchmark::State& state) {
  std::mt19937_64 rng(7);
  std::vector<render::DrawCandidate> nodes;
  for (std::int64_t i = 0; i < state.range(0); ++i) {
    nodes.push_back({NodeId{static_cast<std::uint32_t>(i + 1)}, rng() % 20'000});
  }
  for (auto _ : state) benchmark::DoNotOptimize(render::plan_iterative_draw(nodes, 200'000));
  state.SetItemsProcessed(state.iterations() * state.range(0));
}
BENCHMARK(BM_DrawPlan)->Range(64, 1 << 16);

static void BM_Rasterize(benchmark::State& state) {
  SyntheticAssemblySpec spec;
  spec.target_triangles = 200'000;
  const SceneModel model = synthetic_assembly(spec);
  const auto items = render::make_draw_items(model);
  const int side = static_cast<int>(state.range(0));
  const Aabb b = compute_world_bounds(model, *model.root());
  const Vec3 c = 0.5 * (b.min + b.max);
  const double r = 0.5 * (b.max - b.min).norm();
  const render::Camera cam = render::Camera::look_at(c + Vec3(2 * r, 1.5 * r, 2 * r), c, Vec3::UnitY(), 0.8, 1.0, 0.1, 10 * r);
  for (auto _ : state) benchmark::DoNotOptimize(render::rasterize(items, cam, {side, side}));
}
BENCHMARK(BM_Rasterize)->Arg(256)->Arg(1024)->Unit(benchmark::kMillisecond);

static void BM_SpriteSheet(benchmark::State& state) {
  SyntheticAssemblySpec spec;
  spec.target_triangles = 50'000;
  const SceneModel model = synthetic_assembly(spec);
  render::SpriteSheetOptions o;
  o.tile = {128, 128};
  for (auto _ : state) benchmark::DoNotOptimize(render::encode_png(render::render_sprite_sheet(model, o)));
}
BENCHMARK(BM_SpriteSheet)->Unit(benchmark::kMillisecond);

BENCHMARK_MAIN();
