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

#include "orbitcad/align/layout.hpp"
#include "orbitcad/align/pnp.hpp"
#include "orbitcad/io/model_io.hpp"
#include "orbitcad/scene/synthetic.hpp"

#include <benchmark/benchmark.h>

using namespace orbitcad;

namespace {

const SceneModel& model() {
  static const SceneModel m = [] {
    SyntheticAssemblySpec spec;
    spec.target_triangles = 100'000;
    return synthetic_assembly(spec);
  }();
  return m;
}

}  // namespace

static void BM_Export(benchmark::State& state) {
  const auto f = static_cast<io::Format>(state.range(0));
  for (auto _ : state) benchmark::DoNotOptimize(io::export_model(model(), f));
  state.SetLabel(std::string(io::format_name(f)));
}

static void BM_Import(benchmark::State& state) {
  const auto f = static_cast<io::Format>(state.range(0));
  const auto bytes = io::export_model(model(), f).bytes;
  for (auto _ : state) benchmark::DoNotOptimize(io::import_model(bytes, f));
  state.SetBytesProcessed(state.iterations() * static_cast<std::int64_t>(bytes.size()));
  state.SetLabel(std::string(io::format_name(f)));
}

static void Formats(benchmark::internal::Benchmark* b) {
  for (io::Format f : {io::Format::kObj, io::Format::kPly, io::Format::kGltf}) b->Arg(static_cast<int>(f));
  b->Unit(benchmark::kMillisecond);
}
BENCHMARK(BM_Export)->Apply(Formats);
BENCHMARK(BM_Import)->Apply(Formats);

static void BM_SolvePnp(benchmark::State& state) {
  const align::CameraIntrinsics k;
  Pose p;
  p.rotation = Quat(Eigen::AngleAxisd(3.0, Vec3(1, 0.1, 0).normalized()));
  p.translation = Vec3(0.05, -0.02, 1.0);
  const auto pts = align::synthesize(align::build_tag_layout(), k, p);
  for (auto _ : state) benchmark::DoNotOptimize(align::solve_pnp(pts, k));
}
BENCHMARK(BM_SolvePnp);

BENCHMARK_MAIN();
