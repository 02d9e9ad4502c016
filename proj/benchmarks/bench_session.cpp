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

#include "orbitcad/server/segment_store.hpp"
#include "orbitcad/session/random_ops.hpp"
#include "orbitcad/session/state.hpp"
#include "orbitcad/session/wire.hpp"

#include <benchmark/benchmark.h>

#include <filesystem>
#include <unistd.h>

using namespace orbitcad;

namespace {

session::OpList make_log(std::size_t n, bool poses = false) {
  session::RandomOpOptions o;
  o.include_poses = poses;
  return session::RandomOpSource(42, o).log(n);
}

}  // namespace

static void BM_Fold(benchmark::State& state) {
  const auto log = make_log(static_cast<std::size_t>(state.range(0)));
  for (auto _ : state) benchmark::DoNotOptimize(session::fold(log));
  state.SetItemsProcessed(state.iterations() * state.range(0));
}
BENCHMARK(BM_Fold)->Range(1 << 10, 1 << 17);

static void BM_Squash(benchmark::State& state) {
  const auto log = make_log(static_cast<std::size_t>(state.range(0)), true);
  for (auto _ : state) benchmark::DoNotOptimize(session::squash(log));
  state.SetItemsProcessed(state.iterations() * state.range(0));
}
BENCHMARK(BM_Squash)->Range(1 << 10, 1 << 17);

static void BM_CanonicalSerialize(benchmark::State& state) {
  const auto s = session::fold(make_log(10'000));
  for (auto _ : state) benchmark::DoNotOptimize(session::canonical_serialize(s));
}
BENCHMARK(BM_CanonicalSerialize);

static void BM_WireEncode(benchmark::State& state) {
  const auto log = make_log(1024, true);
  std::size_t i = 0;
  for (auto _ : state) benchmark::DoNotOptimize(session::encode_op(log[i++ % log.size()]));
}
BENCHMARK(BM_WireEncode);

static void BM_WireDecode(benchmark::State& state) {
  std::vector<std::string> frames;
  for (const auto& op : make_log(1024, true)) frames.push_back(session::encode_op(op));
  std::size_t i = 0;
  for (auto _ : state) benchmark::DoNotOptimize(session::decode_op(frames[i++ % frames.size()]));
}
BENCHMARK(BM_WireDecode);

static void BM_SegmentAppend(benchmark::State& state) {
  const auto dir = std::filesystem::temp_directory_path() / ("orbitcad-bench-" + std::to_string(::getpid()));
  std::filesystem::create_directories(dir);
  const auto log = make_log(4096);
  {
    server::SegmentLog seg(dir, "bench", state.range(0) != 0);
    std::size_t i = 0;
    session::OpId next = 1;
    for (auto _ : state) {
      session::SessionOp op = log[i++ % log.size()];
      op.op_id = next++;
      seg.append(op);
    }
  }
  std::filesystem::remove_all(dir);
  state.SetItemsProcessed(state.iterations());
}
BENCHMARK(BM_SegmentAppend)->Arg(0)->Arg(1)->ArgNames({"fsync"});

BENCHMARK_MAIN();
