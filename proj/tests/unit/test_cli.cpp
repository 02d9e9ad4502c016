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

#include "fixtures.hpp"

#include "orbitcad/session/state.hpp"
#include "orbitcad/session/wire.hpp"

#include <doctest.h>
#include <json.hpp>

#include <array>
#include <cstdio>
#include <fstream>
#include <sys/wait.h>

using namespace orbitcad::testing;
using nlohmann::json;

namespace {

struct Run {
  int code = -1;
  std::string out;
};

Run run(const std::string& args, const std::filesystem::path& cwd) {
  const std::string cmd = "cd '" + cwd.string() + "' && '" ORBITCAD_BIN "' " + args + " 2>/dev/null";
  Run r;
  FILE* p = popen(cmd.c_str(), "r");
  REQUIRE(p != nullptr);
  std::array<char, 4096> buf;
  std::size_t n;
  while ((n = fread(buf.data(), 1, buf.size(), p)) > 0) r.out.append(buf.data(), n);
  const int status = pclose(p);
  r.code = WIFEXITED(status) ? WEXITSTATUS(status) : -1;
  return r;
}

void write(const std::filesystem::path& p, const std::string& text) { std::ofstream(p) << text; }

const char* kObj = "o a\nv 0 0 0\nv 1 0 0\nv 1 1 0\nf 1 2 3\no b\nv 0 0 1\nv 1 0 1\nv 1 1 1\nf 1 2 3\n";

}  // namespace

TEST_CASE("cli synth, import and export") {
  TempDir dir("orbitcad-cli");
  const Run synth = run("--json synth -o s.ocmf --triangles 20000", dir.path());
  REQUIRE(synth.code == 0);
  CHECK(json::parse(synth.out)["triangles"] == 20000);

  write(dir.path() / "m.obj", kObj);
  const Run imp = run("--json --data-dir data import m.obj", dir.path());
  REQUIRE(imp.code == 0);
  const json j = json::parse(imp.out);
  CHECK(j["triangles"] == 2);
  const std::string id = j["model_id"];

  const Run exp = run("--json --data-dir data export " + id + " -o back.glb", dir.path());
  REQUIRE(exp.code == 0);
  CHECK(std::filesystem::file_size(dir.path() / "back.glb") > 0);
  const Run round = run("--json export back.glb -o again.obj", dir.path());
  CHECK(round.code == 0);
  CHECK(run("--json export missing.obj -o x.obj", dir.path()).code == 1);
}

TEST_CASE("cli reduce reports budgets and plan errors") {
  TempDir dir("orbitcad-cli");
  write(dir.path() / "m.obj", kObj);
  write(dir.path() / "good.json", R"({"steps":[{"op":"remove_by_name","pattern":"a"}]})");
  write(dir.path() / "bad.json", R"({"steps":[{"op":"remove_by_name","pattern":"a"},{"op":"zap"}]})");
  const Run good = run("--json reduce m.obj good.json --dry-run", dir.path());
  REQUIRE(good.code == 0);
  const json g = json::parse(good.out);
  CHECK(g["initial_triangles"] == 2);
  CHECK(g["final_triangles"] == 1);
  CHECK(g["verdict"] == "under_ideal");
  const Run bad = run("--json reduce m.obj bad.json --dry-run", dir.path());
  CHECK(bad.code == 1);
  CHECK(json::parse(bad.out)["error"]["step_index"] == 1);
  CHECK(run("--json reduce m.obj good.json -o r.ocmf", dir.path()).code == 0);
  CHECK(std::filesystem::exists(dir.path() / "r.ocmf"));
  CHECK(run("reduce m.obj good.json", dir.path()).code != 0);
}

TEST_CASE("cli thumbnails, marker sheet and usage errors") {
  TempDir dir("orbitcad-cli");
  write(dir.path() / "m.obj", kObj);
  const Run t = run("--json thumbs m.obj -o t.png --viewpoints 24 --tile 32", dir.path());
  REQUIRE(t.code == 0);
  const json j = json::parse(t.out);
  CHECK(j["cols"] == 5);
  CHECK(j["rows"] == 5);
  CHECK(j["width"] == 160);
  const Run svg = run("layout-svg", dir.path());
  CHECK(svg.code == 0);
  CHECK(svg.out.find("<svg") == 0);
  CHECK(run("bogus", dir.path()).code == 2);
  CHECK(run("--help", dir.path()).code == 0);
}

TEST_CASE("cli simulate converges against an in-process server") {
  TempDir dir("orbitcad-cli");
  const Run r = run("--json simulate --clients 4 --ops 25 --seed 9", dir.path());
  REQUIRE(r.code == 0);
  const json j = json::parse(r.out);
  CHECK(j["converged"] == true);
  CHECK(j["clients"].size() == 4);
}

TEST_CASE("cli golden vectors refold to their canonical state") {
  TempDir dir("orbitcad-cli");
  REQUIRE(run("--json golden-vectors -o v.json --count 40 --seed 7", dir.path()).code == 0);
  std::ifstream in(dir.path() / "v.json");
  const json doc = json::parse(in);
  REQUIRE(doc["vectors"].size() == 40);
  for (const auto& v : doc["vectors"]) {
    const auto state = orbitcad::session::fold(orbitcad::session::ops_from_json(v["ops"]));
    CHECK(orbitcad::session::canonical_serialize(state) == v["canonical"].get<std::string>());
    CHECK(orbitcad::session::state_hash(state) == v["state_hash"].get<std::string>());
  }
  REQUIRE(run("--json golden-vectors -o w.json --count 40 --seed 7", dir.path()).code == 0);
  std::ifstream a(dir.path() / "v.json"), b(dir.path() / "w.json");
  CHECK(std::string(std::istreambuf_iterator<char>(a), {}) == std::string(std::istreambuf_iterator<char>(b), {}));
}
