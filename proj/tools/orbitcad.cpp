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
#include "orbitcad/io/model_io.hpp"
#include "orbitcad/reduction/plan.hpp"
#include "orbitcad/render/sprite_sheet.hpp"
#include "orbitcad/scene/container.hpp"
#include "orbitcad/scene/synthetic.hpp"
#include "orbitcad/server/api.hpp"
#include "orbitcad/server/http_server.hpp"
#include "orbitcad/server/rest_client.hpp"
#include "orbitcad/server/simulator.hpp"
#include "orbitcad/session/random_ops.hpp"
#include "orbitcad/session/state.hpp"
#include "orbitcad/session/wire.hpp"

#include <CLI11.hpp>
#include <json.hpp>
#include <spdlog/sinks/stdout_color_sinks.h>
#include <spdlog/spdlog.h>

#include <csignal>
#include <pthread.h>
#include <unistd.h>
#include <cstdlib>
#include <filesystem>
#include <iostream>

namespace fs = std::filesystem;
using nlohmann::json;
using namespace orbitcad;

namespace {

struct Globals {
  std::string data_dir;
  bool json = false;
};

std::string env_or(const char* name, std::string fallback) {
  const char* v = std::getenv(name);
  return v && *v ? std::string(v) : fallback;
}

void emit(const Globals& g, const json& j, const std::string& text) {
  if (g.json) {
    std::cout << j.dump(2) << "\n";
  } else {
    std::cout << text << "\n";
  }
}

std::string cli_project(server::Store& store) {
  const std::string admin_token = store.bootstrap_admin();
  const auto admin = store.user_by_token(admin_token);
  for (const auto& p : store.projects()) {
    if (p.name == "cli") return p.project_id;
  }
  return store.create_project("cli", admin->user_id).project_id;
}

/// A file on disk (any importable format or .ocmf) or a model id in the store.
SceneModel load_target(const std::string& data_dir, const std::string& target, bool original) {
  if (fs::exists(target)) {
    if (fs::path(target).extension() == ".ocmf") return deserialize(io::read_file(target));
    return io::import_file(target).model;
  }
  server::Store store(data_dir);
  auto rec = store.model(target);
  if (!rec) throw Error("not_found", "no file or model named '" + target + "'");
  if (rec->status != server::ModelStatus::kReady) throw Error("not_ready", "model " + target + " is not ready");
  return *store.load_model(target, original);
}

void write_model(const SceneModel& model, const fs::path& out) {
  if (out.extension() == ".ocmf") {
    io::write_file(out, serialize(model));
    return;
  }
  io::write_file(out, io::export_model(model, io::format_from_path(out)).bytes);
}


}  // namespace

int main(int argc, char** argv) {
  spdlog::set_default_logger(spdlog::stderr_color_mt("orbitcad"));
  Globals g;
  g.data_dir = env_or("ORBITCAD_DATA_DIR", "orbitcad-data");

  CLI::App app{"orbitcad: CAD model ingest, reduction, thumbnails and collaborative session server"};
  app.require_subcommand(1);
  app.add_option("--data-dir", g.data_dir, "Data directory (env ORBITCAD_DATA_DIR)");
  app.add_flag("--json", g.json, "Machine-readable output and errors");

  // import
  std::string import_path, import_format, import_name;
  std::optional<double> unit_scale;
  auto* import_cmd = app.add_subcommand("import", "Ingest a model file into the data directory");
  import_cmd->add_option("path", import_path, "OBJ, STL, PLY, glTF or GLB file")->required()->check(CLI::ExistingFile);
  import_cmd->add_option("--format", import_format, "Override the format detected from the extension");
  import_cmd->add_option("--unit-scale", unit_scale, "Meters per source unit (0.001 for millimeters)")
      ->check(CLI::PositiveNumber);
  import_cmd->add_option("--name", import_name, "Display name");

  // export
  std::string export_target, export_out, export_format;
  bool export_original = false, export_optimized = false;
  auto* export_cmd = app.add_subcommand("export", "Write a model in an interchange format");
  export_cmd->add_option("target", export_target, "Model id or file")->required();
  export_cmd->add_option("-o,--out", export_out, "Output file; the extension picks the format")->required();
  export_cmd->add_option("--format", export_format, "Format when the extension is ambiguous");
  auto* orig = export_cmd->add_flag("--original", export_original, "Export the unreduced model");
  auto* opt = export_cmd->add_flag("--optimized", export_optimized, "Export the reduced model (default)");
  orig->excludes(opt);

  // reduce
  std::string reduce_target, reduce_plan, reduce_out;
  bool dry_run = false;
  auto* reduce_cmd = app.add_subcommand("reduce", "Apply a reduction plan and report the triangle budget");
  reduce_cmd->add_option("target", reduce_target, "Model id or file")->required();
  reduce_cmd->add_option("plan", reduce_plan, "Plan JSON file")->required()->check(CLI::ExistingFile);
  auto* dry = reduce_cmd->add_flag("--dry-run", dry_run, "Print the report without writing anything");
  auto* rout = reduce_cmd->add_option("-o,--out", reduce_out, "Write the reduced model to this file");
  dry->excludes(rout);

  // thumbs
  std::string thumbs_target, thumbs_out;
  int viewpoints = 24, tile = 256;
  auto* thumbs_cmd = app.add_subcommand("thumbs", "Render a sprite sheet of orbit views");
  thumbs_cmd->add_option("target", thumbs_target, "File, model id, session:ID or slide:ID/SLIDE")->required();
  thumbs_cmd->add_option("-o,--out", thumbs_out, "PNG output")->required();
  thumbs_cmd->add_option("--viewpoints", viewpoints, "Number of orbit views")->check(CLI::Range(1, 360));
  thumbs_cmd->add_option("--tile", tile, "Tile edge in pixels")->check(CLI::Range(8, 2048));

  // layout-svg
  std::string svg_out;
  double tag_size = 0.07, spacing = 0.02;
  auto* svg_cmd = app.add_subcommand("layout-svg", "Printable marker sheet");
  svg_cmd->add_option("-o,--out", svg_out, "SVG output (stdout when omitted)");
  svg_cmd->add_option("--tag-size", tag_size, "Tag edge in meters")->check(CLI::PositiveNumber);
  svg_cmd->add_option("--spacing", spacing, "Gap between tags in meters")->check(CLI::NonNegativeNumber);

  // serve
  std::string bind = env_or("ORBITCAD_BIND", "127.0.0.1:8080");
  double flush_secs = std::stod(env_or("ORBITCAD_FLUSH_SECS", "30"));
  std::size_t threads = 4;
  bool sync_each = false;
  std::string admin_token;
  auto* serve_cmd = app.add_subcommand("serve", "Run the REST and WebSocket server");
  serve_cmd->add_option("--bind", bind, "HOST:PORT (env ORBITCAD_BIND); port 0 picks a free one");
  serve_cmd->add_option("--flush-secs", flush_secs, "Compaction interval (env ORBITCAD_FLUSH_SECS)")
      ->check(CLI::PositiveNumber);
  serve_cmd->add_option("--threads", threads, "I/O threads")->check(CLI::Range(1, 64));
  serve_cmd->add_flag("--fsync-each-op", sync_each, "fsync every op before it is echoed");
  serve_cmd->add_option("--admin-token", admin_token, "Token for the bootstrap administrator");

  // simulate
  server::SimulationSpec sim;
  std::string sim_url;
  double duration = 0;
  bool no_disconnect = false;
  auto* sim_cmd = app.add_subcommand("simulate", "Drive concurrent scripted clients and check convergence");
  auto* url_opt = sim_cmd->add_option("--url", sim_url, "Server as http://HOST:PORT (in-process server when omitted)");
  auto* tok_opt = sim_cmd->add_option("--token", sim.token, "Bearer token for --url");
  auto* ses_opt = sim_cmd->add_option("--session", sim.session_id, "Session id for --url");
  tok_opt->needs(url_opt);
  ses_opt->needs(url_opt);
  sim_cmd->add_option("--clients", sim.clients, "Concurrent clients")->check(CLI::Range(1, 1000));
  sim_cmd->add_option("--ops", sim.ops_per_client, "Ops per client");
  sim_cmd->add_option("--rate", sim.ops_per_second, "Aggregate ops per second (0 = unthrottled)");
  auto* dur = sim_cmd->add_option("--duration", duration, "Seconds; with --rate sets ops per client");
  dur->needs("--rate");
  sim_cmd->add_option("--seed", sim.seed, "Seed for op streams and timing");
  sim_cmd->add_flag("--no-disconnect", no_disconnect, "Skip the mid-run disconnect/rejoin");
  sim_cmd->add_option("--nodes", sim.node_count, "Node ids targeted by the clients");

  // synth
  std::string synth_out;
  SyntheticAssemblySpec synth;
  auto* synth_cmd = app.add_subcommand("synth", "Generate a synthetic instrument assembly");
  synth_cmd->add_option("-o,--out", synth_out, "Output file (.ocmf, .glb, .obj, ...)")->required();
  synth_cmd->add_option("--triangles", synth.target_triangles, "Exact level-0 triangle count");
  synth_cmd->add_option("--seed", synth.seed, "Placement seed");

  // golden-vectors
  std::string vectors_out;
  std::size_t vector_count = 500;
  std::uint64_t vector_seed = 1;
  auto* vectors_cmd = app.add_subcommand("golden-vectors", "Op streams with their canonical folded state");
  vectors_cmd->add_option("-o,--out", vectors_out, "Output JSON file")->required();
  vectors_cmd->add_option("--count", vector_count, "Number of vectors");
  vectors_cmd->add_option("--seed", vector_seed, "Generator seed");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    if (g.json && e.get_exit_code() != 0) {
      std::cout << json{{"error", {{"code", "usage"}, {"message", e.what()}}}}.dump() << "\n";
      return 2;
    }
    const int code = app.exit(e);
    return code == 0 ? 0 : 2;
  }

  try {
    if (*import_cmd) {
      server::Store store(g.data_dir);
      const std::string project = cli_project(store);
      const auto bytes = io::read_file(import_path);
      const std::string format = std::string(
          io::format_name(import_format.empty() ? io::format_from_path(import_path) : io::parse_format(import_format)));
      const std::string name = import_name.empty() ? fs::path(import_path).filename().string() : import_name;
      auto rec = store.create_model(project, name, format, bytes);
      rec = server::process_import(store, rec.model_id, unit_scale);
      if (rec.status != server::ModelStatus::kReady) throw Error("import_failed", rec.error);
      const Aabb b = compute_world_bounds(*store.load_model(rec.model_id), *store.load_model(rec.model_id)->root());
      json j = {{"model_id", rec.model_id}, {"triangles", rec.triangles}, {"nodes", rec.node_count},
                {"warnings", rec.warnings}};
      if (!b.is_empty()) j["bounds"] = {{"min", {b.min.x(), b.min.y(), b.min.z()}}, {"max", {b.max.x(), b.max.y(), b.max.z()}}};
      std::string text = rec.model_id + " " + std::to_string(rec.triangles) + " triangles";
      for (const auto& w : rec.warnings) text += "\nwarning: " + w;
      emit(g, j, text);
    } else if (*export_cmd) {
      SceneModel model = load_target(g.data_dir, export_target, export_original);
      const io::Format f = export_format.empty() ? io::format_from_path(export_out) : io::parse_format(export_format);
      io::ExportResult ex = io::export_model(model, f);
      io::write_file(export_out, ex.bytes);
      emit(g, {{"out", export_out}, {"bytes", ex.bytes.size()}, {"warnings", ex.warnings}},
           export_out + " (" + std::to_string(ex.bytes.size()) + " bytes)");
    } else if (*reduce_cmd) {
      const bool file_target = fs::exists(reduce_target);
      if (file_target && !dry_run && reduce_out.empty()) {
        throw InvalidArgument("file targets need --out or --dry-run");
      }
      SceneModel model = load_target(g.data_dir, reduce_target, true);
      const auto plan_bytes = io::read_file(reduce_plan);
      reduction::ReductionPlan plan =
          reduction::plan_from_json(std::string_view(reinterpret_cast<const char*>(plan_bytes.data()), plan_bytes.size()));
      auto result = reduction::apply_plan(model, plan);
      const std::string report = reduction::report_to_json(result.report);
      if (!dry_run) {
        if (!reduce_out.empty()) {
          write_model(result.model, reduce_out);
        } else {
          server::Store store(g.data_dir);
          auto rec = store.model(reduce_target);
          store.save_model_container(reduce_target, result.model, true);
          rec->optimized = true;
          rec->plan_json = reduction::plan_to_json(plan);
          rec->report_json = report;
          store.update_model(*rec);
        }
      }
      const auto& r = result.report;
      emit(g, json::parse(report),
           std::to_string(r.initial_triangles) + " -> " + std::to_string(r.final_triangles) + " triangles, verdict " +
               std::string(reduction::verdict_name(r.verdict)));
    } else if (*thumbs_cmd) {
      render::SpriteSheetOptions opts;
      opts.viewpoints = viewpoints;
      opts.tile = {tile, tile};
      SceneModel model;
      if (thumbs_target.rfind("session:", 0) == 0 || thumbs_target.rfind("slide:", 0) == 0) {
        server::Store store(g.data_dir);
        server::SessionHub hub(store);
        model = server::resolve_thumbnail_target(store, hub, thumbs_target, opts);
      } else {
        model = load_target(g.data_dir, thumbs_target, false);
      }
      const render::Image sheet = render::render_sprite_sheet(model, opts);
      io::write_file(thumbs_out, render::encode_png(sheet));
      const auto grid = render::sprite_grid(viewpoints);
      emit(g, {{"out", thumbs_out}, {"width", sheet.width()}, {"height", sheet.height()}, {"cols", grid.cols},
               {"rows", grid.rows}},
           thumbs_out + " " + std::to_string(sheet.width()) + "x" + std::to_string(sheet.height()) + " (" +
               std::to_string(grid.cols) + "x" + std::to_string(grid.rows) + " tiles)");
    } else if (*svg_cmd) {
      const std::string svg = align::layout_svg(align::build_tag_layout(tag_size, spacing));
      if (svg_out.empty()) {
        std::cout << svg;
      } else {
        io::write_file(svg_out, std::as_bytes(std::span(svg.data(), svg.size())));
        emit(g, {{"out", svg_out}}, svg_out);
      }
    } else if (*serve_cmd) {
      const auto colon = bind.rfind(':');
      if (colon == std::string::npos) throw InvalidArgument("--bind must be HOST:PORT");
      server::ServerOptions so;
      so.bind_address = bind.substr(0, colon);
      so.port = static_cast<std::uint16_t>(std::stoi(bind.substr(colon + 1)));
      so.threads = threads;

      sigset_t set;
      sigemptyset(&set);
      sigaddset(&set, SIGINT);
      sigaddset(&set, SIGTERM);
      pthread_sigmask(SIG_BLOCK, &set, nullptr);

      server::Store store(g.data_dir);
      const std::string token = store.bootstrap_admin(admin_token.empty() ? std::nullopt : std::optional(admin_token));
      server::HubOptions ho;
      ho.flush_interval = std::chrono::milliseconds(static_cast<std::int64_t>(flush_secs * 1000));
      ho.sync_each_append = sync_each;
      server::SessionHub hub(store, ho);
      hub.start();
      server::Api api(store, hub);
      server::HttpServer http(api, hub, store, so);
      const auto port = http.start();
      emit(g, {{"port", port}, {"admin_token", token}, {"data_dir", g.data_dir}},
           "listening on " + so.bind_address + ":" + std::to_string(port) + "\nadmin token: " + token);
      std::cout.flush();
      int sig = 0;
      sigwait(&set, &sig);
      spdlog::info("signal {}: shutting down", sig);
      http.stop();
      api.drain();
      hub.stop();
      hub.flush_all();
    } else if (*sim_cmd) {
      sim.disconnect_rejoin = !no_disconnect;
      if (duration > 0) {
        sim.ops_per_client = static_cast<std::size_t>(
            std::max(1.0, sim.ops_per_second * duration / static_cast<double>(sim.clients)));
        sim.timeout = std::chrono::milliseconds(static_cast<std::int64_t>(duration * 2000 + 30'000));
      }
      std::unique_ptr<server::Store> store;
      std::unique_ptr<server::SessionHub> hub;
      std::unique_ptr<server::Api> api;
      std::unique_ptr<server::HttpServer> http;
      fs::path temp;
      if (sim_url.empty()) {
        temp = fs::temp_directory_path() / ("orbitcad-sim-" + std::to_string(::getpid()));
        store = std::make_unique<server::Store>(temp);
        sim.token = store->bootstrap_admin();
        const auto admin = store->user_by_token(sim.token);
        const auto project = store->create_project("simulation", admin->user_id);
        sim.session_id = store->create_session(project.project_id, "simulation").session_id;
        hub = std::make_unique<server::SessionHub>(*store);
        api = std::make_unique<server::Api>(*store, *hub);
        server::ServerOptions so;
        so.port = 0;
        http = std::make_unique<server::HttpServer>(*api, *hub, *store, so);
        sim.host = so.bind_address;
        sim.port = http->start();
      } else {
        std::string rest = sim_url.substr(sim_url.find("://") == std::string::npos ? 0 : sim_url.find("://") + 3);
        const auto colon = rest.rfind(':');
        if (colon == std::string::npos || sim.session_id.empty()) {
          throw InvalidArgument("--url needs http://HOST:PORT and --session");
        }
        sim.host = rest.substr(0, colon);
        sim.port = static_cast<std::uint16_t>(std::stoi(rest.substr(colon + 1)));
      }
      const server::SimulationReport report = server::simulate(sim);
      if (http) {
        http->stop();
        hub.reset();
        api.reset();
        store.reset();
        std::error_code ec;
        fs::remove_all(temp, ec);
      }
      std::string text = std::string("converged: ") + (report.converged ? "true" : "false") +
                         "\nclients: " + std::to_string(report.clients.size()) +
                         "\nops sent: " + std::to_string(report.ops_sent) +
                         "\nops acknowledged: " + std::to_string(report.ops_acked) +
                         "\nserver watermark: " + std::to_string(report.server_watermark) +
                         "\nstate hash: " + report.server_hash +
                         "\nelapsed: " + std::to_string(report.elapsed_seconds) + " s";
      emit(g, server::report_to_json(report), text);
      return report.converged ? 0 : 3;
    } else if (*synth_cmd) {
      const SceneModel model = synthetic_assembly(synth);
      write_model(model, synth_out);
      emit(g, {{"out", synth_out}, {"triangles", total_triangles(model)}, {"nodes", model.nodes().size()}},
           synth_out + " " + std::to_string(total_triangles(model)) + " triangles");
    } else if (*vectors_cmd) {
      std::mt19937_64 rng(vector_seed);
      json vectors = json::array();
      for (std::size_t i = 0; i < vector_count; ++i) {
        session::RandomOpOptions o;
        o.node_count = 8 + static_cast<session::SessionNodeId>(rng() % 24);
        o.include_poses = i % 3 == 0;
        const std::size_t len = 1 + rng() % 200;
        const session::OpList log = session::RandomOpSource(rng(), o).log(len);
        const session::SessionState state = session::fold(log);
        vectors.push_back({{"ops", session::ops_to_json(log)},
                           {"canonical", session::canonical_serialize(state)},
                           {"state_hash", session::state_hash(state)}});
      }
      const std::string text = json{{"seed", vector_seed}, {"vectors", vectors}}.dump();
      io::write_file(vectors_out, std::as_bytes(std::span(text.data(), text.size())));
      emit(g, {{"out", vectors_out}, {"count", vector_count}}, vectors_out + " " + std::to_string(vector_count) + " vectors");
    }
  } catch (const reduction::PlanError& e) {
    json err = {{"code", e.code()}, {"message", e.what()}};
    if (e.step_index()) err["step_index"] = *e.step_index();
    if (g.json) {
      std::cout << json{{"error", err}}.dump() << "\n";
    } else {
      std::cerr << "error: " << e.what() << "\n";
    }
    return 1;
  } catch (const Error& e) {
    if (g.json) {
      std::cout << json{{"error", {{"code", e.code()}, {"message", e.what()}}}}.dump() << "\n";
    } else {
      std::cerr << "error: " << e.what() << "\n";
    }
    return 1;
  } catch (const std::exception& e) {
    if (g.json) {
      std::cout << json{{"error", {{"code", "internal"}, {"message", e.what()}}}}.dump() << "\n";
    } else {
      std::cerr << "error: " << e.what() << "\n";
    }
    return 1;
  }
  return 0;
}
