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

#include "orbitcad/server/api.hpp"

#include "orbitcad/render/sprite_sheet.hpp"
#include "orbitcad/session/wire.hpp"

#include <boost/asio/post.hpp>
#include <spdlog/spdlog.h>

#include <filesystem>

namespace orbitcad::server {

namespace fs = std::filesystem;
using nlohmann::json;

namespace {

struct HttpError : Error {
  int status;
  HttpError(int s, std::string code, const std::string& msg) : Error(std::move(code), msg), status(s) {}
};

[[noreturn]] void fail(int status, const std::string& code, const std::string& msg) {
  throw HttpError(status, code, msg);
}

Response json_response(int status, const json& body) { return {status, "application/json", body.dump(), {}}; }

Response error_response(int status, std::string_view code, std::string_view msg) {
  return json_response(status, {{"error", {{"code", code}, {"message", msg}}}});
}

std::vector<std::string> split_path(const std::string& path) {
  std::vector<std::string> parts;
  std::size_t i = 0;
  while (i < path.size()) {
    std::size_t j = path.find('/', i);
    if (j == std::string::npos) j = path.size();
    if (j > i) parts.push_back(url_decode(std::string_view(path).substr(i, j - i)));
    i = j + 1;
  }
  return parts;
}

json parse_body(const Request& r) {
  if (r.body.empty()) return json::object();
  json j = json::parse(r.body, nullptr, false);
  if (j.is_discarded() || !j.is_object()) fail(400, "bad_request", "body must be a JSON object");
  return j;
}

std::span<const std::byte> bytes_of(const std::string& s) { return std::as_bytes(std::span(s.data(), s.size())); }
std::string string_of(const std::vector<std::byte>& b) {
  return std::string(reinterpret_cast<const char*>(b.data()), b.size());
}

json project_json(const Project& p) {
  json members = json::object();
  for (const auto& [u, r] : p.members) members[u] = role_name(r);
  return {{"project_id", p.project_id}, {"name", p.name}, {"members", members},
          {"model_ids", p.model_ids},   {"session_ids", p.session_ids}};
}

json model_json(const ModelRecord& m) {
  json j = {{"model_id", m.model_id},   {"project_id", m.project_id},       {"name", m.name},
            {"format", m.format},       {"status", status_name(m.status)},  {"triangles", m.triangles},
            {"node_count", m.node_count}, {"warnings", m.warnings},         {"content_hash", m.content_hash},
            {"optimized", m.optimized}};
  if (!m.error.empty()) j["error"] = m.error;
  return j;
}

json job_json(const Job& j) {
  json out = {{"job_id", j.job_id}, {"kind", j.kind}, {"target", j.target}, {"status", job_status_name(j.status)}};
  if (!j.error.empty()) out["error"] = j.error;
  if (!j.output.empty()) out["output"] = j.output;
  return out;
}

// First file part of a multipart/form-data body.
std::optional<std::pair<std::string, std::string>> multipart_file(const Request& r) {
  auto ct = r.headers.find("content-type");
  if (ct == r.headers.end() || ct->second.rfind("multipart/form-data", 0) != 0) return std::nullopt;
  auto b = ct->second.find("boundary=");
  if (b == std::string::npos) fail(400, "bad_request", "multipart body without boundary");
  std::string boundary = ct->second.substr(b + 9);
  if (!boundary.empty() && boundary.front() == '"') boundary = boundary.substr(1, boundary.find('"', 1) - 1);
  const std::string delim = "--" + boundary;
  std::size_t pos = r.body.find(delim);
  while (pos != std::string::npos) {
    pos += delim.size();
    if (r.body.compare(pos, 2, "--") == 0) break;
    std::size_t head_end = r.body.find("\r\n\r\n", pos);
    if (head_end == std::string::npos) break;
    const std::string head = r.body.substr(pos, head_end - pos);
    std::size_t next = r.body.find("\r\n" + delim, head_end + 4);
    if (next == std::string::npos) break;
    std::string filename;
    if (auto f = head.find("filename=\""); f != std::string::npos) {
      filename = head.substr(f + 10, head.find('"', f + 10) - (f + 10));
    }
    if (!filename.empty() || head.find("name=\"file\"") != std::string::npos) {
      return std::make_pair(filename, r.body.substr(head_end + 4, next - head_end - 4));
    }
    pos = next + 2;
  }
  fail(400, "bad_request", "multipart body has no file part");
}

std::string sanitize(std::string s) {
  for (char& c : s) {
    if (!std::isalnum(static_cast<unsigned char>(c)) && c != '-' && c != '_') c = '_';
  }
  return s;
}

}  // namespace

std::string url_decode(std::string_view s) {
  std::string out;
  for (std::size_t i = 0; i < s.size(); ++i) {
    if (s[i] == '%' && i + 2 < s.size() && std::isxdigit(static_cast<unsigned char>(s[i + 1])) &&
        std::isxdigit(static_cast<unsigned char>(s[i + 2]))) {
      out += static_cast<char>(std::stoi(std::string(s.substr(i + 1, 2)), nullptr, 16));
      i += 2;
    } else if (s[i] == '+') {
      out += ' ';
    } else {
      out += s[i];
    }
  }
  return out;
}

void parse_target(std::string_view target, std::string& path, std::map<std::string, std::string>& query) {
  auto q = target.find('?');
  path = std::string(target.substr(0, q));
  if (q == std::string_view::npos) return;
  std::string_view rest = target.substr(q + 1);
  while (!rest.empty()) {
    auto amp = rest.find('&');
    std::string_view kv = rest.substr(0, amp);
    auto eq = kv.find('=');
    if (eq == std::string_view::npos) {
      query[url_decode(kv)] = "";
    } else {
      query[url_decode(kv.substr(0, eq))] = url_decode(kv.substr(eq + 1));
    }
    if (amp == std::string_view::npos) break;
    rest = rest.substr(amp + 1);
  }
}

SceneModel apply_session_view(const SceneModel& model, const session::SessionState& state) {
  SceneModel out = model;
  for (const auto& [n, t] : state.node_transforms) {
    if (!out.has_node(NodeId{n})) continue;
    SceneNode& node = out.mutable_node(NodeId{n});
    node.local_transform = t.value * node.local_transform;
  }
  for (const auto& [n, v] : state.node_visibility) {
    if (!v.value && out.has_node(NodeId{n})) out.remove_subtree(NodeId{n});
  }
  if (state.whole_transform && out.root()) {
    SceneNode& root = out.mutable_node(*out.root());
    root.local_transform = *state.whole_transform * root.local_transform;
  }
  out.prune_meshes();
  return out;
}

Api::Api(Store& store, SessionHub& hub, std::size_t workers)
    : store_(store), hub_(hub), pool_(std::max<std::size_t>(workers, 1)) {}

Api::~Api() {
  drain();
  pool_.join();
}

void Api::submit(std::function<void()> task) {
  {
    std::lock_guard lock(pending_mu_);
    ++pending_;
  }
  boost::asio::post(pool_, [this, task = std::move(task)] {
    try {
      task();
    } catch (const std::exception& e) {
      spdlog::error("background job failed: {}", e.what());
    }
    std::lock_guard lock(pending_mu_);
    if (--pending_ == 0) pending_cv_.notify_all();
  });
}

void Api::drain() {
  std::unique_lock lock(pending_mu_);
  pending_cv_.wait(lock, [this] { return pending_ == 0; });
}

std::optional<User> Api::authenticate(const Request& r) const {
  std::string token;
  if (auto h = r.headers.find("authorization"); h != r.headers.end() && h->second.rfind("Bearer ", 0) == 0) {
    token = h->second.substr(7);
  } else if (auto q = r.query.find("token"); q != r.query.end()) {
    token = q->second;
  }
  if (token.empty()) return std::nullopt;
  return store_.user_by_token(token);
}

Response Api::handle(const Request& r) {
  try {
    auto user = authenticate(r);
    if (!user) return error_response(401, "unauthorized", "missing or invalid bearer token");
    return route(r, *user);
  } catch (const HttpError& e) {
    return error_response(e.status, e.code(), e.what());
  } catch (const reduction::PlanError& e) {
    json body = {{"error", {{"code", e.code()}, {"message", e.what()}}}};
    if (e.step_index()) body["error"]["step_index"] = *e.step_index();
    return json_response(400, body);
  } catch (const Error& e) {
    int status = 400;
    if (e.code() == "not_found") status = 404;
    if (e.code() == "not_ready") status = 409;
    if (e.code() == "io_error") status = 500;
    return error_response(status, e.code(), e.what());
  } catch (const std::exception& e) {
    return error_response(500, "internal", e.what());
  }
}

Response Api::route(const Request& r, const User& user) {
  const auto parts = split_path(r.path);
  if (parts.size() < 2 || parts[0] != "api") fail(404, "not_found", "no route for " + r.path);
  if (parts[1] == "projects") return projects(r, user, parts);
  if (parts[1] == "models") return models(r, user, parts);
  if (parts[1] == "sessions") return sessions(r, user, parts);
  if (parts[1] == "users") return users(r, user, parts);
  if (parts[1] == "jobs") return jobs(r, user, parts);
  fail(404, "not_found", "no route for " + r.path);
}

namespace {

Role require_role(const Store& store, const User& user, const std::string& project_id, Role needed) {
  if (!store.project(project_id)) fail(404, "not_found", "unknown project " + project_id);
  auto role = store.role_in(user, project_id);
  if (!role || *role < needed) {
    fail(403, "forbidden", "requires " + std::string(role_name(needed)) + " role in project " + project_id);
  }
  return *role;
}

}  // namespace

Response Api::users(const Request& r, const User& user, const std::vector<std::string>& parts) {
  if (parts.size() == 3 && parts[2] == "me" && r.method == "GET") {
    return json_response(200, {{"user_id", user.user_id}, {"name", user.name}, {"admin", user.admin}});
  }
  if (!user.admin) fail(403, "forbidden", "user management requires an administrator");
  if (parts.size() == 2 && r.method == "GET") {
    json a = json::array();
    for (const User& u : store_.users()) a.push_back({{"user_id", u.user_id}, {"name", u.name}, {"admin", u.admin}});
    return json_response(200, a);
  }
  if (parts.size() == 2 && r.method == "POST") {
    json body = parse_body(r);
    User u = store_.create_user(body.value("name", "user"), body.value("admin", false));
    return json_response(201, {{"user_id", u.user_id}, {"name", u.name}, {"token", u.token}, {"admin", u.admin}});
  }
  fail(405, "method_not_allowed", r.method + " " + r.path);
}

Response Api::projects(const Request& r, const User& user, const std::vector<std::string>& parts) {
  if (parts.size() == 2) {
    if (r.method == "GET") {
      json a = json::array();
      for (const Project& p : store_.projects()) {
        if (store_.role_in(user, p.project_id)) a.push_back(project_json(p));
      }
      return json_response(200, a);
    }
    if (r.method == "POST") {
      json body = parse_body(r);
      const std::string name = body.value("name", "");
      if (name.empty()) fail(400, "invalid_argument", "project name is required");
      return json_response(201, project_json(store_.create_project(name, user.user_id)));
    }
  }
  if (parts.size() < 3) fail(405, "method_not_allowed", r.method + " " + r.path);
  const std::string& id = parts[2];
  if (parts.size() == 3) {
    if (r.method == "GET") {
      require_role(store_, user, id, Role::kViewer);
      return json_response(200, project_json(*store_.project(id)));
    }
    if (r.method == "DELETE") {
      require_role(store_, user, id, Role::kAdmin);
      for (const std::string& s : store_.project(id)->session_ids) hub_.remove(s);
      store_.delete_project(id);
      return {204, "application/json", "", {}};
    }
  }
  if (parts.size() == 5 && parts[3] == "members" && (r.method == "PUT" || r.method == "DELETE")) {
    require_role(store_, user, id, Role::kAdmin);
    std::optional<Role> role;
    if (r.method == "PUT") {
      role = parse_role(parse_body(r).value("role", ""));
      if (!role) fail(400, "invalid_argument", "role must be admin, member or viewer");
    }
    store_.set_member(id, parts[4], role);
    return json_response(200, project_json(*store_.project(id)));
  }
  fail(405, "method_not_allowed", r.method + " " + r.path);
}

Response Api::models(const Request& r, const User& user, const std::vector<std::string>& parts) {
  auto query = [&](const char* k) -> std::string {
    auto it = r.query.find(k);
    return it == r.query.end() ? std::string() : it->second;
  };
  if (parts.size() == 2) {
    const std::string project = query("project");
    if (project.empty()) fail(400, "invalid_argument", "query parameter 'project' is required");
    if (r.method == "GET") {
      require_role(store_, user, project, Role::kViewer);
      json a = json::array();
      for (const ModelRecord& m : store_.models(project)) a.push_back(model_json(m));
      return json_response(200, a);
    }
    if (r.method == "POST") {
      require_role(store_, user, project, Role::kMember);
      std::string data = r.body;
      std::string filename = query("name");
      if (auto part = multipart_file(r)) {
        data = std::move(part->second);
        if (filename.empty()) filename = part->first;
      }
      if (data.empty()) fail(400, "invalid_argument", "model upload is empty");
      std::string format = query("format");
      if (format.empty()) {
        if (filename.empty()) fail(400, "invalid_argument", "give 'format' or a file name with an extension");
        format = std::string(io::format_name(io::format_from_path(filename)));
      } else {
        format = std::string(io::format_name(io::parse_format(format)));
      }
      ModelRecord m = store_.create_model(project, filename.empty() ? "model" : filename, format, bytes_of(data));
      Job job = store_.create_job("import", m.model_id);
      submit([this, id = m.model_id, jid = job.job_id] { run_import(id, jid); });
      json body = model_json(m);
      body["job_id"] = job.job_id;
      return json_response(201, body);
    }
    fail(405, "method_not_allowed", r.method + " " + r.path);
  }
  const std::string& id = parts[2];
  auto rec = store_.model(id);
  if (!rec) fail(404, "not_found", "unknown model " + id);
  const Role role = require_role(store_, user, rec->project_id, Role::kViewer);
  const std::string sub = parts.size() > 3 ? parts[3] : "";

  if (sub.empty() && r.method == "GET") {
    json body = model_json(*rec);
    if (rec->report_json) body["report"] = json::parse(*rec->report_json);
    return json_response(200, body);
  }
  if (sub == "plan") {
    if (r.method == "GET") {
      json body = json::object();
      body["plan"] = rec->plan_json ? json::parse(*rec->plan_json) : json(nullptr);
      body["report"] = rec->report_json ? json::parse(*rec->report_json) : json(nullptr);
      return json_response(200, body);
    }
    if (r.method == "POST" || r.method == "PUT") {
      if (role < Role::kMember) fail(403, "forbidden", "plan submission requires member role");
      if (rec->status != ModelStatus::kReady) fail(409, "not_ready", "model " + id + " is not ready");
      reduction::ReductionPlan plan = reduction::plan_from_json(r.body);
      plan.model_id = id;
      rec->plan_json = reduction::plan_to_json(plan);
      store_.update_model(*rec);
      if (query("dry_run") == "1" || query("dry_run") == "true") {
        auto result = reduction::apply_plan(*store_.load_model(id, true), plan);
        return json_response(200, {{"report", json::parse(reduction::report_to_json(result.report))}});
      }
      Job job = store_.create_job("plan", id);
      submit([this, id, jid = job.job_id] { run_plan(id, jid); });
      return json_response(202, job_json(job));
    }
  }
  if (sub == "export" && r.method == "GET") {
    if (rec->status != ModelStatus::kReady) fail(409, "not_ready", "model " + id + " is not ready");
    const std::string fmt = query("format").empty() ? "glb" : query("format");
    io::Format format = io::parse_format(fmt);
    auto model = store_.load_model(id, query("variant") == "original");
    io::ExportResult ex = io::export_model(*model, format);
    Response resp{200, format == io::Format::kObj ? "text/plain" : "application/octet-stream", string_of(ex.bytes), {}};
    resp.headers["Content-Disposition"] =
        "attachment; filename=\"" + sanitize(rec->name) + "." + std::string(io::format_name(format)) + "\"";
    if (!ex.warnings.empty()) resp.headers["X-Orbitcad-Warnings"] = std::to_string(ex.warnings.size());
    return resp;
  }
  if (sub == "download" && r.method == "GET") {
    if (rec->status != ModelStatus::kReady) fail(409, "not_ready", "model " + id + " is not ready");
    auto bytes = store_.model_container_bytes(id, query("variant") == "original");
    const std::string etag = "\"" + content_hash(bytes) + "\"";
    if (auto h = r.headers.find("if-none-match"); h != r.headers.end() && h->second == etag) {
      return {304, "application/octet-stream", "", {{"ETag", etag}}};
    }
    return {200, "application/octet-stream", string_of(bytes), {{"ETag", etag}}};
  }
  if (sub == "thumbnail") {
    return thumbnail(r, "model_" + sanitize(id), "model:" + id);
  }
  if (sub.empty() && r.method == "DELETE") fail(405, "method_not_allowed", "models are deleted with their project");
  fail(405, "method_not_allowed", r.method + " " + r.path);
}

Response Api::thumbnail(const Request& r, const std::string& key, const std::string& target) {
  int viewpoints = 24;
  if (auto it = r.query.find("viewpoints"); it != r.query.end()) {
    viewpoints = std::atoi(it->second.c_str());
    if (viewpoints < 1 || viewpoints > 360) fail(400, "invalid_argument", "viewpoints must be in [1, 360]");
  }
  const fs::path file = store_.thumbs_dir() / (key + "_" + std::to_string(viewpoints) + ".png");
  if (r.method == "GET" && fs::exists(file)) {
    return {200, "image/png", string_of(io::read_file(file)), {}};
  }
  if (r.method != "GET" && r.method != "POST") fail(405, "method_not_allowed", r.method + " " + r.path);
  Job job = store_.create_job("thumbnail", target, viewpoints);
  job.output = file.filename().string();
  store_.update_job(job);
  submit([this, jid = job.job_id] { run_thumbnail(jid); });
  return json_response(202, job_json(job));
}

Response Api::sessions(const Request& r, const User& user, const std::vector<std::string>& parts) {
  if (parts.size() == 2) {
    if (r.method == "GET") {
      auto it = r.query.find("project");
      if (it == r.query.end()) fail(400, "invalid_argument", "query parameter 'project' is required");
      require_role(store_, user, it->second, Role::kViewer);
      json a = json::array();
      for (const SessionMeta& s : store_.sessions(it->second)) {
        a.push_back({{"session_id", s.session_id}, {"project_id", s.project_id}, {"name", s.name}});
      }
      return json_response(200, a);
    }
    if (r.method == "POST") {
      json body = parse_body(r);
      const std::string project = body.value("project_id", "");
      require_role(store_, user, project, Role::kMember);
      SessionMeta s = store_.create_session(project, body.value("name", "session"));
      if (body.contains("model_id")) {
        hub_.submit(s.session_id, "server", session::SetActiveModel{body["model_id"].get<std::string>()});
      }
      return json_response(201, {{"session_id", s.session_id}, {"project_id", s.project_id}, {"name", s.name}});
    }
    fail(405, "method_not_allowed", r.method + " " + r.path);
  }
  const std::string& id = parts[2];
  auto meta = store_.session(id);
  if (!meta) fail(404, "not_found", "unknown session " + id);
  const Role role = require_role(store_, user, meta->project_id, Role::kViewer);
  const std::string sub = parts.size() > 3 ? parts[3] : "";
  if (sub.empty() && r.method == "GET") {
    SessionSnapshot snap = hub_.snapshot(id);
    return json_response(200, {{"session_id", id},
                               {"project_id", meta->project_id},
                               {"name", meta->name},
                               {"watermark", snap.watermark},
                               {"state_hash", session::state_hash(snap.state)},
                               {"state", json::parse(session::canonical_serialize(snap.state))},
                               {"clients", snap.clients},
                               {"read_only", snap.read_only}});
  }
  if (sub.empty() && r.method == "DELETE") {
    if (role < Role::kAdmin) fail(403, "forbidden", "deleting a session requires admin role");
    hub_.remove(id);
    store_.delete_session(id);
    return {204, "application/json", "", {}};
  }
  if (sub == "join" && r.method == "POST") {
    return json_response(200, {{"session_id", id}, {"ws_path", "/ws/sessions/" + id}, {"role", role_name(role)}});
  }
  if (sub == "log" && r.method == "GET") {
    SessionSnapshot snap = hub_.snapshot(id);
    return json_response(200, {{"watermark", snap.watermark},
                               {"ops", session::ops_to_json(session::state_to_ops(snap.state, true))}});
  }
  if (sub == "flush" && r.method == "POST") {
    if (role < Role::kMember) fail(403, "forbidden", "flush requires member role");
    hub_.compact(id);
    return json_response(200, {{"records", hub_.on_disk_records(id)}});
  }
  if (sub == "thumbnail") return thumbnail(r, "session_" + sanitize(id), "session:" + id);
  if (sub == "slides" && parts.size() == 6 && parts[5] == "thumbnail") {
    return thumbnail(r, "slide_" + sanitize(id) + "_" + sanitize(parts[4]), "slide:" + id + "/" + parts[4]);
  }
  fail(405, "method_not_allowed", r.method + " " + r.path);
}

Response Api::jobs(const Request& r, const User&, const std::vector<std::string>& parts) {
  if (parts.size() == 3 && r.method == "GET") {
    auto j = store_.job(parts[2]);
    if (!j) fail(404, "not_found", "unknown job " + parts[2]);
    return json_response(200, job_json(*j));
  }
  fail(405, "method_not_allowed", r.method + " " + r.path);
}

ModelRecord process_import(Store& store, const std::string& model_id, std::optional<double> unit_scale) {
  auto rec = store.model(model_id);
  if (!rec) throw Error("not_found", "unknown model " + model_id);
  rec->status = ModelStatus::kProcessing;
  store.update_model(*rec);
  try {
    io::ImportOptions opts;
    opts.model_id = model_id;
    opts.unit_scale = unit_scale;
    io::ImportResult res = io::import_model(store.model_source(model_id), io::parse_format(rec->format), opts);
    store.save_model_container(model_id, res.model, false);
    rec->triangles = res.report.triangle_count;
    rec->node_count = res.report.node_count;
    rec->warnings = res.report.warnings;
    rec->content_hash = content_hash(store.model_container_bytes(model_id, true));
    rec->status = ModelStatus::kReady;
    rec->error.clear();
  } catch (const std::exception& e) {
    rec->status = ModelStatus::kFailed;
    rec->error = e.what();
  }
  store.update_model(*rec);
  return *rec;
}

void Api::run_import(const std::string& model_id, const std::string& job_id) {
  auto job = store_.job(job_id);
  if (!job) return;
  job->status = JobStatus::kRunning;
  store_.update_job(*job);
  ModelRecord rec = process_import(store_, model_id);
  job->status = rec.status == ModelStatus::kReady ? JobStatus::kDone : JobStatus::kFailed;
  job->error = rec.error;
  store_.update_job(*job);
}

void Api::run_plan(const std::string& model_id, const std::string& job_id) {
  auto rec = store_.model(model_id);
  auto job = store_.job(job_id);
  if (!rec || !job || !rec->plan_json) return;
  job->status = JobStatus::kRunning;
  store_.update_job(*job);
  try {
    reduction::ReductionPlan plan = reduction::plan_from_json(*rec->plan_json);
    auto result = reduction::apply_plan(*store_.load_model(model_id, true), plan);
    store_.save_model_container(model_id, result.model, true);
    rec->optimized = true;
    rec->report_json = reduction::report_to_json(result.report);
    rec->triangles = result.report.final_triangles;
    rec->node_count = result.model.nodes().size();
    rec->content_hash = content_hash(store_.model_container_bytes(model_id));
    job->status = JobStatus::kDone;
  } catch (const std::exception& e) {
    job->status = JobStatus::kFailed;
    job->error = e.what();
  }
  store_.update_model(*rec);
  store_.update_job(*job);
}

SceneModel resolve_thumbnail_target(Store& store, SessionHub& hub, const std::string& target,
                                    render::SpriteSheetOptions& opts) {
  if (target.rfind("model:", 0) == 0) {
    const std::string id = target.substr(6);
    if (!store.model(id)) throw Error("not_found", "unknown model " + id);
    return *store.load_model(id);
  }
  std::string sid = target.substr(target.find(':') + 1);
  std::string slide;
  if (target.rfind("slide:", 0) == 0) {
    if (sid.find('/') == std::string::npos) throw InvalidArgument("slide targets look like slide:SESSION/SLIDE");
    slide = sid.substr(sid.find('/') + 1);
    sid = sid.substr(0, sid.find('/'));
  } else if (target.rfind("session:", 0) != 0) {
    throw InvalidArgument("thumbnail target must start with model:, session: or slide:");
  }
  if (!store.session(sid)) throw Error("not_found", "unknown session " + sid);
  session::SessionState state = hub.snapshot(sid).state;
  if (!slide.empty()) session::load_slide(state, slide);
  if (state.active_model.empty()) throw Error("unrenderable", "session has no active model");
  if (state.cut_plane) opts.cut_plane = render::CutPlane{state.cut_plane->axis, state.cut_plane->offset};
  return apply_session_view(*store.load_model(state.active_model), state);
}

void Api::run_thumbnail(const std::string& job_id) {
  auto job = store_.job(job_id);
  if (!job) return;
  job->status = JobStatus::kRunning;
  store_.update_job(*job);
  try {
    render::SpriteSheetOptions opts;
    opts.viewpoints = job->viewpoints;
    SceneModel model = resolve_thumbnail_target(store_, hub_, job->target, opts);
    render::Image sheet = render::render_sprite_sheet(model, opts);
    io::write_file(store_.thumbs_dir() / job->output, render::encode_png(sheet));
    job->status = JobStatus::kDone;
  } catch (const std::exception& e) {
    job->status = JobStatus::kFailed;
    job->error = e.what();
  }
  store_.update_job(*job);
}

}  // namespace orbitcad::server
