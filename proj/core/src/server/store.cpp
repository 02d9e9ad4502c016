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

#include "orbitcad/server/store.hpp"

#include "orbitcad/scene/container.hpp"

#include <fstream>
#include <random>

namespace orbitcad::server {

namespace fs = std::filesystem;
using nlohmann::json;

std::string_view role_name(Role r) {
  switch (r) {
    case Role::kViewer: return "viewer";
    case Role::kMember: return "member";
    case Role::kAdmin: return "admin";
  }
  return "viewer";
}

std::optional<Role> parse_role(std::string_view s) {
  if (s == "viewer") return Role::kViewer;
  if (s == "member") return Role::kMember;
  if (s == "admin") return Role::kAdmin;
  return std::nullopt;
}

std::string_view status_name(ModelStatus s) {
  switch (s) {
    case ModelStatus::kQueued: return "queued";
    case ModelStatus::kProcessing: return "processing";
    case ModelStatus::kReady: return "ready";
    case ModelStatus::kFailed: return "failed";
  }
  return "failed";
}

std::string_view job_status_name(JobStatus s) {
  switch (s) {
    case JobStatus::kQueued: return "queued";
    case JobStatus::kRunning: return "running";
    case JobStatus::kDone: return "done";
    case JobStatus::kFailed: return "failed";
  }
  return "failed";
}

std::string content_hash(std::span<const std::byte> bytes) {
  std::uint64_t h = 14695981039346656037ull;
  for (std::byte b : bytes) {
    h ^= static_cast<std::uint8_t>(b);
    h *= 1099511628211ull;
  }
  char buf[17];
  std::snprintf(buf, sizeof buf, "%016llx", static_cast<unsigned long long>(h));
  return buf;
}

std::string random_id(std::string_view prefix) {
  static std::mutex mu;
  static std::mt19937_64 rng{std::random_device{}()};
  std::lock_guard lock(mu);
  char buf[17];
  std::snprintf(buf, sizeof buf, "%012llx", static_cast<unsigned long long>(rng() & 0xffffffffffffull));
  return std::string(prefix) + "-" + buf;
}

namespace {

void write_text(const fs::path& p, const std::string& text) {
  fs::create_directories(p.parent_path());
  const fs::path tmp = p.string() + ".tmp";
  {
    std::ofstream out(tmp, std::ios::binary | std::ios::trunc);
    out << text;
    if (!out) throw Error("io_error", "cannot write " + p.string());
  }
  fs::rename(tmp, p);
}

std::optional<json> read_json(const fs::path& p) {
  std::ifstream in(p, std::ios::binary);
  if (!in) return std::nullopt;
  json j = json::parse(in, nullptr, false);
  if (j.is_discarded()) return std::nullopt;
  return j;
}

json to_json(const Project& p) {
  json members = json::object();
  for (const auto& [u, r] : p.members) members[u] = role_name(r);
  return {{"project_id", p.project_id}, {"name", p.name}, {"members", members},
          {"model_ids", p.model_ids},   {"session_ids", p.session_ids}};
}

Project project_from(const json& j) {
  Project p;
  p.project_id = j.at("project_id");
  p.name = j.value("name", "");
  const json members = j.value("members", json::object());
  for (const auto& [u, r] : members.items()) {
    p.members[u] = parse_role(r.get<std::string>()).value_or(Role::kViewer);
  }
  p.model_ids = j.value("model_ids", std::vector<std::string>{});
  p.session_ids = j.value("session_ids", std::vector<std::string>{});
  return p;
}

json to_json(const ModelRecord& m) {
  json j = {{"model_id", m.model_id},       {"project_id", m.project_id},
            {"name", m.name},               {"format", m.format},
            {"status", status_name(m.status)}, {"error", m.error},
            {"triangles", m.triangles},     {"node_count", m.node_count},
            {"warnings", m.warnings},       {"content_hash", m.content_hash},
            {"optimized", m.optimized}};
  if (m.plan_json) j["plan"] = *m.plan_json;
  if (m.report_json) j["report"] = *m.report_json;
  return j;
}

ModelRecord model_from(const json& j) {
  ModelRecord m;
  m.model_id = j.at("model_id");
  m.project_id = j.value("project_id", "");
  m.name = j.value("name", "");
  m.format = j.value("format", "");
  const std::string st = j.value("status", "failed");
  m.status = st == "ready" ? ModelStatus::kReady : ModelStatus::kFailed;
  m.error = j.value("error", "");
  if (st == "queued" || st == "processing") m.error = "interrupted by server restart";
  m.triangles = j.value("triangles", std::uint64_t{0});
  m.node_count = j.value("node_count", std::size_t{0});
  m.warnings = j.value("warnings", std::vector<std::string>{});
  m.content_hash = j.value("content_hash", "");
  m.optimized = j.value("optimized", false);
  if (j.contains("plan")) m.plan_json = j["plan"].get<std::string>();
  if (j.contains("report")) m.report_json = j["report"].get<std::string>();
  return m;
}

}  // namespace

Store::Store(fs::path data_dir) : dir_(std::move(data_dir)) {
  for (const char* sub : {"projects", "models", "sessions", "thumbs"}) fs::create_directories(dir_ / sub);
  load();
}

void Store::load() {
  if (auto j = read_json(dir_ / "users.json")) {
    for (const json& u : *j) {
      User user{u.at("user_id"), u.value("name", ""), u.at("token"), u.value("admin", false)};
      users_[user.user_id] = user;
    }
  }
  for (const auto& e : fs::directory_iterator(dir_ / "projects")) {
    if (e.path().extension() != ".json") continue;
    if (auto j = read_json(e.path())) {
      Project p = project_from(*j);
      projects_[p.project_id] = p;
    }
  }
  for (const auto& e : fs::directory_iterator(dir_ / "models")) {
    if (auto j = read_json(e.path() / "meta.json")) {
      ModelRecord m = model_from(*j);
      models_[m.model_id] = m;
    }
  }
  for (const auto& e : fs::directory_iterator(dir_ / "sessions")) {
    if (e.path().extension() != ".json") continue;
    if (auto j = read_json(e.path())) {
      SessionMeta s{j->at("session_id"), j->value("project_id", ""), j->value("name", "")};
      sessions_[s.session_id] = s;
    }
  }
}

void Store::save_users_locked() const {
  json a = json::array();
  for (const auto& [id, u] : users_) {
    a.push_back({{"user_id", u.user_id}, {"name", u.name}, {"token", u.token}, {"admin", u.admin}});
  }
  write_text(dir_ / "users.json", a.dump(2));
}

void Store::save_project_locked(const Project& p) const {
  write_text(dir_ / "projects" / (p.project_id + ".json"), to_json(p).dump(2));
}

void Store::save_model_locked(const ModelRecord& m) const {
  write_text(model_dir(m.model_id) / "meta.json", to_json(m).dump(2));
}

std::string Store::bootstrap_admin(std::optional<std::string> token) {
  std::lock_guard lock(mu_);
  for (const auto& [id, u] : users_) {
    if (u.admin && (!token || u.token == *token)) return u.token;
  }
  User u{random_id("u"), "admin", token.value_or(random_id("tok") + random_id("x")), true};
  users_[u.user_id] = u;
  save_users_locked();
  return u.token;
}

User Store::create_user(const std::string& name, bool admin) {
  std::lock_guard lock(mu_);
  User u{random_id("u"), name, random_id("tok") + random_id("x"), admin};
  users_[u.user_id] = u;
  save_users_locked();
  return u;
}

std::optional<User> Store::user_by_token(std::string_view token) const {
  std::lock_guard lock(mu_);
  for (const auto& [id, u] : users_) {
    if (u.token == token) return u;
  }
  return std::nullopt;
}

std::vector<User> Store::users() const {
  std::lock_guard lock(mu_);
  std::vector<User> out;
  for (const auto& [id, u] : users_) out.push_back(u);
  return out;
}

Project Store::create_project(const std::string& name, const std::string& owner) {
  std::lock_guard lock(mu_);
  Project p;
  p.project_id = random_id("p");
  p.name = name;
  p.members[owner] = Role::kAdmin;
  projects_[p.project_id] = p;
  save_project_locked(p);
  return p;
}

std::optional<Project> Store::project(const std::string& id) const {
  std::lock_guard lock(mu_);
  auto it = projects_.find(id);
  if (it == projects_.end()) return std::nullopt;
  return it->second;
}

std::vector<Project> Store::projects() const {
  std::lock_guard lock(mu_);
  std::vector<Project> out;
  for (const auto& [id, p] : projects_) out.push_back(p);
  return out;
}

void Store::set_member(const std::string& project_id, const std::string& user_id, std::optional<Role> role) {
  std::lock_guard lock(mu_);
  Project& p = projects_.at(project_id);
  if (role) {
    p.members[user_id] = *role;
  } else {
    p.members.erase(user_id);
  }
  save_project_locked(p);
}

void Store::delete_project(const std::string& id) {
  std::lock_guard lock(mu_);
  auto it = projects_.find(id);
  if (it == projects_.end()) return;
  for (const std::string& m : it->second.model_ids) {
    models_.erase(m);
    std::erase_if(cache_, [&](const auto& kv) { return kv.first.rfind(m, 0) == 0; });
    fs::remove_all(model_dir(m));
  }
  for (const std::string& s : it->second.session_ids) {
    sessions_.erase(s);
    fs::remove(dir_ / "sessions" / (s + ".json"));
  }
  projects_.erase(it);
  fs::remove(dir_ / "projects" / (id + ".json"));
}

std::optional<Role> Store::role_in(const User& user, const std::string& project_id) const {
  if (user.admin) return Role::kAdmin;
  std::lock_guard lock(mu_);
  auto it = projects_.find(project_id);
  if (it == projects_.end()) return std::nullopt;
  auto m = it->second.members.find(user.user_id);
  if (m == it->second.members.end()) return std::nullopt;
  return m->second;
}

ModelRecord Store::create_model(const std::string& project_id, const std::string& name,
                                const std::string& format, std::span<const std::byte> source) {
  std::lock_guard lock(mu_);
  ModelRecord m;
  m.model_id = random_id("m");
  m.project_id = project_id;
  m.name = name;
  m.format = format;
  fs::create_directories(model_dir(m.model_id));
  io::write_file(model_dir(m.model_id) / ("source." + format), source);
  models_[m.model_id] = m;
  Project& p = projects_.at(project_id);
  p.model_ids.push_back(m.model_id);
  save_project_locked(p);
  save_model_locked(m);
  return m;
}

std::optional<ModelRecord> Store::model(const std::string& id) const {
  std::lock_guard lock(mu_);
  auto it = models_.find(id);
  if (it == models_.end()) return std::nullopt;
  return it->second;
}

std::vector<ModelRecord> Store::models(const std::string& project_id) const {
  std::lock_guard lock(mu_);
  std::vector<ModelRecord> out;
  for (const auto& [id, m] : models_) {
    if (m.project_id == project_id) out.push_back(m);
  }
  return out;
}

void Store::update_model(const ModelRecord& m) {
  std::lock_guard lock(mu_);
  if (!models_.count(m.model_id)) return;
  models_[m.model_id] = m;
  save_model_locked(m);
}

std::vector<std::byte> Store::model_source(const std::string& id) const {
  auto m = model(id);
  if (!m) throw Error("not_found", "unknown model " + id);
  return io::read_file(model_dir(id) / ("source." + m->format));
}

void Store::save_model_container(const std::string& id, const SceneModel& model, bool optimized) {
  const auto bytes = serialize(model);
  const fs::path p = model_dir(id) / (optimized ? "optimized.ocmf" : "model.ocmf");
  const fs::path tmp = p.string() + ".tmp";
  io::write_file(tmp, bytes);
  fs::rename(tmp, p);
  std::lock_guard lock(mu_);
  cache_.erase(id);
  cache_.erase(id + ":original");
}

std::vector<std::byte> Store::model_container_bytes(const std::string& id, bool original) const {
  const fs::path opt = model_dir(id) / "optimized.ocmf";
  if (!original && fs::exists(opt)) return io::read_file(opt);
  const fs::path base = model_dir(id) / "model.ocmf";
  if (!fs::exists(base)) throw Error("not_ready", "model " + id + " has not been processed");
  return io::read_file(base);
}

std::shared_ptr<const SceneModel> Store::load_model(const std::string& id, bool original) const {
  const std::string key = original ? id + ":original" : id;
  {
    std::lock_guard lock(mu_);
    if (auto it = cache_.find(key); it != cache_.end()) return it->second;
  }
  auto model = std::make_shared<const SceneModel>(deserialize(model_container_bytes(id, original)));
  std::lock_guard lock(mu_);
  cache_[key] = model;
  return model;
}

SessionMeta Store::create_session(const std::string& project_id, const std::string& name) {
  std::lock_guard lock(mu_);
  SessionMeta s{random_id("s"), project_id, name};
  sessions_[s.session_id] = s;
  Project& p = projects_.at(project_id);
  p.session_ids.push_back(s.session_id);
  save_project_locked(p);
  write_text(dir_ / "sessions" / (s.session_id + ".json"),
             json{{"session_id", s.session_id}, {"project_id", s.project_id}, {"name", s.name}}.dump(2));
  return s;
}

std::optional<SessionMeta> Store::session(const std::string& id) const {
  std::lock_guard lock(mu_);
  auto it = sessions_.find(id);
  if (it == sessions_.end()) return std::nullopt;
  return it->second;
}

std::vector<SessionMeta> Store::sessions(const std::string& project_id) const {
  std::lock_guard lock(mu_);
  std::vector<SessionMeta> out;
  for (const auto& [id, s] : sessions_) {
    if (s.project_id == project_id) out.push_back(s);
  }
  return out;
}

std::vector<SessionMeta> Store::all_sessions() const {
  std::lock_guard lock(mu_);
  std::vector<SessionMeta> out;
  for (const auto& [id, s] : sessions_) out.push_back(s);
  return out;
}

void Store::delete_session(const std::string& id) {
  std::lock_guard lock(mu_);
  auto it = sessions_.find(id);
  if (it == sessions_.end()) return;
  if (auto p = projects_.find(it->second.project_id); p != projects_.end()) {
    std::erase(p->second.session_ids, id);
    save_project_locked(p->second);
  }
  sessions_.erase(it);
  fs::remove(dir_ / "sessions" / (id + ".json"));
}

Job Store::create_job(const std::string& kind, const std::string& target, int viewpoints) {
  std::lock_guard lock(mu_);
  Job j;
  j.job_id = random_id("j");
  j.kind = kind;
  j.target = target;
  j.viewpoints = viewpoints;
  jobs_[j.job_id] = j;
  return j;
}

std::optional<Job> Store::job(const std::string& id) const {
  std::lock_guard lock(mu_);
  auto it = jobs_.find(id);
  if (it == jobs_.end()) return std::nullopt;
  return it->second;
}

void Store::update_job(const Job& j) {
  std::lock_guard lock(mu_);
  jobs_[j.job_id] = j;
}

}  // namespace orbitcad::server
