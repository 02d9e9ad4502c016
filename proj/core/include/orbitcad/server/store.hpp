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

#pragma once

#include "orbitcad/io/model_io.hpp"
#include "orbitcad/reduction/plan.hpp"

#include <json.hpp>

#include <filesystem>
#include <map>
#include <memory>
#include <mutex>
#include <optional>
#include <string>
#include <vector>

namespace orbitcad::server {

enum class Role { kViewer = 0, kMember = 1, kAdmin = 2 };
std::string_view role_name(Role r);
std::optional<Role> parse_role(std::string_view s);

struct User {
  std::string user_id;
  std::string name;
  std::string token;
  bool admin = false;  // server-wide administrator
};

struct Project {
  std::string project_id;
  std::string name;
  std::map<std::string, Role> members;
  std::vector<std::string> model_ids;
  std::vector<std::string> session_ids;
};

enum class ModelStatus { kQueued, kProcessing, kReady, kFailed };
std::string_view status_name(ModelStatus s);

struct ModelRecord {
  std::string model_id;
  std::string project_id;
  std::string name;
  std::string format;
  ModelStatus status = ModelStatus::kQueued;
  std::string error;
  std::uint64_t triangles = 0;
  std::size_t node_count = 0;
  std::vector<std::string> warnings;
  std::string content_hash;  // of the current (optimized when present) container
  bool optimized = false;
  std::optional<std::string> plan_json;
  std::optional<std::string> report_json;
};

struct SessionMeta {
  std::string session_id;
  std::string project_id;
  std::string name;
};

enum class JobStatus { kQueued, kRunning, kDone, kFailed };
std::string_view job_status_name(JobStatus s);

struct Job {
  std::string job_id;
  std::string kind;    // "import", "plan", "thumbnail"
  std::string target;  // model, session or "session/slide" id
  int viewpoints = 24;
  JobStatus status = JobStatus::kQueued;
  std::string error;
  std::string output;  // file name of the result, when any
};

/// Hex FNV-1a 64 of a byte buffer; used for model content hashes (ETags).
std::string content_hash(std::span<const std::byte> bytes);
std::string random_id(std::string_view prefix);

/// Persistent metadata and blobs under a data directory:
///   users.json, projects/{id}.json, models/{id}/{meta.json,source.*,model.ocmf,optimized.ocmf},
///   sessions/{id}.json plus session segment logs, thumbs/{key}.png.
/// All methods are thread-safe.
class Store {
 public:
  explicit Store(std::filesystem::path data_dir);

  const std::filesystem::path& data_dir() const { return dir_; }
  std::filesystem::path sessions_dir() const { return dir_ / "sessions"; }
  std::filesystem::path thumbs_dir() const { return dir_ / "thumbs"; }

  /// Creates the first administrator when there are no users; returns its
  /// token (or the existing admin's token).
  std::string bootstrap_admin(std::optional<std::string> token = std::nullopt);
  User create_user(const std::string& name, bool admin);
  std::optional<User> user_by_token(std::string_view token) const;
  std::vector<User> users() const;

  Project create_project(const std::string& name, const std::string& owner);
  std::optional<Project> project(const std::string& id) const;
  std::vector<Project> projects() const;
  void set_member(const std::string& project_id, const std::string& user_id, std::optional<Role> role);
  /// Removes the project with its models and sessions.
  void delete_project(const std::string& id);
  /// Effective role of the user in the project (admins are admin everywhere).
  std::optional<Role> role_in(const User& user, const std::string& project_id) const;

  ModelRecord create_model(const std::string& project_id, const std::string& name, const std::string& format,
                           std::span<const std::byte> source);
  std::optional<ModelRecord> model(const std::string& id) const;
  std::vector<ModelRecord> models(const std::string& project_id) const;
  void update_model(const ModelRecord& m);
  std::vector<std::byte> model_source(const std::string& id) const;
  /// Stores a container; `optimized` selects optimized.ocmf over model.ocmf.
  void save_model_container(const std::string& id, const SceneModel& model, bool optimized);
  /// Optimized version when present unless `original` is set.
  std::shared_ptr<const SceneModel> load_model(const std::string& id, bool original = false) const;
  std::vector<std::byte> model_container_bytes(const std::string& id, bool original = false) const;

  SessionMeta create_session(const std::string& project_id, const std::string& name);
  std::optional<SessionMeta> session(const std::string& id) const;
  std::vector<SessionMeta> sessions(const std::string& project_id) const;
  std::vector<SessionMeta> all_sessions() const;
  void delete_session(const std::string& id);

  Job create_job(const std::string& kind, const std::string& target, int viewpoints = 24);
  std::optional<Job> job(const std::string& id) const;
  void update_job(const Job& j);

 private:
  void save_users_locked() const;
  void save_project_locked(const Project& p) const;
  void save_model_locked(const ModelRecord& m) const;
  std::filesystem::path model_dir(const std::string& id) const { return dir_ / "models" / id; }
  void load();

  std::filesystem::path dir_;
  mutable std::mutex mu_;
  std::map<std::string, User> users_;
  std::map<std::string, Project> projects_;
  std::map<std::string, ModelRecord> models_;
  std::map<std::string, SessionMeta> sessions_;
  std::map<std::string, Job> jobs_;
  mutable std::map<std::string, std::shared_ptr<const SceneModel>> cache_;
};

}  // namespace orbitcad::server
