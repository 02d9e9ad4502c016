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

#include "orbitcad/render/sprite_sheet.hpp"
#include "orbitcad/server/session_hub.hpp"
#include "orbitcad/server/store.hpp"

#include <boost/asio/thread_pool.hpp>

#include <map>
#include <string>

namespace orbitcad::server {

struct Request {
  std::string method;
  std::string path;  // without the query string
  std::map<std::string, std::string> query;
  std::map<std::string, std::string> headers;  // lower-case names
  std::string body;
};

struct Response {
  int status = 200;
  std::string content_type = "application/json";
  std::string body;
  std::map<std::string, std::string> headers;
};

/// Splits "/a/b?x=1&y=%20" into path and decoded query parameters.
void parse_target(std::string_view target, std::string& path, std::map<std::string, std::string>& query);
std::string url_decode(std::string_view s);

/// Parses the stored source of a queued model and marks it ready or failed.
ModelRecord process_import(Store& store, const std::string& model_id, std::optional<double> unit_scale = {});

/// Applies session-level edits (whole/node transforms, hidden nodes) to a
/// copy of the model, as seen by session thumbnails.
SceneModel apply_session_view(const SceneModel& model, const session::SessionState& state);

/// Model to render for "model:ID", "session:ID" or "slide:ID/SLIDE"; session
/// targets also set the cut plane in `options`.
SceneModel resolve_thumbnail_target(Store& store, SessionHub& hub, const std::string& target,
                                    render::SpriteSheetOptions& options);

/// REST endpoints (documented in docs/rest.md). Heavy work (import, plan
/// execution, thumbnails) runs on a worker pool and is tracked as jobs.
class Api {
 public:
  Api(Store& store, SessionHub& hub, std::size_t workers = 2);
  ~Api();

  Response handle(const Request& request);
  /// Blocks until queued jobs have finished (tests, shutdown).
  void drain();
  /// Resolves a bearer token (header or `token` query parameter).
  std::optional<User> authenticate(const Request& request) const;

 private:
  Response route(const Request& r, const User& user);
  Response projects(const Request& r, const User& user, const std::vector<std::string>& parts);
  Response models(const Request& r, const User& user, const std::vector<std::string>& parts);
  Response sessions(const Request& r, const User& user, const std::vector<std::string>& parts);
  Response users(const Request& r, const User& user, const std::vector<std::string>& parts);
  Response jobs(const Request& r, const User& user, const std::vector<std::string>& parts);
  Response thumbnail(const Request& r, const std::string& key, const std::string& target);

  void submit(std::function<void()> task);
  void run_import(const std::string& model_id, const std::string& job_id);
  void run_plan(const std::string& model_id, const std::string& job_id);
  void run_thumbnail(const std::string& job_id);

  Store& store_;
  SessionHub& hub_;
  boost::asio::thread_pool pool_;
  std::mutex pending_mu_;
  std::condition_variable pending_cv_;
  std::size_t pending_ = 0;
};

}  // namespace orbitcad::server
