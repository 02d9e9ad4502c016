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

#include <json.hpp>

#include <cmath>
#include <regex>

namespace orbitcad::reduction {

using nlohmann::json;

namespace {

template <class... Ts>
struct Overloaded : Ts... {
  using Ts::operator()...;
};
template <class... Ts>
Overloaded(Ts...) -> Overloaded<Ts...>;

void check_selection(const IdSelection& ids, std::size_t i) {
  if (ids && ids->empty()) throw PlanError("id list is empty", i);
}

void validate_step(const ReductionStep& step, std::size_t i) {
  std::visit(
      Overloaded{
          [&](const RemoveNodes& s) {
            if (s.ids.empty()) throw PlanError("id list is empty", i);
          },
          [&](const RemoveBySize& s) {
            if (!std::isfinite(s.threshold) || s.threshold < 0) {
              throw PlanError("size threshold must be a non-negative number of meters", i);
            }
          },
          [&](const RemoveByName& s) {
            if (s.pattern.empty()) throw PlanError("name pattern is empty", i);
            if (s.is_regex) {
              try {
                std::regex re(s.pattern, std::regex::ECMAScript);
              } catch (const std::regex_error& e) {
                throw PlanError("invalid regular expression '" + s.pattern + "': " + e.what(), i);
              }
            }
          },
          [&](const RemoveByType& s) {
            if (s.type.empty()) throw PlanError("node type is empty", i);
          },
          [&](const VisibilityCull& s) {
            if (!(s.radius > 0) || !std::isfinite(s.radius)) throw PlanError("radius must be > 0", i);
            if (!s.center.allFinite()) throw PlanError("sphere center must be finite", i);
            if (s.camera_count < 4) throw PlanError("camera_count must be at least 4", i);
          },
          [&](const BoxCut& s) {
            if (s.box.box.is_empty() || !(s.box.box.extent().array() > 0).all()) {
              throw PlanError("box must have positive volume", i);
            }
            if (std::abs(s.box.rotation.norm() - 1.0) > 1e-6) {
              throw PlanError("box rotation must be a unit quaternion", i);
            }
          },
          [&](const SetColor& s) {
            check_selection(s.ids, i);
            if (!(s.rgb.array() >= 0).all() || !(s.rgb.array() <= 1).all()) {
              throw PlanError("color components must be in [0, 1]", i);
            }
          },
          [&](const SetOpacity& s) {
            check_selection(s.ids, i);
            if (!(s.value >= 0 && s.value <= 1)) throw PlanError("opacity must be in [0, 1]", i);
          },
          [&](const SetOcclusionOnly& s) { check_selection(s.ids, i); },
          [&](const ApplyLod& s) {
            check_selection(s.ids, i);
            if (s.ratios.empty()) throw PlanError("ratios are empty", i);
            double prev = 2.0;
            for (double r : s.ratios) {
              if (!(r > 0 && r <= 1) || !(r < prev)) {
                throw PlanError("ratios must be strictly decreasing within (0, 1]", i);
              }
              prev = r;
            }
          },
      },
      step);
}

json ids_to_json(const IdSelection& ids) {
  if (!ids) return "*";
  json a = json::array();
  for (NodeId id : *ids) a.push_back(to_underlying(id));
  return a;
}

std::vector<NodeId> id_list(const json& j, std::size_t i) {
  if (!j.is_array()) throw PlanError("'ids' must be an array of node ids", i);
  std::vector<NodeId> out;
  for (const json& v : j) {
    if (!v.is_number_unsigned()) throw PlanError("node ids must be non-negative integers", i);
    out.push_back(NodeId{v.get<std::uint32_t>()});
  }
  return out;
}

IdSelection selection(const json& step, std::size_t i) {
  if (!step.contains("ids")) throw PlanError("missing 'ids'", i);
  const json& j = step.at("ids");
  if (j.is_string() && j.get<std::string>() == "*") return std::nullopt;
  return id_list(j, i);
}

Vec3 vec3(const json& j, std::size_t i, const char* what) {
  if (!j.is_array() || j.size() != 3) throw PlanError(std::string("'") + what + "' must be [x, y, z]", i);
  return {j[0].get<double>(), j[1].get<double>(), j[2].get<double>()};
}

json vec3_json(const Vec3& v) { return json::array({v.x(), v.y(), v.z()}); }

ReductionStep step_from_json(const json& j, std::size_t i) {
  if (!j.is_object() || !j.contains("op") || !j["op"].is_string()) {
    throw PlanError("step must be an object with a string 'op'", i);
  }
  const std::string op = j["op"];
  try {
    if (op == "remove_nodes") return RemoveNodes{id_list(j.at("ids"), i)};
    if (op == "remove_by_size") return RemoveBySize{j.at("threshold").get<double>()};
    if (op == "remove_by_name") return RemoveByName{j.at("pattern").get<std::string>(), j.value("regex", false)};
    if (op == "remove_by_type") return RemoveByType{j.at("type").get<std::string>()};
    if (op == "visibility_cull") {
      return VisibilityCull{vec3(j.at("center"), i, "center"), j.at("radius").get<double>(),
                            j.value("camera_count", 64)};
    }
    if (op == "box_cut") {
      BoxCut s;
      s.box.box = Aabb::from_min_max(vec3(j.at("min"), i, "min"), vec3(j.at("max"), i, "max"));
      if (j.contains("rotation")) {
        const json& q = j["rotation"];
        if (!q.is_array() || q.size() != 4) throw PlanError("'rotation' must be [x, y, z, w]", i);
        s.box.rotation = Quat(q[3].get<double>(), q[0].get<double>(), q[1].get<double>(), q[2].get<double>());
      }
      std::string mode = j.value("mode", "keep");
      if (mode == "keep") {
        s.mode = BoxMode::kKeep;
      } else if (mode == "cut") {
        s.mode = BoxMode::kCut;
      } else {
        throw PlanError("box_cut mode must be 'keep' or 'cut'", i);
      }
      return s;
    }
    if (op == "set_color") return SetColor{selection(j, i), vec3(j.at("rgb"), i, "rgb")};
    if (op == "set_opacity") return SetOpacity{selection(j, i), j.at("value").get<double>()};
    if (op == "set_occlusion_only") return SetOcclusionOnly{selection(j, i), j.value("flag", true)};
    if (op == "apply_lod") {
      return ApplyLod{selection(j, i), j.at("ratios").get<std::vector<double>>(),
                      j.value("level", 1u)};
    }
  } catch (const json::exception& e) {
    throw PlanError("malformed '" + op + "' step: " + e.what(), i);
  }
  throw PlanError("unknown op '" + op + "'", i);
}

json step_to_json(const ReductionStep& step) {
  json j;
  j["op"] = step_name(step);
  std::visit(Overloaded{
                 [&](const RemoveNodes& s) { j["ids"] = ids_to_json(s.ids); },
                 [&](const RemoveBySize& s) { j["threshold"] = s.threshold; },
                 [&](const RemoveByName& s) {
                   j["pattern"] = s.pattern;
                   j["regex"] = s.is_regex;
                 },
                 [&](const RemoveByType& s) { j["type"] = s.type; },
                 [&](const VisibilityCull& s) {
                   j["center"] = vec3_json(s.center);
                   j["radius"] = s.radius;
                   j["camera_count"] = s.camera_count;
                 },
                 [&](const BoxCut& s) {
                   j["min"] = vec3_json(s.box.box.min);
                   j["max"] = vec3_json(s.box.box.max);
                   const Quat& q = s.box.rotation;
                   j["rotation"] = json::array({q.x(), q.y(), q.z(), q.w()});
                   j["mode"] = s.mode == BoxMode::kKeep ? "keep" : "cut";
                 },
                 [&](const SetColor& s) {
                   j["ids"] = ids_to_json(s.ids);
                   j["rgb"] = vec3_json(s.rgb);
                 },
                 [&](const SetOpacity& s) {
                   j["ids"] = ids_to_json(s.ids);
                   j["value"] = s.value;
                 },
                 [&](const SetOcclusionOnly& s) {
                   j["ids"] = ids_to_json(s.ids);
                   j["flag"] = s.flag;
                 },
                 [&](const ApplyLod& s) {
                   j["ids"] = ids_to_json(s.ids);
                   j["ratios"] = s.ratios;
                   j["level"] = s.level;
                 },
             },
             step);
  return j;
}

}  // namespace

std::string_view step_name(const ReductionStep& step) {
  static constexpr std::string_view kNames[] = {
      "remove_nodes", "remove_by_size", "remove_by_name", "remove_by_type", "visibility_cull",
      "box_cut", "set_color", "set_opacity", "set_occlusion_only", "apply_lod"};
  return kNames[step.index()];
}

void validate_plan(const ReductionPlan& plan) {
  if (plan.ideal_budget > plan.hard_budget) {
    throw PlanError("ideal_budget must not exceed hard_budget", std::nullopt);
  }
  for (std::size_t i = 0; i < plan.steps.size(); ++i) validate_step(plan.steps[i], i);
}

ReductionPlan plan_from_json(std::string_view text) {
  json j;
  try {
    j = json::parse(text);
  } catch (const json::parse_error& e) {
    throw PlanError(std::string("plan is not valid JSON: ") + e.what(), std::nullopt);
  }
  if (!j.is_object()) throw PlanError("plan must be a JSON object", std::nullopt);
  ReductionPlan plan;
  try {
    plan.model_id = j.value("model_id", "");
    plan.ideal_budget = j.value("ideal_budget", kDefaultIdealBudget);
    plan.hard_budget = j.value("hard_budget", kDefaultHardBudget);
  } catch (const json::exception& e) {
    throw PlanError(std::string("malformed plan header: ") + e.what(), std::nullopt);
  }
  if (j.contains("steps")) {
    if (!j["steps"].is_array()) throw PlanError("'steps' must be an array", std::nullopt);
    for (std::size_t i = 0; i < j["steps"].size(); ++i) {
      plan.steps.push_back(step_from_json(j["steps"][i], i));
    }
  }
  validate_plan(plan);
  return plan;
}

std::string plan_to_json(const ReductionPlan& plan) {
  json j;
  j["model_id"] = plan.model_id;
  j["ideal_budget"] = plan.ideal_budget;
  j["hard_budget"] = plan.hard_budget;
  j["steps"] = json::array();
  for (const auto& s : plan.steps) j["steps"].push_back(step_to_json(s));
  return j.dump(2);
}

std::string_view verdict_name(Verdict v) {
  switch (v) {
    case Verdict::kUnderIdeal: return "under_ideal";
    case Verdict::kUnderHard: return "under_hard";
    case Verdict::kOver: return "over";
  }
  return "over";
}

Verdict budget_verdict(std::uint64_t triangles, std::uint64_t ideal, std::uint64_t hard) {
  if (triangles <= ideal) return Verdict::kUnderIdeal;
  if (triangles <= hard) return Verdict::kUnderHard;
  return Verdict::kOver;
}

std::string report_to_json(const ReductionReport& report) {
  json j;
  j["initial_triangles"] = report.initial_triangles;
  j["final_triangles"] = report.final_triangles;
  j["verdict"] = verdict_name(report.verdict);
  j["steps"] = json::array();
  for (const StepReport& s : report.steps) {
    json r;
    r["index"] = s.index;
    r["op"] = s.op;
    r["triangle_delta"] = s.triangle_delta;
    r["removed"] = json::array();
    for (NodeId id : s.removed) r["removed"].push_back(to_underlying(id));
    j["steps"].push_back(std::move(r));
  }
  return j.dump(2);
}

}  // namespace orbitcad::reduction
