// Copyright 2026 The duoplan Authors
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

#ifndef DUOPLAN__SLOWSYS__QA_HPP_
#define DUOPLAN__SLOWSYS__QA_HPP_

#include "duoplan/core/serialization.hpp"
#include "duoplan/slowsys/ground_truth.hpp"
#include "duoplan/slowsys/oracle.hpp"
#include "duoplan/slowsys/prompts.hpp"
#include "duoplan/slowsys/remote.hpp"

#include <array>
#include <optional>
#include <string>
#include <vector>

namespace duoplan::slowsys
{

enum class QaCategory { SceneAnalysis, TrafficSign, KeyObject, PlanningState, HighLevelPlan };

inline constexpr std::array<QaCategory, 5> kAllQaCategories = {
  QaCategory::SceneAnalysis, QaCategory::TrafficSign, QaCategory::KeyObject, QaCategory::PlanningState,
  QaCategory::HighLevelPlan};

constexpr std::string_view to_string(QaCategory c)
{
  switch (c) {
    case QaCategory::SceneAnalysis: return "scene_analysis";
    case QaCategory::TrafficSign: return "traffic_sign";
    case QaCategory::KeyObject: return "key_object";
    case QaCategory::PlanningState: return "planning_state";
    case QaCategory::HighLevelPlan: return "high_level_plan";
  }
  return "scene_analysis";
}

struct QaRecord
{
  std::size_t tick{0};
  std::string scene_id;
  double timestamp{0.0};
  QaCategory category{QaCategory::SceneAnalysis};
  std::string question;
  Json answer;  // string, bit array or meta-action list depending on category
};

inline Json to_json(const QaRecord & r)
{
  return {{"tick", r.tick},           {"scene_id", r.scene_id}, {"timestamp", r.timestamp},
          {"category", std::string(to_string(r.category))}, {"question", r.question}, {"answer", r.answer}};
}

namespace detail
{

inline std::string traffic_sign_answer(const Scene & scene)
{
  std::vector<std::string> parts;
  for (const auto & m : scene.map) {
    if (m.kind == MapKind::SpeedLimitSign) {
      const Vec2 local = parent_to_local(scene.ego.pose(), m.geometry.front());
      if (local.x >= -5.0 && local.x <= kBevRange) {
        parts.push_back("speed limit " + fixed1(m.speed_limit) + " m/s at " + fixed1(local.x) + " m");
      }
      continue;
    }
    if (m.kind != MapKind::TrafficLight && m.kind != MapKind::StopLine) {
      continue;
    }
    const auto hit = line_ahead(scene, [&m](const MapElement & e) { return &e == &m; }, kBevRange);
    if (!hit) {
      continue;
    }
    if (m.kind == MapKind::TrafficLight) {
      parts.push_back(std::string(to_string(m.light)) + " light at " + fixed1(hit->distance) + " m");
    } else {
      parts.push_back("stop line at " + fixed1(hit->distance) + " m");
    }
  }
  if (parts.empty()) {
    return "none";
  }
  std::string out = parts.front();
  for (std::size_t i = 1; i < parts.size(); ++i) {
    out += "; " + parts[i];
  }
  return out;
}

inline std::string scene_analysis_answer(const Scene & scene, const BevPrompt & bev)
{
  const std::size_t agents = bev.lines.size();
  std::size_t n = 0;
  for (const auto & l : bev.lines) {
    n += l.rfind("car", 0) == 0 || l.rfind("pedestrian", 0) == 0 || l.rfind("cyclist", 0) == 0 ||
             l.rfind("static", 0) == 0
           ? 1
           : 0;
  }
  (void)agents;
  const char * density = n == 0 ? "empty" : n <= 2 ? "light" : n <= 5 ? "moderate" : "dense";
  return std::string("clear weather, daylight; traffic ") + density + " (" + std::to_string(n) +
         " agents within 50 m); ego at " + fixed1(scene.ego.speed) + " m/s";
}

inline std::string key_object_answer(const BevPrompt & bev)
{
  std::vector<std::string> agents;
  for (std::size_t i = 1; i < bev.lines.size(); ++i) {
    const auto & l = bev.lines[i];
    if (l.rfind("light", 0) == 0 || l.rfind("stop_line", 0) == 0 || l.rfind("crosswalk", 0) == 0) {
      continue;
    }
    agents.push_back(l);
    if (agents.size() == 3) {
      break;
    }
  }
  if (agents.empty()) {
    return "none";
  }
  std::string out = agents.front();
  for (std::size_t i = 1; i < agents.size(); ++i) {
    out += "; " + agents[i];
  }
  return out;
}

}  // namespace detail

/// Auto-labels every scene of a log with one record per QA category, using
/// simulator ground truth in place of detections.
inline std::vector<QaRecord> generate_qa_dataset(const std::vector<Scene> & log)
{
  std::vector<QaRecord> out;
  out.reserve(log.size() * kAllQaCategories.size());
  const auto & questions = qa_template();
  for (std::size_t t = 0; t < log.size(); ++t) {
    const Scene & scene = log[t];
    const auto bev = build_bev_prompt(scene);
    for (QaCategory cat : kAllQaCategories) {
      QaRecord r;
      r.tick = t;
      r.scene_id = scene.id;
      r.timestamp = scene.timestamp;
      r.category = cat;
      r.question = questions[static_cast<std::size_t>(cat)];
      switch (cat) {
        case QaCategory::SceneAnalysis: r.answer = detail::scene_analysis_answer(scene, bev); break;
        case QaCategory::TrafficSign: r.answer = detail::traffic_sign_answer(scene); break;
        case QaCategory::KeyObject: r.answer = detail::key_object_answer(bev); break;
        case QaCategory::PlanningState: {
          Json bits = Json::array();
          for (bool b : evaluate_planning_state(scene).bits) {
            bits.push_back(b ? 1 : 0);
          }
          r.answer = bits;
          break;
        }
        case QaCategory::HighLevelPlan: {
          Json plan = Json::array();
          for (const auto & a : oracle_plan(scene).plan) {
            plan.push_back(to_json(a));
          }
          r.answer = plan;
          break;
        }
      }
      out.push_back(std::move(r));
    }
  }
  return out;
}

/// Schema check for one exported record; returns the first problem found.
inline std::optional<std::string> validate_qa_record(const Json & j, std::size_t k = 8)
{
  if (!j.is_object()) {
    return "record must be an object";
  }
  for (const char * key : {"tick", "scene_id", "timestamp", "category", "question", "answer"}) {
    if (!j.contains(key)) {
      return std::string("missing '") + key + "'";
    }
  }
  if (!j["tick"].is_number_unsigned() && !j["tick"].is_number_integer()) {
    return "tick must be an integer";
  }
  if (!j["question"].is_string() || !j["scene_id"].is_string() || !j["timestamp"].is_number()) {
    return "bad scalar field type";
  }
  if (!j["category"].is_string()) {
    return "category must be a string";
  }
  const auto cat = enum_from_string(j["category"].get<std::string>(), kAllQaCategories);
  if (!cat) {
    return "unknown category";
  }
  const Json & a = j["answer"];
  switch (*cat) {
    case QaCategory::SceneAnalysis:
    case QaCategory::TrafficSign:
    case QaCategory::KeyObject:
      if (!a.is_string() || a.get<std::string>().empty()) {
        return "answer must be a non-empty string";
      }
      break;
    case QaCategory::PlanningState:
      if (!a.is_array() || a.size() != k) {
        return "planning_state answer must have K bits";
      }
      for (const auto & b : a) {
        if (!b.is_number_integer() || (b.get<int>() != 0 && b.get<int>() != 1)) {
          return "planning_state bits must be 0/1";
        }
      }
      break;
    case QaCategory::HighLevelPlan:
      if (!a.is_array() || a.empty()) {
        return "plan answer must be a non-empty array";
      }
      for (const auto & m : a) {
        try {
          meta_action_from_json(m);
        } catch (const Error &) {
          return "plan entry outside the meta-action vocabulary";
        }
      }
      break;
  }
  return std::nullopt;
}

}  // namespace duoplan::slowsys

#endif  // DUOPLAN__SLOWSYS__QA_HPP_
