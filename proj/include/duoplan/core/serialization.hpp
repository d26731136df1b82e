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

#ifndef DUOPLAN__CORE__SERIALIZATION_HPP_
#define DUOPLAN__CORE__SERIALIZATION_HPP_

#include "duoplan/core/types.hpp"

#include <json.hpp>

#include <string>
#include <vector>

namespace duoplan
{

using Json = nlohmann::json;

namespace io
{

template <typename Enum, std::size_t N>
Enum enum_field(const Json & j, const char * key, const std::array<Enum, N> & values)
{
  require(j.contains(key), ErrorCode::ParseError, std::string("missing field '") + key + "'");
  require(j.at(key).is_string(), ErrorCode::ParseError, std::string("field '") + key + "' must be a string");
  const auto text = j.at(key).get<std::string>();
  const auto parsed = enum_from_string(text, values);
  require(parsed.has_value(), ErrorCode::ParseError, std::string("bad value for '") + key + "': " + text);
  return *parsed;
}

inline double number(const Json & j, const char * key)
{
  require(
    j.contains(key) && j.at(key).is_number(), ErrorCode::ParseError,
    std::string("missing numeric field '") + key + "'");
  return j.at(key).get<double>();
}

inline double number_or(const Json & j, const char * key, double fallback)
{
  if (!j.contains(key)) {
    return fallback;
  }
  require(j.at(key).is_number(), ErrorCode::ParseError, std::string("field '") + key + "' must be a number");
  return j.at(key).get<double>();
}

inline Json points_to_json(std::span<const Vec2> pts)
{
  Json arr = Json::array();
  for (const auto & p : pts) {
    arr.push_back(Json::array({p.x, p.y}));
  }
  return arr;
}

inline std::vector<Vec2> points_from_json(const Json & arr)
{
  require(arr.is_array(), ErrorCode::ParseError, "polyline must be an array");
  std::vector<Vec2> out;
  for (const auto & p : arr) {
    require(
      p.is_array() && p.size() == 2 && p[0].is_number() && p[1].is_number(), ErrorCode::ParseError,
      "point must be [x, y]");
    out.push_back({p[0].get<double>(), p[1].get<double>()});
  }
  return out;
}

}  // namespace io

inline Json to_json(const EgoState & e)
{
  return {{"x", e.x}, {"y", e.y}, {"heading", e.heading}, {"speed", e.speed}, {"accel", e.accel}};
}

inline EgoState ego_from_json(const Json & j)
{
  return {io::number(j, "x"), io::number(j, "y"), io::number_or(j, "heading", 0.0),
          io::number_or(j, "speed", 0.0), io::number_or(j, "accel", 0.0)};
}

inline Json to_json(const AgentState & a)
{
  return {{"id", a.id},
          {"kind", std::string(to_string(a.kind))},
          {"x", a.pose.x},
          {"y", a.pose.y},
          {"heading", a.pose.heading},
          {"speed", a.speed},
          {"half_length", a.footprint.half_length},
          {"half_width", a.footprint.half_width}};
}

inline Footprint default_footprint(AgentKind kind)
{
  switch (kind) {
    case AgentKind::Car: return {2.25, 1.0};
    case AgentKind::Pedestrian: return {0.3, 0.3};
    case AgentKind::Cyclist: return {0.9, 0.35};
    case AgentKind::Static: return {2.25, 1.0};
  }
  return {};
}

inline AgentState agent_from_json(const Json & j)
{
  AgentState a;
  a.id = j.at("id").get<std::string>();
  a.kind = io::enum_field(j, "kind", kAllAgentKinds);
  a.pose = {io::number(j, "x"), io::number(j, "y"), io::number_or(j, "heading", 0.0)};
  a.speed = io::number_or(j, "speed", 0.0);
  const Footprint d = default_footprint(a.kind);
  a.footprint = {io::number_or(j, "half_length", d.half_length), io::number_or(j, "half_width", d.half_width)};
  return a;
}

inline Json to_json(const MapElement & m)
{
  Json j = {{"id", m.id}, {"kind", std::string(to_string(m.kind))}, {"geometry", io::points_to_json(m.geometry)}};
  if (m.kind == MapKind::TrafficLight) {
    j["state"] = std::string(to_string(m.light));
  }
  if (m.kind == MapKind::SpeedLimitSign) {
    j["limit"] = m.speed_limit;
  }
  return j;
}

inline MapElement map_element_from_json(const Json & j)
{
  MapElement m;
  m.id = j.value("id", std::string{});
  m.kind = io::enum_field(j, "kind", kAllMapKinds);
  m.geometry = io::points_from_json(j.at("geometry"));
  if (m.kind == MapKind::TrafficLight) {
    m.light = io::enum_field(j, "state", kAllLightStates);
  }
  if (m.kind == MapKind::SpeedLimitSign) {
    m.speed_limit = io::number(j, "limit");
  }
  return m;
}

inline Json to_json(const Scene & s)
{
  Json agents = Json::array();
  for (const auto & a : s.agents) {
    agents.push_back(to_json(a));
  }
  Json map = Json::array();
  for (const auto & m : s.map) {
    map.push_back(to_json(m));
  }
  return {{"id", s.id},
          {"timestamp", s.timestamp},
          {"ego", to_json(s.ego)},
          {"agents", agents},
          {"map", map},
          {"command", std::string(to_string(s.command))},
          {"route", io::points_to_json(s.route)}};
}

inline Scene scene_from_json(const Json & j)
{
  Scene s;
  s.id = j.value("id", std::string{});
  s.timestamp = io::number_or(j, "timestamp", 0.0);
  s.ego = ego_from_json(j.at("ego"));
  for (const auto & a : j.value("agents", Json::array())) {
    s.agents.push_back(agent_from_json(a));
  }
  for (const auto & m : j.value("map", Json::array())) {
    s.map.push_back(map_element_from_json(m));
  }
  s.command = j.contains("command") ? io::enum_field(j, "command", std::array{
    NavigationCommand::KeepForward, NavigationCommand::TurnLeft, NavigationCommand::TurnRight})
                                    : NavigationCommand::KeepForward;
  s.route = io::points_from_json(j.at("route"));
  return s;
}

inline Json to_json(const Trajectory & t)
{
  return {{"dt", t.dt()}, {"frame", std::string(to_string(t.frame()))}, {"waypoints", io::points_to_json(t.points())}};
}

inline Trajectory trajectory_from_json(const Json & j)
{
  const auto pts = io::points_from_json(j.at("waypoints"));
  const Frame frame = j.contains("frame") ? io::enum_field(j, "frame", kAllFrames) : Frame::World;
  return Trajectory(pts, io::number(j, "dt"), frame);
}

inline Json to_json(const MetaAction & a)
{
  return {{"long", std::string(to_string(a.longitudinal))}, {"lat", std::string(to_string(a.lateral))}};
}

inline MetaAction meta_action_from_json(const Json & j)
{
  require(j.is_object(), ErrorCode::ParseError, "meta-action must be an object");
  return {io::enum_field(j, "long", kAllLongitudinal), io::enum_field(j, "lat", kAllLateral)};
}

inline Json to_json(const SlowFeedback & f)
{
  Json plan = Json::array();
  for (const auto & a : f.plan) {
    plan.push_back(to_json(a));
  }
  Json bits = Json::array();
  for (bool b : f.planning_state.bits) {
    bits.push_back(b ? 1 : 0);
  }
  return {{"planning_state", bits},
          {"labels", f.planning_state.labels},
          {"plan", plan},
          {"description", f.scene_description},
          {"analysis", f.analysis},
          {"source", std::string(to_string(f.source))},
          {"latency", f.latency}};
}

}  // namespace duoplan

#endif  // DUOPLAN__CORE__SERIALIZATION_HPP_
