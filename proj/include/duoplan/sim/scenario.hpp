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

#ifndef DUOPLAN__SIM__SCENARIO_HPP_
#define DUOPLAN__SIM__SCENARIO_HPP_

#include "duoplan/core/serialization.hpp"

#include <algorithm>
#include <filesystem>
#include <fstream>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

namespace duoplan::sim
{

inline constexpr int kScenarioSchemaVersion = 1;

enum class TriggerKind { Time, EgoWithin, EgoXGe };

inline constexpr std::array<TriggerKind, 3> kAllTriggerKinds = {
  TriggerKind::Time, TriggerKind::EgoWithin, TriggerKind::EgoXGe};

constexpr std::string_view to_string(TriggerKind k)
{
  switch (k) {
    case TriggerKind::Time: return "time";
    case TriggerKind::EgoWithin: return "ego_within";
    case TriggerKind::EgoXGe: return "ego_x_ge";
  }
  return "time";
}

/// Fires once, the first tick its condition holds:
/// time >= value, ego-agent centre distance <= value, or ego world x >= value.
struct Trigger
{
  TriggerKind kind{TriggerKind::Time};
  double value{0.0};
  bool operator==(const Trigger &) const = default;
};

/// Control applied from the moment the trigger fires. With `target_speed`
/// the agent ramps toward it at |accel| (default 3 m/s^2); otherwise `accel`
/// is applied open-loop. Unset fields keep their previous value.
struct Behavior
{
  Trigger trigger;
  std::optional<double> accel;
  std::optional<double> curvature;
  std::optional<double> target_speed;
  bool operator==(const Behavior &) const = default;
};

struct AgentScript
{
  std::string agent;
  std::vector<Behavior> behaviors;
  bool operator==(const AgentScript &) const = default;
};

struct LightPhase
{
  std::string light;
  double time{0.0};
  LightState state{LightState::Green};
  bool operator==(const LightPhase &) const = default;
};

/// Command switch once the ego has covered `s` metres of route.
struct CommandPhase
{
  double s{0.0};
  NavigationCommand command{NavigationCommand::KeepForward};
  bool operator==(const CommandPhase &) const = default;
};

struct Termination
{
  double max_time{20.0};
  double goal_tolerance{2.0};
  bool operator==(const Termination &) const = default;
};

struct Scenario
{
  std::string name;
  std::string suite;
  std::string description;
  Scene initial;
  std::vector<AgentScript> scripts;
  std::vector<LightPhase> lights;
  std::vector<CommandPhase> commands;
  std::optional<Trajectory> expert;  // world frame, t_offset from scenario start
  Termination termination;
};

/// Throws ScenarioInvalid naming the first offending field.
inline void validate(const Scenario & sc)
{
  require(!sc.name.empty(), ErrorCode::ScenarioInvalid, "scenario name is empty");
  try {
    duoplan::validate(sc.initial);
  } catch (const Error & e) {
    throw Error(ErrorCode::ScenarioInvalid, sc.name + ": scene: " + e.what());
  }
  require(sc.initial.route.size() >= 2, ErrorCode::ScenarioInvalid, sc.name + ": route needs >= 2 points");
  require(polyline_length(sc.initial.route) > 0.0, ErrorCode::ScenarioInvalid, sc.name + ": route has zero length");
  require(sc.termination.max_time > 0.0, ErrorCode::ScenarioInvalid, sc.name + ": termination.max_time must be > 0");
  require(sc.termination.goal_tolerance >= 0.0, ErrorCode::ScenarioInvalid,
          sc.name + ": termination.goal_tolerance must be >= 0");
  for (const auto & s : sc.scripts) {
    const bool known = std::any_of(sc.initial.agents.begin(), sc.initial.agents.end(),
                                   [&s](const AgentState & a) { return a.id == s.agent; });
    require(known, ErrorCode::ScenarioInvalid, sc.name + ": script references unknown agent '" + s.agent + "'");
    for (const auto & b : s.behaviors) {
      require(!b.target_speed || *b.target_speed >= 0.0, ErrorCode::ScenarioInvalid,
              sc.name + ": target_speed must be >= 0");
      require(!b.curvature || std::abs(*b.curvature) <= 2.0, ErrorCode::ScenarioInvalid,
              sc.name + ": behavior curvature out of range");
    }
  }
  for (const auto & l : sc.lights) {
    const bool known = std::any_of(sc.initial.map.begin(), sc.initial.map.end(), [&l](const MapElement & m) {
      return m.id == l.light && m.kind == MapKind::TrafficLight;
    });
    require(known, ErrorCode::ScenarioInvalid, sc.name + ": light schedule references unknown light '" + l.light + "'");
  }
  if (sc.expert) {
    require(std::abs(sc.expert->dt() - 0.5) < 1e-9, ErrorCode::ScenarioInvalid, sc.name + ": expert dt must be 0.5 s");
    require(sc.expert->horizon() >= 3.0 - 1e-9, ErrorCode::ScenarioInvalid, sc.name + ": expert must span >= 3 s");
    require(sc.expert->frame() == Frame::World, ErrorCode::ScenarioInvalid, sc.name + ": expert must be world frame");
  }
}

inline Json to_json(const Scenario & sc)
{
  Json scripts = Json::array();
  for (const auto & s : sc.scripts) {
    Json behaviors = Json::array();
    for (const auto & b : s.behaviors) {
      Json jb = {{"trigger", {{"kind", std::string(to_string(b.trigger.kind))}, {"value", b.trigger.value}}}};
      if (b.accel) {
        jb["accel"] = *b.accel;
      }
      if (b.curvature) {
        jb["curvature"] = *b.curvature;
      }
      if (b.target_speed) {
        jb["target_speed"] = *b.target_speed;
      }
      behaviors.push_back(jb);
    }
    scripts.push_back({{"agent", s.agent}, {"behaviors", behaviors}});
  }
  Json lights = Json::array();
  for (const auto & l : sc.lights) {
    lights.push_back({{"light", l.light}, {"time", l.time}, {"state", std::string(to_string(l.state))}});
  }
  Json commands = Json::array();
  for (const auto & c : sc.commands) {
    commands.push_back({{"s", c.s}, {"command", std::string(to_string(c.command))}});
  }
  Json j = {{"schema_version", kScenarioSchemaVersion},
            {"name", sc.name},
            {"suite", sc.suite},
            {"description", sc.description},
            {"scene", to_json(sc.initial)},
            {"scripts", scripts},
            {"lights", lights},
            {"commands", commands},
            {"termination", {{"max_time", sc.termination.max_time}, {"goal_tolerance", sc.termination.goal_tolerance}}}};
  if (sc.expert) {
    j["expert"] = {{"dt", sc.expert->dt()}, {"points", io::points_to_json(sc.expert->points())}};
  }
  return j;
}

namespace detail
{
inline std::optional<double> optional_number(const Json & j, const char * key)
{
  if (!j.contains(key)) {
    return std::nullopt;
  }
  return io::number(j, key);
}
}  // namespace detail

inline Scenario scenario_from_json(const Json & j)
{
  try {
    require(j.is_object(), ErrorCode::ParseError, "scenario must be an object");
    require(j.contains("schema_version") && j["schema_version"].is_number_integer(), ErrorCode::ParseError,
            "missing schema_version");
    require(j["schema_version"].get<int>() == kScenarioSchemaVersion, ErrorCode::ParseError,
            "unsupported schema_version " + j["schema_version"].dump());
    Scenario sc;
    sc.name = j.at("name").get<std::string>();
    sc.suite = j.value("suite", std::string{});
    sc.description = j.value("description", std::string{});
    sc.initial = scene_from_json(j.at("scene"));
    if (sc.initial.id.empty()) {
      sc.initial.id = sc.name;
    }
    for (const auto & s : j.value("scripts", Json::array())) {
      AgentScript script;
      script.agent = s.at("agent").get<std::string>();
      for (const auto & b : s.value("behaviors", Json::array())) {
        Behavior beh;
        const auto & t = b.at("trigger");
        beh.trigger = {io::enum_field(t, "kind", kAllTriggerKinds), io::number(t, "value")};
        beh.accel = detail::optional_number(b, "accel");
        beh.curvature = detail::optional_number(b, "curvature");
        beh.target_speed = detail::optional_number(b, "target_speed");
        script.behaviors.push_back(beh);
      }
      sc.scripts.push_back(std::move(script));
    }
    for (const auto & l : j.value("lights", Json::array())) {
      sc.lights.push_back({l.at("light").get<std::string>(), io::number(l, "time"),
                           io::enum_field(l, "state", kAllLightStates)});
    }
    for (const auto & c : j.value("commands", Json::array())) {
      sc.commands.push_back({io::number(c, "s"), io::enum_field(c, "command", kAllCommands)});
    }
    if (j.contains("expert")) {
      const auto & e = j["expert"];
      const auto pts = io::points_from_json(e.at("points"));
      sc.expert = Trajectory(pts, io::number(e, "dt"), Frame::World);
    }
    if (j.contains("termination")) {
      const auto & t = j["termination"];
      sc.termination.max_time = io::number_or(t, "max_time", sc.termination.max_time);
      sc.termination.goal_tolerance = io::number_or(t, "goal_tolerance", sc.termination.goal_tolerance);
    }
    std::stable_sort(sc.lights.begin(), sc.lights.end(),
                     [](const LightPhase & a, const LightPhase & b) { return a.time < b.time; });
    std::stable_sort(sc.commands.begin(), sc.commands.end(),
                     [](const CommandPhase & a, const CommandPhase & b) { return a.s < b.s; });
    validate(sc);
    return sc;
  } catch (const Error & e) {
    if (e.code() == ErrorCode::ScenarioInvalid) {
      throw;
    }
    throw Error(ErrorCode::ScenarioInvalid, e.what());
  } catch (const nlohmann::json::exception & e) {
    throw Error(ErrorCode::ScenarioInvalid, std::string("scenario schema violation: ") + e.what());
  }
}

inline Scenario load_scenario(const std::filesystem::path & path)
{
  std::ifstream in(path);
  require(static_cast<bool>(in), ErrorCode::ScenarioInvalid, "cannot open scenario " + path.string());
  std::stringstream ss;
  ss << in.rdbuf();
  Json j;
  try {
    j = Json::parse(ss.str());
  } catch (const std::exception & e) {
    throw Error(ErrorCode::ScenarioInvalid, path.string() + ": not JSON: " + e.what());
  }
  return scenario_from_json(j);
}

inline void save_scenario(const Scenario & sc, const std::filesystem::path & path)
{
  std::ofstream out(path);
  require(static_cast<bool>(out), ErrorCode::InvalidArgument, "cannot write " + path.string());
  out << to_json(sc).dump(2) << '\n';
}

/// Sorted *.json files of a directory.
inline std::vector<std::filesystem::path> list_scenarios(const std::filesystem::path & dir)
{
  std::vector<std::filesystem::path> out;
  require(std::filesystem::is_directory(dir), ErrorCode::ConfigError, "not a directory: " + dir.string());
  for (const auto & e : std::filesystem::directory_iterator(dir)) {
    if (e.is_regular_file() && e.path().extension() == ".json") {
      out.push_back(e.path());
    }
  }
  std::sort(out.begin(), out.end());
  return out;
}

}  // namespace duoplan::sim

#endif  // DUOPLAN__SIM__SCENARIO_HPP_
