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

#ifndef DUOPLAN__CORE__TYPES_HPP_
#define DUOPLAN__CORE__TYPES_HPP_

#include "duoplan/core/error.hpp"
#include "duoplan/core/geometry.hpp"

#include <array>
#include <cmath>
#include <cstdint>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <vector>

namespace duoplan
{

inline constexpr double kEgoHalfLength = 2.25;
inline constexpr double kEgoHalfWidth = 1.0;
inline constexpr double kDefaultSpeedLimit = 13.9;  // 50 km/h
inline constexpr double kLaneWidth = 3.5;

enum class Frame { Ego, World };

struct Waypoint
{
  double x{0.0};
  double y{0.0};
  double t_offset{0.0};

  Vec2 position() const { return {x, y}; }
};

/// Uniformly sampled waypoint sequence. Waypoint i sits at t = (i + 1) * dt;
/// the plan origin (t = 0) is implicit.
class Trajectory
{
public:
  Trajectory() = default;

  Trajectory(std::span<const Vec2> points, double dt, Frame frame) : dt_(dt), frame_(frame)
  {
    require(dt > 0.0 && std::isfinite(dt), ErrorCode::InvalidArgument, "trajectory dt must be > 0");
    require(!points.empty(), ErrorCode::InvalidArgument, "trajectory needs at least one waypoint");
    waypoints_.reserve(points.size());
    for (std::size_t i = 0; i < points.size(); ++i) {
      require(
        std::isfinite(points[i].x) && std::isfinite(points[i].y), ErrorCode::InvalidArgument,
        "trajectory waypoint is not finite");
      waypoints_.push_back({points[i].x, points[i].y, static_cast<double>(i + 1) * dt});
    }
  }

  const std::vector<Waypoint> & waypoints() const { return waypoints_; }
  std::size_t size() const { return waypoints_.size(); }
  const Waypoint & operator[](std::size_t i) const { return waypoints_[i]; }
  const Waypoint & back() const { return waypoints_.back(); }
  double dt() const { return dt_; }
  Frame frame() const { return frame_; }
  double horizon() const { return dt_ * static_cast<double>(waypoints_.size()); }

  std::vector<Vec2> points() const
  {
    std::vector<Vec2> out;
    out.reserve(waypoints_.size());
    for (const auto & w : waypoints_) {
      out.push_back(w.position());
    }
    return out;
  }

  bool operator==(const Trajectory & o) const
  {
    if (dt_ != o.dt_ || frame_ != o.frame_ || waypoints_.size() != o.waypoints_.size()) {
      return false;
    }
    for (std::size_t i = 0; i < waypoints_.size(); ++i) {
      const auto & a = waypoints_[i];
      const auto & b = o.waypoints_[i];
      if (a.x != b.x || a.y != b.y || a.t_offset != b.t_offset) {
        return false;
      }
    }
    return true;
  }

private:
  std::vector<Waypoint> waypoints_;
  double dt_{0.5};
  Frame frame_{Frame::Ego};
};

struct EgoState
{
  double x{0.0};
  double y{0.0};
  double heading{0.0};
  double speed{0.0};
  double accel{0.0};

  Pose2 pose() const { return {x, y, heading}; }
  bool operator==(const EgoState &) const = default;
};

enum class AgentKind { Car, Pedestrian, Cyclist, Static };

struct Footprint
{
  double half_length{kEgoHalfLength};
  double half_width{kEgoHalfWidth};
  bool operator==(const Footprint &) const = default;
};

struct AgentState
{
  std::string id;
  AgentKind kind{AgentKind::Car};
  Pose2 pose;
  double speed{0.0};
  Footprint footprint;

  OrientedBox box() const
  {
    return {pose.position(), pose.heading, footprint.half_length, footprint.half_width};
  }

  /// Constant-velocity forecast `t` seconds ahead.
  Pose2 predicted(double t) const
  {
    const double v = kind == AgentKind::Static ? 0.0 : speed;
    return {pose.x + v * t * std::cos(pose.heading), pose.y + v * t * std::sin(pose.heading),
            pose.heading};
  }
};

enum class LightState { Red, Yellow, Green };

enum class MapKind { LaneCenterline, StopLine, TrafficLight, SpeedLimitSign, Crosswalk };

struct MapElement
{
  std::string id;
  MapKind kind{MapKind::LaneCenterline};
  std::vector<Vec2> geometry;
  LightState light{LightState::Green};  // TrafficLight only
  double speed_limit{0.0};              // SpeedLimitSign only
};

enum class NavigationCommand { KeepForward = 0, TurnLeft = 1, TurnRight = 2 };
inline constexpr int kNumCommands = 3;
inline constexpr std::array<NavigationCommand, kNumCommands> kAllCommands = {
  NavigationCommand::KeepForward, NavigationCommand::TurnLeft, NavigationCommand::TurnRight};

struct Scene
{
  std::string id;
  double timestamp{0.0};
  EgoState ego;
  std::vector<AgentState> agents;
  std::vector<MapElement> map;
  NavigationCommand command{NavigationCommand::KeepForward};
  std::vector<Vec2> route;

  OrientedBox ego_box() const
  {
    return {{ego.x, ego.y}, ego.heading, kEgoHalfLength, kEgoHalfWidth};
  }
};

/// Validates the scene invariants; throws ScenarioInvalid.
inline void validate(const Scene & scene)
{
  require(!scene.route.empty(), ErrorCode::ScenarioInvalid, "scene route is empty");
  require(scene.ego.speed >= 0.0, ErrorCode::ScenarioInvalid, "ego speed must be >= 0");
  require(
    std::isfinite(scene.ego.x) && std::isfinite(scene.ego.y) && std::isfinite(scene.ego.heading),
    ErrorCode::ScenarioInvalid, "ego pose is not finite");
  for (const auto & a : scene.agents) {
    require(
      a.footprint.half_length > 0.0 && a.footprint.half_width > 0.0, ErrorCode::ScenarioInvalid,
      "agent '" + a.id + "' footprint must be positive");
  }
  for (const auto & m : scene.map) {
    require(!m.geometry.empty(), ErrorCode::ScenarioInvalid, "map element '" + m.id + "' is empty");
    if (m.kind == MapKind::SpeedLimitSign) {
      require(m.speed_limit > 0.0, ErrorCode::ScenarioInvalid, "speed limit must be > 0");
    }
  }
}

inline const std::vector<std::string> & default_planning_queries()
{
  static const std::vector<std::string> labels = {
    "lead-vehicle-within-10m", "red-light-ahead",
    "pedestrian-in-path",      "stop-sign-ahead",
    "lane-change-feasible-left", "lane-change-feasible-right",
    "speed-over-limit",        "intersection-within-20m"};
  return labels;
}

enum PlanningBit : std::size_t {
  kLeadWithin10m = 0,
  kRedLightAhead = 1,
  kPedestrianInPath = 2,
  kStopSignAhead = 3,
  kLaneChangeLeft = 4,
  kLaneChangeRight = 5,
  kSpeedOverLimit = 6,
  kIntersectionWithin20m = 7,
};

struct PlanningState
{
  std::vector<bool> bits;
  std::vector<std::string> labels;

  static PlanningState zeros(std::size_t k = 8)
  {
    PlanningState s;
    s.bits.assign(k, false);
    const auto & d = default_planning_queries();
    for (std::size_t i = 0; i < k; ++i) {
      s.labels.push_back(i < d.size() ? d[i] : "query-" + std::to_string(i));
    }
    return s;
  }

  std::size_t size() const { return bits.size(); }

  std::string to_bitstring() const
  {
    std::string out;
    out.reserve(bits.size());
    for (bool b : bits) {
      out.push_back(b ? '1' : '0');
    }
    return out;
  }

  static PlanningState from_bitstring(std::string_view text, std::vector<std::string> labels = {})
  {
    PlanningState s = zeros(text.size());
    if (!labels.empty()) {
      require(labels.size() == text.size(), ErrorCode::ParseError, "label count mismatch");
      s.labels = std::move(labels);
    }
    for (std::size_t i = 0; i < text.size(); ++i) {
      require(text[i] == '0' || text[i] == '1', ErrorCode::ParseError, "bitstring must be 0/1");
      s.bits[i] = text[i] == '1';
    }
    return s;
  }

  bool operator==(const PlanningState &) const = default;
};

enum class Longitudinal { Accelerate = 0, Decelerate = 1, KeepSpeed = 2, Stop = 3 };
enum class Lateral { KeepLane = 0, ChangeLeft = 1, ChangeRight = 2, TurnLeft = 3, TurnRight = 4 };
inline constexpr int kNumLongitudinal = 4;
inline constexpr int kNumLateral = 5;
inline constexpr int kNumMetaActions = kNumLongitudinal * kNumLateral;

struct MetaAction
{
  Longitudinal longitudinal{Longitudinal::KeepSpeed};
  Lateral lateral{Lateral::KeepLane};

  /// Row in the action-embedding table: longitudinal-major enum order.
  int index() const
  {
    return static_cast<int>(longitudinal) * kNumLateral + static_cast<int>(lateral);
  }

  static MetaAction from_index(int index)
  {
    require(index >= 0 && index < kNumMetaActions, ErrorCode::InvalidArgument, "meta-action index");
    return {static_cast<Longitudinal>(index / kNumLateral), static_cast<Lateral>(index % kNumLateral)};
  }

  bool operator==(const MetaAction &) const = default;
};

enum class FeedbackSource { Oracle, Remote };

struct SlowFeedback
{
  PlanningState planning_state;
  std::vector<MetaAction> plan;
  std::string scene_description;
  std::string analysis;
  FeedbackSource source{FeedbackSource::Oracle};
  double latency{0.0};

  bool operator==(const SlowFeedback &) const = default;
};

/// Rigid-body change of frame by the ego pose. Waypoint count and dt are kept.
inline Trajectory transform_trajectory(const Trajectory & traj, const EgoState & ego, Frame target)
{
  require(traj.frame() != target, ErrorCode::InvalidArgument, "trajectory already in target frame");
  const Pose2 pose = ego.pose();
  std::vector<Vec2> pts;
  pts.reserve(traj.size());
  for (const auto & w : traj.waypoints()) {
    pts.push_back(
      target == Frame::World ? local_to_parent(pose, w.position())
                             : parent_to_local(pose, w.position()));
  }
  return Trajectory(pts, traj.dt(), target);
}

// ---- string names used by every serializer ----

constexpr std::string_view to_string(Frame f) { return f == Frame::Ego ? "ego" : "world"; }

constexpr std::string_view to_string(AgentKind k)
{
  switch (k) {
    case AgentKind::Car: return "car";
    case AgentKind::Pedestrian: return "pedestrian";
    case AgentKind::Cyclist: return "cyclist";
    case AgentKind::Static: return "static";
  }
  return "car";
}

constexpr std::string_view to_string(LightState s)
{
  switch (s) {
    case LightState::Red: return "red";
    case LightState::Yellow: return "yellow";
    case LightState::Green: return "green";
  }
  return "green";
}

constexpr std::string_view to_string(MapKind k)
{
  switch (k) {
    case MapKind::LaneCenterline: return "lane_centerline";
    case MapKind::StopLine: return "stop_line";
    case MapKind::TrafficLight: return "traffic_light";
    case MapKind::SpeedLimitSign: return "speed_limit_sign";
    case MapKind::Crosswalk: return "crosswalk";
  }
  return "lane_centerline";
}

constexpr std::string_view to_string(NavigationCommand c)
{
  switch (c) {
    case NavigationCommand::KeepForward: return "keep_forward";
    case NavigationCommand::TurnLeft: return "turn_left";
    case NavigationCommand::TurnRight: return "turn_right";
  }
  return "keep_forward";
}

constexpr std::string_view to_string(Longitudinal l)
{
  switch (l) {
    case Longitudinal::Accelerate: return "accelerate";
    case Longitudinal::Decelerate: return "decelerate";
    case Longitudinal::KeepSpeed: return "keep_speed";
    case Longitudinal::Stop: return "stop";
  }
  return "keep_speed";
}

constexpr std::string_view to_string(Lateral l)
{
  switch (l) {
    case Lateral::KeepLane: return "keep_lane";
    case Lateral::ChangeLeft: return "change_left";
    case Lateral::ChangeRight: return "change_right";
    case Lateral::TurnLeft: return "turn_left";
    case Lateral::TurnRight: return "turn_right";
  }
  return "keep_lane";
}

constexpr std::string_view to_string(FeedbackSource s)
{
  return s == FeedbackSource::Oracle ? "oracle" : "remote";
}

/// Reverse lookup over an enum's string names; nullopt when unknown.
template <typename Enum, std::size_t N>
std::optional<Enum> enum_from_string(std::string_view text, const std::array<Enum, N> & values)
{
  for (Enum v : values) {
    if (to_string(v) == text) {
      return v;
    }
  }
  return std::nullopt;
}

inline constexpr std::array<Frame, 2> kAllFrames = {Frame::Ego, Frame::World};
inline constexpr std::array<AgentKind, 4> kAllAgentKinds = {
  AgentKind::Car, AgentKind::Pedestrian, AgentKind::Cyclist, AgentKind::Static};
inline constexpr std::array<LightState, 3> kAllLightStates = {
  LightState::Red, LightState::Yellow, LightState::Green};
inline constexpr std::array<MapKind, 5> kAllMapKinds = {
  MapKind::LaneCenterline, MapKind::StopLine, MapKind::TrafficLight, MapKind::SpeedLimitSign,
  MapKind::Crosswalk};
inline constexpr std::array<Longitudinal, 4> kAllLongitudinal = {
  Longitudinal::Accelerate, Longitudinal::Decelerate, Longitudinal::KeepSpeed, Longitudinal::Stop};
inline constexpr std::array<Lateral, 5> kAllLateral = {
  Lateral::KeepLane, Lateral::ChangeLeft, Lateral::ChangeRight, Lateral::TurnLeft,
  Lateral::TurnRight};
inline constexpr std::array<FeedbackSource, 2> kAllSources = {
  FeedbackSource::Oracle, FeedbackSource::Remote};

}  // namespace duoplan

#endif  // DUOPLAN__CORE__TYPES_HPP_
