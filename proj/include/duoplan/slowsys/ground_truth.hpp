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

#ifndef DUOPLAN__SLOWSYS__GROUND_TRUTH_HPP_
#define DUOPLAN__SLOWSYS__GROUND_TRUTH_HPP_

#include "duoplan/core/types.hpp"
#include "duoplan/reward/reward.hpp"

#include <cmath>
#include <limits>
#include <optional>
#include <string>
#include <vector>

namespace duoplan::slowsys
{

inline constexpr double kOracleDecel = 3.0;
inline constexpr double kStopMargin = 2.0;

/// v^2 / (2 * 3 m/s^2) + 2 m.
inline double stopping_distance(double speed)
{
  return speed * speed / (2.0 * kOracleDecel) + kStopMargin;
}

/// Agent expressed in the ego frame.
struct LocalAgent
{
  const AgentState * agent{nullptr};
  Vec2 position;
  double heading{0.0};
  Vec2 velocity;  // ego-frame, absolute (not relative)
  double range{0.0};

  /// Longitudinal gap between bumpers.
  double gap() const { return position.x - kEgoHalfLength - agent->footprint.half_length; }
};

inline LocalAgent localize(const Scene & scene, const AgentState & a)
{
  const Pose2 ego = scene.ego.pose();
  LocalAgent out;
  out.agent = &a;
  out.position = parent_to_local(ego, a.pose.position());
  out.heading = wrap_angle(a.pose.heading - ego.heading);
  const double v = a.kind == AgentKind::Static ? 0.0 : a.speed;
  out.velocity = {v * std::cos(out.heading), v * std::sin(out.heading)};
  out.range = out.position.norm();
  return out;
}

inline bool is_vulnerable(AgentKind k) { return k == AgentKind::Pedestrian || k == AgentKind::Cyclist; }

/// Nearest vehicle ahead in the ego lane.
inline std::optional<LocalAgent> lead_vehicle(const Scene & scene, double max_gap = 100.0)
{
  std::optional<LocalAgent> best;
  for (const auto & a : scene.agents) {
    if (is_vulnerable(a.kind)) {
      continue;
    }
    const auto l = localize(scene, a);
    if (l.position.x <= 0.0 || std::abs(l.position.y) >= 0.5 * kLaneWidth + 0.25) {
      continue;
    }
    if (l.gap() > max_gap) {
      continue;
    }
    if (!best || l.gap() < best->gap()) {
      best = l;
    }
  }
  return best;
}

struct LineAhead
{
  const MapElement * element{nullptr};
  double distance{std::numeric_limits<double>::infinity()};  // from the front bumper
};

/// Nearest line element of the given kind crossing the ego's forward axis.
template <typename Pred>
std::optional<LineAhead> line_ahead(const Scene & scene, Pred pred, double max_distance = 60.0)
{
  const Pose2 ego = scene.ego.pose();
  std::optional<LineAhead> best;
  for (const auto & m : scene.map) {
    if (!pred(m)) {
      continue;
    }
    for (std::size_t k = 0; k < m.geometry.size(); ++k) {
      const Vec2 a = parent_to_local(ego, m.geometry[k]);
      const Vec2 b = k + 1 < m.geometry.size() ? parent_to_local(ego, m.geometry[k + 1]) : a;
      double x;
      if (m.geometry.size() == 1) {
        if (std::abs(a.y) > 0.5 * kLaneWidth) {
          continue;
        }
        x = a.x;
      } else {
        if (k + 1 == m.geometry.size()) {
          continue;
        }
        if ((a.y > 0.0 && b.y > 0.0) || (a.y < 0.0 && b.y < 0.0)) {
          continue;
        }
        const double dy = b.y - a.y;
        x = std::abs(dy) < 1e-12 ? std::min(a.x, b.x) : a.x + (b.x - a.x) * (-a.y / dy);
      }
      const double d = x - kEgoHalfLength;
      if (x <= 0.0 || d > max_distance) {
        continue;
      }
      if (!best || d < best->distance) {
        best = LineAhead{&m, d};
      }
    }
  }
  return best;
}

inline std::optional<LineAhead> red_light_ahead(const Scene & scene, double max_distance = 50.0)
{
  return line_ahead(
    scene, [](const MapElement & m) { return m.kind == MapKind::TrafficLight && m.light == LightState::Red; },
    max_distance);
}

inline std::optional<LineAhead> light_ahead(const Scene & scene, double max_distance = 50.0)
{
  return line_ahead(scene, [](const MapElement & m) { return m.kind == MapKind::TrafficLight; }, max_distance);
}

inline std::optional<LineAhead> stop_line_ahead(const Scene & scene, double max_distance = 30.0)
{
  return line_ahead(scene, [](const MapElement & m) { return m.kind == MapKind::StopLine; }, max_distance);
}

/// Pedestrian or cyclist within 30 m ahead and inside the ego corridor.
inline std::optional<LocalAgent> vulnerable_in_path(const Scene & scene, double half_width = 2.5)
{
  std::optional<LocalAgent> best;
  for (const auto & a : scene.agents) {
    if (!is_vulnerable(a.kind)) {
      continue;
    }
    const auto l = localize(scene, a);
    if (l.position.x <= 0.0 || l.position.x > 30.0 || std::abs(l.position.y) >= half_width) {
      continue;
    }
    if (!best || l.position.x < best->position.x) {
      best = l;
    }
  }
  return best;
}

/// An adjacent lane exists on the given side (+1 left, -1 right) and its
/// stretch from 15 m behind to 25 m ahead is free of agents.
inline bool lane_change_feasible(const Scene & scene, int side)
{
  const Pose2 ego = scene.ego.pose();
  bool lane_exists = false;
  for (const auto & m : scene.map) {
    if (m.kind != MapKind::LaneCenterline) {
      continue;
    }
    const auto proj = project_onto_polyline(m.geometry, ego.position());
    const Vec2 foot = parent_to_local(ego, proj.foot);
    const double offset = foot.y * side;
    if (offset >= 2.5 && offset <= 4.5 && std::abs(foot.x) < 5.0) {
      lane_exists = true;
      break;
    }
  }
  if (!lane_exists) {
    return false;
  }
  for (const auto & a : scene.agents) {
    const auto l = localize(scene, a);
    const double y = l.position.y * side;
    if (l.position.x >= -15.0 && l.position.x <= 25.0 && y >= 0.5 * kLaneWidth - 0.5 && y <= 1.5 * kLaneWidth + 0.5) {
      return false;
    }
  }
  return true;
}

/// Ground-truth answers to the default yes/no planning queries.
inline PlanningState evaluate_planning_state(const Scene & scene)
{
  PlanningState s = PlanningState::zeros(default_planning_queries().size());
  const auto lead = lead_vehicle(scene);
  s.bits[kLeadWithin10m] = lead && lead->gap() < 10.0;
  s.bits[kRedLightAhead] = red_light_ahead(scene).has_value();
  s.bits[kPedestrianInPath] = vulnerable_in_path(scene).has_value();
  s.bits[kStopSignAhead] = stop_line_ahead(scene).has_value();
  s.bits[kLaneChangeLeft] = lane_change_feasible(scene, +1);
  s.bits[kLaneChangeRight] = lane_change_feasible(scene, -1);
  s.bits[kSpeedOverLimit] = scene.ego.speed > reward::governing_speed_limit(scene) + 0.5;
  const auto junction = line_ahead(
    scene,
    [](const MapElement & m) { return m.kind == MapKind::TrafficLight || m.kind == MapKind::StopLine; },
    20.0);
  s.bits[kIntersectionWithin20m] = junction.has_value();
  return s;
}

/// Earliest time within `horizon` at which the ego, holding speed and
/// heading, comes within `margin` of a constant-velocity agent.
inline std::optional<double> predicted_conflict(
  const Scene & scene, const AgentState & agent, double horizon = 6.0, double step = 0.25,
  double margin = 1.0)
{
  const auto l = localize(scene, agent);
  for (double t = step; t <= horizon + 1e-9; t += step) {
    const OrientedBox ego{{scene.ego.speed * t, 0.0}, 0.0, kEgoHalfLength, kEgoHalfWidth};
    const OrientedBox other{
      l.position + l.velocity * t, l.heading, agent.footprint.half_length, agent.footprint.half_width};
    if (box_distance(ego, other) < margin) {
      return t;
    }
  }
  return std::nullopt;
}

}  // namespace duoplan::slowsys

#endif  // DUOPLAN__SLOWSYS__GROUND_TRUTH_HPP_
