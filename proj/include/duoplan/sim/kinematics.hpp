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

#ifndef DUOPLAN__SIM__KINEMATICS_HPP_
#define DUOPLAN__SIM__KINEMATICS_HPP_

#include "duoplan/core/types.hpp"

#include <algorithm>
#include <cmath>
#include <span>
#include <vector>

namespace duoplan::sim
{

inline constexpr double kMaxBrake = 6.0;       // m/s^2
inline constexpr double kMaxThrottle = 3.0;    // m/s^2
inline constexpr double kMaxSteerCurvature = 0.2;
inline constexpr double kLookahead = 5.0;      // m

/// Semi-implicit unicycle update: speed first, then heading from the new
/// speed, then position along the new heading.
inline EgoState step_kinematics(const EgoState & s, double accel, double kappa, double dt)
{
  require(dt > 0.0, ErrorCode::InvalidArgument, "dt must be > 0");
  EgoState out = s;
  out.speed = std::max(0.0, s.speed + accel * dt);
  out.accel = (out.speed - s.speed) / dt;
  out.heading = s.heading + out.speed * kappa * dt;
  out.x = s.x + out.speed * dt * std::cos(out.heading);
  out.y = s.y + out.speed * dt * std::sin(out.heading);
  return out;
}

/// Curvature steering the ego onto the point `lookahead` metres along the
/// world-frame path (measured from the ego's projection onto it).
inline double pure_pursuit_curvature(const EgoState & ego, std::span<const Vec2> path, double lookahead = kLookahead)
{
  if (path.size() < 2) {
    return 0.0;
  }
  const auto proj = project_onto_polyline(path, {ego.x, ego.y});
  const double target_s = proj.arc_length + lookahead;
  Vec2 target = path.back();
  bool found = false;
  double acc = 0.0;
  for (std::size_t i = 1; i < path.size(); ++i) {
    const double seg = (path[i] - path[i - 1]).norm();
    if (acc + seg >= target_s && seg > 0.0) {
      target = path[i - 1] + (path[i] - path[i - 1]) * ((target_s - acc) / seg);
      found = true;
      break;
    }
    acc += seg;
  }
  if (!found) {
    // extend past the end along the last segment
    const Vec2 d = path.back() - path[path.size() - 2];
    const double n = d.norm();
    if (n > 1e-9) {
      target = path.back() + d * ((target_s - acc) / n);
    }
  }
  const Vec2 local = parent_to_local(ego.pose(), target);
  const double l2 = dot(local, local);
  if (l2 < 1e-9) {
    return 0.0;
  }
  return std::clamp(2.0 * local.y / l2, -kMaxSteerCurvature, kMaxSteerCurvature);
}

/// Constant-turn-rate agent update shared by scripted agents.
inline AgentState step_agent(const AgentState & a, double accel, double kappa, double dt)
{
  AgentState out = a;
  if (a.kind == AgentKind::Static) {
    out.speed = 0.0;
    return out;
  }
  out.speed = std::max(0.0, a.speed + accel * dt);
  out.pose.heading = a.pose.heading + out.speed * kappa * dt;
  out.pose.x = a.pose.x + out.speed * dt * std::cos(out.pose.heading);
  out.pose.y = a.pose.y + out.speed * dt * std::sin(out.pose.heading);
  return out;
}

}  // namespace duoplan::sim

#endif  // DUOPLAN__SIM__KINEMATICS_HPP_
