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

#ifndef DUOPLAN__SLOWSYS__ORACLE_HPP_
#define DUOPLAN__SLOWSYS__ORACLE_HPP_

#include "duoplan/core/types.hpp"
#include "duoplan/slowsys/ground_truth.hpp"
#include "duoplan/slowsys/prompts.hpp"

#include <string>
#include <utility>
#include <vector>

namespace duoplan::slowsys
{

struct OraclePlan
{
  std::vector<MetaAction> plan;
  std::string analysis;
};

inline Lateral command_lateral(NavigationCommand c)
{
  switch (c) {
    case NavigationCommand::TurnLeft: return Lateral::TurnLeft;
    case NavigationCommand::TurnRight: return Lateral::TurnRight;
    case NavigationCommand::KeepForward: break;
  }
  return Lateral::KeepLane;
}

/// Rule table standing in for the reasoning model. Rules are checked in
/// order and the first match produces the plan.
inline OraclePlan oracle_plan(const Scene & scene)
{
  const double v = scene.ego.speed;
  const double sd = stopping_distance(v);
  const Lateral cruise_lateral = command_lateral(scene.command);

  // 1. red light, yellow we can still stop for, or an uncleared stop line
  {
    const auto light = light_ahead(scene);
    const auto stop = stop_line_ahead(scene);
    std::optional<LineAhead> line;
    std::string what;
    if (light && (light->element->light == LightState::Red ||
                  (light->element->light == LightState::Yellow && light->distance > sd))) {
      line = light;
      what = std::string(to_string(light->element->light)) + " light";
    }
    if (stop && (!line || stop->distance < line->distance)) {
      line = stop;
      what = "stop line";
    }
    if (line) {
      const std::string facts = what + " " + fixed1(line->distance) + " m ahead, stopping distance " + fixed1(sd) + " m";
      if (line->distance <= sd) {
        return {{{Longitudinal::Stop, Lateral::KeepLane}}, facts + "; stop now"};
      }
      if (line->distance <= 2.0 * sd + 10.0) {
        return {
          {{Longitudinal::Decelerate, Lateral::KeepLane}, {Longitudinal::Stop, Lateral::KeepLane}},
          facts + "; decelerate to stop before the line"};
      }
    }
  }

  // 2. pedestrian or cyclist in the corridor ahead
  if (const auto vru = vulnerable_in_path(scene)) {
    const double gap = vru->position.x - kEgoHalfLength;
    const std::string facts = std::string(to_string(vru->agent->kind)) + " in path " + fixed1(gap) + " m ahead";
    if (gap <= sd) {
      return {{{Longitudinal::Stop, Lateral::KeepLane}}, facts + "; stop"};
    }
    return {{{Longitudinal::Decelerate, Lateral::KeepLane}}, facts + "; yield"};
  }

  // 3. lead vehicle: overtake when the lane is blocked, otherwise keep distance
  if (const auto lead = lead_vehicle(scene, 40.0)) {
    const double gap = lead->gap();
    const double lead_speed = lead->velocity.x;
    const bool blocked = gap < 30.0 && (lead_speed < v - 2.0 || lead_speed < 1.0);
    if (blocked) {
      for (int side : {+1, -1}) {
        if (lane_change_feasible(scene, side)) {
          const Lateral change = side > 0 ? Lateral::ChangeLeft : Lateral::ChangeRight;
          return {
            {{Longitudinal::KeepSpeed, change}, {Longitudinal::KeepSpeed, Lateral::KeepLane}},
            "slow lead " + fixed1(gap) + " m ahead; adjacent lane free; overtake " +
              std::string(to_string(change))};
        }
      }
    }
    const double closing = v - lead_speed;
    const double needed = closing > 0.0 ? closing * closing / (2.0 * kOracleDecel) + 5.0 : 0.0;
    if (gap < 10.0 || (closing > 0.0 && gap < needed + 0.8 * v)) {
      return {
        {{Longitudinal::Decelerate, Lateral::KeepLane}},
        "lead " + fixed1(gap) + " m ahead closing at " + fixed1(closing) + " m/s; keep distance"};
    }
  }

  // 4. predicted conflict with crossing or merging traffic beyond the plan horizon
  for (const auto & a : scene.agents) {
    const auto l = localize(scene, a);
    if (l.position.x < -kEgoHalfLength) {
      continue;
    }
    if (const auto t = predicted_conflict(scene, a)) {
      const double travel = v * *t;
      const Longitudinal lon = travel <= sd ? Longitudinal::Stop : Longitudinal::Decelerate;
      return {
        {{lon, Lateral::KeepLane}},
        std::string(to_string(a.kind)) + " " + a.id + " conflicts in " + fixed1(*t) + " s; yield"};
    }
  }

  if (scene.ego.speed > reward::governing_speed_limit(scene) + 0.5) {
    return {{{Longitudinal::Decelerate, cruise_lateral}}, "above the speed limit; slow down"};
  }
  return {{{Longitudinal::KeepSpeed, cruise_lateral}}, "no hazards; follow the route"};
}

/// Deterministic stand-in for the reasoning model's output.
inline SlowFeedback oracle_feedback(
  const Scene & scene, const Trajectory & candidate, const VisualPrompt & visual, const BevPrompt & bev)
{
  (void)candidate;
  SlowFeedback f;
  f.planning_state = evaluate_planning_state(scene);
  auto plan = oracle_plan(scene);
  f.plan = std::move(plan.plan);
  std::string desc;
  for (std::size_t i = 0; i < bev.lines.size(); ++i) {
    if (i) {
      desc += "; ";
    }
    desc += bev.lines[i];
  }
  f.scene_description = desc;
  std::size_t in_frame = 0;
  for (const auto & p : visual.points) {
    in_frame += p.in_frame ? 1 : 0;
  }
  f.analysis = plan.analysis + " (" + std::to_string(in_frame) + "/" + std::to_string(visual.points.size()) +
               " plan points visible)";
  f.source = FeedbackSource::Oracle;
  f.latency = 0.0;
  return f;
}

}  // namespace duoplan::slowsys

#endif  // DUOPLAN__SLOWSYS__ORACLE_HPP_
