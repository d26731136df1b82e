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

#ifndef DUOPLAN__REWARD__REWARD_HPP_
#define DUOPLAN__REWARD__REWARD_HPP_

#include "duoplan/core/types.hpp"
#include "duoplan/fastplan/sampler.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <utility>
#include <vector>

namespace duoplan::reward
{

/// Factor weights, normalized to sum 1 on construction.
class RewardWeights
{
public:
  RewardWeights() : RewardWeights(0.4, 0.2, 0.2, 0.2) {}

  RewardWeights(double safety, double comfort, double efficiency, double economic)
  {
    require(
      safety >= 0.0 && comfort >= 0.0 && efficiency >= 0.0 && economic >= 0.0,
      ErrorCode::InvalidArgument, "reward weights must be >= 0");
    const double sum = safety + comfort + efficiency + economic;
    require(sum > 0.0 && std::isfinite(sum), ErrorCode::InvalidArgument, "reward weights must sum > 0");
    safety_ = safety / sum;
    comfort_ = comfort / sum;
    efficiency_ = efficiency / sum;
    economic_ = economic / sum;
  }

  double safety() const { return safety_; }
  double comfort() const { return comfort_; }
  double efficiency() const { return efficiency_; }
  double economic() const { return economic_; }

private:
  double safety_{};
  double comfort_{};
  double efficiency_{};
  double economic_{};
};

struct RewardParams
{
  double safe_distance{5.0};
  double max_accel{3.0};
  double max_jerk{5.0};
  double max_lateral_accel{3.0};
  int clearance_substeps{5};
};

struct RewardBreakdown
{
  double c_safety{0.0};
  double c_comfort{0.0};
  double c_efficiency{0.0};
  double c_economic{0.0};
  double total{0.0};
  double min_clearance{std::numeric_limits<double>::infinity()};
  bool collision{false};
  bool violation{false};
};

inline double combine(const RewardWeights & w, double safety, double comfort, double efficiency, double economic)
{
  return w.safety() * safety + w.comfort() * comfort + w.efficiency() * efficiency +
         w.economic() * economic;
}

/// Speed limit in force: the farthest sign already passed or within 20 m ahead.
inline double governing_speed_limit(const Scene & scene)
{
  double limit = kDefaultSpeedLimit;
  double best_x = -std::numeric_limits<double>::infinity();
  const Pose2 pose = scene.ego.pose();
  for (const auto & m : scene.map) {
    if (m.kind != MapKind::SpeedLimitSign) {
      continue;
    }
    const Vec2 local = parent_to_local(pose, m.geometry.front());
    if (local.x <= 20.0 && local.x > best_x) {
      best_x = local.x;
      limit = m.speed_limit;
    }
  }
  return limit;
}

/// Stop lines the ego must not cross: red lights and stop signs.
inline bool is_blocking_line(const MapElement & m)
{
  return (m.kind == MapKind::TrafficLight && m.light == LightState::Red) ||
         m.kind == MapKind::StopLine;
}

namespace detail
{

struct EgoSample
{
  double t;
  Vec2 pos;
  double heading;
};

/// Densified ego poses along the plan, with the plan origin at t = 0.
inline std::vector<EgoSample> densify(const Trajectory & traj, int substeps)
{
  std::vector<EgoSample> out;
  Vec2 prev{0.0, 0.0};
  double heading = 0.0;
  for (std::size_t i = 0; i < traj.size(); ++i) {
    const Vec2 cur = traj[i].position();
    const Vec2 d = cur - prev;
    if (d.norm() > 1e-6) {
      heading = std::atan2(d.y, d.x);
    }
    const double t0 = traj[i].t_offset - traj.dt();
    for (int s = 1; s <= substeps; ++s) {
      const double f = static_cast<double>(s) / substeps;
      out.push_back({t0 + f * traj.dt(), prev + d * f, heading});
    }
    prev = cur;
  }
  return out;
}

}  // namespace detail

/// Scores an ego-frame trajectory with the four weighted factors. Agents are
/// forecast with constant velocity over the plan horizon.
inline RewardBreakdown score(
  const Trajectory & traj, const Scene & scene, const RewardWeights & w,
  const RewardParams & params = {})
{
  require(traj.frame() == Frame::Ego, ErrorCode::InvalidArgument, "score expects an ego-frame trajectory");
  require(traj.size() >= 2, ErrorCode::DegenerateTrajectory, "need at least 2 waypoints");
  RewardBreakdown out;
  const Pose2 ego_pose = scene.ego.pose();
  const double dt = traj.dt();
  const std::size_t m = traj.size();

  // safety
  const auto samples = detail::densify(traj, std::max(1, params.clearance_substeps));
  std::vector<AgentState> agents_local;
  agents_local.reserve(scene.agents.size());
  for (const auto & a : scene.agents) {
    AgentState local = a;
    const Vec2 p = parent_to_local(ego_pose, a.pose.position());
    local.pose = {p.x, p.y, wrap_angle(a.pose.heading - ego_pose.heading)};
    agents_local.push_back(local);
  }
  for (const auto & s : samples) {
    const OrientedBox ego_box{s.pos, s.heading, kEgoHalfLength, kEgoHalfWidth};
    for (const auto & a : agents_local) {
      const Pose2 p = a.predicted(s.t);
      const OrientedBox box{p.position(), p.heading, a.footprint.half_length, a.footprint.half_width};
      const double d = box_distance(ego_box, box);
      out.min_clearance = std::min(out.min_clearance, d);
      if (d <= 0.0) {
        out.collision = true;
      }
    }
  }
  // stop-line crossing by the front bumper, either geometrically or by
  // route progress past the point where the route meets the line
  {
    std::vector<std::optional<double>> route_arc(scene.map.size());
    for (std::size_t j = 0; j < scene.map.size(); ++j) {
      if (is_blocking_line(scene.map[j]) && scene.route.size() >= 2) {
        route_arc[j] = polyline_crossing_arc(scene.route, scene.map[j].geometry);
      }
    }
    Vec2 prev_front{kEgoHalfLength, 0.0};
    double prev_s = project_onto_polyline(scene.route, local_to_parent(ego_pose, prev_front)).arc_length;
    for (const auto & s : samples) {
      const Vec2 front = s.pos + rotate(Vec2{kEgoHalfLength, 0.0}, s.heading);
      const double front_s = project_onto_polyline(scene.route, local_to_parent(ego_pose, front)).arc_length;
      for (std::size_t j = 0; j < scene.map.size(); ++j) {
        const auto & mel = scene.map[j];
        if (!is_blocking_line(mel) || mel.geometry.size() < 2) {
          continue;
        }
        if (route_arc[j] && prev_s < *route_arc[j] && front_s >= *route_arc[j]) {
          out.violation = true;
        }
        for (std::size_t k = 1; k < mel.geometry.size(); ++k) {
          const Vec2 a = parent_to_local(ego_pose, mel.geometry[k - 1]);
          const Vec2 b = parent_to_local(ego_pose, mel.geometry[k]);
          if ((front - prev_front).norm() > 0.0 && segments_intersect(prev_front, front, a, b)) {
            out.violation = true;
          }
        }
      }
      prev_front = front;
      prev_s = front_s;
    }
  }
  if (out.collision || out.violation) {
    out.c_safety = 0.0;
  } else {
    out.c_safety = std::clamp(out.min_clearance / params.safe_distance, 0.0, 1.0);
  }

  // kinematics from finite differences; first interval is measured against the
  // current ego speed at its midpoint
  std::vector<double> speed(m + 1);
  std::vector<double> heading(m + 1);
  std::vector<double> accel(m);
  speed[0] = scene.ego.speed;
  heading[0] = 0.0;
  Vec2 prev{0.0, 0.0};
  for (std::size_t i = 1; i <= m; ++i) {
    const Vec2 d = traj[i - 1].position() - prev;
    speed[i] = d.norm() / dt;
    heading[i] = d.norm() > 1e-6 ? std::atan2(d.y, d.x) : heading[i - 1];
    prev = traj[i - 1].position();
  }
  double max_ratio = 0.0;
  double sum_abs_accel = 0.0;
  for (std::size_t i = 1; i <= m; ++i) {
    const double h = i == 1 ? 0.5 * dt : dt;
    accel[i - 1] = (speed[i] - speed[i - 1]) / h;
    const double lat = speed[i] * wrap_angle(heading[i] - heading[i - 1]) / h;
    sum_abs_accel += std::abs(accel[i - 1]);
    max_ratio = std::max(max_ratio, std::abs(accel[i - 1]) / params.max_accel);
    max_ratio = std::max(max_ratio, std::abs(lat) / params.max_lateral_accel);
    if (i >= 2) {
      const double jerk = (accel[i - 1] - accel[i - 2]) / dt;
      max_ratio = std::max(max_ratio, std::abs(jerk) / params.max_jerk);
    }
  }
  out.c_comfort = 1.0 - std::clamp(max_ratio, 0.0, 1.0);
  out.c_economic = 1.0 - std::clamp(sum_abs_accel / static_cast<double>(m) / params.max_accel, 0.0, 1.0);

  // efficiency: progress along the route over the horizon
  const double s0 = project_onto_polyline(scene.route, ego_pose.position()).arc_length;
  const Vec2 terminal = local_to_parent(ego_pose, traj.back().position());
  const double s1 = project_onto_polyline(scene.route, terminal).arc_length;
  const double reference = governing_speed_limit(scene) * traj.horizon();
  out.c_efficiency = scene.route.size() < 2 ? 0.0 : std::clamp((s1 - s0) / reference, 0.0, 1.0);

  out.total = combine(w, out.c_safety, out.c_comfort, out.c_efficiency, out.c_economic);
  return out;
}

inline std::vector<RewardBreakdown> score_all(
  const fastplan::CandidateSet & set, const Scene & scene, const RewardWeights & w,
  const RewardParams & params = {})
{
  std::vector<RewardBreakdown> out;
  out.reserve(set.size());
  for (const auto & c : set.candidates) {
    out.push_back(score(c.trajectory, scene, w, params));
  }
  return out;
}

/// Argmax of total over precomputed breakdowns; ties go to the lowest id.
inline std::size_t argmax_index(const fastplan::CandidateSet & set, std::span<const RewardBreakdown> b)
{
  require(!set.empty(), ErrorCode::EmptySet, "candidate set is empty");
  require(b.size() == set.size(), ErrorCode::ShapeMismatch, "breakdown count mismatch");
  std::size_t best = 0;
  for (std::size_t i = 1; i < set.size(); ++i) {
    if (
      b[i].total > b[best].total ||
      (b[i].total == b[best].total && set.candidates[i].id < set.candidates[best].id)) {
      best = i;
    }
  }
  return best;
}

inline std::pair<int, RewardBreakdown> select_best(
  const fastplan::CandidateSet & set, const Scene & scene, const RewardWeights & w,
  const RewardParams & params = {})
{
  require(!set.empty(), ErrorCode::EmptySet, "candidate set is empty");
  const auto all = score_all(set, scene, w, params);
  const std::size_t i = argmax_index(set, all);
  return {set.candidates[i].id, all[i]};
}

}  // namespace duoplan::reward

#endif  // DUOPLAN__REWARD__REWARD_HPP_
