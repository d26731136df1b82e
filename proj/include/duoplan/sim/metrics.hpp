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

#ifndef DUOPLAN__SIM__METRICS_HPP_
#define DUOPLAN__SIM__METRICS_HPP_

#include "duoplan/core/types.hpp"

#include <array>
#include <cmath>
#include <span>
#include <vector>

namespace duoplan::sim
{

inline constexpr std::array<double, 3> kOpenLoopHorizons = {1.0, 2.0, 3.0};

/// Decimal round-half-up. The scaled value is nudged by a relative 1e-9 so
/// that binary representations of exact halves (0.125 -> 0.13) round up.
inline double round_half_up(double value, int decimals = 2)
{
  const double scale = std::pow(10.0, decimals);
  const double scaled = value * scale;
  const double nudge = 1e-9 * std::max(1.0, std::abs(scaled));
  return std::floor(scaled + 0.5 + nudge) / scale;
}

/// Mean of per-horizon values, rounded half-up.
inline double horizon_average(std::span<const double> values, int decimals = 2)
{
  require(!values.empty(), ErrorCode::InvalidArgument, "no horizon values to average");
  double sum = 0.0;
  for (double v : values) {
    sum += v;
  }
  return round_half_up(sum / static_cast<double>(values.size()), decimals);
}

struct OpenLoopMetrics
{
  std::array<double, 3> l2_point{};      // displacement at exactly t
  std::array<double, 3> l2_frame_avg{};  // mean displacement over frames up to t
  std::array<bool, 3> collision{};       // overlap at or before t
  double l2_point_avg{0.0};
  double l2_frame_avg_avg{0.0};
};

namespace detail
{
inline double heading_at(const Trajectory & t, std::size_t i)
{
  const Vec2 prev = i == 0 ? Vec2{0.0, 0.0} : t[i - 1].position();
  const Vec2 d = t[i].position() - prev;
  if (d.norm() > 1e-6) {
    return std::atan2(d.y, d.x);
  }
  return i == 0 ? 0.0 : heading_at(t, i - 1);
}
}  // namespace detail

/// Compares a plan with the expert at the 1, 2 and 3 s horizons. Both
/// trajectories and the agents share one frame; when that frame is the ego
/// frame the plan origin is (0, 0) heading 0.
inline OpenLoopMetrics open_loop_metrics(
  const Trajectory & predicted, const Trajectory & expert, std::span<const AgentState> agents)
{
  const auto steps_for = [](const Trajectory & t) {
    return static_cast<std::size_t>(std::llround(kOpenLoopHorizons.back() / t.dt()));
  };
  require(std::abs(predicted.dt() - 0.5) < 1e-9 && std::abs(expert.dt() - 0.5) < 1e-9, ErrorCode::HorizonTooShort,
          "open-loop metrics need dt = 0.5 s");
  require(predicted.size() >= steps_for(predicted) && expert.size() >= steps_for(expert), ErrorCode::HorizonTooShort,
          "open-loop metrics need >= 6 waypoints (3 s)");
  require(predicted.frame() == expert.frame(), ErrorCode::InvalidArgument, "trajectories must share a frame");
  OpenLoopMetrics m;
  std::vector<double> disp;
  std::vector<bool> hit;
  const std::size_t n = steps_for(predicted);
  for (std::size_t i = 0; i < n; ++i) {
    disp.push_back((predicted[i].position() - expert[i].position()).norm());
    const OrientedBox ego{predicted[i].position(), detail::heading_at(predicted, i), kEgoHalfLength, kEgoHalfWidth};
    bool any = false;
    for (const auto & a : agents) {
      const Pose2 p = a.predicted(predicted[i].t_offset);
      any = any || boxes_overlap(ego, {p.position(), p.heading, a.footprint.half_length, a.footprint.half_width});
    }
    hit.push_back(any);
  }
  for (std::size_t h = 0; h < kOpenLoopHorizons.size(); ++h) {
    const auto last = static_cast<std::size_t>(std::llround(kOpenLoopHorizons[h] / predicted.dt()));
    m.l2_point[h] = disp[last - 1];
    double sum = 0.0;
    bool collided = false;
    for (std::size_t i = 0; i < last; ++i) {
      sum += disp[i];
      collided = collided || hit[i];
    }
    m.l2_frame_avg[h] = sum / static_cast<double>(last);
    m.collision[h] = collided;
  }
  m.l2_point_avg = horizon_average(m.l2_point);
  m.l2_frame_avg_avg = horizon_average(m.l2_frame_avg);
  return m;
}

struct PenaltyFactors
{
  double collision{0.5};
  double red_light{0.7};
  double stop_line{0.8};
};

struct InfractionCounts
{
  int collisions{0};
  int red_lights{0};
  int stop_lines{0};
};

struct ClosedLoopMetrics
{
  double route_completion{0.0};
  double infraction_score{1.0};
  double driving_score{0.0};
};

inline double infraction_score(const InfractionCounts & c, const PenaltyFactors & f = {})
{
  return std::pow(f.collision, c.collisions) * std::pow(f.red_light, c.red_lights) * std::pow(f.stop_line, c.stop_lines);
}

/// DS = RC x infraction score.
inline ClosedLoopMetrics closed_loop_metrics(double route_completion, double infraction)
{
  require(route_completion >= 0.0 && route_completion <= 1.0, ErrorCode::InvalidArgument, "RC must be in [0, 1]");
  require(infraction >= 0.0 && infraction <= 1.0, ErrorCode::InvalidArgument, "infraction score must be in [0, 1]");
  return {route_completion, infraction, route_completion * infraction};
}

inline ClosedLoopMetrics closed_loop_metrics(
  double route_completion, const InfractionCounts & c, const PenaltyFactors & f = {})
{
  return closed_loop_metrics(route_completion, infraction_score(c, f));
}

}  // namespace duoplan::sim

#endif  // DUOPLAN__SIM__METRICS_HPP_
