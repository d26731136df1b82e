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

#ifndef DUOPLAN__FUSION__GUIDANCE_HPP_
#define DUOPLAN__FUSION__GUIDANCE_HPP_

#include "duoplan/fastplan/sampler.hpp"
#include "duoplan/reward/reward.hpp"

#include <cmath>
#include <optional>
#include <span>
#include <vector>

namespace duoplan::fusion
{

inline constexpr double kAccelMatch = 0.5;     // m/s^2
inline constexpr double kStopSpeed = 0.5;      // m/s
inline constexpr double kLaneOffset = 1.5;     // m, terminal lateral offset of a lane change
inline constexpr double kTurnCurvature = 0.03; // 1/m

struct CandidateSummary
{
  double mean_accel{0.0};
  double terminal_speed{0.0};
  double terminal_y{0.0};
  double mean_curvature{0.0};
};

inline CandidateSummary summarize(const fastplan::Candidate & c, double v0)
{
  CandidateSummary s;
  s.terminal_speed = c.speeds.empty() ? v0 : c.speeds.back();
  s.mean_accel = (s.terminal_speed - v0) / c.trajectory.horizon();
  s.terminal_y = c.trajectory.back().y;
  s.mean_curvature = c.curvature;
  return s;
}

/// 1 when the candidate realizes both halves of the meta-action, else 0.
inline double compat(const CandidateSummary & s, const MetaAction & a)
{
  bool lon = false;
  switch (a.longitudinal) {
    case Longitudinal::Accelerate: lon = s.mean_accel >= kAccelMatch; break;
    case Longitudinal::Decelerate: lon = s.mean_accel <= -kAccelMatch; break;
    case Longitudinal::KeepSpeed: lon = std::abs(s.mean_accel) < kAccelMatch; break;
    case Longitudinal::Stop: lon = s.mean_accel <= -kAccelMatch || s.terminal_speed <= kStopSpeed; break;
  }
  bool lat = false;
  const bool straightish = std::abs(s.mean_curvature) < kTurnCurvature;
  switch (a.lateral) {
    case Lateral::KeepLane: lat = std::abs(s.terminal_y) <= kLaneOffset; break;
    case Lateral::ChangeLeft: lat = straightish && s.terminal_y > kLaneOffset; break;
    case Lateral::ChangeRight: lat = straightish && s.terminal_y < -kLaneOffset; break;
    case Lateral::TurnLeft: lat = s.mean_curvature >= kTurnCurvature; break;
    case Lateral::TurnRight: lat = s.mean_curvature <= -kTurnCurvature; break;
  }
  return lon && lat ? 1.0 : 0.0;
}

struct GuidedSelection
{
  std::size_t index{0};
  int candidate_id{0};
  double adjusted{0.0};
  std::vector<double> bonus;  // per candidate
  bool floor_applied{false};
};

/// Re-ranks candidates by total + strength * compat(candidate, plan[0]).
/// With strength > 0, candidates with zero safety are excluded whenever a
/// safe one exists. `guidance` is the attention readout; it is recorded but
/// does not enter the score.
inline GuidedSelection apply_guidance(
  const fastplan::CandidateSet & set, std::span<const reward::RewardBreakdown> breakdowns,
  const SlowFeedback & feedback, std::span<const double> guidance, double strength, double v0)
{
  (void)guidance;
  require(!feedback.plan.empty(), ErrorCode::InvalidArgument, "feedback plan is empty");
  GuidedSelection sel;
  sel.index = reward::argmax_index(set, breakdowns);
  if (strength == 0.0) {
    sel.candidate_id = set.candidates[sel.index].id;
    sel.adjusted = breakdowns[sel.index].total;
    sel.bonus.assign(set.size(), 0.0);
    return sel;
  }
  bool any_safe = false;
  for (const auto & b : breakdowns) {
    any_safe = any_safe || b.c_safety > 0.0;
  }
  sel.bonus.resize(set.size());
  const auto better = [&](std::size_t i, std::size_t j) {
    const double si = breakdowns[i].total + sel.bonus[i];
    const double sj = breakdowns[j].total + sel.bonus[j];
    return si > sj || (si == sj && set.candidates[i].id < set.candidates[j].id);
  };
  std::optional<std::size_t> best;
  std::optional<std::size_t> unconstrained;
  for (std::size_t i = 0; i < set.size(); ++i) {
    sel.bonus[i] = strength * compat(summarize(set.candidates[i], v0), feedback.plan.front());
    if (!unconstrained || better(i, *unconstrained)) {
      unconstrained = i;
    }
    if (any_safe && breakdowns[i].c_safety <= 0.0) {
      continue;
    }
    if (!best || better(i, *best)) {
      best = i;
    }
  }
  sel.index = *best;
  sel.floor_applied = *best != *unconstrained;
  sel.candidate_id = set.candidates[sel.index].id;
  sel.adjusted = breakdowns[sel.index].total + sel.bonus[sel.index];
  return sel;
}

}  // namespace duoplan::fusion

#endif  // DUOPLAN__FUSION__GUIDANCE_HPP_
