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

#ifndef DUOPLAN__FUSION__FEATURES_HPP_
#define DUOPLAN__FUSION__FEATURES_HPP_

#include "duoplan/fastplan/sampler.hpp"
#include "duoplan/reward/reward.hpp"
#include "duoplan/slowsys/ground_truth.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <vector>

namespace duoplan::fusion
{

inline constexpr std::size_t kTokenDim = 16;
inline constexpr std::size_t kFeatureDim = 16;

namespace detail
{
inline double squash(double v, double scale) { return std::clamp(v / scale, -1.0, 1.0); }
}  // namespace detail

/// Ego query for cross-attention: ego kinematics plus a summary of the
/// fast system's best candidate. Every entry lies in [-1, 1].
inline std::vector<double> ego_token(
  const Scene & scene, const fastplan::Candidate & best, const reward::RewardBreakdown & b)
{
  using detail::squash;
  const double limit = reward::governing_speed_limit(scene);
  const auto & end = best.trajectory.back();
  std::vector<double> t(kTokenDim, 0.0);
  t[0] = squash(scene.ego.speed, limit);
  t[1] = squash(scene.ego.accel, 3.0);
  t[2] = squash(best.curvature, fastplan::kMaxCurvature);
  t[3] = squash(best.speed_delta, 4.0);
  t[4] = b.c_efficiency;
  t[5] = squash(std::isfinite(b.min_clearance) ? b.min_clearance : 20.0, 20.0);
  t[6] = b.c_safety;
  t[7] = b.c_comfort;
  t[8] = b.c_economic;
  t[9] = b.total;
  t[10 + static_cast<std::size_t>(best.command)] = 1.0;
  t[13] = squash(end.y, 10.0);
  t[14] = squash(end.x, std::max(1.0, limit * best.trajectory.horizon()));
  t[15] = 1.0;
  return t;
}

/// Planning-relevant environment features fed to the bottleneck encoder:
/// ego kinematics, nearest-agent geometry, light state and route offset.
inline std::vector<double> feature_vector(const Scene & scene)
{
  using detail::squash;
  std::vector<double> z(kFeatureDim, 0.0);
  const double limit = reward::governing_speed_limit(scene);
  z[0] = squash(scene.ego.speed, 20.0);
  z[1] = squash(scene.ego.accel, 3.0);
  z[2] = squash(limit, 20.0);

  const slowsys::LocalAgent * nearest = nullptr;
  std::vector<slowsys::LocalAgent> local;
  local.reserve(scene.agents.size());
  for (const auto & a : scene.agents) {
    local.push_back(slowsys::localize(scene, a));
  }
  for (const auto & l : local) {
    if (!nearest || l.range < nearest->range) {
      nearest = &l;
    }
  }
  if (nearest) {
    z[3] = squash(nearest->position.x, 50.0);
    z[4] = squash(nearest->position.y, 10.0);
    z[5] = squash(nearest->velocity.x - scene.ego.speed, 15.0);
    z[6] = squash(nearest->range, 50.0);
    z[7] = slowsys::is_vulnerable(nearest->agent->kind) ? 1.0 : 0.0;
  } else {
    z[3] = 1.0;
    z[6] = 1.0;
  }
  const auto lead = slowsys::lead_vehicle(scene, 50.0);
  z[8] = lead ? squash(lead->gap(), 50.0) : 1.0;

  if (const auto light = slowsys::light_ahead(scene)) {
    z[9 + static_cast<std::size_t>(light->element->light)] = 1.0;  // red, yellow, green
    z[12] = squash(light->distance, 50.0);
  } else {
    z[12] = 1.0;
  }
  const auto stop = slowsys::stop_line_ahead(scene);
  z[13] = stop ? squash(stop->distance, 30.0) : 1.0;

  if (scene.route.size() >= 2) {
    const auto proj = project_onto_polyline(scene.route, {scene.ego.x, scene.ego.y});
    z[14] = squash(proj.lateral, kLaneWidth);
    z[15] = squash(wrap_angle(scene.ego.heading - proj.tangent_heading), std::numbers::pi);
  }
  return z;
}

}  // namespace duoplan::fusion

#endif  // DUOPLAN__FUSION__FEATURES_HPP_
