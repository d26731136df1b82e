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

#ifndef DUOPLAN__FASTPLAN__SAMPLER_HPP_
#define DUOPLAN__FASTPLAN__SAMPLER_HPP_

#include "duoplan/core/types.hpp"

#include <algorithm>
#include <array>
#include <cmath>
#include <span>
#include <tuple>
#include <vector>

namespace duoplan::fastplan
{

inline constexpr double kMaxCurvature = 0.2;  // 5 m minimum turn radius

struct SamplerConfig
{
  int n_k{5};
  std::vector<double> speed_deltas{-4.0, -2.0, 0.0, 2.0};
  /// Indexed by NavigationCommand. The first entry is the command's nominal curvature.
  std::array<std::vector<double>, kNumCommands> curvature_sets{{
    {0.0, 0.01, -0.01},
    {0.05, 0.1},
    {-0.05, -0.1},
  }};
  int horizon{6};
  double dt{0.5};
  double comfort_accel{2.0};
  /// Sample every command (N_C x N_K) or only the scene's command (N_K).
  bool all_commands{true};

  const std::vector<double> & curvatures(NavigationCommand c) const
  {
    return curvature_sets[static_cast<std::size_t>(c)];
  }

  void validate() const
  {
    require(n_k >= 1, ErrorCode::EmptyConfig, "n_k must be >= 1");
    require(!speed_deltas.empty(), ErrorCode::EmptyConfig, "speed_deltas is empty");
    require(horizon >= 1, ErrorCode::InvalidArgument, "horizon must be >= 1");
    require(dt > 0.0, ErrorCode::InvalidArgument, "dt must be > 0");
    require(comfort_accel > 0.0, ErrorCode::InvalidArgument, "comfort_accel must be > 0");
    for (const auto & set : curvature_sets) {
      for (double k : set) {
        require(
          std::abs(k) <= kMaxCurvature, ErrorCode::InvalidArgument,
          "curvature magnitude exceeds 0.2 1/m");
      }
    }
  }
};

struct Candidate
{
  Trajectory trajectory;  // ego frame
  NavigationCommand command{NavigationCommand::KeepForward};
  int id{0};
  double curvature{0.0};
  double speed_delta{0.0};
  /// Speed at the end of each waypoint interval; used by the tracker.
  std::vector<double> speeds;
};

struct CandidateSet
{
  std::vector<Candidate> candidates;

  std::size_t size() const { return candidates.size(); }
  bool empty() const { return candidates.empty(); }

  const Candidate * find(int id) const
  {
    for (const auto & c : candidates) {
      if (c.id == id) {
        return &c;
      }
    }
    return nullptr;
  }
};

/// Integrates constant-curvature arcs, one per entry of `speed_profile`
/// (the mean speed over that interval). Each arc is integrated exactly, so
/// kappa = 0 is a straight line with no special case.
inline Trajectory rollout_arc(std::span<const double> speed_profile, double kappa, double dt)
{
  require(dt > 0.0, ErrorCode::InvalidArgument, "rollout dt must be > 0");
  require(std::abs(kappa) <= kMaxCurvature, ErrorCode::InvalidArgument, "|kappa| must be <= 0.2");
  require(!speed_profile.empty(), ErrorCode::InvalidArgument, "speed profile is empty");
  std::vector<Vec2> pts;
  pts.reserve(speed_profile.size());
  double x = 0.0;
  double y = 0.0;
  double heading = 0.0;
  for (double v : speed_profile) {
    require(v >= 0.0, ErrorCode::InvalidArgument, "speeds must be >= 0");
    const double s = v * dt;
    const double dtheta = s * kappa;
    const double chord = s * sinc(0.5 * dtheta);
    const double dir = heading + 0.5 * dtheta;
    x += chord * std::cos(dir);
    y += chord * std::sin(dir);
    heading += dtheta;
    pts.push_back({x, y});
  }
  return Trajectory(pts, dt, Frame::Ego);
}

struct SpeedProfile
{
  std::vector<double> mean;  // per interval, for integration
  std::vector<double> end;   // at each waypoint time
};

/// Trapezoidal profile: ramp from v0 toward `target` at `accel`, then hold.
inline SpeedProfile trapezoid_profile(double v0, double target, double accel, double dt, int steps)
{
  SpeedProfile p;
  p.mean.reserve(steps);
  p.end.reserve(steps);
  double v = v0;
  for (int i = 0; i < steps; ++i) {
    const double gap = target - v;
    const double reach = accel * dt;
    if (std::abs(gap) >= reach) {
      const double v1 = v + std::copysign(reach, gap);
      p.mean.push_back(0.5 * (v + v1));
      v = v1;
    } else {
      // ramp for tr seconds, then cruise at target for the rest of the interval
      const double tr = std::abs(gap) / accel;
      const double dist = 0.5 * (v + target) * tr + target * (dt - tr);
      p.mean.push_back(dist / dt);
      v = target;
    }
    p.end.push_back(v);
  }
  return p;
}

namespace detail
{

/// Lattice order per command: nominal curvature with every speed delta, then
/// off-nominal curvatures by increasing |delta|.
inline std::vector<std::pair<double, double>> lattice(
  const std::vector<double> & curvatures, const std::vector<double> & deltas)
{
  std::vector<std::pair<double, double>> out;
  if (curvatures.empty()) {
    return out;
  }
  for (double d : deltas) {
    out.emplace_back(curvatures.front(), d);
  }
  std::vector<std::tuple<double, std::size_t, std::size_t>> rest;
  for (std::size_t ki = 1; ki < curvatures.size(); ++ki) {
    for (std::size_t di = 0; di < deltas.size(); ++di) {
      rest.emplace_back(std::abs(deltas[di]), ki, di);
    }
  }
  std::sort(rest.begin(), rest.end());
  for (const auto & [mag, ki, di] : rest) {
    out.emplace_back(curvatures[ki], deltas[di]);
  }
  return out;
}

}  // namespace detail

/// Deterministic kinematic lattice standing in for a learned planning head.
/// Candidate ids are command_index * n_k + j and therefore stable across
/// scenes and sampling modes.
inline CandidateSet sample_candidates(const Scene & scene, const SamplerConfig & cfg)
{
  cfg.validate();
  CandidateSet set;
  const double v0 = std::max(0.0, scene.ego.speed);
  for (NavigationCommand cmd : kAllCommands) {
    if (!cfg.all_commands && cmd != scene.command) {
      continue;
    }
    const auto & curv = cfg.curvatures(cmd);
    require(!curv.empty(), ErrorCode::EmptyConfig, "curvature set is empty for the command");
    const auto grid = detail::lattice(curv, cfg.speed_deltas);
    require(
      static_cast<std::size_t>(cfg.n_k) <= grid.size(), ErrorCode::EmptyConfig,
      "n_k exceeds the curvature x speed-delta lattice");
    for (int j = 0; j < cfg.n_k; ++j) {
      const auto [kappa, delta] = grid[static_cast<std::size_t>(j)];
      const double target = std::max(0.0, v0 + delta);
      auto profile = trapezoid_profile(v0, target, cfg.comfort_accel, cfg.dt, cfg.horizon);
      Candidate c;
      c.trajectory = rollout_arc(profile.mean, kappa, cfg.dt);
      c.command = cmd;
      c.id = static_cast<int>(cmd) * cfg.n_k + j;
      c.curvature = kappa;
      c.speed_delta = delta;
      c.speeds = std::move(profile.end);
      set.candidates.push_back(std::move(c));
    }
  }
  return set;
}

}  // namespace duoplan::fastplan

#endif  // DUOPLAN__FASTPLAN__SAMPLER_HPP_
