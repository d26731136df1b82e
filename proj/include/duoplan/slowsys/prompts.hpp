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

#ifndef DUOPLAN__SLOWSYS__PROMPTS_HPP_
#define DUOPLAN__SLOWSYS__PROMPTS_HPP_

#include "duoplan/core/types.hpp"
#include "duoplan/reward/reward.hpp"
#include "duoplan/slowsys/ground_truth.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <numbers>
#include <string>
#include <vector>

namespace duoplan::slowsys
{

/// Front camera at the ego origin, `mount_height` above the ground, pitched
/// down by `pitch` radians.
struct CameraModel
{
  double fx{1000.0};
  double fy{1000.0};
  double cx{800.0};
  double cy{450.0};
  int width{1600};
  int height{900};
  double mount_height{1.5};
  double pitch{0.0};

  void validate() const
  {
    require(fx > 0.0 && fy > 0.0, ErrorCode::InvalidArgument, "focal lengths must be > 0");
    require(cx >= 0.0 && cx < width, ErrorCode::InvalidArgument, "cx outside image");
    require(cy >= 0.0 && cy < height, ErrorCode::InvalidArgument, "cy outside image");
  }
};

struct PixelPoint
{
  double u{0.0};
  double v{0.0};
  bool in_frame{false};
};

struct VisualPrompt
{
  std::vector<PixelPoint> points;
  int trajectory_id{-1};
};

inline constexpr double kMinDepth = 0.1;

/// Projects a vehicle-frame point (x forward, y left, z up from the ground).
inline PixelPoint project_point(const CameraModel & cam, double x, double y, double z)
{
  const double zc = z - cam.mount_height;
  const double c = std::cos(cam.pitch);
  const double s = std::sin(cam.pitch);
  const double depth = x * c - zc * s;
  const double up = x * s + zc * c;
  PixelPoint p;
  if (depth <= kMinDepth) {
    p.u = cam.cx;
    p.v = cam.cy;
    p.in_frame = false;
    return p;
  }
  p.u = cam.cx + cam.fx * (-y / depth);
  p.v = cam.cy + cam.fy * (-up / depth);
  p.in_frame = p.u >= 0.0 && p.u < cam.width && p.v >= 0.0 && p.v < cam.height;
  return p;
}

inline VisualPrompt project_waypoints(const Trajectory & traj, const CameraModel & cam, int trajectory_id = -1)
{
  require(traj.frame() == Frame::Ego, ErrorCode::InvalidArgument, "visual prompt needs an ego-frame trajectory");
  cam.validate();
  VisualPrompt out;
  out.trajectory_id = trajectory_id;
  out.points.reserve(traj.size());
  for (const auto & w : traj.waypoints()) {
    out.points.push_back(project_point(cam, w.x, w.y, 0.0));
  }
  return out;
}

/// SVG overlay of the projected waypoints for offline inspection.
inline std::string visual_prompt_svg(const VisualPrompt & prompt, const CameraModel & cam)
{
  std::string svg = "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"" + std::to_string(cam.width) +
                    "\" height=\"" + std::to_string(cam.height) + "\">\n";
  char buf[160];
  for (const auto & p : prompt.points) {
    if (!p.in_frame) {
      continue;
    }
    std::snprintf(buf, sizeof(buf), "  <circle cx=\"%.1f\" cy=\"%.1f\" r=\"6\" fill=\"lime\"/>\n", p.u, p.v);
    svg += buf;
  }
  svg += "</svg>\n";
  return svg;
}

inline std::string fixed1(double v)
{
  char buf[64];
  std::snprintf(buf, sizeof(buf), "%.1f", v);
  std::string s(buf);
  if (s == "-0.0") {
    s = "0.0";
  }
  return s;
}

struct BevPrompt
{
  std::vector<std::string> lines;

  std::string text() const
  {
    std::string out;
    for (std::size_t i = 0; i < lines.size(); ++i) {
      if (i) {
        out += '\n';
      }
      out += lines[i];
    }
    return out;
  }
};

inline constexpr double kBevRange = 50.0;

/// Top-down description of the scene relative to the ego. Agent lines are
/// sorted by range (ties by id); numbers use one decimal.
inline BevPrompt build_bev_prompt(const Scene & scene)
{
  BevPrompt p;
  p.lines.push_back(
    "ego speed " + fixed1(scene.ego.speed) + " command " + std::string(to_string(scene.command)) +
    " limit " + fixed1(reward::governing_speed_limit(scene)));
  for (const auto & m : scene.map) {
    if (m.kind == MapKind::TrafficLight) {
      const auto hit = line_ahead(scene, [&m](const MapElement & e) { return &e == &m; }, kBevRange);
      if (hit) {
        p.lines.push_back("light " + std::string(to_string(m.light)) + " range " + fixed1(hit->distance));
      }
    } else if (m.kind == MapKind::StopLine) {
      const auto hit = line_ahead(scene, [&m](const MapElement & e) { return &e == &m; }, kBevRange);
      if (hit) {
        p.lines.push_back("stop_line range " + fixed1(hit->distance));
      }
    } else if (m.kind == MapKind::Crosswalk) {
      const Vec2 local = parent_to_local(scene.ego.pose(), m.geometry.front());
      if (local.x > 0.0 && local.norm() <= kBevRange) {
        p.lines.push_back("crosswalk range " + fixed1(local.norm()));
      }
    }
  }
  std::vector<LocalAgent> near;
  for (const auto & a : scene.agents) {
    const auto l = localize(scene, a);
    if (l.range <= kBevRange) {
      near.push_back(l);
    }
  }
  std::sort(near.begin(), near.end(), [](const LocalAgent & a, const LocalAgent & b) {
    if (a.range != b.range) {
      return a.range < b.range;
    }
    return a.agent->id < b.agent->id;
  });
  for (const auto & l : near) {
    const double bearing = std::atan2(l.position.y, l.position.x) * 180.0 / std::numbers::pi;
    const Vec2 rel_v = l.velocity - Vec2{scene.ego.speed, 0.0};
    const double range_rate = l.range > 1e-9 ? dot(l.position, rel_v) / l.range : 0.0;
    p.lines.push_back(
      std::string(to_string(l.agent->kind)) + " range " + fixed1(l.range) + " bearing " + fixed1(bearing) +
      " relspeed " + fixed1(range_rate));
  }
  return p;
}

}  // namespace duoplan::slowsys

#endif  // DUOPLAN__SLOWSYS__PROMPTS_HPP_
