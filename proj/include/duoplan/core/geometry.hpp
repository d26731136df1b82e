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

#ifndef DUOPLAN__CORE__GEOMETRY_HPP_
#define DUOPLAN__CORE__GEOMETRY_HPP_

#include <algorithm>
#include <array>
#include <cmath>
#include <limits>
#include <numbers>
#include <optional>
#include <span>
#include <vector>

namespace duoplan
{

struct Vec2
{
  double x{0.0};
  double y{0.0};

  constexpr Vec2 operator+(const Vec2 & o) const { return {x + o.x, y + o.y}; }
  constexpr Vec2 operator-(const Vec2 & o) const { return {x - o.x, y - o.y}; }
  constexpr Vec2 operator*(double s) const { return {x * s, y * s}; }
  constexpr bool operator==(const Vec2 &) const = default;

  double norm() const { return std::hypot(x, y); }
};

constexpr double dot(const Vec2 & a, const Vec2 & b) { return a.x * b.x + a.y * b.y; }
constexpr double cross(const Vec2 & a, const Vec2 & b) { return a.x * b.y - a.y * b.x; }

inline Vec2 rotate(const Vec2 & v, double angle)
{
  const double c = std::cos(angle);
  const double s = std::sin(angle);
  return {c * v.x - s * v.y, s * v.x + c * v.y};
}

/// Wraps an angle into (-pi, pi].
inline double wrap_angle(double angle)
{
  constexpr double two_pi = 2.0 * std::numbers::pi;
  double a = std::fmod(angle, two_pi);
  if (a <= -std::numbers::pi) {
    a += two_pi;
  } else if (a > std::numbers::pi) {
    a -= two_pi;
  }
  return a;
}

/// sin(x)/x, exact 1 at x = 0.
inline double sinc(double x)
{
  if (std::abs(x) < 1e-4) {
    const double x2 = x * x;
    return 1.0 - x2 / 6.0 + x2 * x2 / 120.0;
  }
  return std::sin(x) / x;
}

struct Pose2
{
  double x{0.0};
  double y{0.0};
  double heading{0.0};

  Vec2 position() const { return {x, y}; }
};

/// Maps a point expressed in the local frame of `pose` into the parent frame.
inline Vec2 local_to_parent(const Pose2 & pose, const Vec2 & local)
{
  const Vec2 r = rotate(local, pose.heading);
  return {pose.x + r.x, pose.y + r.y};
}

inline Vec2 parent_to_local(const Pose2 & pose, const Vec2 & parent)
{
  return rotate(Vec2{parent.x - pose.x, parent.y - pose.y}, -pose.heading);
}

/// Oriented rectangle described by center, heading and half extents.
struct OrientedBox
{
  Vec2 center;
  double heading{0.0};
  double half_length{0.0};
  double half_width{0.0};

  std::array<Vec2, 4> corners() const
  {
    const Vec2 ax = rotate(Vec2{half_length, 0.0}, heading);
    const Vec2 ay = rotate(Vec2{0.0, half_width}, heading);
    return {center + ax + ay, center - ax + ay, center - ax - ay, center + ax - ay};
  }
};

namespace detail
{

inline void project_onto(const std::array<Vec2, 4> & pts, const Vec2 & axis, double & lo, double & hi)
{
  lo = std::numeric_limits<double>::infinity();
  hi = -std::numeric_limits<double>::infinity();
  for (const auto & p : pts) {
    const double d = dot(p, axis);
    lo = std::min(lo, d);
    hi = std::max(hi, d);
  }
}

inline double point_segment_distance(const Vec2 & p, const Vec2 & a, const Vec2 & b)
{
  const Vec2 ab = b - a;
  const double len2 = dot(ab, ab);
  double t = len2 > 0.0 ? dot(p - a, ab) / len2 : 0.0;
  t = std::clamp(t, 0.0, 1.0);
  return (p - (a + ab * t)).norm();
}

}  // namespace detail

/// Separating-axis overlap test. Boxes that merely touch do not overlap.
inline bool boxes_overlap(const OrientedBox & a, const OrientedBox & b)
{
  const auto ca = a.corners();
  const auto cb = b.corners();
  const std::array<Vec2, 4> axes = {
    rotate(Vec2{1.0, 0.0}, a.heading), rotate(Vec2{0.0, 1.0}, a.heading),
    rotate(Vec2{1.0, 0.0}, b.heading), rotate(Vec2{0.0, 1.0}, b.heading)};
  for (const auto & axis : axes) {
    double alo, ahi, blo, bhi;
    detail::project_onto(ca, axis, alo, ahi);
    detail::project_onto(cb, axis, blo, bhi);
    if (ahi <= blo || bhi <= alo) {
      return false;
    }
  }
  return true;
}

/// Euclidean distance between two boxes; 0 when they overlap.
inline double box_distance(const OrientedBox & a, const OrientedBox & b)
{
  if (boxes_overlap(a, b)) {
    return 0.0;
  }
  const auto ca = a.corners();
  const auto cb = b.corners();
  double best = std::numeric_limits<double>::infinity();
  for (int i = 0; i < 4; ++i) {
    for (int j = 0; j < 4; ++j) {
      best = std::min(best, detail::point_segment_distance(ca[i], cb[j], cb[(j + 1) % 4]));
      best = std::min(best, detail::point_segment_distance(cb[i], ca[j], ca[(j + 1) % 4]));
    }
  }
  return best;
}

/// True when segment p0-p1 properly intersects or touches segment q0-q1.
inline bool segments_intersect(const Vec2 & p0, const Vec2 & p1, const Vec2 & q0, const Vec2 & q1)
{
  const Vec2 r = p1 - p0;
  const Vec2 s = q1 - q0;
  const double denom = cross(r, s);
  const Vec2 qp = q0 - p0;
  if (std::abs(denom) < 1e-15) {
    return false;
  }
  const double t = cross(qp, s) / denom;
  const double u = cross(qp, r) / denom;
  return t >= 0.0 && t <= 1.0 && u >= 0.0 && u <= 1.0;
}

struct PolylineProjection
{
  double arc_length{0.0};  // along the polyline to the foot point
  double lateral{0.0};     // signed, left positive
  double distance{0.0};
  Vec2 foot;
  double tangent_heading{0.0};
};

inline double polyline_length(std::span<const Vec2> line)
{
  double len = 0.0;
  for (std::size_t i = 1; i < line.size(); ++i) {
    len += (line[i] - line[i - 1]).norm();
  }
  return len;
}

/// Projects a point onto the closest segment of a polyline. A single-point
/// polyline projects onto that point.
inline PolylineProjection project_onto_polyline(std::span<const Vec2> line, const Vec2 & p)
{
  PolylineProjection best;
  best.distance = std::numeric_limits<double>::infinity();
  if (line.empty()) {
    return best;
  }
  if (line.size() == 1) {
    best.foot = line[0];
    best.distance = (p - line[0]).norm();
    return best;
  }
  double s0 = 0.0;
  for (std::size_t i = 1; i < line.size(); ++i) {
    const Vec2 a = line[i - 1];
    const Vec2 ab = line[i] - a;
    const double len = ab.norm();
    if (len <= 0.0) {
      continue;
    }
    double t = dot(p - a, ab) / (len * len);
    const bool last = i + 1 == line.size();
    const bool first = i == 1;
    // extrapolate beyond the ends so progress keeps growing past the goal
    if (!last) {
      t = std::min(t, 1.0);
    }
    if (!first) {
      t = std::max(t, 0.0);
    }
    const Vec2 foot = a + ab * t;
    const double d = (p - foot).norm();
    if (d < best.distance - 1e-12) {
      best.distance = d;
      best.foot = foot;
      best.arc_length = s0 + t * len;
      best.lateral = cross(ab, p - a) / len;
      best.tangent_heading = std::atan2(ab.y, ab.x);
    }
    s0 += len;
  }
  return best;
}

/// Arc length along `route` of its first intersection with `line`, if any.
inline std::optional<double> polyline_crossing_arc(std::span<const Vec2> route, std::span<const Vec2> line)
{
  double s0 = 0.0;
  for (std::size_t i = 1; i < route.size(); ++i) {
    const Vec2 p0 = route[i - 1];
    const Vec2 r = route[i] - p0;
    std::optional<double> best;
    for (std::size_t k = 1; k < line.size(); ++k) {
      const Vec2 s = line[k] - line[k - 1];
      const double denom = cross(r, s);
      if (std::abs(denom) < 1e-15) {
        continue;
      }
      const Vec2 qp = line[k - 1] - p0;
      const double t = cross(qp, s) / denom;
      const double u = cross(qp, r) / denom;
      if (t >= 0.0 && t <= 1.0 && u >= 0.0 && u <= 1.0 && (!best || t < *best)) {
        best = t;
      }
    }
    if (best) {
      return s0 + *best * r.norm();
    }
    s0 += r.norm();
  }
  return std::nullopt;
}

}  // namespace duoplan

#endif  // DUOPLAN__CORE__GEOMETRY_HPP_
