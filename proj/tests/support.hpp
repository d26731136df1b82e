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

#ifndef DUOPLAN_TESTS_SUPPORT_HPP_
#define DUOPLAN_TESTS_SUPPORT_HPP_

#include "duoplan/core/types.hpp"

#include <cmath>
#include <random>
#include <string>
#include <vector>

namespace duoplan::testing
{

/// Straight eastbound route from the origin.
inline std::vector<Vec2> straight_route(double length = 200.0)
{
  return {{0.0, 0.0}, {length, 0.0}};
}

inline Scene open_road(double speed = 10.0)
{
  Scene s;
  s.id = "open_road";
  s.ego.speed = speed;
  s.route = straight_route();
  s.map.push_back({"lane", MapKind::LaneCenterline, {{-50.0, 0.0}, {300.0, 0.0}}});
  return s;
}

inline AgentState car(std::string id, double x, double y, double speed, double heading = 0.0)
{
  AgentState a;
  a.id = std::move(id);
  a.kind = AgentKind::Car;
  a.pose = {x, y, heading};
  a.speed = speed;
  a.footprint = {2.25, 1.0};
  return a;
}

inline AgentState pedestrian(std::string id, double x, double y, double speed, double heading)
{
  AgentState a;
  a.id = std::move(id);
  a.kind = AgentKind::Pedestrian;
  a.pose = {x, y, heading};
  a.speed = speed;
  a.footprint = {0.3, 0.3};
  return a;
}

/// Relative error with an absolute floor, for gradient checks.
inline double rel_err(double a, double b)
{
  return std::abs(a - b) / std::max({1e-6, std::abs(a), std::abs(b)});
}

/// Central finite difference of f over every coordinate of x.
template <typename F>
std::vector<double> numeric_grad(F f, std::vector<double> x, double h = 1e-5)
{
  std::vector<double> g(x.size());
  for (std::size_t i = 0; i < x.size(); ++i) {
    const double keep = x[i];
    x[i] = keep + h;
    const double up = f(x);
    x[i] = keep - h;
    const double down = f(x);
    x[i] = keep;
    g[i] = (up - down) / (2.0 * h);
  }
  return g;
}

inline double max_rel_err(const std::vector<double> & a, const std::vector<double> & b)
{
  double worst = 0.0;
  for (std::size_t i = 0; i < a.size(); ++i) {
    worst = std::max(worst, rel_err(a[i], b[i]));
  }
  return worst;
}

}  // namespace duoplan::testing

#endif  // DUOPLAN_TESTS_SUPPORT_HPP_
