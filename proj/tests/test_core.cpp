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

#include "duoplan/core/serialization.hpp"
#include "support.hpp"

#include <gtest/gtest.h>

#include <numbers>
#include <random>

namespace duoplan
{
namespace
{

TEST(Trajectory, TimestampsAreMultiplesOfDt)
{
  const std::vector<Vec2> pts{{1, 0}, {2, 0}, {3, 0}, {4, 0}, {5, 0}, {6, 0}, {7, 0}};
  for (double dt : {0.1, 0.5, 0.3}) {
    Trajectory t(pts, dt, Frame::Ego);
    for (std::size_t i = 0; i < t.size(); ++i) {
      EXPECT_EQ(t[i].t_offset, static_cast<double>(i + 1) * dt);
    }
    EXPECT_DOUBLE_EQ(t.horizon(), 7 * dt);
  }
}

TEST(Trajectory, RejectsBadInput)
{
  const std::vector<Vec2> pts{{1, 0}};
  EXPECT_THROW(Trajectory(pts, 0.0, Frame::Ego), Error);
  EXPECT_THROW(Trajectory(std::vector<Vec2>{}, 0.5, Frame::Ego), Error);
  const std::vector<Vec2> bad{{std::nan(""), 0}};
  EXPECT_THROW(Trajectory(bad, 0.5, Frame::Ego), Error);
}

TEST(Transform, IdentityPose)
{
  const std::vector<Vec2> pts{{1, 2}, {3, -4}};
  const Trajectory t(pts, 0.5, Frame::Ego);
  const auto w = transform_trajectory(t, EgoState{}, Frame::World);
  EXPECT_EQ(w.frame(), Frame::World);
  EXPECT_EQ(w.points(), t.points());
  EXPECT_EQ(w.dt(), t.dt());
}

TEST(Transform, Translation)
{
  const std::vector<Vec2> pts{{1, 0}};
  EgoState ego;
  ego.x = 10.0;
  const auto w = transform_trajectory(Trajectory(pts, 0.5, Frame::Ego), ego, Frame::World);
  EXPECT_NEAR(w[0].x, 11.0, 1e-12);
  EXPECT_NEAR(w[0].y, 0.0, 1e-12);
}

TEST(Transform, QuarterTurn)
{
  const std::vector<Vec2> pts{{1, 0}};
  EgoState ego;
  ego.x = 3.0;
  ego.y = 4.0;
  ego.heading = std::numbers::pi / 2;
  const auto w = transform_trajectory(Trajectory(pts, 0.5, Frame::Ego), ego, Frame::World);
  EXPECT_NEAR(w[0].x - ego.x, 0.0, 1e-12);
  EXPECT_NEAR(w[0].y - ego.y, 1.0, 1e-12);
}

TEST(Transform, SameFrameIsRejected)
{
  const std::vector<Vec2> pts{{1, 0}};
  EXPECT_THROW(transform_trajectory(Trajectory(pts, 0.5, Frame::Ego), EgoState{}, Frame::Ego), Error);
}

TEST(Transform, RoundTripRandomPoses)
{
  std::mt19937_64 rng(11);
  std::uniform_real_distribution<double> pos(-500.0, 500.0);
  std::uniform_real_distribution<double> ang(-std::numbers::pi, std::numbers::pi);
  double worst = 0.0;
  for (int trial = 0; trial < 1000; ++trial) {
    EgoState ego;
    ego.x = pos(rng);
    ego.y = pos(rng);
    ego.heading = ang(rng);
    std::vector<Vec2> pts;
    for (int i = 0; i < 6; ++i) {
      pts.push_back({pos(rng) * 0.1, pos(rng) * 0.1});
    }
    const Trajectory t(pts, 0.5, Frame::Ego);
    const auto back = transform_trajectory(transform_trajectory(t, ego, Frame::World), ego, Frame::Ego);
    ASSERT_EQ(back.size(), t.size());
    for (std::size_t i = 0; i < t.size(); ++i) {
      worst = std::max(worst, (back[i].position() - t[i].position()).norm());
    }
  }
  EXPECT_LT(worst, 1e-9);
}

TEST(Geometry, WrapAngleRange)
{
  EXPECT_DOUBLE_EQ(wrap_angle(std::numbers::pi), std::numbers::pi);
  EXPECT_DOUBLE_EQ(wrap_angle(-std::numbers::pi), std::numbers::pi);
  EXPECT_NEAR(wrap_angle(3 * std::numbers::pi), std::numbers::pi, 1e-12);
  EXPECT_NEAR(wrap_angle(0.25), 0.25, 0.0);
}

TEST(Geometry, SincSmallArgument)
{
  EXPECT_EQ(sinc(0.0), 1.0);
  EXPECT_NEAR(sinc(1e-5), std::sin(1e-5) / 1e-5, 1e-15);
  EXPECT_NEAR(sinc(0.5), std::sin(0.5) / 0.5, 1e-15);
}

TEST(Geometry, PolylineProjection)
{
  const std::vector<Vec2> line{{0, 0}, {10, 0}, {10, 10}};
  EXPECT_DOUBLE_EQ(polyline_length(line), 20.0);
  const auto p = project_onto_polyline(line, {12, 5});
  EXPECT_NEAR(p.arc_length, 15.0, 1e-12);
}

TEST(Geometry, SegmentsIntersect)
{
  EXPECT_TRUE(segments_intersect({0, 0}, {2, 2}, {0, 2}, {2, 0}));
  EXPECT_FALSE(segments_intersect({0, 0}, {1, 0}, {0, 1}, {1, 1}));
}

TEST(PlanningState, BitstringRoundTrip)
{
  std::mt19937 rng(3);
  for (int trial = 0; trial < 100; ++trial) {
    auto s = PlanningState::zeros(8);
    for (std::size_t i = 0; i < 8; ++i) {
      s.bits[i] = (rng() & 1u) != 0;
    }
    EXPECT_EQ(PlanningState::from_bitstring(s.to_bitstring()), s);
  }
  EXPECT_THROW(PlanningState::from_bitstring("01x"), Error);
}

TEST(PlanningState, DefaultLabels)
{
  const auto s = PlanningState::zeros();
  ASSERT_EQ(s.size(), 8u);
  EXPECT_EQ(s.labels.front(), "lead-vehicle-within-10m");
  EXPECT_EQ(s.labels.back(), "intersection-within-20m");
}

TEST(MetaAction, IndexRoundTrip)
{
  for (int i = 0; i < kNumMetaActions; ++i) {
    EXPECT_EQ(MetaAction::from_index(i).index(), i);
  }
  EXPECT_THROW(MetaAction::from_index(kNumMetaActions), Error);
  EXPECT_EQ((MetaAction{Longitudinal::Decelerate, Lateral::KeepLane}).index(), 5);
}

TEST(MetaAction, JsonRoundTrip)
{
  for (int i = 0; i < kNumMetaActions; ++i) {
    const auto a = MetaAction::from_index(i);
    EXPECT_EQ(meta_action_from_json(to_json(a)), a);
  }
  EXPECT_THROW(meta_action_from_json(Json{{"long", "fly"}, {"lat", "keep_lane"}}), Error);
  EXPECT_THROW(meta_action_from_json(Json{{"long", 1}, {"lat", "keep_lane"}}), Error);
}

TEST(Scene, JsonRoundTrip)
{
  Scene s = testing::open_road(9.5);
  s.timestamp = 1.5;
  s.command = NavigationCommand::TurnLeft;
  s.agents.push_back(testing::car("lead", 20.0, 0.1, 8.0, 0.05));
  s.agents.push_back(testing::pedestrian("ped", 30.0, 5.0, 1.2, -1.5));
  MapElement light{"tl", MapKind::TrafficLight, {{40, -2}, {40, 2}}};
  light.light = LightState::Red;
  s.map.push_back(light);
  MapElement sign{"sl", MapKind::SpeedLimitSign, {{10, 3}}};
  sign.speed_limit = 8.3;
  s.map.push_back(sign);
  const auto back = scene_from_json(to_json(s));
  EXPECT_EQ(to_json(back), to_json(s));
  ASSERT_EQ(back.agents.size(), 2u);
  EXPECT_EQ(back.agents[1].kind, AgentKind::Pedestrian);
  EXPECT_EQ(back.map[1].light, LightState::Red);
  EXPECT_EQ(back.command, NavigationCommand::TurnLeft);
}

TEST(Scene, ValidateRejectsViolations)
{
  Scene s = testing::open_road();
  EXPECT_NO_THROW(validate(s));
  Scene no_route = s;
  no_route.route.clear();
  EXPECT_THROW(validate(no_route), Error);
  Scene neg = s;
  neg.ego.speed = -1.0;
  EXPECT_THROW(validate(neg), Error);
  Scene bad_agent = s;
  bad_agent.agents.push_back(testing::car("a", 5, 0, 0));
  bad_agent.agents.back().footprint.half_width = 0.0;
  EXPECT_THROW(validate(bad_agent), Error);
  Scene bad_sign = s;
  bad_sign.map.push_back({"s", MapKind::SpeedLimitSign, {{1, 1}}});
  EXPECT_THROW(validate(bad_sign), Error);
}

TEST(Trajectory, JsonRoundTrip)
{
  const std::vector<Vec2> pts{{1.25, -0.5}, {2.5, -1.0}};
  const Trajectory t(pts, 0.5, Frame::Ego);
  EXPECT_EQ(trajectory_from_json(to_json(t)), t);
}

TEST(Error, CodeAndMessage)
{
  try {
    require(false, ErrorCode::EmptySet, "nothing here");
    FAIL();
  } catch (const Error & e) {
    EXPECT_EQ(e.code(), ErrorCode::EmptySet);
    EXPECT_NE(std::string(e.what()).find("nothing here"), std::string::npos);
  }
}

}  // namespace
}  // namespace duoplan
