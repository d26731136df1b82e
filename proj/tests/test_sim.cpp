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

#include "duoplan/sim/report.hpp"
#include "stub_server.hpp"
#include "support.hpp"

#include <gtest/gtest.h>

#include <filesystem>
#include <numbers>
#include <random>

namespace duoplan::sim
{
namespace
{

const std::filesystem::path kScenarios = DUOPLAN_SCENARIO_DIR;

std::vector<Scenario> load_suite(const std::string & suite)
{
  std::vector<Scenario> out;
  for (const auto & p : list_scenarios(kScenarios / suite)) {
    out.push_back(load_scenario(p));
  }
  return out;
}

Scenario empty_road()
{
  Scenario sc;
  sc.name = "empty_road";
  sc.suite = "unit";
  sc.initial = testing::open_road(10.0);
  sc.termination.max_time = 30.0;
  return sc;
}

SimConfig config(RunMode mode)
{
  SimConfig c;
  c.mode = mode;
  c.seed = 42;
  return c;
}

bool point_in_box(const OrientedBox & b, Vec2 p)
{
  const Vec2 d = p - b.center;
  const double c = std::cos(b.heading), s = std::sin(b.heading);
  const double lx = c * d.x + s * d.y;
  const double ly = -s * d.x + c * d.y;
  return std::abs(lx) <= b.half_length && std::abs(ly) <= b.half_width;
}

/// Dense sampling of each box's interior against the other.
bool raster_overlap(const OrientedBox & a, const OrientedBox & b, int n = 120)
{
  for (const auto * pair : {&a, &b}) {
    const OrientedBox & src = *pair;
    const OrientedBox & dst = pair == &a ? b : a;
    const double c = std::cos(src.heading), s = std::sin(src.heading);
    for (int i = 0; i <= n; ++i) {
      for (int j = 0; j <= n; ++j) {
        const double lx = src.half_length * (2.0 * i / n - 1.0);
        const double ly = src.half_width * (2.0 * j / n - 1.0);
        const Vec2 p{src.center.x + c * lx - s * ly, src.center.y + s * lx + c * ly};
        if (point_in_box(dst, p)) {
          return true;
        }
      }
    }
  }
  return false;
}

TEST(Kinematics, UniformMotion)
{
  EgoState s;
  s.speed = 10.0;
  const auto n = step_kinematics(s, 0.0, 0.0, 0.1);
  EXPECT_NEAR(n.x, 1.0, 1e-12);
  EXPECT_EQ(n.y, 0.0);
  EXPECT_EQ(n.speed, 10.0);
}

TEST(Kinematics, SpeedClampsAtZero)
{
  EgoState s;
  const auto n = step_kinematics(s, -1.0, 0.1, 0.1);
  EXPECT_EQ(n.speed, 0.0);
  EXPECT_EQ(n.x, 0.0);
  EXPECT_EQ(n.heading, 0.0);
  EXPECT_THROW(step_kinematics(s, 0.0, 0.0, 0.0), Error);
}

TEST(Kinematics, MatchesIndependentIntegrator)
{
  std::mt19937_64 rng(19);
  std::uniform_real_distribution<double> acc(-6.0, 3.0), kap(-0.2, 0.2);
  EgoState s;
  s.speed = 8.0;
  double x = 0.0, y = 0.0, h = 0.0, v = 8.0;
  for (int i = 0; i < 100; ++i) {
    const double a = acc(rng), k = kap(rng);
    s = step_kinematics(s, a, k, 0.1);
    v = v + a * 0.1 < 0.0 ? 0.0 : v + a * 0.1;
    h += v * k * 0.1;
    x += v * 0.1 * std::cos(h);
    y += v * 0.1 * std::sin(h);
  }
  EXPECT_NEAR(s.x, x, 1e-9);
  EXPECT_NEAR(s.y, y, 1e-9);
  EXPECT_NEAR(s.heading, h, 1e-9);
  EXPECT_NEAR(s.speed, v, 1e-9);
}

TEST(Kinematics, PurePursuitSteersTowardPath)
{
  EgoState e;
  const std::vector<Vec2> left{{0.0, 2.0}, {100.0, 2.0}};
  EXPECT_GT(pure_pursuit_curvature(e, left), 0.0);
  const std::vector<Vec2> ahead{{0.0, 0.0}, {100.0, 0.0}};
  EXPECT_EQ(pure_pursuit_curvature(e, ahead), 0.0);
}

TEST(Collision, FarApartAndIdentical)
{
  const OrientedBox a{{0.0, 0.0}, 0.0, 2.0, 1.0};
  auto far = testing::car("far", 10.0, 0.0, 0.0);
  far.footprint = {2.0, 1.0};
  const std::vector<AgentState> agents{far};
  EXPECT_FALSE(check_collision(a, agents));
  auto same = far;
  same.pose = {0.0, 0.0, 0.0};
  const std::vector<AgentState> overlapping{far, same};
  const auto hit = check_collision(a, overlapping);
  ASSERT_TRUE(hit);
  EXPECT_EQ(hit->agent_id, "far");
}

TEST(Collision, MatchesRasterOracle)
{
  std::mt19937_64 rng(33);
  std::uniform_real_distribution<double> ang(-std::numbers::pi, std::numbers::pi);
  std::uniform_real_distribution<double> dist(2.0, 4.5);
  int checked = 0;
  for (int trial = 0; trial < 400 && checked < 200; ++trial) {
    const OrientedBox a{{0.0, 0.0}, 0.0, 2.0, 1.0};
    const double dir = ang(rng);
    const double r = dist(rng);
    const OrientedBox b{{r * std::cos(dir), r * std::sin(dir)}, std::numbers::pi / 4 + 0.05 * ang(rng), 2.0, 1.0};
    // skip configurations where a 1 % scaling of the other box flips the sampled verdict
    const OrientedBox grown{b.center, b.heading, b.half_length * 1.01, b.half_width * 1.01};
    const OrientedBox shrunk{b.center, b.heading, b.half_length * 0.99, b.half_width * 0.99};
    const bool hi = raster_overlap(a, grown);
    const bool lo = raster_overlap(a, shrunk);
    if (hi != lo) {
      continue;
    }
    ++checked;
    EXPECT_EQ(boxes_overlap(a, b), lo) << trial;
  }
  EXPECT_EQ(checked, 200);
}

TEST(Collision, SymmetricVerdicts)
{
  std::mt19937_64 rng(34);
  std::uniform_real_distribution<double> pos(-6.0, 6.0), ang(-3.0, 3.0), half(0.3, 2.5);
  for (int trial = 0; trial < 500; ++trial) {
    const OrientedBox a{{pos(rng), pos(rng)}, ang(rng), half(rng), half(rng)};
    const OrientedBox b{{pos(rng), pos(rng)}, ang(rng), half(rng), half(rng)};
    EXPECT_EQ(boxes_overlap(a, b), boxes_overlap(b, a));
  }
}

TEST(ScenarioFile, BundledSuitesLoad)
{
  for (const std::string suite : {"routine", "adversarial"}) {
    const auto s = load_suite(suite);
    EXPECT_EQ(s.size(), 20u) << suite;
    for (const auto & sc : s) {
      EXPECT_EQ(sc.suite, suite);
      EXPECT_EQ(to_json(scenario_from_json(to_json(sc))), to_json(sc));
    }
  }
}

void expect_invalid(const Json & j)
{
  try {
    scenario_from_json(j);
    FAIL() << j.dump();
  } catch (const Error & e) {
    EXPECT_EQ(e.code(), ErrorCode::ScenarioInvalid);
  }
}

TEST(ScenarioFile, RejectsInvalidDocuments)
{
  const Json good = to_json(load_suite("adversarial").front());
  EXPECT_NO_THROW(scenario_from_json(good));
  auto version = good;
  version["schema_version"] = 7;
  expect_invalid(version);
  auto unknown = good;
  unknown["scripts"][0]["agent"] = "ghost";
  expect_invalid(unknown);
  auto no_name = good;
  no_name.erase("name");
  expect_invalid(no_name);
  auto short_route = good;
  short_route["scene"]["route"] = Json::array({Json::array({0.0, 0.0})});
  expect_invalid(short_route);
  auto bad_light = good;
  bad_light["lights"] = Json::array({{{"light", "nope"}, {"time", 1.0}, {"state", "green"}}});
  expect_invalid(bad_light);
  auto bad_time = good;
  bad_time["termination"]["max_time"] = -1.0;
  expect_invalid(bad_time);
  expect_invalid(Json::array());
  EXPECT_THROW(load_scenario(kScenarios / "missing.json"), Error);
}

TEST(OpenLoop, HorizonAveragingArithmetic)
{
  const std::array<double, 3> l2{0.19, 0.62, 1.25};
  EXPECT_EQ(horizon_average(l2), 0.69);
  const std::array<double, 3> col{0.02, 0.09, 0.44};
  EXPECT_EQ(horizon_average(col), 0.18);
  EXPECT_EQ(round_half_up(0.125), 0.13);
  EXPECT_EQ(round_half_up(0.135), 0.14);
  EXPECT_EQ(round_half_up(0.1349), 0.13);
}

Trajectory line(double speed, double lateral_drift = 0.0, double drift_growth = 0.0)
{
  std::vector<Vec2> pts;
  for (int i = 1; i <= 6; ++i) {
    pts.push_back({speed * 0.5 * i, lateral_drift + drift_growth * i});
  }
  return Trajectory(pts, 0.5, Frame::Ego);
}

TEST(OpenLoop, IdentityHasZeroDisplacement)
{
  const auto t = line(10.0);
  auto box = testing::car("box", 25.0, 0.0, 0.0);
  box.kind = AgentKind::Static;
  const std::vector<AgentState> agents{box};
  const auto m = open_loop_metrics(t, t, agents);
  for (std::size_t h = 0; h < 3; ++h) {
    EXPECT_EQ(m.l2_point[h], 0.0);
    EXPECT_EQ(m.l2_frame_avg[h], 0.0);
  }
  EXPECT_EQ(m.collision, (std::array<bool, 3>{false, false, true}));
}

TEST(OpenLoop, PointConventionDominatesOnMonotoneDrift)
{
  std::mt19937_64 rng(4);
  std::uniform_real_distribution<double> growth(0.0, 0.5);
  for (int trial = 0; trial < 100; ++trial) {
    const auto expert = line(10.0);
    const auto pred = line(10.0, 0.0, growth(rng));
    const auto m = open_loop_metrics(pred, expert, {});
    EXPECT_GE(m.l2_point[2], m.l2_frame_avg[2]);
  }
  const auto m = open_loop_metrics(line(10.0, 0.0, 0.1), line(10.0), {});
  EXPECT_NEAR(m.l2_point[0], 0.2, 1e-12);
  EXPECT_NEAR(m.l2_frame_avg[0], 0.15, 1e-12);
}

TEST(OpenLoop, HorizonTooShort)
{
  const std::vector<Vec2> five{{1, 0}, {2, 0}, {3, 0}, {4, 0}, {5, 0}};
  try {
    open_loop_metrics(Trajectory(five, 0.5, Frame::Ego), line(10.0), {});
    FAIL();
  } catch (const Error & e) {
    EXPECT_EQ(e.code(), ErrorCode::HorizonTooShort);
  }
  const std::vector<Vec2> six{{1, 0}, {2, 0}, {3, 0}, {4, 0}, {5, 0}, {6, 0}};
  EXPECT_THROW(open_loop_metrics(Trajectory(six, 0.4, Frame::Ego), line(10.0), {}), Error);
}

TEST(ClosedLoop, DrivingScoreIsProduct)
{
  std::mt19937_64 rng(6);
  std::uniform_real_distribution<double> rc(0.0, 1.0), factor(0.05, 1.0);
  std::uniform_int_distribution<int> count(0, 4);
  for (int trial = 0; trial < 1000; ++trial) {
    const InfractionCounts c{count(rng), count(rng), count(rng)};
    const PenaltyFactors f{factor(rng), factor(rng), factor(rng)};
    double is = 1.0;
    for (int i = 0; i < c.collisions; ++i) is *= f.collision;
    for (int i = 0; i < c.red_lights; ++i) is *= f.red_light;
    for (int i = 0; i < c.stop_lines; ++i) is *= f.stop_line;
    const double r = rc(rng);
    const auto m = closed_loop_metrics(r, c, f);
    EXPECT_NEAR(m.infraction_score, is, 1e-12);
    EXPECT_NEAR(m.driving_score, r * m.infraction_score, 1e-12);
  }
}

TEST(ClosedLoop, Fixtures)
{
  EXPECT_NEAR(closed_loop_metrics(0.8904, 0.7281).driving_score, 0.6483, 1e-4);
  EXPECT_EQ(closed_loop_metrics(0.73, InfractionCounts{}).driving_score, 0.73);
  EXPECT_EQ(closed_loop_metrics(0.0, InfractionCounts{2, 1, 0}).driving_score, 0.0);
  EXPECT_DOUBLE_EQ(infraction_score({1, 1, 0}), 0.35);
  EXPECT_THROW(closed_loop_metrics(1.2, 1.0), Error);
  EXPECT_THROW(closed_loop_metrics(0.5, -0.1), Error);
}

TEST(RunScenario, EmptyRoadCompletes)
{
  const auto r = run_scenario(empty_road(), config(RunMode::FastOnly), default_components());
  EXPECT_EQ(r.infractions.collisions, 0);
  EXPECT_EQ(r.termination, "route_complete");
  EXPECT_DOUBLE_EQ(r.closed_loop.route_completion, 1.0);
  EXPECT_EQ(r.slow_invocations, 0);
  EXPECT_GT(r.planning_ticks, 0);
}

TEST(RunScenario, RedLightHandlingStaysOnRoute)
{
  int fast_runs = 0;
  int dual_runs = 0;
  for (const auto & sc : load_suite("adversarial")) {
    if (sc.name.find("red_light") == std::string::npos) {
      continue;
    }
    const double green = sc.lights.front().time;
    double light_x = 0.0;
    for (const auto & m : sc.initial.map) {
      if (m.kind == MapKind::TrafficLight) {
        light_x = m.geometry.front().x;
      }
    }
    // consulted every tick, the slow plan holds the ego behind the light until green
    const auto slow = run_scenario(sc, config(RunMode::AlwaysSlow), default_components());
    bool waiting = false;
    for (const auto & t : slow.ticks) {
      const double bumper = t.ego.x + kEgoHalfLength;
      if (std::abs(t.time - green) < 1e-9) {
        waiting = t.ego.speed <= 1.0 + 1e-9 && bumper <= light_x && bumper >= light_x - 15.0;
      }
    }
    EXPECT_TRUE(waiting) << sc.name;
    EXPECT_EQ(slow.infractions.red_lights, 0) << sc.name;

    // no mode escapes the light by leaving the route
    const auto fast = run_scenario(sc, config(RunMode::FastOnly), default_components());
    const auto dual = run_scenario(sc, config(RunMode::DualSync), default_components());
    for (const auto * r : {&slow, &fast, &dual}) {
      for (const auto & t : r->ticks) {
        if (t.ego.x + kEgoHalfLength <= light_x) {
          EXPECT_LT(std::abs(t.ego.y), kLaneWidth) << sc.name << " t=" << t.time;
        }
      }
    }
    fast_runs += fast.infractions.red_lights;
    dual_runs += dual.infractions.red_lights;
  }
  EXPECT_LE(dual_runs, fast_runs);
}

TEST(RunScenario, RouteCrossingCountsWhenLineIsShort)
{
  // the ego passes beside a lane-wide bar that is too close to stop for;
  // the route still meets the bar, so the run counts exactly one violation
  auto sc = load_suite("adversarial")[8];
  sc.initial.ego.y = 2.5;
  for (auto & m : sc.initial.map) {
    if (m.kind == MapKind::TrafficLight) {
      m.geometry = {{20.0, -0.5 * kLaneWidth}, {20.0, 0.5 * kLaneWidth}};
    }
  }
  sc.lights.clear();
  sc.initial.agents.clear();
  sc.scripts.clear();
  const auto r = run_scenario(sc, config(RunMode::FastOnly), default_components());
  int events = 0;
  for (const auto & e : r.events) {
    events += e.kind == "red_light";
  }
  EXPECT_EQ(r.infractions.red_lights, 1);
  EXPECT_EQ(events, 1);
}

TEST(RunScenario, DeterministicReports)
{
  const auto sc = load_suite("adversarial")[5];
  for (RunMode mode : {RunMode::DualSync, RunMode::FastOnly, RunMode::DualAsync}) {
    const auto a = run_scenario(sc, config(mode), default_components());
    const auto b = run_scenario(sc, config(mode), default_components());
    EXPECT_TRUE(a.deterministic);
    EXPECT_EQ(to_json(a).dump(), to_json(b).dump()) << to_string(mode);
    EXPECT_EQ(to_csv(a), to_csv(b));
  }
}

TEST(RunScenario, SeedDrivesPerturbation)
{
  const auto sc = load_suite("routine")[5];
  auto cfg = config(RunMode::DualSync);
  cfg.perturbation = 0.5;
  const auto a = run_scenario(sc, cfg, default_components());
  cfg.seed = 43;
  const auto b = run_scenario(sc, cfg, default_components());
  EXPECT_NE(to_json(a).dump(), to_json(b).dump());
}

TEST(RunScenario, MissingSlowSystem)
{
  auto comp = default_components();
  comp.slow = nullptr;
  try {
    run_scenario(empty_road(), config(RunMode::DualSync), comp);
    FAIL();
  } catch (const Error & e) {
    EXPECT_EQ(e.code(), ErrorCode::ComponentMissing);
  }
  EXPECT_NO_THROW(run_scenario(empty_road(), config(RunMode::FastOnly), comp));
}

TEST(RunScenario, InvalidScenario)
{
  auto sc = empty_road();
  sc.initial.route.clear();
  EXPECT_THROW(run_scenario(sc, config(RunMode::FastOnly), default_components()), Error);
}

TEST(RunScenario, ExpertEnablesOpenLoopSummary)
{
  const auto sc = load_suite("routine").front();
  ASSERT_TRUE(sc.expert);
  const auto r = run_scenario(sc, config(RunMode::FastOnly), default_components());
  ASSERT_TRUE(r.open_loop);
  EXPECT_GT(r.open_loop->evaluations, 0);
}

TEST(RunScenario, RemoteTimeoutFallsBackWithinBound)
{
  testing::StubServer server([](const httplib::Request &, httplib::Response & res) {
    std::this_thread::sleep_for(std::chrono::milliseconds(600));
    res.set_content("{}", "application/json");
  });
  const double timeout = 0.2;
  auto comp = default_components();
  comp.slow = std::make_shared<RemoteSlowSystem>(server.url(), timeout);
  auto cfg = config(RunMode::AlwaysSlow);
  cfg.max_ticks = 20;
  const auto r = run_scenario(load_suite("routine").front(), cfg, comp);
  EXPECT_FALSE(r.deterministic);
  int planned = 0;
  for (const auto & t : r.ticks) {
    if (!t.plan) {
      continue;
    }
    ++planned;
    EXPECT_TRUE(t.plan->slow_invoked);
    EXPECT_EQ(t.plan->slow_status, "timeout");
    EXPECT_FALSE(t.plan->feedback_applied);
    EXPECT_EQ(t.plan->selected_id, t.plan->fast_id);
    EXPECT_LE(t.plan->wall_seconds, timeout + cfg.dt_sim);
  }
  EXPECT_EQ(planned, 4);
}

TEST(Suite, GatingIsCheaperThanBaselines)
{
  const auto routine = load_suite("routine");
  const auto comp = default_components();
  auto rate = [&](RunMode mode) {
    int slow = 0, ticks = 0;
    for (const auto & r : run_suite(routine, config(mode), comp)) {
      slow += r.slow_invocations;
      ticks += r.planning_ticks;
    }
    return static_cast<double>(slow) / ticks;
  };
  const double dual = rate(RunMode::DualSync);
  EXPECT_LT(dual, 0.3);
  EXPECT_LT(dual, rate(RunMode::Periodic));
  EXPECT_DOUBLE_EQ(rate(RunMode::AlwaysSlow), 1.0);
}

TEST(Suite, DualSystemReducesCollisions)
{
  const auto adversarial = load_suite("adversarial");
  const auto comp = default_components();
  const auto fast = run_suite(adversarial, config(RunMode::FastOnly), comp);
  const auto dual = run_suite(adversarial, config(RunMode::DualSync), comp);
  int fast_total = 0, dual_total = 0, strictly_better = 0;
  for (std::size_t i = 0; i < adversarial.size(); ++i) {
    fast_total += fast[i].infractions.collisions;
    dual_total += dual[i].infractions.collisions;
    strictly_better += dual[i].infractions.collisions < fast[i].infractions.collisions ? 1 : 0;
  }
  EXPECT_LE(dual_total, fast_total);
  EXPECT_GE(strictly_better, 1);
}

TEST(Report, ArtifactsAndHash)
{
  const auto r = run_scenario(empty_road(), config(RunMode::DualSync), default_components());
  const auto dir = std::filesystem::temp_directory_path() / "duoplan_report_test";
  std::filesystem::remove_all(dir);
  const auto paths = write_report(r, dir);
  EXPECT_TRUE(std::filesystem::exists(paths.report));
  EXPECT_TRUE(std::filesystem::exists(paths.csv));
  EXPECT_TRUE(std::filesystem::exists(paths.metrics));
  EXPECT_TRUE(std::filesystem::exists(paths.scenes));
  EXPECT_EQ(report_hash(r), report_hash(r));
  EXPECT_EQ(report_hash(r).size(), 16u);
  std::filesystem::remove_all(dir);
}

}  // namespace
}  // namespace duoplan::sim
