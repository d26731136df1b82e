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

#ifndef DUOPLAN__SIM__RUNNER_HPP_
#define DUOPLAN__SIM__RUNNER_HPP_

#include "duoplan/fastplan/sampler.hpp"
#include "duoplan/fusion/attention.hpp"
#include "duoplan/fusion/features.hpp"
#include "duoplan/fusion/guidance.hpp"
#include "duoplan/fusion/ib.hpp"
#include "duoplan/fusion/weights.hpp"
#include "duoplan/gate/gate.hpp"
#include "duoplan/reward/reward.hpp"
#include "duoplan/sim/collision.hpp"
#include "duoplan/sim/kinematics.hpp"
#include "duoplan/sim/metrics.hpp"
#include "duoplan/sim/scenario.hpp"
#include "duoplan/slowsys/oracle.hpp"
#include "duoplan/slowsys/prompts.hpp"
#include "duoplan/slowsys/remote.hpp"

#include <chrono>
#include <cmath>
#include <future>
#include <limits>
#include <memory>
#include <optional>
#include <random>
#include <set>
#include <string>
#include <vector>

namespace duoplan::sim
{

enum class RunMode { FastOnly, DualSync, DualAsync, AlwaysSlow, Periodic };

inline constexpr std::array<RunMode, 5> kAllRunModes = {
  RunMode::FastOnly, RunMode::DualSync, RunMode::DualAsync, RunMode::AlwaysSlow, RunMode::Periodic};

constexpr std::string_view to_string(RunMode m)
{
  switch (m) {
    case RunMode::FastOnly: return "fast_only";
    case RunMode::DualSync: return "dual_sync";
    case RunMode::DualAsync: return "dual_async";
    case RunMode::AlwaysSlow: return "always_slow";
    case RunMode::Periodic: return "periodic";
  }
  return "fast_only";
}

struct SimConfig
{
  double dt_sim{0.1};
  int max_ticks{0};  // 0: derived from the scenario's max_time
  int replan_period{5};
  RunMode mode{RunMode::DualSync};
  std::uint64_t seed{0};
  /// Std-dev of the seeded initial agent perturbation (position m, speed m/s / 2).
  double perturbation{0.0};
  bool stop_on_collision{true};
  /// Simulated slow-system latency in DualAsync with a deterministic slow system.
  double async_latency{1.0};
  /// Age after which delivered asynchronous feedback is no longer applied.
  double feedback_ttl{1.5};
  /// Planning ticks between slow calls in Periodic mode.
  int periodic_interval{2};
  PenaltyFactors penalties;

  void validate() const
  {
    require(dt_sim > 0.0, ErrorCode::ConfigError, "sim.dt must be > 0");
    require(replan_period >= 1, ErrorCode::ConfigError, "sim.replan_period must be >= 1");
    require(max_ticks >= 0, ErrorCode::ConfigError, "sim.max_ticks must be >= 0");
    require(perturbation >= 0.0, ErrorCode::ConfigError, "sim.perturbation must be >= 0");
    require(async_latency >= 0.0, ErrorCode::ConfigError, "sim.async_latency must be >= 0");
    require(feedback_ttl >= 0.0, ErrorCode::ConfigError, "sim.feedback_ttl must be >= 0");
    require(periodic_interval >= 1, ErrorCode::ConfigError, "sim.periodic_interval must be >= 1");
  }
};

struct SlowResponse
{
  std::optional<SlowFeedback> feedback;
  std::string status{"ok"};
  std::string message;
};

/// Source of slow-system feedback.
class SlowSystem
{
public:
  virtual ~SlowSystem() = default;
  virtual SlowResponse query(
    const Scene & scene, const Trajectory & candidate, const slowsys::VisualPrompt & visual,
    const slowsys::BevPrompt & bev) = 0;
  /// Deterministic systems are evaluated immediately and their latency is
  /// simulated in scene time; others run on a worker thread.
  virtual bool deterministic() const = 0;
};

class OracleSlowSystem : public SlowSystem
{
public:
  SlowResponse query(
    const Scene & scene, const Trajectory & candidate, const slowsys::VisualPrompt & visual,
    const slowsys::BevPrompt & bev) override
  {
    return {slowsys::oracle_feedback(scene, candidate, visual, bev), "ok", ""};
  }
  bool deterministic() const override { return true; }
};

/// Remote reasoning service. A timeout or malformed reply yields no feedback
/// and the tick falls back to the fast selection.
class RemoteSlowSystem : public SlowSystem
{
public:
  RemoteSlowSystem(const std::string & endpoint, double timeout_s) : client_(endpoint, timeout_s) {}

  SlowResponse query(
    const Scene & scene, const Trajectory & candidate, const slowsys::VisualPrompt & visual,
    const slowsys::BevPrompt & bev) override
  {
    (void)candidate;
    slowsys::RemoteRequest req{
      scene.id, bev, visual, slowsys::qa_template(), static_cast<int>(default_planning_queries().size())};
    auto r = client_.request(req);
    return {std::move(r.feedback), std::string(to_string(r.status)), r.message};
  }
  bool deterministic() const override { return false; }
  double timeout() const { return client_.timeout(); }

private:
  slowsys::RemoteSlowClient client_;
};

struct Components
{
  /// Closed loop follows the route command, so only its lattice is sampled.
  fastplan::SamplerConfig sampler{.all_commands = false};
  reward::RewardWeights weights;
  reward::RewardParams reward_params;
  gate::GateConfig gate;
  std::shared_ptr<const fusion::FusionWeights> fusion;
  std::shared_ptr<SlowSystem> slow;
  double guidance_strength{0.3};
  double ib_learning_rate{0.05};
  slowsys::CameraModel camera;
};

/// Oracle slow system with seeded fusion weights.
inline Components default_components(std::uint64_t weight_seed = 7)
{
  Components c;
  c.fusion = std::make_shared<fusion::FusionWeights>(fusion::FusionWeights::seeded(weight_seed));
  c.slow = std::make_shared<OracleSlowSystem>();
  return c;
}

struct PlanLog
{
  int fast_id{0};
  double fast_reward{0.0};
  gate::GateDecision decision;
  bool slow_invoked{false};
  bool feedback_applied{false};
  int selected_id{0};
  double selected_reward{0.0};
  std::optional<MetaAction> meta_action;
  std::string planning_bits;
  double feedback_latency{0.0};
  std::string slow_status;
  std::optional<double> ib_loss;
  int attention_top{-1};
  double guidance_norm{0.0};
  bool floor_applied{false};
  double wall_seconds{0.0};  // exported only for non-deterministic runs
};

struct TickLog
{
  int tick{0};
  double time{0.0};
  EgoState ego;
  double accel_cmd{0.0};
  double curvature_cmd{0.0};
  std::optional<PlanLog> plan;
};

struct Event
{
  double time{0.0};
  std::string kind;  // collision, red_light, stop_line, route_complete
  std::string detail;
};

struct OpenLoopSummary
{
  int evaluations{0};
  std::array<double, 3> l2_point{};
  std::array<double, 3> l2_frame_avg{};
  std::array<double, 3> collision_rate{};  // percent
  double l2_point_avg{0.0};
  double l2_frame_avg_avg{0.0};
  double collision_avg{0.0};
};

struct RunReport
{
  std::string scenario;
  std::string suite;
  RunMode mode{RunMode::DualSync};
  std::uint64_t seed{0};
  bool deterministic{true};
  std::vector<TickLog> ticks;
  std::vector<Event> events;
  std::vector<double> fast_rewards;  // fast best reward per planning tick
  int planning_ticks{0};
  int slow_invocations{0};
  int feedback_applications{0};
  InfractionCounts infractions;
  ClosedLoopMetrics closed_loop;
  std::optional<OpenLoopSummary> open_loop;
  std::string termination;
  double duration{0.0};
  double min_clearance{std::numeric_limits<double>::infinity()};
  std::vector<Scene> scenes;  // world state at every planning tick

  double slow_rate() const
  {
    return planning_ticks == 0 ? 0.0 : static_cast<double>(slow_invocations) / planning_ticks;
  }
};

namespace detail
{

struct ScriptedAgent
{
  AgentState state;
  double accel{0.0};
  double curvature{0.0};
  std::optional<double> target_speed;
  const AgentScript * script{nullptr};
  std::vector<bool> fired;
};

struct ActivePlan
{
  std::vector<Vec2> path;      // world frame, starting at the plan origin
  std::vector<double> speeds;  // v0 then end speeds per waypoint
  double dt{0.5};
  double start_time{0.0};

  double speed_at(double t) const
  {
    const double u = std::max(0.0, t - start_time) / dt;
    const auto i = static_cast<std::size_t>(std::floor(u));
    if (i + 1 >= speeds.size()) {
      return speeds.back();
    }
    const double f = u - static_cast<double>(i);
    return speeds[i] + f * (speeds[i + 1] - speeds[i]);
  }
};

struct Pending
{
  double request_time{0.0};
  double ready_time{0.0};
  std::optional<SlowResponse> immediate;    // deterministic systems
  std::future<SlowResponse> future;         // others
};

inline bool segment_crosses(const Vec2 & p0, const Vec2 & p1, const MapElement & m)
{
  if ((p1 - p0).norm() <= 0.0) {
    return false;
  }
  for (std::size_t k = 1; k < m.geometry.size(); ++k) {
    if (segments_intersect(p0, p1, m.geometry[k - 1], m.geometry[k])) {
      return true;
    }
  }
  return false;
}

inline Vec2 front_bumper(const EgoState & e) { return Vec2{e.x, e.y} + rotate(Vec2{kEgoHalfLength, 0.0}, e.heading); }

}  // namespace detail

/// Runs one scenario closed-loop. Deterministic for a fixed seed whenever
/// the slow system is deterministic.
inline RunReport run_scenario(const Scenario & scenario, const SimConfig & cfg, const Components & comp)
{
  cfg.validate();
  validate(scenario);
  comp.sampler.validate();
  comp.gate.validate();
  const bool uses_slow = cfg.mode != RunMode::FastOnly;
  require(!uses_slow || comp.slow, ErrorCode::ComponentMissing, "mode requires a slow system");
  require(!uses_slow || comp.fusion, ErrorCode::ComponentMissing, "mode requires fusion weights");
  require(comp.sampler.dt > 0.0, ErrorCode::ComponentMissing, "sampler is not configured");

  RunReport rep;
  rep.scenario = scenario.name;
  rep.suite = scenario.suite;
  rep.mode = cfg.mode;
  rep.seed = cfg.seed;
  rep.deterministic = !uses_slow || comp.slow->deterministic();

  // world state
  EgoState ego = scenario.initial.ego;
  std::vector<detail::ScriptedAgent> agents;
  std::mt19937_64 rng(cfg.seed);
  std::normal_distribution<double> noise(0.0, 1.0);
  for (const auto & a : scenario.initial.agents) {
    detail::ScriptedAgent s;
    s.state = a;
    if (cfg.perturbation > 0.0 && a.kind != AgentKind::Static) {
      s.state.pose.x += cfg.perturbation * noise(rng);
      s.state.pose.y += cfg.perturbation * noise(rng);
      s.state.speed = std::max(0.0, s.state.speed + 0.5 * cfg.perturbation * noise(rng));
    }
    for (const auto & sc : scenario.scripts) {
      if (sc.agent == a.id) {
        s.script = &sc;
        s.fired.assign(sc.behaviors.size(), false);
      }
    }
    agents.push_back(std::move(s));
  }
  std::vector<MapElement> map = scenario.initial.map;
  std::set<std::string> cleared_stop_lines;
  NavigationCommand command = scenario.initial.command;
  const auto & route = scenario.initial.route;
  const double route_len = polyline_length(route);
  const double s_start = project_onto_polyline(route, {ego.x, ego.y}).arc_length;
  double s_max = s_start;
  const double goal_s = std::max(s_start, route_len - scenario.termination.goal_tolerance);
  std::vector<std::optional<double>> line_arc(map.size());
  for (std::size_t j = 0; j < map.size(); ++j) {
    line_arc[j] = polyline_crossing_arc(route, map[j].geometry);
  }

  gate::UncertaintyGate gate(comp.gate);
  std::optional<fusion::IbModel> ib;
  if (comp.fusion) {
    ib = comp.fusion->ib;
  }
  std::optional<detail::Pending> pending;
  std::optional<SlowFeedback> active_feedback;
  double active_feedback_time = 0.0;
  detail::ActivePlan plan;
  std::set<std::string> in_contact;

  std::array<double, 3> ol_point{}, ol_frame{}, ol_coll{};
  int ol_n = 0;

  const int ticks_from_time = static_cast<int>(std::ceil(scenario.termination.max_time / cfg.dt_sim - 1e-9));
  const int max_ticks = cfg.max_ticks > 0 ? std::min(cfg.max_ticks, ticks_from_time) : ticks_from_time;
  std::size_t light_cursor = 0;
  std::size_t command_cursor = 0;

  auto build_scene = [&](double t) {
    Scene s;
    s.id = scenario.name;
    s.timestamp = t;
    s.ego = ego;
    for (const auto & a : agents) {
      s.agents.push_back(a.state);
    }
    for (const auto & m : map) {
      if (m.kind == MapKind::StopLine && cleared_stop_lines.count(m.id)) {
        continue;
      }
      s.map.push_back(m);
    }
    s.command = command;
    s.route = route;
    return s;
  };

  auto deliver = [&](SlowResponse && r, double request_time, PlanLog & log) {
    log.slow_status = r.status;
    if (r.feedback) {
      active_feedback = std::move(r.feedback);
      active_feedback_time = request_time;
    }
  };

  auto plan_tick = [&](double t) {
    const auto wall_start = std::chrono::steady_clock::now();
    Scene scene = build_scene(t);
    rep.scenes.push_back(scene);
    const auto set = fastplan::sample_candidates(scene, comp.sampler);
    const auto breakdowns = reward::score_all(set, scene, comp.weights, comp.reward_params);
    const std::size_t fast_idx = reward::argmax_index(set, breakdowns);
    PlanLog log;
    log.fast_id = set.candidates[fast_idx].id;
    log.fast_reward = breakdowns[fast_idx].total;
    log.decision = gate.observe(log.fast_reward);
    rep.fast_rewards.push_back(log.fast_reward);

    bool want_slow = false;
    switch (cfg.mode) {
      case RunMode::FastOnly: want_slow = false; break;
      case RunMode::DualSync:
      case RunMode::DualAsync: want_slow = log.decision.mode == gate::Mode::Slow; break;
      case RunMode::AlwaysSlow: want_slow = true; break;
      case RunMode::Periodic: want_slow = rep.planning_ticks % cfg.periodic_interval == 0; break;
    }

    std::optional<SlowFeedback> feedback;
    if (uses_slow) {
      const auto & best_traj = set.candidates[fast_idx].trajectory;
      auto issue = [&]() {
        const auto visual = slowsys::project_waypoints(best_traj, comp.camera, log.fast_id);
        const auto bev = slowsys::build_bev_prompt(scene);
        ++rep.slow_invocations;
        log.slow_invoked = true;
        if (cfg.mode != RunMode::DualAsync) {
          active_feedback.reset();
          deliver(comp.slow->query(scene, best_traj, visual, bev), t, log);
          return;
        }
        detail::Pending p;
        p.request_time = t;
        if (comp.slow->deterministic()) {
          p.ready_time = t + cfg.async_latency;
          p.immediate = comp.slow->query(scene, best_traj, visual, bev);
        } else {
          auto slow = comp.slow;
          p.future = std::async(std::launch::async, [slow, scene, best_traj, visual, bev] {
            return slow->query(scene, best_traj, visual, bev);
          });
        }
        pending = std::move(p);
      };

      if (cfg.mode == RunMode::DualAsync) {
        if (pending) {
          const bool ready = pending->immediate
                               ? t + 1e-9 >= pending->ready_time
                               : pending->future.wait_for(std::chrono::seconds(0)) == std::future_status::ready;
          if (ready) {
            SlowResponse r = pending->immediate ? std::move(*pending->immediate) : pending->future.get();
            const double req_t = pending->request_time;
            pending.reset();
            if (r.feedback && comp.slow->deterministic()) {
              r.feedback->latency = cfg.async_latency;
            }
            deliver(std::move(r), req_t, log);
          }
        }
        if (want_slow && !pending) {
          issue();
        }
        if (active_feedback && t - active_feedback_time <= cfg.feedback_ttl + 1e-9) {
          feedback = active_feedback;
        }
      } else if (want_slow) {
        issue();
        feedback = active_feedback;
      }
    }

    std::size_t chosen = fast_idx;
    if (feedback && !feedback->plan.empty()) {
      const auto & best = set.candidates[fast_idx];
      const auto token = fusion::ego_token(scene, best, breakdowns[fast_idx]);
      const auto att = fusion::cross_attend(token, comp.fusion->action_embeddings, comp.fusion->projections);
      log.attention_top = static_cast<int>(
        std::max_element(att.weights.begin(), att.weights.end()) - att.weights.begin());
      double norm2 = 0.0;
      for (double v : att.output) {
        norm2 += v * v;
      }
      log.guidance_norm = std::sqrt(norm2);
      if (ib && feedback->planning_state.size() == ib->k()) {
        const auto z = fusion::feature_vector(scene);
        log.ib_loss = fusion::ib_sgd_step(z, feedback->planning_state, *ib, comp.ib_learning_rate);
      }
      const auto sel = fusion::apply_guidance(
        set, breakdowns, *feedback, att.output, comp.guidance_strength, scene.ego.speed);
      chosen = sel.index;
      log.floor_applied = sel.floor_applied;
      log.feedback_applied = true;
      log.meta_action = feedback->plan.front();
      log.planning_bits = feedback->planning_state.to_bitstring();
      log.feedback_latency = feedback->latency;
      ++rep.feedback_applications;
    }
    const auto & sel = set.candidates[chosen];
    log.selected_id = sel.id;
    log.selected_reward = breakdowns[chosen].total;

    plan.path.clear();
    plan.path.push_back({ego.x, ego.y});
    for (const auto & w : sel.trajectory.waypoints()) {
      plan.path.push_back(local_to_parent(ego.pose(), w.position()));
    }
    plan.speeds.clear();
    plan.speeds.push_back(ego.speed);
    plan.speeds.insert(plan.speeds.end(), sel.speeds.begin(), sel.speeds.end());
    plan.dt = sel.trajectory.dt();
    plan.start_time = t;

    if (scenario.expert) {
      const auto j0 = static_cast<std::size_t>(std::llround(t / scenario.expert->dt()));
      const auto need = static_cast<std::size_t>(std::llround(kOpenLoopHorizons.back() / scenario.expert->dt()));
      if (std::abs(t - static_cast<double>(j0) * scenario.expert->dt()) < 1e-6 &&
          j0 + need <= scenario.expert->size() && sel.trajectory.size() >= need) {
        std::vector<Vec2> exp_pts;
        std::vector<Vec2> pred_pts;
        for (std::size_t i = 0; i < need; ++i) {
          exp_pts.push_back((*scenario.expert)[j0 + i].position());
          pred_pts.push_back(plan.path[i + 1]);
        }
        const Trajectory pred(pred_pts, scenario.expert->dt(), Frame::World);
        const Trajectory expt(exp_pts, scenario.expert->dt(), Frame::World);
        const auto m = open_loop_metrics(pred, expt, scene.agents);
        for (std::size_t h = 0; h < 3; ++h) {
          ol_point[h] += m.l2_point[h];
          ol_frame[h] += m.l2_frame_avg[h];
          ol_coll[h] += m.collision[h] ? 1.0 : 0.0;
        }
        ++ol_n;
      }
    }
    ++rep.planning_ticks;
    log.wall_seconds = std::chrono::duration<double>(std::chrono::steady_clock::now() - wall_start).count();
    return log;
  };

  rep.termination = "timeout";
  for (int tick = 0; tick < max_ticks; ++tick) {
    const double t = tick * cfg.dt_sim;

    while (light_cursor < scenario.lights.size() && scenario.lights[light_cursor].time <= t + 1e-9) {
      for (auto & m : map) {
        if (m.id == scenario.lights[light_cursor].light) {
          m.light = scenario.lights[light_cursor].state;
        }
      }
      ++light_cursor;
    }
    const double s_now = project_onto_polyline(route, {ego.x, ego.y}).arc_length;
    while (command_cursor < scenario.commands.size() && scenario.commands[command_cursor].s <= s_now - s_start) {
      command = scenario.commands[command_cursor].command;
      ++command_cursor;
    }
    for (auto & a : agents) {
      if (!a.script) {
        continue;
      }
      for (std::size_t b = 0; b < a.script->behaviors.size(); ++b) {
        if (a.fired[b]) {
          continue;
        }
        const auto & beh = a.script->behaviors[b];
        bool fire = false;
        switch (beh.trigger.kind) {
          case TriggerKind::Time: fire = t + 1e-9 >= beh.trigger.value; break;
          case TriggerKind::EgoWithin:
            fire = (a.state.pose.position() - Vec2{ego.x, ego.y}).norm() <= beh.trigger.value;
            break;
          case TriggerKind::EgoXGe: fire = ego.x >= beh.trigger.value; break;
        }
        if (!fire) {
          continue;
        }
        a.fired[b] = true;
        if (beh.accel) {
          a.accel = *beh.accel;
        }
        if (beh.curvature) {
          a.curvature = *beh.curvature;
        }
        if (beh.target_speed) {
          a.target_speed = beh.target_speed;
        } else if (beh.accel) {
          a.target_speed.reset();
        }
      }
    }

    TickLog log;
    log.tick = tick;
    log.time = t;
    log.ego = ego;
    if (tick % cfg.replan_period == 0) {
      log.plan = plan_tick(t);
    }

    const double kappa = pure_pursuit_curvature(ego, plan.path);
    const double v_target = plan.speed_at(t + cfg.dt_sim);
    const double accel = std::clamp((v_target - ego.speed) / cfg.dt_sim, -kMaxBrake, kMaxThrottle);
    log.accel_cmd = accel;
    log.curvature_cmd = kappa;

    const Vec2 front0 = detail::front_bumper(ego);
    ego = step_kinematics(ego, accel, kappa, cfg.dt_sim);
    for (auto & a : agents) {
      double acc = a.accel;
      if (a.target_speed) {
        const double rate = a.accel != 0.0 ? std::abs(a.accel) : 3.0;
        const double gap = *a.target_speed - a.state.speed;
        acc = std::clamp(gap / cfg.dt_sim, -rate, rate);
      }
      a.state = step_agent(a.state, acc, a.curvature, cfg.dt_sim);
    }
    const double t1 = t + cfg.dt_sim;
    const Vec2 front1 = detail::front_bumper(ego);
    rep.ticks.push_back(std::move(log));

    // events
    bool collided = false;
    const OrientedBox ego_box{{ego.x, ego.y}, ego.heading, kEgoHalfLength, kEgoHalfWidth};
    std::set<std::string> contact_now;
    for (const auto & a : agents) {
      rep.min_clearance = std::min(rep.min_clearance, box_distance(ego_box, a.state.box()));
      const std::array<AgentState, 1> one{a.state};
      if (check_collision(ego_box, one)) {
        contact_now.insert(a.state.id);
        if (!in_contact.count(a.state.id)) {
          rep.events.push_back({t1, "collision", a.state.id});
          ++rep.infractions.collisions;
          collided = true;
        }
      }
    }
    in_contact = std::move(contact_now);
    const double front_s0 = project_onto_polyline(route, front0).arc_length;
    const double front_s1 = project_onto_polyline(route, front1).arc_length;
    for (std::size_t j = 0; j < map.size(); ++j) {
      const auto & m = map[j];
      if (m.geometry.size() < 2) {
        continue;
      }
      const bool crossed = detail::segment_crosses(front0, front1, m) ||
                           (line_arc[j] && front_s0 < *line_arc[j] && front_s1 >= *line_arc[j]);
      if (m.kind == MapKind::TrafficLight && m.light == LightState::Red && crossed) {
        rep.events.push_back({t1, "red_light", m.id});
        ++rep.infractions.red_lights;
      }
      if (m.kind == MapKind::StopLine && !cleared_stop_lines.count(m.id)) {
        if (crossed) {
          rep.events.push_back({t1, "stop_line", m.id});
          ++rep.infractions.stop_lines;
          cleared_stop_lines.insert(m.id);
        } else if (ego.speed < 0.5) {
          Scene probe;
          probe.ego = ego;
          probe.map = {m};
          const auto hit = slowsys::line_ahead(probe, [](const MapElement &) { return true; }, 6.0);
          if (hit) {
            cleared_stop_lines.insert(m.id);
          }
        }
      }
    }
    s_max = std::max(s_max, project_onto_polyline(route, {ego.x, ego.y}).arc_length);
    rep.duration = t1;

    if (collided && cfg.stop_on_collision) {
      rep.termination = "collision";
      break;
    }
    if (s_max >= goal_s) {
      rep.events.push_back({t1, "route_complete", ""});
      rep.termination = "route_complete";
      break;
    }
  }

  const double denom = goal_s - s_start;
  const double rc = denom <= 0.0 ? 1.0 : std::clamp((s_max - s_start) / denom, 0.0, 1.0);
  rep.closed_loop = closed_loop_metrics(rc, rep.infractions, cfg.penalties);
  if (ol_n > 0) {
    OpenLoopSummary s;
    s.evaluations = ol_n;
    for (std::size_t h = 0; h < 3; ++h) {
      s.l2_point[h] = ol_point[h] / ol_n;
      s.l2_frame_avg[h] = ol_frame[h] / ol_n;
      s.collision_rate[h] = 100.0 * ol_coll[h] / ol_n;
    }
    s.l2_point_avg = horizon_average(s.l2_point);
    s.l2_frame_avg_avg = horizon_average(s.l2_frame_avg);
    s.collision_avg = horizon_average(s.collision_rate);
    rep.open_loop = s;
  }
  if (pending && pending->future.valid()) {
    pending->future.wait();
  }
  return rep;
}

}  // namespace duoplan::sim

#endif  // DUOPLAN__SIM__RUNNER_HPP_
