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

#ifndef DUOPLAN__SIM__REPORT_HPP_
#define DUOPLAN__SIM__REPORT_HPP_

#include "duoplan/core/serialization.hpp"
#include "duoplan/sim/runner.hpp"

#include <atomic>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <functional>
#include <mutex>
#include <sstream>
#include <string>
#include <thread>
#include <vector>

namespace duoplan::sim
{

inline Json to_json(const PlanLog & p, bool with_wall)
{
  Json j = {{"fast_id", p.fast_id},
            {"fast_reward", p.fast_reward},
            {"gate_mode", std::string(gate::to_string(p.decision.mode))},
            {"gate_reason", std::string(gate::to_string(p.decision.reason))},
            {"gate_mu", p.decision.params.mu},
            {"gate_b", p.decision.params.b},
            {"slow_invoked", p.slow_invoked},
            {"feedback_applied", p.feedback_applied},
            {"selected_id", p.selected_id},
            {"selected_reward", p.selected_reward},
            {"floor_applied", p.floor_applied}};
  if (p.meta_action) {
    j["meta_action"] = duoplan::to_json(*p.meta_action);
    j["planning_state"] = p.planning_bits;
    j["feedback_latency"] = p.feedback_latency;
    j["attention_top"] = p.attention_top;
    j["guidance_norm"] = p.guidance_norm;
  }
  if (!p.slow_status.empty()) {
    j["slow_status"] = p.slow_status;
  }
  if (p.ib_loss) {
    j["ib_loss"] = *p.ib_loss;
  }
  if (with_wall) {
    j["wall_seconds"] = p.wall_seconds;
  }
  return j;
}

inline Json metrics_json(const RunReport & r)
{
  Json j = {{"scenario", r.scenario},
            {"suite", r.suite},
            {"mode", std::string(to_string(r.mode))},
            {"seed", r.seed},
            {"termination", r.termination},
            {"duration", r.duration},
            {"planning_ticks", r.planning_ticks},
            {"slow_invocations", r.slow_invocations},
            {"slow_rate", r.slow_rate()},
            {"feedback_applications", r.feedback_applications},
            {"collisions", r.infractions.collisions},
            {"red_light_violations", r.infractions.red_lights},
            {"stop_line_violations", r.infractions.stop_lines},
            {"route_completion", r.closed_loop.route_completion},
            {"infraction_score", r.closed_loop.infraction_score},
            {"driving_score", r.closed_loop.driving_score},
            {"min_clearance", std::isfinite(r.min_clearance) ? Json(r.min_clearance) : Json(nullptr)}};
  if (r.open_loop) {
    const auto & o = *r.open_loop;
    j["open_loop"] = {{"evaluations", o.evaluations},
                      {"l2_point", o.l2_point},
                      {"l2_frame_avg", o.l2_frame_avg},
                      {"collision_rate_percent", o.collision_rate},
                      {"l2_point_avg", o.l2_point_avg},
                      {"l2_frame_avg_avg", o.l2_frame_avg_avg},
                      {"collision_avg_percent", o.collision_avg}};
  }
  return j;
}

inline Json to_json(const RunReport & r)
{
  const bool wall = !r.deterministic;
  Json ticks = Json::array();
  for (const auto & t : r.ticks) {
    Json jt = {{"tick", t.tick},
               {"time", t.time},
               {"ego", duoplan::to_json(t.ego)},
               {"accel_cmd", t.accel_cmd},
               {"curvature_cmd", t.curvature_cmd}};
    if (t.plan) {
      jt["plan"] = to_json(*t.plan, wall);
    }
    ticks.push_back(std::move(jt));
  }
  Json events = Json::array();
  for (const auto & e : r.events) {
    events.push_back({{"time", e.time}, {"kind", e.kind}, {"detail", e.detail}});
  }
  return {{"metrics", metrics_json(r)}, {"events", events}, {"fast_rewards", r.fast_rewards}, {"ticks", ticks}};
}

/// Per-tick CSV; planning columns are empty on non-planning ticks.
inline std::string to_csv(const RunReport & r)
{
  std::ostringstream out;
  out << "tick,time,x,y,heading,speed,accel_cmd,curvature_cmd,planned,fast_id,fast_reward,gate_mode,gate_b,"
         "slow_invoked,feedback_applied,selected_id,selected_reward,meta_action,feedback_latency\n";
  char buf[512];
  for (const auto & t : r.ticks) {
    std::snprintf(buf, sizeof(buf), "%d,%.3f,%.6f,%.6f,%.6f,%.6f,%.6f,%.6f,", t.tick, t.time, t.ego.x, t.ego.y,
                  t.ego.heading, t.ego.speed, t.accel_cmd, t.curvature_cmd);
    out << buf;
    if (!t.plan) {
      out << "0,,,,,,,,,,\n";
      continue;
    }
    const auto & p = *t.plan;
    std::string meta;
    if (p.meta_action) {
      meta = std::string(to_string(p.meta_action->longitudinal)) + "/" + std::string(to_string(p.meta_action->lateral));
    }
    std::snprintf(buf, sizeof(buf), "1,%d,%.6f,%s,%.6f,%d,%d,%d,%.6f,%s,%.3f\n", p.fast_id, p.fast_reward,
                  std::string(gate::to_string(p.decision.mode)).c_str(), p.decision.params.b, p.slow_invoked ? 1 : 0,
                  p.feedback_applied ? 1 : 0, p.selected_id, p.selected_reward, meta.c_str(), p.feedback_latency);
    out << buf;
  }
  return out.str();
}

inline std::string scenes_ndjson(const RunReport & r)
{
  std::string out;
  for (const auto & s : r.scenes) {
    out += duoplan::to_json(s).dump();
    out += '\n';
  }
  return out;
}

/// 64-bit FNV-1a.
inline std::uint64_t fnv1a(std::string_view data)
{
  std::uint64_t h = 1469598103934665603ull;
  for (unsigned char c : data) {
    h ^= c;
    h *= 1099511628211ull;
  }
  return h;
}

inline std::string hex64(std::uint64_t v)
{
  char buf[17];
  std::snprintf(buf, sizeof(buf), "%016llx", static_cast<unsigned long long>(v));
  return buf;
}

inline std::string report_hash(const RunReport & r) { return hex64(fnv1a(to_json(r).dump())); }

/// Write to a sibling temp file and rename over the target.
inline void write_atomic(const std::filesystem::path & path, const std::string & content)
{
  if (path.has_parent_path()) {
    std::filesystem::create_directories(path.parent_path());
  }
  auto tmp = path;
  tmp += ".tmp";
  {
    std::ofstream out(tmp, std::ios::binary);
    require(static_cast<bool>(out), ErrorCode::InvalidArgument, "cannot write " + tmp.string());
    out << content;
    require(static_cast<bool>(out), ErrorCode::InvalidArgument, "write failed for " + tmp.string());
  }
  std::filesystem::rename(tmp, path);
}

struct ReportPaths
{
  std::filesystem::path report;
  std::filesystem::path csv;
  std::filesystem::path metrics;
  std::filesystem::path scenes;
};

inline ReportPaths write_report(const RunReport & r, const std::filesystem::path & dir)
{
  ReportPaths p{dir / "report.json", dir / "ticks.csv", dir / "metrics.json", dir / "scenes.ndjson"};
  write_atomic(p.report, to_json(r).dump() + "\n");
  write_atomic(p.csv, to_csv(r));
  write_atomic(p.metrics, metrics_json(r).dump(2) + "\n");
  write_atomic(p.scenes, scenes_ndjson(r));
  return p;
}

/// Runs `task(i)` for i in [0, n) on up to `jobs` threads (0 = hardware
/// concurrency). The first exception is rethrown after all workers join.
inline void parallel_for(std::size_t n, int jobs, const std::function<void(std::size_t)> & task)
{
  std::size_t workers = jobs > 0 ? static_cast<std::size_t>(jobs) : std::max(1u, std::thread::hardware_concurrency());
  workers = std::min(workers, std::max<std::size_t>(n, 1));
  std::atomic<std::size_t> next{0};
  std::exception_ptr first;
  std::mutex err_mutex;
  auto body = [&] {
    for (;;) {
      const std::size_t i = next.fetch_add(1);
      if (i >= n) {
        return;
      }
      try {
        task(i);
      } catch (...) {
        std::lock_guard lock(err_mutex);
        if (!first) {
          first = std::current_exception();
        }
      }
    }
  };
  if (workers <= 1) {
    body();
  } else {
    std::vector<std::thread> pool;
    for (std::size_t w = 0; w < workers; ++w) {
      pool.emplace_back(body);
    }
    for (auto & t : pool) {
      t.join();
    }
  }
  if (first) {
    std::rethrow_exception(first);
  }
}

inline std::vector<RunReport> run_suite(
  const std::vector<Scenario> & scenarios, const SimConfig & cfg, const Components & comp, int jobs = 0)
{
  std::vector<RunReport> out(scenarios.size());
  parallel_for(scenarios.size(), jobs, [&](std::size_t i) { out[i] = run_scenario(scenarios[i], cfg, comp); });
  return out;
}

}  // namespace duoplan::sim

#endif  // DUOPLAN__SIM__REPORT_HPP_
