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

#ifndef DUOPLAN__CLI__COMMANDS_HPP_
#define DUOPLAN__CLI__COMMANDS_HPP_

#include "duoplan/cli/config.hpp"
#include "duoplan/sim/report.hpp"
#include "duoplan/slowsys/qa.hpp"

#include <cstdio>
#include <map>
#include <mutex>
#include <ostream>

namespace duoplan::cli
{

/// Fresh components per scenario, so no slow-system client is shared between
/// concurrent simulations.
inline sim::Components make_components(const RunConfig & c)
{
  sim::Components comp;
  comp.weights = reward::RewardWeights(c.reward_weights[0], c.reward_weights[1], c.reward_weights[2],
                                       c.reward_weights[3]);
  comp.gate = c.gate_config();
  comp.guidance_strength = c.guidance_strength;
  if (c.weights_file) {
    comp.fusion = std::make_shared<fusion::FusionWeights>(
      fusion::FusionWeights::from_file(fusion::WeightFile::load(c.resolve(*c.weights_file).string())));
  } else {
    comp.fusion = std::make_shared<fusion::FusionWeights>(fusion::FusionWeights::seeded(c.weight_seed));
  }
  if (c.remote) {
    comp.slow = std::make_shared<sim::RemoteSlowSystem>(c.remote->endpoint, c.remote->timeout);
  } else {
    comp.slow = std::make_shared<sim::OracleSlowSystem>();
  }
  return comp;
}

struct ScenarioOutcome
{
  fs::path file;
  std::string name;
  bool ok{false};
  std::string error;
  std::optional<sim::RunReport> report;
  std::optional<sim::ReportPaths> paths;
};

struct RunOutcome
{
  std::vector<ScenarioOutcome> scenarios;
  Json summary;
  fs::path summary_path;
  int failures{0};
};

namespace detail
{

/// Output subdirectory names, made unique in file order.
inline std::vector<std::string> unique_dirs(const std::vector<std::string> & names)
{
  std::map<std::string, int> seen;
  std::vector<std::string> out;
  for (const auto & n : names) {
    const int k = seen[n]++;
    out.push_back(k == 0 ? n : n + "_" + std::to_string(k));
  }
  return out;
}

inline Json summarize(const RunConfig & c, const std::vector<ScenarioOutcome> & items)
{
  Json list = Json::array();
  int collisions = 0;
  int red = 0;
  int stop = 0;
  int planning = 0;
  int slow = 0;
  double ds = 0.0;
  double rc = 0.0;
  int ok = 0;
  for (const auto & s : items) {
    Json e = {{"name", s.name}, {"file", s.file.filename().string()}, {"status", s.ok ? "ok" : "failed"}};
    if (!s.ok) {
      e["error"] = s.error;
    } else {
      const auto & r = *s.report;
      e["report_hash"] = sim::report_hash(r);
      e["collisions"] = r.infractions.collisions;
      e["red_light_violations"] = r.infractions.red_lights;
      e["stop_line_violations"] = r.infractions.stop_lines;
      e["planning_ticks"] = r.planning_ticks;
      e["slow_invocations"] = r.slow_invocations;
      e["slow_rate"] = r.slow_rate();
      e["route_completion"] = r.closed_loop.route_completion;
      e["driving_score"] = r.closed_loop.driving_score;
      e["termination"] = r.termination;
      collisions += r.infractions.collisions;
      red += r.infractions.red_lights;
      stop += r.infractions.stop_lines;
      planning += r.planning_ticks;
      slow += r.slow_invocations;
      ds += r.closed_loop.driving_score;
      rc += r.closed_loop.route_completion;
      ++ok;
    }
    list.push_back(std::move(e));
  }
  Json s = {{"mode", std::string(sim::to_string(c.mode))},
            {"seed", c.seed},
            {"scenario_count", items.size()},
            {"failures", static_cast<int>(items.size()) - ok},
            {"totals",
             {{"collisions", collisions},
              {"red_light_violations", red},
              {"stop_line_violations", stop},
              {"planning_ticks", planning},
              {"slow_invocations", slow},
              {"slow_rate", planning == 0 ? 0.0 : static_cast<double>(slow) / planning},
              {"mean_driving_score", ok == 0 ? 0.0 : ds / ok},
              {"mean_route_completion", ok == 0 ? 0.0 : rc / ok}}},
            {"scenarios", list}};
  s["summary_hash"] = sim::hex64(sim::fnv1a(s.dump()));
  return s;
}

}  // namespace detail

/// Runs every scenario of the config and writes per-scenario artifacts plus
/// summary.json under `out`. Invalid scenarios are recorded as failures and
/// do not stop the others. Printed paths exist when this returns.
inline RunOutcome cmd_run(const RunConfig & c, std::ostream & log)
{
  validate(c);
  const auto files = scenario_files(c);
  RunOutcome out;
  out.scenarios.resize(files.size());
  std::vector<std::optional<sim::Scenario>> loaded(files.size());
  std::vector<std::string> names;
  for (std::size_t i = 0; i < files.size(); ++i) {
    out.scenarios[i].file = files[i];
    try {
      loaded[i] = sim::load_scenario(files[i]);
      names.push_back(loaded[i]->name);
    } catch (const Error & e) {
      out.scenarios[i].error = e.what();
      names.push_back(files[i].stem().string());
    }
    out.scenarios[i].name = names.back();
  }
  const auto dirs = detail::unique_dirs(names);
  const fs::path root(c.out);
  const auto cfg = c.sim_config();
  sim::parallel_for(files.size(), c.jobs, [&](std::size_t i) {
    auto & item = out.scenarios[i];
    if (!loaded[i]) {
      return;
    }
    try {
      auto report = sim::run_scenario(*loaded[i], cfg, make_components(c));
      item.paths = sim::write_report(report, root / dirs[i]);
      item.report = std::move(report);
      item.ok = true;
    } catch (const Error & e) {
      if (e.code() == ErrorCode::ConfigError) {
        throw;
      }
      item.error = e.what();
    }
  });
  out.summary = detail::summarize(c, out.scenarios);
  out.failures = out.summary["failures"].get<int>();
  out.summary_path = root / "summary.json";
  sim::write_atomic(out.summary_path, out.summary.dump(2) + "\n");
  for (const auto & s : out.scenarios) {
    if (s.paths) {
      log << s.paths->report.string() << '\n'
          << s.paths->csv.string() << '\n'
          << s.paths->metrics.string() << '\n'
          << s.paths->scenes.string() << '\n';
    }
  }
  log << out.summary_path.string() << '\n';
  return out;
}

struct SweepRow
{
  double tau_r{0.0};
  double tau_b{0.0};
  double trigger_rate{0.0};
  int collisions{0};
  std::optional<double> avg_l2;
  double closed_loop_trigger_rate{0.0};
};

inline std::string sweep_header()
{
  return "tau_r,tau_b,trigger_rate,collisions,avg_l2,closed_loop_trigger_rate\n";
}

inline std::string format_threshold(double v)
{
  if (std::isinf(v)) {
    return v > 0 ? "inf" : "-inf";
  }
  char buf[64];
  std::snprintf(buf, sizeof(buf), "%.6g", v);
  return buf;
}

inline std::string to_csv(const std::vector<SweepRow> & rows)
{
  std::string out = sweep_header();
  char buf[256];
  for (const auto & r : rows) {
    std::string l2;
    if (r.avg_l2) {
      std::snprintf(buf, sizeof(buf), "%.6f", *r.avg_l2);
      l2 = buf;
    }
    std::snprintf(buf, sizeof(buf), "%s,%s,%.6f,%d,%s,%.6f\n", format_threshold(r.tau_r).c_str(),
                  format_threshold(r.tau_b).c_str(), r.trigger_rate, r.collisions, l2.c_str(),
                  r.closed_loop_trigger_rate);
    out += buf;
  }
  return out;
}

struct SweepOutcome
{
  std::vector<SweepRow> rows;
  fs::path csv_path;
};

/// Gate threshold grid over the config's scenarios. `trigger_rate` replays
/// the FastOnly reward logs through the gate, so it depends on the thresholds
/// alone; the remaining columns come from closed-loop runs at each point.
/// Rows are ordered tau_r-major.
inline SweepOutcome cmd_sweep(const RunConfig & c, std::ostream & log)
{
  validate(c);
  SweepOutcome out;
  out.csv_path = fs::path(c.out) / "sweep.csv";
  const auto & grid = c.sweep;
  if (grid.reward_thresholds.empty() || grid.scale_thresholds.empty()) {
    sim::write_atomic(out.csv_path, sweep_header());
    log << out.csv_path.string() << '\n';
    return out;
  }
  std::vector<sim::Scenario> scenarios;
  for (const auto & f : scenario_files(c)) {
    scenarios.push_back(sim::load_scenario(f));
  }
  auto base = c.sim_config();
  base.mode = sim::RunMode::FastOnly;
  std::vector<std::vector<double>> logs(scenarios.size());
  sim::parallel_for(scenarios.size(), c.jobs, [&](std::size_t i) {
    logs[i] = sim::run_scenario(scenarios[i], base, make_components(c)).fast_rewards;
  });
  const sim::RunMode closed_mode = c.mode == sim::RunMode::FastOnly ? sim::RunMode::DualSync : c.mode;
  for (double tau_r : grid.reward_thresholds) {
    for (double tau_b : grid.scale_thresholds) {
      RunConfig point = c;
      point.gate.reward_threshold = tau_r;
      point.gate.scale_threshold = tau_b;
      const auto gcfg = point.gate_config();
      SweepRow row;
      row.tau_r = tau_r;
      row.tau_b = tau_b;
      std::size_t replayed = 0;
      std::size_t fired = 0;
      for (const auto & l : logs) {
        replayed += l.size();
        fired += static_cast<std::size_t>(gate::count_slow(l, gcfg));
      }
      row.trigger_rate = replayed == 0 ? 0.0 : static_cast<double>(fired) / replayed;
      auto cfg = point.sim_config();
      cfg.mode = closed_mode;
      std::vector<sim::RunReport> reports(scenarios.size());
      sim::parallel_for(scenarios.size(), c.jobs, [&](std::size_t i) {
        reports[i] = sim::run_scenario(scenarios[i], cfg, make_components(point));
      });
      int planning = 0;
      int slow = 0;
      double l2 = 0.0;
      int l2_n = 0;
      for (const auto & r : reports) {
        row.collisions += r.infractions.collisions;
        planning += r.planning_ticks;
        slow += r.slow_invocations;
        if (r.open_loop && r.open_loop->evaluations > 0) {
          l2 += r.open_loop->l2_point_avg;
          ++l2_n;
        }
      }
      if (l2_n > 0) {
        row.avg_l2 = l2 / l2_n;
      }
      row.closed_loop_trigger_rate = planning == 0 ? 0.0 : static_cast<double>(slow) / planning;
      out.rows.push_back(row);
    }
  }
  sim::write_atomic(out.csv_path, to_csv(out.rows));
  log << out.csv_path.string() << '\n';
  return out;
}

/// Reads a scenes.ndjson log; blank lines are skipped.
inline std::vector<Scene> read_scene_log(const fs::path & path)
{
  require(fs::is_regular_file(path), ErrorCode::LogNotFound, "scene log not found: " + path.string());
  std::ifstream in(path);
  require(static_cast<bool>(in), ErrorCode::LogNotFound, "cannot open scene log: " + path.string());
  std::vector<Scene> scenes;
  std::string line;
  int n = 0;
  while (std::getline(in, line)) {
    ++n;
    if (line.find_first_not_of(" \t\r") == std::string::npos) {
      continue;
    }
    try {
      scenes.push_back(scene_from_json(Json::parse(line)));
    } catch (const std::exception & e) {
      throw Error(ErrorCode::ParseError, path.string() + ":" + std::to_string(n) + ": " + e.what());
    }
  }
  return scenes;
}

struct QaOutcome
{
  std::size_t records{0};
  fs::path path;
};

inline QaOutcome cmd_qa(const fs::path & log_path, const fs::path & out_path, std::ostream & log)
{
  const auto scenes = read_scene_log(log_path);
  const auto records = slowsys::generate_qa_dataset(scenes);
  std::string body;
  for (const auto & r : records) {
    body += slowsys::to_json(r).dump();
    body += '\n';
  }
  sim::write_atomic(out_path, body);
  log << out_path.string() << '\n';
  return {records.size(), out_path};
}

/// Validates the config and parses every scenario without simulating.
/// Returns the number of scenarios that failed to load.
inline int cmd_validate(const RunConfig & c, std::ostream & log)
{
  validate(c);
  if (c.weights_file) {
    fusion::FusionWeights::from_file(fusion::WeightFile::load(c.resolve(*c.weights_file).string()));
  }
  int bad = 0;
  const auto files = scenario_files(c);
  for (const auto & f : files) {
    try {
      sim::load_scenario(f);
    } catch (const Error & e) {
      ++bad;
      log << "invalid: " << e.what() << '\n';
    }
  }
  log << "checked " << files.size() << " scenario(s), " << bad << " invalid\n";
  return bad;
}

}  // namespace duoplan::cli

#endif  // DUOPLAN__CLI__COMMANDS_HPP_
