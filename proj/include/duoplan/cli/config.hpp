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

#ifndef DUOPLAN__CLI__CONFIG_HPP_
#define DUOPLAN__CLI__CONFIG_HPP_

#include "duoplan/core/serialization.hpp"
#include "duoplan/sim/runner.hpp"
#include "duoplan/sim/scenario.hpp"

#include <cmath>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <limits>
#include <optional>
#include <set>
#include <sstream>
#include <string>
#include <vector>

namespace duoplan::cli
{

namespace fs = std::filesystem;

inline constexpr const char * kEnvPrefix = "FASIONAD_";

struct RemoteConfig
{
  std::string endpoint;
  double timeout{2.0};
  bool operator==(const RemoteConfig &) const = default;
};

struct SweepGrid
{
  std::vector<double> reward_thresholds;
  std::vector<double> scale_thresholds;
  bool operator==(const SweepGrid &) const = default;
};

struct SimSection
{
  double dt{0.1};
  int max_ticks{0};
  int replan_period{5};
  double perturbation{0.0};
  bool stop_on_collision{true};
  double async_latency{1.0};
  double feedback_ttl{1.5};
  int periodic_interval{2};
  double collision_penalty{0.5};
  double red_light_penalty{0.7};
  double stop_line_penalty{0.8};
  bool operator==(const SimSection &) const = default;
};

struct GateSection
{
  double reward_threshold{0.6};
  double scale_threshold{0.15};
  double ema_alpha{0.2};
  int window{20};
  int hysteresis_ticks{2};
  bool operator==(const GateSection &) const = default;
};

/// Paths are kept as written; relative ones resolve against `base_dir`.
struct RunConfig
{
  fs::path base_dir{"."};
  std::vector<std::string> scenarios;
  sim::RunMode mode{sim::RunMode::DualSync};
  std::uint64_t seed{0};
  std::string out{"out"};
  GateSection gate;
  std::array<double, 4> reward_weights{0.4, 0.2, 0.2, 0.2};
  double guidance_strength{0.3};
  std::optional<RemoteConfig> remote;
  SimSection sim;
  int jobs{0};
  SweepGrid sweep;
  std::optional<std::string> weights_file;
  std::uint64_t weight_seed{7};

  /// Equality over serialized fields; base_dir is excluded.
  bool operator==(const RunConfig & o) const
  {
    return scenarios == o.scenarios && mode == o.mode && seed == o.seed && out == o.out && gate == o.gate &&
           reward_weights == o.reward_weights && guidance_strength == o.guidance_strength && remote == o.remote &&
           sim == o.sim && jobs == o.jobs && sweep == o.sweep && weights_file == o.weights_file &&
           weight_seed == o.weight_seed;
  }

  fs::path resolve(const std::string & p) const
  {
    const fs::path path(p);
    return path.is_absolute() ? path : base_dir / path;
  }

  gate::GateConfig gate_config() const
  {
    gate::GateConfig g;
    g.reward_threshold = gate.reward_threshold;
    g.scale_threshold = gate.scale_threshold;
    g.ema_alpha = gate.ema_alpha;
    g.window = gate.window;
    g.hysteresis_ticks = gate.hysteresis_ticks;
    return g;
  }

  sim::SimConfig sim_config() const
  {
    sim::SimConfig s;
    s.dt_sim = sim.dt;
    s.max_ticks = sim.max_ticks;
    s.replan_period = sim.replan_period;
    s.mode = mode;
    s.seed = seed;
    s.perturbation = sim.perturbation;
    s.stop_on_collision = sim.stop_on_collision;
    s.async_latency = sim.async_latency;
    s.feedback_ttl = sim.feedback_ttl;
    s.periodic_interval = sim.periodic_interval;
    s.penalties = {sim.collision_penalty, sim.red_light_penalty, sim.stop_line_penalty};
    return s;
  }
};

namespace detail
{

[[noreturn]] inline void config_error(const std::string & field, const std::string & what)
{
  throw Error(ErrorCode::ConfigError, field + ": " + what);
}

inline void check_keys(const Json & j, const std::string & scope, std::initializer_list<const char *> allowed)
{
  if (!j.is_object()) {
    config_error(scope.empty() ? "config" : scope, "must be an object");
  }
  const std::set<std::string> ok(allowed.begin(), allowed.end());
  for (const auto & [key, _] : j.items()) {
    if (!ok.count(key)) {
      config_error(scope.empty() ? key : scope + "." + key, "unknown field");
    }
  }
}

/// Numbers, plus the strings "inf" / "-inf".
inline double read_number(const Json & j, const std::string & field)
{
  if (j.is_number()) {
    return j.get<double>();
  }
  if (j.is_string()) {
    const auto s = j.get<std::string>();
    if (s == "inf" || s == "+inf") {
      return std::numeric_limits<double>::infinity();
    }
    if (s == "-inf") {
      return -std::numeric_limits<double>::infinity();
    }
  }
  config_error(field, "must be a number");
}

inline Json write_number(double v)
{
  if (std::isinf(v)) {
    return v > 0 ? "inf" : "-inf";
  }
  return v;
}

inline int read_int(const Json & j, const std::string & field)
{
  if (!j.is_number_integer()) {
    config_error(field, "must be an integer");
  }
  return j.get<int>();
}

inline std::uint64_t read_u64(const Json & j, const std::string & field)
{
  if (!j.is_number_unsigned() && !(j.is_number_integer() && j.get<std::int64_t>() >= 0)) {
    config_error(field, "must be a non-negative integer");
  }
  return j.get<std::uint64_t>();
}

inline std::string read_string(const Json & j, const std::string & field)
{
  if (!j.is_string()) {
    config_error(field, "must be a string");
  }
  return j.get<std::string>();
}

inline bool read_bool(const Json & j, const std::string & field)
{
  if (!j.is_boolean()) {
    config_error(field, "must be a boolean");
  }
  return j.get<bool>();
}

inline std::vector<double> read_numbers(const Json & j, const std::string & field)
{
  if (!j.is_array()) {
    config_error(field, "must be an array");
  }
  std::vector<double> out;
  for (std::size_t i = 0; i < j.size(); ++i) {
    out.push_back(read_number(j[i], field + "[" + std::to_string(i) + "]"));
  }
  return out;
}

inline Json write_numbers(const std::vector<double> & v)
{
  Json a = Json::array();
  for (double x : v) {
    a.push_back(write_number(x));
  }
  return a;
}

inline sim::RunMode parse_mode(const std::string & text, const std::string & field)
{
  const auto m = enum_from_string(text, sim::kAllRunModes);
  if (!m) {
    config_error(field, "unknown mode '" + text + "'");
  }
  return *m;
}

}  // namespace detail

inline sim::RunMode parse_mode(const std::string & text) { return detail::parse_mode(text, "mode"); }

/// Strict parse: unknown fields and wrong types raise ConfigError.
inline RunConfig config_from_json(const Json & j, const fs::path & base_dir = ".")
{
  using namespace detail;
  check_keys(j, "", {"scenarios", "mode", "seed", "out", "gate", "reward_weights", "guidance_strength", "remote",
                     "sim", "jobs", "sweep", "weights_file", "weight_seed"});
  RunConfig c;
  c.base_dir = base_dir;
  if (j.contains("scenarios")) {
    const auto & s = j["scenarios"];
    if (s.is_string()) {
      c.scenarios.push_back(s.get<std::string>());
    } else if (s.is_array()) {
      for (std::size_t i = 0; i < s.size(); ++i) {
        c.scenarios.push_back(read_string(s[i], "scenarios[" + std::to_string(i) + "]"));
      }
    } else {
      config_error("scenarios", "must be a path or an array of paths");
    }
  }
  if (j.contains("mode")) {
    c.mode = parse_mode(read_string(j["mode"], "mode"), "mode");
  }
  if (j.contains("seed")) {
    c.seed = read_u64(j["seed"], "seed");
  }
  if (j.contains("out")) {
    c.out = read_string(j["out"], "out");
  }
  if (j.contains("gate")) {
    const auto & g = j["gate"];
    check_keys(g, "gate", {"reward_threshold", "scale_threshold", "ema_alpha", "window", "hysteresis_ticks"});
    if (g.contains("reward_threshold")) {
      c.gate.reward_threshold = read_number(g["reward_threshold"], "gate.reward_threshold");
    }
    if (g.contains("scale_threshold")) {
      c.gate.scale_threshold = read_number(g["scale_threshold"], "gate.scale_threshold");
    }
    if (g.contains("ema_alpha")) {
      c.gate.ema_alpha = read_number(g["ema_alpha"], "gate.ema_alpha");
    }
    if (g.contains("window")) {
      c.gate.window = read_int(g["window"], "gate.window");
    }
    if (g.contains("hysteresis_ticks")) {
      c.gate.hysteresis_ticks = read_int(g["hysteresis_ticks"], "gate.hysteresis_ticks");
    }
  }
  if (j.contains("reward_weights")) {
    const auto & w = j["reward_weights"];
    check_keys(w, "reward_weights", {"safety", "comfort", "efficiency", "economic"});
    const char * names[4] = {"safety", "comfort", "efficiency", "economic"};
    for (std::size_t i = 0; i < 4; ++i) {
      if (w.contains(names[i])) {
        c.reward_weights[i] = read_number(w[names[i]], std::string("reward_weights.") + names[i]);
      }
    }
  }
  if (j.contains("guidance_strength")) {
    c.guidance_strength = read_number(j["guidance_strength"], "guidance_strength");
  }
  if (j.contains("remote") && !j["remote"].is_null()) {
    const auto & r = j["remote"];
    check_keys(r, "remote", {"endpoint", "timeout"});
    RemoteConfig rc;
    if (!r.contains("endpoint")) {
      config_error("remote.endpoint", "is required");
    }
    rc.endpoint = read_string(r["endpoint"], "remote.endpoint");
    if (r.contains("timeout")) {
      rc.timeout = read_number(r["timeout"], "remote.timeout");
    }
    c.remote = rc;
  }
  if (j.contains("sim")) {
    const auto & s = j["sim"];
    check_keys(s, "sim", {"dt", "max_ticks", "replan_period", "perturbation", "stop_on_collision", "async_latency",
                          "feedback_ttl", "periodic_interval", "collision_penalty", "red_light_penalty",
                          "stop_line_penalty"});
    auto num = [&](const char * k, double & dst) {
      if (s.contains(k)) {
        dst = read_number(s[k], std::string("sim.") + k);
      }
    };
    auto integer = [&](const char * k, int & dst) {
      if (s.contains(k)) {
        dst = read_int(s[k], std::string("sim.") + k);
      }
    };
    num("dt", c.sim.dt);
    integer("max_ticks", c.sim.max_ticks);
    integer("replan_period", c.sim.replan_period);
    num("perturbation", c.sim.perturbation);
    if (s.contains("stop_on_collision")) {
      c.sim.stop_on_collision = read_bool(s["stop_on_collision"], "sim.stop_on_collision");
    }
    num("async_latency", c.sim.async_latency);
    num("feedback_ttl", c.sim.feedback_ttl);
    integer("periodic_interval", c.sim.periodic_interval);
    num("collision_penalty", c.sim.collision_penalty);
    num("red_light_penalty", c.sim.red_light_penalty);
    num("stop_line_penalty", c.sim.stop_line_penalty);
  }
  if (j.contains("jobs")) {
    c.jobs = read_int(j["jobs"], "jobs");
  }
  if (j.contains("sweep")) {
    const auto & s = j["sweep"];
    check_keys(s, "sweep", {"reward_thresholds", "scale_thresholds"});
    if (s.contains("reward_thresholds")) {
      c.sweep.reward_thresholds = read_numbers(s["reward_thresholds"], "sweep.reward_thresholds");
    }
    if (s.contains("scale_thresholds")) {
      c.sweep.scale_thresholds = read_numbers(s["scale_thresholds"], "sweep.scale_thresholds");
    }
  }
  if (j.contains("weights_file") && !j["weights_file"].is_null()) {
    c.weights_file = read_string(j["weights_file"], "weights_file");
  }
  if (j.contains("weight_seed")) {
    c.weight_seed = read_u64(j["weight_seed"], "weight_seed");
  }
  return c;
}

/// Every field is written, so the output is a complete config.
inline Json to_json(const RunConfig & c)
{
  using detail::write_number;
  Json j;
  j["scenarios"] = c.scenarios;
  j["mode"] = std::string(sim::to_string(c.mode));
  j["seed"] = c.seed;
  j["out"] = c.out;
  j["gate"] = {{"reward_threshold", write_number(c.gate.reward_threshold)},
               {"scale_threshold", write_number(c.gate.scale_threshold)},
               {"ema_alpha", c.gate.ema_alpha},
               {"window", c.gate.window},
               {"hysteresis_ticks", c.gate.hysteresis_ticks}};
  j["reward_weights"] = {{"safety", c.reward_weights[0]},
                         {"comfort", c.reward_weights[1]},
                         {"efficiency", c.reward_weights[2]},
                         {"economic", c.reward_weights[3]}};
  j["guidance_strength"] = c.guidance_strength;
  j["remote"] = c.remote ? Json{{"endpoint", c.remote->endpoint}, {"timeout", c.remote->timeout}} : Json(nullptr);
  j["sim"] = {{"dt", c.sim.dt},
              {"max_ticks", c.sim.max_ticks},
              {"replan_period", c.sim.replan_period},
              {"perturbation", c.sim.perturbation},
              {"stop_on_collision", c.sim.stop_on_collision},
              {"async_latency", c.sim.async_latency},
              {"feedback_ttl", c.sim.feedback_ttl},
              {"periodic_interval", c.sim.periodic_interval},
              {"collision_penalty", c.sim.collision_penalty},
              {"red_light_penalty", c.sim.red_light_penalty},
              {"stop_line_penalty", c.sim.stop_line_penalty}};
  j["jobs"] = c.jobs;
  j["sweep"] = {{"reward_thresholds", detail::write_numbers(c.sweep.reward_thresholds)},
                {"scale_thresholds", detail::write_numbers(c.sweep.scale_thresholds)}};
  j["weights_file"] = c.weights_file ? Json(*c.weights_file) : Json(nullptr);
  j["weight_seed"] = c.weight_seed;
  return j;
}

inline RunConfig load_config(const fs::path & path)
{
  if (!fs::is_regular_file(path)) {
    detail::config_error("config", "file not found: " + path.string());
  }
  std::ifstream in(path);
  std::stringstream ss;
  ss << in.rdbuf();
  Json j;
  try {
    j = Json::parse(ss.str());
  } catch (const std::exception & e) {
    detail::config_error("config", std::string("not valid JSON: ") + e.what());
  }
  return config_from_json(j, path.has_parent_path() ? path.parent_path() : fs::path("."));
}

namespace detail
{
inline void check_gate(double tau_r, double tau_b, const std::string & rf, const std::string & bf)
{
  if (!(tau_r >= 0.0 && tau_r <= 1.0)) {
    config_error(rf, "must be in [0, 1]");
  }
  if (!(tau_b > 0.0)) {
    config_error(bf, "must be > 0 (\"inf\" disables the uncertainty rule)");
  }
}
}  // namespace detail

/// Full-field check run before any simulation starts.
inline void validate(const RunConfig & c)
{
  using detail::config_error;
  if (c.scenarios.empty()) {
    config_error("scenarios", "at least one scenario file or directory is required");
  }
  for (std::size_t i = 0; i < c.scenarios.size(); ++i) {
    if (!fs::exists(c.resolve(c.scenarios[i]))) {
      config_error("scenarios[" + std::to_string(i) + "]", "not found: " + c.resolve(c.scenarios[i]).string());
    }
  }
  if (c.out.empty()) {
    config_error("out", "must not be empty");
  }
  detail::check_gate(c.gate.reward_threshold, c.gate.scale_threshold, "gate.reward_threshold",
                     "gate.scale_threshold");
  if (!(c.gate.ema_alpha > 0.0 && c.gate.ema_alpha <= 1.0)) {
    config_error("gate.ema_alpha", "must be in (0, 1]");
  }
  if (c.gate.window < 1) {
    config_error("gate.window", "must be >= 1");
  }
  if (c.gate.hysteresis_ticks < 0) {
    config_error("gate.hysteresis_ticks", "must be >= 0");
  }
  const char * names[4] = {"safety", "comfort", "efficiency", "economic"};
  double sum = 0.0;
  for (std::size_t i = 0; i < 4; ++i) {
    if (!(c.reward_weights[i] >= 0.0) || !std::isfinite(c.reward_weights[i])) {
      config_error(std::string("reward_weights.") + names[i], "must be finite and >= 0");
    }
    sum += c.reward_weights[i];
  }
  if (!(sum > 0.0)) {
    config_error("reward_weights", "must not all be zero");
  }
  if (!(c.guidance_strength >= 0.0) || !std::isfinite(c.guidance_strength)) {
    config_error("guidance_strength", "must be finite and >= 0");
  }
  if (c.remote) {
    try {
      slowsys::Endpoint::parse(c.remote->endpoint);
    } catch (const Error & e) {
      config_error("remote.endpoint", e.what());
    }
    if (!(c.remote->timeout > 0.0) || !std::isfinite(c.remote->timeout)) {
      config_error("remote.timeout", "must be finite and > 0");
    }
  }
  const auto & s = c.sim;
  if (!(s.dt > 0.0)) {
    config_error("sim.dt", "must be > 0");
  }
  if (s.max_ticks < 0) {
    config_error("sim.max_ticks", "must be >= 0");
  }
  if (s.replan_period < 1) {
    config_error("sim.replan_period", "must be >= 1");
  }
  if (!(s.perturbation >= 0.0)) {
    config_error("sim.perturbation", "must be >= 0");
  }
  if (!(s.async_latency >= 0.0)) {
    config_error("sim.async_latency", "must be >= 0");
  }
  if (!(s.feedback_ttl >= 0.0)) {
    config_error("sim.feedback_ttl", "must be >= 0");
  }
  if (s.periodic_interval < 1) {
    config_error("sim.periodic_interval", "must be >= 1");
  }
  for (auto [v, f] : {std::pair{s.collision_penalty, "sim.collision_penalty"},
                      std::pair{s.red_light_penalty, "sim.red_light_penalty"},
                      std::pair{s.stop_line_penalty, "sim.stop_line_penalty"}}) {
    if (!(v >= 0.0 && v <= 1.0)) {
      config_error(f, "must be in [0, 1]");
    }
  }
  if (c.jobs < 0) {
    config_error("jobs", "must be >= 0 (0 = logical cores)");
  }
  for (std::size_t i = 0; i < c.sweep.reward_thresholds.size(); ++i) {
    const double v = c.sweep.reward_thresholds[i];
    if (!(v >= 0.0 && v <= 1.0)) {
      config_error("sweep.reward_thresholds[" + std::to_string(i) + "]", "must be in [0, 1]");
    }
  }
  for (std::size_t i = 0; i < c.sweep.scale_thresholds.size(); ++i) {
    if (!(c.sweep.scale_thresholds[i] > 0.0)) {
      config_error("sweep.scale_thresholds[" + std::to_string(i) + "]", "must be > 0");
    }
  }
  if (c.weights_file && !fs::is_regular_file(c.resolve(*c.weights_file))) {
    config_error("weights_file", "not found: " + c.resolve(*c.weights_file).string());
  }
}

/// Environment overrides, applied between the config file and explicit flags.
struct EnvOverrides
{
  std::optional<std::string> config, mode, seed, out, endpoint, timeout, jobs;

  static EnvOverrides read()
  {
    auto get = [](const char * name) -> std::optional<std::string> {
      const std::string key = std::string(kEnvPrefix) + name;
      const char * v = std::getenv(key.c_str());
      if (v == nullptr || *v == '\0') {
        return std::nullopt;
      }
      return std::string(v);
    };
    return {get("CONFIG"), get("MODE"), get("SEED"), get("OUT"), get("ENDPOINT"), get("TIMEOUT"), get("JOBS")};
  }
};

/// Values given on the command line or in the environment, as text.
struct Overrides
{
  std::optional<std::string> mode, seed, out, endpoint, timeout, jobs;
};

namespace detail
{
template <typename T>
T parse_text(const std::string & text, const std::string & field)
{
  std::istringstream in(text);
  T v{};
  in >> v;
  if (!in || !in.eof()) {
    config_error(field, "cannot parse '" + text + "'");
  }
  return v;
}
}  // namespace detail

inline void apply_overrides(RunConfig & c, const Overrides & o)
{
  if (o.mode) {
    c.mode = detail::parse_mode(*o.mode, "mode");
  }
  if (o.seed) {
    if (o.seed->find('-') != std::string::npos) {
      detail::config_error("seed", "must be a non-negative integer");
    }
    c.seed = detail::parse_text<std::uint64_t>(*o.seed, "seed");
  }
  if (o.out) {
    c.out = *o.out;
  }
  if (o.endpoint) {
    if (!c.remote) {
      c.remote = RemoteConfig{};
    }
    c.remote->endpoint = *o.endpoint;
  }
  if (o.timeout) {
    if (!c.remote) {
      detail::config_error("timeout", "needs a remote endpoint");
    }
    c.remote->timeout = detail::parse_text<double>(*o.timeout, "timeout");
  }
  if (o.jobs) {
    c.jobs = detail::parse_text<int>(*o.jobs, "jobs");
  }
}

/// Flag values win over environment values.
inline Overrides merge(const EnvOverrides & env, const Overrides & flags)
{
  Overrides o{env.mode, env.seed, env.out, env.endpoint, env.timeout, env.jobs};
  auto pick = [](std::optional<std::string> & dst, const std::optional<std::string> & src) {
    if (src) {
      dst = src;
    }
  };
  pick(o.mode, flags.mode);
  pick(o.seed, flags.seed);
  pick(o.out, flags.out);
  pick(o.endpoint, flags.endpoint);
  pick(o.timeout, flags.timeout);
  pick(o.jobs, flags.jobs);
  return o;
}

/// Scenario files named by the config; directories expand to their sorted
/// *.json entries.
inline std::vector<fs::path> scenario_files(const RunConfig & c)
{
  std::vector<fs::path> out;
  for (std::size_t i = 0; i < c.scenarios.size(); ++i) {
    const auto p = c.resolve(c.scenarios[i]);
    if (fs::is_directory(p)) {
      const auto listed = sim::list_scenarios(p);
      out.insert(out.end(), listed.begin(), listed.end());
    } else if (fs::is_regular_file(p)) {
      out.push_back(p);
    } else {
      detail::config_error("scenarios[" + std::to_string(i) + "]", "not found: " + p.string());
    }
  }
  return out;
}

}  // namespace duoplan::cli

#endif  // DUOPLAN__CLI__CONFIG_HPP_
