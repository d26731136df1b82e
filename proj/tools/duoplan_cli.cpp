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

#include "duoplan/cli/commands.hpp"

#include <CLI11.hpp>

#include <iostream>

namespace
{

using duoplan::Error;
using duoplan::ErrorCode;
namespace cli = duoplan::cli;

constexpr int kExitOk = 0;
constexpr int kExitInternal = 1;
constexpr int kExitConfig = 2;
constexpr int kExitScenario = 3;

struct Common
{
  std::string config;
  std::vector<std::string> scenarios;
  cli::Overrides flags;
};

void add_common(CLI::App * app, Common & c)
{
  app->add_option("--config", c.config, "JSON run configuration");
  app->add_option("--scenario", c.scenarios, "Scenario file or directory; replaces the config's list");
  app->add_option("--mode", c.flags.mode, "fast_only | dual_sync | dual_async | always_slow | periodic");
  app->add_option("--seed", c.flags.seed, "Simulation seed");
  app->add_option("--out", c.flags.out, "Output directory");
  app->add_option("--endpoint", c.flags.endpoint, "Remote slow-system endpoint (http://host:port/path)");
  app->add_option("--timeout", c.flags.timeout, "Remote request timeout in seconds");
  app->add_option("--jobs", c.flags.jobs, "Worker threads (0 = logical cores)");
}

/// Config file, then FASIONAD_* variables, then flags.
cli::RunConfig resolve(const Common & c)
{
  const auto env = cli::EnvOverrides::read();
  std::string path = c.config;
  if (path.empty() && env.config) {
    path = *env.config;
  }
  cli::RunConfig cfg = path.empty() ? cli::RunConfig{} : cli::load_config(path);
  if (!c.scenarios.empty()) {
    cfg.scenarios = c.scenarios;
    cfg.base_dir = ".";
  }
  cli::apply_overrides(cfg, cli::merge(env, c.flags));
  return cfg;
}

std::vector<double> parse_list(const std::string & text, const std::string & field)
{
  std::vector<double> out;
  std::stringstream ss(text);
  std::string item;
  std::size_t i = 0;
  while (std::getline(ss, item, ',')) {
    if (item.empty()) {
      continue;
    }
    out.push_back(cli::detail::read_number(
      item == "inf" || item == "+inf" || item == "-inf" ? duoplan::Json(item) : duoplan::Json::parse(item, nullptr, false),
      field + "[" + std::to_string(i++) + "]"));
  }
  return out;
}

int exit_code_for(const Error & e)
{
  switch (e.code()) {
    case ErrorCode::ConfigError:
    case ErrorCode::LogNotFound:
    case ErrorCode::ParseError:
      return kExitConfig;
    case ErrorCode::ScenarioInvalid:
      return kExitScenario;
    default:
      return kExitInternal;
  }
}

}  // namespace

int main(int argc, char ** argv)
{
  CLI::App app{"duoplan: dual-system driving planner simulator"};
  app.require_subcommand(1);

  Common run_opts;
  auto * run = app.add_subcommand("run", "Simulate scenarios and write reports");
  add_common(run, run_opts);

  Common sweep_opts;
  std::optional<std::string> reward_grid;
  std::optional<std::string> scale_grid;
  auto * sweep = app.add_subcommand("sweep", "Sweep gate thresholds and write sweep.csv");
  add_common(sweep, sweep_opts);
  sweep->add_option("--reward-thresholds", reward_grid, "Comma-separated reward thresholds");
  sweep->add_option("--scale-thresholds", scale_grid, "Comma-separated scale thresholds; 'inf' allowed");

  std::string qa_log;
  std::string qa_out;
  auto * qa = app.add_subcommand("qa", "Generate a QA dataset from a scenes.ndjson log");
  qa->add_option("--log", qa_log, "Scene log written by 'run'")->required();
  qa->add_option("--out", qa_out, "Dataset path (default: qa.ndjson next to the log)");

  Common validate_opts;
  auto * val = app.add_subcommand("validate", "Check a configuration and its scenarios");
  add_common(val, validate_opts);

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError & e) {
    const int rc = app.exit(e);
    return rc == 0 ? kExitOk : kExitConfig;
  }

  try {
    if (*run) {
      const auto outcome = cli::cmd_run(resolve(run_opts), std::cout);
      if (outcome.failures > 0) {
        for (const auto & s : outcome.scenarios) {
          if (!s.ok) {
            std::cerr << "scenario failed: " << s.file.string() << ": " << s.error << '\n';
          }
        }
        return kExitScenario;
      }
      return kExitOk;
    }
    if (*sweep) {
      auto cfg = resolve(sweep_opts);
      if (reward_grid) {
        cfg.sweep.reward_thresholds = parse_list(*reward_grid, "reward_thresholds");
      }
      if (scale_grid) {
        cfg.sweep.scale_thresholds = parse_list(*scale_grid, "scale_thresholds");
      }
      cli::cmd_sweep(cfg, std::cout);
      return kExitOk;
    }
    if (*qa) {
      const std::filesystem::path log(qa_log);
      const std::filesystem::path out = qa_out.empty() ? log.parent_path() / "qa.ndjson" : std::filesystem::path(qa_out);
      cli::cmd_qa(log, out, std::cout);
      return kExitOk;
    }
    if (*val) {
      return cli::cmd_validate(resolve(validate_opts), std::cout) == 0 ? kExitOk : kExitScenario;
    }
  } catch (const Error & e) {
    std::cerr << "error: " << e.what() << '\n';
    return exit_code_for(e);
  } catch (const std::exception & e) {
    std::cerr << "error: " << e.what() << '\n';
    return kExitInternal;
  }
  return kExitInternal;
}
