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

#ifndef DUOPLAN__GATE__GATE_HPP_
#define DUOPLAN__GATE__GATE_HPP_

#include "duoplan/core/error.hpp"

#include <algorithm>
#include <cmath>
#include <deque>
#include <limits>
#include <optional>
#include <span>
#include <string_view>
#include <vector>

namespace duoplan::gate
{

struct LaplaceParams
{
  double mu{0.0};
  double b{1.0};
};

struct GateConfig
{
  double reward_threshold{0.6};
  double scale_threshold{0.15};
  double ema_alpha{0.2};
  int window{20};
  int hysteresis_ticks{2};
  double min_b{1e-6};

  void validate() const
  {
    require(
      reward_threshold >= 0.0 && reward_threshold <= 1.0, ErrorCode::ConfigError,
      "gate.reward_threshold must be in [0, 1]");
    require(scale_threshold > 0.0, ErrorCode::ConfigError, "gate.scale_threshold must be > 0");
    require(ema_alpha > 0.0 && ema_alpha <= 1.0, ErrorCode::ConfigError, "gate.ema_alpha must be in (0, 1]");
    require(window >= 1, ErrorCode::ConfigError, "gate.window must be >= 1");
    require(hysteresis_ticks >= 0, ErrorCode::ConfigError, "gate.hysteresis_ticks must be >= 0");
    require(min_b > 0.0, ErrorCode::ConfigError, "gate.min_b must be > 0");
  }
};

enum class Mode { Fast, Slow };
enum class Reason { LowReward, HighUncertainty, Routine, Hysteresis };

constexpr std::string_view to_string(Mode m) { return m == Mode::Fast ? "fast" : "slow"; }

constexpr std::string_view to_string(Reason r)
{
  switch (r) {
    case Reason::LowReward: return "low_reward";
    case Reason::HighUncertainty: return "high_uncertainty";
    case Reason::Routine: return "routine";
    case Reason::Hysteresis: return "hysteresis";
  }
  return "routine";
}

struct GateDecision
{
  Mode mode{Mode::Fast};
  LaplaceParams params;
  double reward{0.0};
  Reason reason{Reason::Routine};
  Mode base{Mode::Fast};  // verdict of the threshold rule before hysteresis
};

/// Mode persistence state carried between ticks.
struct GateHistory
{
  Mode mode{Mode::Fast};
  int streak{0};  // consecutive ticks the base rule disagreed with `mode`

  GateHistory after(const GateDecision & d) const
  {
    if (d.mode != mode) {
      return {d.mode, 0};
    }
    return {mode, d.base != mode ? streak + 1 : 0};
  }
};

/// Laplace scale MLE around a given expectation: mean absolute deviation,
/// floored at `min_b`.
inline LaplaceParams fit_laplace(std::span<const double> rewards, double mu, double min_b = 1e-6)
{
  require(!rewards.empty(), ErrorCode::EmptyWindow, "reward window is empty");
  double sum = 0.0;
  for (double r : rewards) {
    sum += std::abs(r - mu);
  }
  return {mu, std::max(sum / static_cast<double>(rewards.size()), min_b)};
}

inline double log_likelihood(std::span<const double> rewards, const LaplaceParams & p)
{
  require(p.b > 0.0, ErrorCode::InvalidArgument, "Laplace scale must be > 0");
  const double norm = -std::log(2.0 * p.b);
  double total = 0.0;
  for (double r : rewards) {
    total += norm - std::abs(r - p.mu) / p.b;
  }
  return total;
}

inline GateDecision decide(
  double reward, const LaplaceParams & p, const GateConfig & cfg, const GateHistory & history)
{
  GateDecision d;
  d.params = p;
  d.reward = reward;
  const bool confident = reward >= cfg.reward_threshold && p.b <= cfg.scale_threshold;
  d.base = confident ? Mode::Fast : Mode::Slow;
  const Reason base_reason = confident ? Reason::Routine
                             : reward < cfg.reward_threshold ? Reason::LowReward
                                                             : Reason::HighUncertainty;
  if (d.base == history.mode || history.streak + 1 >= cfg.hysteresis_ticks) {
    d.mode = d.base;
    d.reason = base_reason;
  } else {
    d.mode = history.mode;
    d.reason = Reason::Hysteresis;
  }
  return d;
}

/// Online gate: EMA expectation, sliding residual window, hysteresis.
class UncertaintyGate
{
public:
  explicit UncertaintyGate(GateConfig cfg = {}) : cfg_(cfg) { cfg_.validate(); }

  GateDecision observe(double reward)
  {
    window_.push_back(reward);
    while (static_cast<int>(window_.size()) > cfg_.window) {
      window_.pop_front();
    }
    mu_ = mu_ ? cfg_.ema_alpha * reward + (1.0 - cfg_.ema_alpha) * *mu_ : reward;
    const std::vector<double> buf(window_.begin(), window_.end());
    const auto params = fit_laplace(buf, *mu_, cfg_.min_b);
    const auto d = decide(reward, params, cfg_, history_);
    history_ = history_.after(d);
    return d;
  }

  const GateConfig & config() const { return cfg_; }
  const GateHistory & history() const { return history_; }

private:
  GateConfig cfg_;
  std::deque<double> window_;
  std::optional<double> mu_;
  GateHistory history_;
};

/// Number of Slow decisions when the gate replays a fixed reward log.
inline int count_slow(std::span<const double> rewards, const GateConfig & cfg)
{
  UncertaintyGate gate(cfg);
  int n = 0;
  for (double r : rewards) {
    n += gate.observe(r).mode == Mode::Slow ? 1 : 0;
  }
  return n;
}

}  // namespace duoplan::gate

#endif  // DUOPLAN__GATE__GATE_HPP_
