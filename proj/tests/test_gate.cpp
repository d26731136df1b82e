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

#include "duoplan/gate/gate.hpp"
#include "oracles.hpp"

#include <gtest/gtest.h>

#include <algorithm>
#include <cmath>
#include <random>

namespace duoplan::gate
{
namespace
{

using testing::brute_force_count;
using testing::golden_min;
using testing::laplace_sample;
using testing::neg_ll;
using testing::reward_log;


TEST(FitLaplace, MeanAbsoluteDeviation)
{
  const std::vector<double> r{1.0, -1.0, 2.0, -2.0};
  EXPECT_EQ(fit_laplace(r, 0.0).b, 1.5);
  EXPECT_EQ(fit_laplace(r, 0.0).mu, 0.0);
}

TEST(FitLaplace, FloorWhenNoDeviation)
{
  const std::vector<double> r{0.7, 0.7, 0.7};
  EXPECT_EQ(fit_laplace(r, 0.7).b, 1e-6);
  EXPECT_EQ(fit_laplace(r, 0.7, 0.01).b, 0.01);
}

TEST(FitLaplace, EmptyWindow)
{
  try {
    fit_laplace(std::vector<double>{}, 0.0);
    FAIL();
  } catch (const Error & e) {
    EXPECT_EQ(e.code(), ErrorCode::EmptyWindow);
  }
}

TEST(FitLaplace, RecoversScaleFromSamples)
{
  std::mt19937_64 rng(7);
  const auto r = laplace_sample(rng, 0.5, 0.3, 200);
  EXPECT_NEAR(fit_laplace(r, 0.5).b, 0.3, 0.05);
}

TEST(FitLaplace, MinimizesNegativeLogLikelihood)
{
  std::mt19937_64 rng(31);
  std::uniform_real_distribution<double> scale(0.02, 0.5);
  std::uniform_int_distribution<int> len(1, 40);
  for (int trial = 0; trial < 50; ++trial) {
    const double mu = 0.7;
    const auto r = laplace_sample(rng, mu, scale(rng), len(rng));
    const double closed = fit_laplace(r, mu).b;
    const double numeric = golden_min([&](double b) { return neg_ll(r, mu, b); }, closed * 0.2, closed * 5.0);
    EXPECT_NEAR(numeric, closed, 1e-6) << trial;
  }
}

TEST(LogLikelihood, PeakAndOneScaleAway)
{
  const std::vector<double> at{0.3};
  EXPECT_NEAR(log_likelihood(at, {0.3, 0.5}), 0.0, 1e-15);
  const std::vector<double> off{0.3 + 0.2};
  EXPECT_NEAR(log_likelihood(off, {0.3, 0.2}), -std::log(0.4) - 1.0, 1e-12);
  EXPECT_THROW(log_likelihood(at, {0.3, 0.0}), Error);
}

TEST(LogLikelihood, MatchesDensityProduct)
{
  std::mt19937_64 rng(8);
  std::uniform_real_distribution<double> u(0.0, 1.0);
  std::vector<double> r(50);
  for (auto & x : r) {
    x = u(rng);
  }
  const LaplaceParams p{0.6, 0.4};
  double prod = 1.0;
  for (double x : r) {
    prod *= std::exp(-std::abs(x - p.mu) / p.b) / (2.0 * p.b);
  }
  EXPECT_NEAR(log_likelihood(r, p), std::log(prod), 1e-10);
}

TEST(Decide, BaseRule)
{
  GateConfig cfg;
  cfg.hysteresis_ticks = 0;
  const auto fast = decide(0.9, {0.9, 0.1}, cfg, {});
  EXPECT_EQ(fast.mode, Mode::Fast);
  EXPECT_EQ(fast.reason, Reason::Routine);
  const auto low = decide(0.5, {0.9, 0.1}, cfg, {});
  EXPECT_EQ(low.mode, Mode::Slow);
  EXPECT_EQ(low.reason, Reason::LowReward);
  const auto unsure = decide(0.9, {0.9, 0.2}, cfg, {});
  EXPECT_EQ(unsure.mode, Mode::Slow);
  EXPECT_EQ(unsure.reason, Reason::HighUncertainty);
  // thresholds are inclusive on the Fast side
  EXPECT_EQ(decide(0.6, {0.6, 0.15}, cfg, {}).mode, Mode::Fast);
}

TEST(Decide, NoHysteresisIsPure)
{
  GateConfig cfg;
  cfg.hysteresis_ticks = 0;
  std::mt19937_64 rng(4);
  std::uniform_real_distribution<double> u(0.0, 1.0);
  for (int i = 0; i < 200; ++i) {
    const double r = u(rng);
    const double b = u(rng) * 0.3;
    const GateHistory h{u(rng) < 0.5 ? Mode::Fast : Mode::Slow, static_cast<int>(u(rng) * 5)};
    const auto a = decide(r, {0.5, b}, cfg, h);
    const auto c = decide(r, {0.5, b}, cfg, {});
    EXPECT_EQ(a.mode, c.mode);
    EXPECT_EQ(a.mode, (r >= 0.6 && b <= 0.15) ? Mode::Fast : Mode::Slow);
  }
}

TEST(Decide, HysteresisHoldsForOneTick)
{
  GateConfig cfg;  // hysteresis 2
  GateHistory h;
  auto d1 = decide(0.3, {0.8, 0.05}, cfg, h);
  EXPECT_EQ(d1.mode, Mode::Fast);
  EXPECT_EQ(d1.reason, Reason::Hysteresis);
  EXPECT_EQ(d1.base, Mode::Slow);
  h = h.after(d1);
  EXPECT_EQ(h.streak, 1);
  auto d2 = decide(0.3, {0.8, 0.05}, cfg, h);
  EXPECT_EQ(d2.mode, Mode::Slow);
  EXPECT_EQ(d2.reason, Reason::LowReward);
  h = h.after(d2);
  EXPECT_EQ(h.mode, Mode::Slow);
  EXPECT_EQ(h.streak, 0);
  // one good tick is not enough to return
  auto d3 = decide(0.9, {0.8, 0.05}, cfg, h);
  EXPECT_EQ(d3.mode, Mode::Slow);
  h = h.after(d3);
  // an interrupted streak starts over
  auto d4 = decide(0.3, {0.8, 0.05}, cfg, h);
  h = h.after(d4);
  EXPECT_EQ(h.streak, 0);
  EXPECT_EQ(decide(0.9, {0.8, 0.05}, cfg, h).mode, Mode::Slow);
}

TEST(GateConfig, Validation)
{
  GateConfig bad;
  bad.reward_threshold = 1.5;
  EXPECT_THROW(bad.validate(), Error);
  bad = {};
  bad.scale_threshold = 0.0;
  EXPECT_THROW(bad.validate(), Error);
  bad = {};
  bad.ema_alpha = 0.0;
  EXPECT_THROW(bad.validate(), Error);
  bad = {};
  bad.window = 0;
  EXPECT_THROW(bad.validate(), Error);
  GateConfig inf;
  inf.scale_threshold = std::numeric_limits<double>::infinity();
  EXPECT_NO_THROW(inf.validate());
}

TEST(UncertaintyGate, EmaAndWindow)
{
  GateConfig cfg;
  cfg.window = 3;
  cfg.ema_alpha = 0.5;
  UncertaintyGate g(cfg);
  EXPECT_EQ(g.observe(0.8).params.mu, 0.8);
  const auto d = g.observe(0.4);
  EXPECT_DOUBLE_EQ(d.params.mu, 0.6);
  EXPECT_DOUBLE_EQ(d.params.b, 0.2);
  g.observe(0.6);
  const auto e = g.observe(0.6);  // window now {0.4, 0.6, 0.6}, mu = 0.6
  EXPECT_DOUBLE_EQ(e.params.mu, 0.6);
  EXPECT_NEAR(e.params.b, 0.2 / 3.0, 1e-15);
}

TEST(CountSlow, MatchesIndependentReplay)
{
  const auto log = reward_log();
  for (double tr : {0.2, 0.5, 0.6, 0.8, 0.95}) {
    for (double tb : {0.02, 0.05, 0.15, 0.3}) {
      for (int hyst : {0, 1, 2, 3}) {
        GateConfig cfg;
        cfg.reward_threshold = tr;
        cfg.scale_threshold = tb;
        cfg.hysteresis_ticks = hyst;
        EXPECT_EQ(count_slow(log, cfg), brute_force_count(log, tr, tb, cfg.window, cfg.ema_alpha, hyst))
          << tr << " " << tb << " " << hyst;
      }
    }
  }
}

TEST(CountSlow, MonotoneInThresholds)
{
  const auto log = reward_log();
  const std::vector<double> tr{0.2, 0.4, 0.6, 0.8, 0.95};
  const std::vector<double> tb{0.02, 0.05, 0.1, 0.15, 0.3};
  std::vector<std::vector<int>> grid(tr.size(), std::vector<int>(tb.size()));
  for (std::size_t i = 0; i < tr.size(); ++i) {
    for (std::size_t j = 0; j < tb.size(); ++j) {
      GateConfig cfg;
      cfg.reward_threshold = tr[i];
      cfg.scale_threshold = tb[j];
      grid[i][j] = count_slow(log, cfg);
    }
  }
  for (std::size_t i = 0; i < tr.size(); ++i) {
    for (std::size_t j = 0; j < tb.size(); ++j) {
      if (i + 1 < tr.size()) {
        EXPECT_LE(grid[i][j], grid[i + 1][j]);
      }
      if (j + 1 < tb.size()) {
        EXPECT_GE(grid[i][j], grid[i][j + 1]);
      }
    }
  }
  EXPECT_LT(grid.front().back(), grid.back().front());
}

TEST(CountSlow, InfiniteScaleAndZeroRewardNeverFires)
{
  GateConfig cfg;
  cfg.reward_threshold = 0.0;
  cfg.scale_threshold = std::numeric_limits<double>::infinity();
  EXPECT_EQ(count_slow(reward_log(), cfg), 0);
}

}  // namespace
}  // namespace duoplan::gate
