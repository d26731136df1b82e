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

#ifndef DUOPLAN_TESTS_ORACLES_HPP_
#define DUOPLAN_TESTS_ORACLES_HPP_

// Independent reference computations shared by the unit tests and the
// acceptance binary.

#include "duoplan/gate/gate.hpp"
#include "duoplan/reward/reward.hpp"
#include "support.hpp"

#include <algorithm>
#include <cmath>
#include <random>
#include <span>
#include <vector>

namespace duoplan::testing
{

inline double neg_ll(std::span<const double> r, double mu, double b) { return -gate::log_likelihood(r, {mu, b}); }

/// Golden-section minimizer of a unimodal function on [lo, hi].
template <typename F>
double golden_min(F f, double lo, double hi, double tol = 1e-12)
{
  const double g = (std::sqrt(5.0) - 1.0) / 2.0;
  double a = lo, b = hi;
  double c = b - g * (b - a), d = a + g * (b - a);
  double fc = f(c), fd = f(d);
  while (b - a > tol) {
    if (fc < fd) {
      b = d;
      d = c;
      fd = fc;
      c = b - g * (b - a);
      fc = f(c);
    } else {
      a = c;
      c = d;
      fc = fd;
      d = a + g * (b - a);
      fd = f(d);
    }
  }
  return 0.5 * (a + b);
}

/// Laplace draws by inverse CDF.
inline std::vector<double> laplace_sample(std::mt19937_64 & rng, double mu, double b, int n)
{
  std::uniform_real_distribution<double> u(-0.5, 0.5);
  std::vector<double> out;
  for (int i = 0; i < n; ++i) {
    const double x = u(rng);
    out.push_back(mu - b * (x < 0 ? -1.0 : 1.0) * std::log(1.0 - 2.0 * std::abs(x)));
  }
  return out;
}

/// A fixed 500-tick log mixing calm stretches, dips and noisy bursts.
inline std::vector<double> reward_log()
{
  std::mt19937_64 rng(2024);
  std::normal_distribution<double> calm(0.85, 0.03);
  std::normal_distribution<double> noisy(0.6, 0.2);
  std::vector<double> out;
  for (int t = 0; t < 500; ++t) {
    const int phase = (t / 25) % 4;
    double r = phase == 2 ? noisy(rng) : calm(rng);
    if (phase == 3 && t % 25 < 5) {
      r -= 0.4;
    }
    out.push_back(std::clamp(r, 0.0, 1.0));
  }
  return out;
}

/// Independent replay: recomputes the EMA, the window MAD and the debounced mode.
inline int brute_force_count(const std::vector<double> & log, double tau_r, double tau_b, int window, double alpha, int hyst)
{
  double mu = 0.0;
  bool slow_mode = false;
  int streak = 0;
  int count = 0;
  for (std::size_t t = 0; t < log.size(); ++t) {
    mu = t == 0 ? log[0] : alpha * log[t] + (1.0 - alpha) * mu;
    const std::size_t start = t + 1 > static_cast<std::size_t>(window) ? t + 1 - window : 0;
    double mad = 0.0;
    for (std::size_t i = start; i <= t; ++i) {
      mad += std::abs(log[i] - mu);
    }
    mad = std::max(mad / static_cast<double>(t + 1 - start), 1e-6);
    const bool want_slow = !(log[t] >= tau_r && mad <= tau_b);
    if (want_slow == slow_mode) {
      streak = 0;
    } else if (streak + 1 >= hyst) {
      slow_mode = want_slow;
      streak = 0;
    } else {
      ++streak;
    }
    count += slow_mode ? 1 : 0;
  }
  return count;
}

inline Scene fuzz_scene(std::mt19937_64 & rng)
{
  std::uniform_real_distribution<double> speed(0.0, 14.0);
  std::uniform_real_distribution<double> ax(-10.0, 60.0);
  std::uniform_real_distribution<double> ay(-8.0, 8.0);
  std::uniform_real_distribution<double> ah(-3.14, 3.14);
  std::uniform_int_distribution<int> count(0, 5);
  Scene s = open_road(speed(rng));
  const int n = count(rng);
  for (int i = 0; i < n; ++i) {
    auto a = car("a" + std::to_string(i), ax(rng), ay(rng), speed(rng) * 0.5, ah(rng));
    if (i % 3 == 2) {
      a.kind = AgentKind::Static;
    }
    s.agents.push_back(a);
  }
  return s;
}

/// Independent argmax: collect (total, id) and take the lexicographic best.
inline int brute_force_best(const fastplan::CandidateSet & set, const Scene & scene, const reward::RewardWeights & w)
{
  int best_id = -1;
  double best_total = -1.0;
  for (const auto & c : set.candidates) {
    const double t = reward::score(c.trajectory, scene, w).total;
    if (best_id < 0 || t > best_total || (t == best_total && c.id < best_id)) {
      best_id = c.id;
      best_total = t;
    }
  }
  return best_id;
}

}  // namespace duoplan::testing

#endif  // DUOPLAN_TESTS_ORACLES_HPP_
