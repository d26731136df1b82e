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

#include "duoplan/learn/token_policy.hpp"
#include "support.hpp"

#include <gtest/gtest.h>

#include <random>

namespace duoplan::learn
{
namespace
{

TokenPolicy random_policy(std::mt19937_64 & rng, std::size_t vocab = kPlanVocab)
{
  std::normal_distribution<double> d(0.0, 1.0);
  Matrix m(vocab, vocab);
  for (auto & v : m.data) {
    v = d(rng);
  }
  return TokenPolicy(m);
}

std::vector<int> random_plan(std::mt19937_64 & rng)
{
  std::uniform_int_distribution<int> len(1, 4);
  std::uniform_int_distribution<int> tok(0, kNumMetaActions - 1);
  std::vector<MetaAction> plan;
  const int n = len(rng);
  for (int i = 0; i < n; ++i) {
    plan.push_back(MetaAction::from_index(tok(rng)));
  }
  return plan_to_sequence(plan);
}

TEST(Mle, UniformPolicyCostsLogVocabPerToken)
{
  const TokenPolicy p(4);
  const std::vector<int> seq{0, 1, 3};
  EXPECT_NEAR(mle_loss(p, seq).loss, 3.0 * std::log(4.0), 1e-12);
}

TEST(Mle, PerfectFitCostsNothing)
{
  TokenPolicy p(4);
  const std::vector<int> seq{2, 0, 3};
  // context terminator -> 2, 2 -> 0, 0 -> 3
  p.logits()(3, 2) = 60.0;
  p.logits()(2, 0) = 60.0;
  p.logits()(0, 3) = 60.0;
  EXPECT_LT(mle_loss(p, seq).loss, 1e-20);
}

TEST(Rvlm, ZeroRewardGivesZeroLoss)
{
  std::mt19937_64 rng(2);
  const auto p = random_policy(rng);
  const auto seq = random_plan(rng);
  const auto l = rvlm_loss(p, seq, 0.0);
  EXPECT_EQ(l.loss, 0.0);
  for (double g : l.grad.data) {
    EXPECT_EQ(g, 0.0);
  }
}

TEST(Rvlm, MaskSkipsTerminator)
{
  const TokenPolicy p(4);
  const std::vector<int> seq{1, 3};
  EXPECT_NEAR(rvlm_loss(p, seq, 1.0).loss, std::log(4.0), 1e-12);
  EXPECT_NEAR(mle_loss(p, seq).loss, 2.0 * std::log(4.0), 1e-12);
}

TEST(Rvlm, LinearInReward)
{
  std::mt19937_64 rng(3);
  for (int trial = 0; trial < 20; ++trial) {
    const auto p = random_policy(rng);
    const auto seq = random_plan(rng);
    const auto unit = rvlm_loss(p, seq, 1.0);
    for (double r : {-0.7, 0.25, 2.0}) {
      const auto l = rvlm_loss(p, seq, r);
      EXPECT_EQ(l.loss, r * unit.loss);
      for (std::size_t i = 0; i < l.grad.data.size(); ++i) {
        EXPECT_EQ(l.grad.data[i], r * unit.grad.data[i]);
      }
    }
  }
}

TEST(Rvlm, FullMaskEqualsRewardTimesMle)
{
  std::mt19937_64 rng(4);
  for (int trial = 0; trial < 20; ++trial) {
    const auto p = random_policy(rng);
    const auto seq = random_plan(rng);
    const std::vector<bool> all(seq.size(), true);
    const auto rv = rvlm_loss(p, seq, 0.6, all);
    const auto mle = mle_loss(p, seq);
    EXPECT_NEAR(rv.loss, 0.6 * mle.loss, 1e-12);
    for (std::size_t i = 0; i < rv.grad.data.size(); ++i) {
      EXPECT_NEAR(rv.grad.data[i], 0.6 * mle.grad.data[i], 1e-12);
    }
  }
}

TEST(Rvlm, MaskLengthMustMatch)
{
  const TokenPolicy p(4);
  const std::vector<int> seq{1, 3};
  EXPECT_THROW(rvlm_loss(p, seq, 1.0, std::vector<bool>{true}), Error);
}

TEST(SlowLoss, AblationsReduceToComponents)
{
  std::mt19937_64 rng(5);
  const auto p = random_policy(rng);
  std::vector<Example> batch;
  for (int i = 0; i < 4; ++i) {
    batch.push_back({random_plan(rng), 0.25 * i});
  }
  double mle_mean = 0.0;
  for (const auto & ex : batch) {
    mle_mean += mle_loss(p, ex.tokens).loss / 4.0;
  }
  EXPECT_NEAR(slow_loss(p, batch, {1.0, 0.0}).loss, mle_mean, 1e-12);
  const auto none = slow_loss(p, batch, {0.0, 0.0});
  EXPECT_EQ(none.loss, 0.0);
  for (double g : none.grad.data) {
    EXPECT_EQ(g, 0.0);
  }
  EXPECT_THROW(slow_loss(p, batch, {-1.0, 0.0}), Error);
}

TEST(SlowLoss, GradientMatchesFiniteDifferences)
{
  std::mt19937_64 rng(6);
  std::uniform_real_distribution<double> reward(-1.0, 1.0);
  for (int trial = 0; trial < 20; ++trial) {
    const auto p = random_policy(rng);
    std::vector<Example> batch;
    for (int i = 0; i < 3; ++i) {
      batch.push_back({random_plan(rng), reward(rng)});
    }
    const LossWeights w{1.0, 0.5};
    const auto analytic = slow_loss(p, batch, w).grad.data;
    const std::size_t v = p.vocab();
    const auto numeric = testing::numeric_grad(
      [&](const std::vector<double> & x) { return slow_loss(TokenPolicy(Matrix(v, v, x)), batch, w).loss; },
      p.logits().data);
    EXPECT_LT(testing::max_rel_err(analytic, numeric), 1e-5) << trial;
  }
}

TEST(SlowLoss, MleGradientMatchesFiniteDifferences)
{
  std::mt19937_64 rng(7);
  for (int trial = 0; trial < 20; ++trial) {
    const auto p = random_policy(rng, 6);
    std::uniform_int_distribution<int> tok(0, 4);
    std::vector<int> seq{tok(rng), tok(rng), tok(rng), 5};
    const auto analytic = mle_loss(p, seq).grad.data;
    const auto numeric = testing::numeric_grad(
      [&](const std::vector<double> & x) { return mle_loss(TokenPolicy(Matrix(6, 6, x)), seq).loss; },
      p.logits().data);
    EXPECT_LT(testing::max_rel_err(analytic, numeric), 1e-5) << trial;
  }
}

TEST(SlowLoss, DescentStrictlyDecreases)
{
  std::mt19937_64 rng(8);
  TokenPolicy p(kPlanVocab);
  std::vector<Example> batch;
  for (int i = 0; i < 6; ++i) {
    batch.push_back({random_plan(rng), 0.5 + 0.1 * i});
  }
  const LossWeights w;
  double prev = slow_loss(p, batch, w).loss;
  for (int step = 0; step < 50; ++step) {
    train_step(p, batch, w, 0.1);
    const double now = slow_loss(p, batch, w).loss;
    EXPECT_LT(now, prev) << step;
    prev = now;
  }
}

TEST(SlowLoss, EmptyBatch)
{
  try {
    slow_loss(TokenPolicy{}, std::vector<Example>{}, LossWeights{});
    FAIL();
  } catch (const Error & e) {
    EXPECT_EQ(e.code(), ErrorCode::EmptySet);
  }
}

TEST(TokenPolicy, UnknownToken)
{
  const TokenPolicy p;
  for (int bad : {-1, static_cast<int>(kPlanVocab)}) {
    const std::vector<int> seq{bad, p.terminator()};
    try {
      mle_loss(p, seq);
      FAIL();
    } catch (const Error & e) {
      EXPECT_EQ(e.code(), ErrorCode::UnknownToken);
    }
  }
}

TEST(TokenPolicy, SequenceEncoding)
{
  const std::vector<MetaAction> plan{{Longitudinal::Decelerate, Lateral::KeepLane}, {Longitudinal::Stop, Lateral::KeepLane}};
  const auto seq = plan_to_sequence(plan);
  ASSERT_EQ(seq.size(), 3u);
  EXPECT_EQ(seq[0], plan[0].index());
  EXPECT_EQ(seq.back(), static_cast<int>(kPlanVocab) - 1);
  EXPECT_EQ(plan_mask(TokenPolicy{}, seq), (std::vector<bool>{true, true, false}));
}

TEST(TokenPolicy, WeightFileRoundTrip)
{
  std::mt19937_64 rng(9);
  const auto p = random_policy(rng);
  fusion::WeightFile f;
  p.export_to(f);
  const auto back = TokenPolicy::import_from(fusion::WeightFile::from_json(f.to_json()));
  EXPECT_EQ(back.logits(), p.logits());
  EXPECT_THROW(TokenPolicy::import_from(f, 5), Error);
}

}  // namespace
}  // namespace duoplan::learn
