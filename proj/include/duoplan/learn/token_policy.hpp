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

#ifndef DUOPLAN__LEARN__TOKEN_POLICY_HPP_
#define DUOPLAN__LEARN__TOKEN_POLICY_HPP_

#include "duoplan/core/types.hpp"
#include "duoplan/fusion/attention.hpp"
#include "duoplan/fusion/weights.hpp"

#include <algorithm>
#include <cmath>
#include <span>
#include <vector>

namespace duoplan::learn
{

using fusion::Matrix;

/// 20 meta-action tokens followed by the terminator.
inline constexpr std::size_t kPlanVocab = kNumMetaActions + 1;

/// Order-1 categorical policy: one logits row per previous token. The last
/// token of the vocabulary is the terminator and also the context of the
/// first position.
class TokenPolicy
{
public:
  explicit TokenPolicy(std::size_t vocab = kPlanVocab) : logits_(vocab, vocab, 0.0)
  {
    require(vocab >= 2, ErrorCode::InvalidArgument, "vocabulary needs a terminator and one token");
  }

  explicit TokenPolicy(Matrix logits) : logits_(std::move(logits))
  {
    require(logits_.rows == logits_.cols && logits_.rows >= 2, ErrorCode::ShapeMismatch,
            "policy table must be square with vocab >= 2");
    require(logits_.all_finite(), ErrorCode::InvalidArgument, "policy logits must be finite");
  }

  std::size_t vocab() const { return logits_.cols; }
  int terminator() const { return static_cast<int>(vocab()) - 1; }
  const Matrix & logits() const { return logits_; }
  Matrix & logits() { return logits_; }

  std::vector<double> probabilities(int context) const
  {
    check(context);
    return fusion::softmax(logits_.row(static_cast<std::size_t>(context)));
  }

  double log_prob(int token, int context) const
  {
    check(token);
    const auto row = logits_.row(static_cast<std::size_t>(check(context)));
    const double m = *std::max_element(row.begin(), row.end());
    double z = 0.0;
    for (double l : row) {
      z += std::exp(l - m);
    }
    return row[static_cast<std::size_t>(token)] - m - std::log(z);
  }

  int check(int token) const
  {
    require(token >= 0 && token < static_cast<int>(vocab()), ErrorCode::UnknownToken,
            "token " + std::to_string(token) + " outside a vocabulary of " + std::to_string(vocab()));
    return token;
  }

  /// Weight-file export; the table is stored as "token_policy.logits".
  void export_to(fusion::WeightFile & file) const { file.put("token_policy.logits", logits_); }

  static TokenPolicy import_from(const fusion::WeightFile & file, std::size_t vocab = kPlanVocab)
  {
    return TokenPolicy(file.matrix("token_policy.logits", vocab, vocab));
  }

private:
  Matrix logits_;
};

inline int token_of(const MetaAction & a) { return a.index(); }

/// Plan tokens followed by the terminator.
inline std::vector<int> plan_to_sequence(std::span<const MetaAction> plan)
{
  std::vector<int> seq;
  seq.reserve(plan.size() + 1);
  for (const auto & a : plan) {
    seq.push_back(token_of(a));
  }
  seq.push_back(static_cast<int>(kPlanVocab) - 1);
  return seq;
}

struct LossGrad
{
  double loss{0.0};
  Matrix grad;  // same shape as the logits table
};

namespace detail
{

/// -weight * sum log p over positions where mask is set; the gradient is
/// accumulated per context row as weight * (softmax - onehot).
inline LossGrad weighted_nll(
  const TokenPolicy & policy, std::span<const int> seq, const std::vector<bool> & mask, double weight)
{
  const std::size_t v = policy.vocab();
  LossGrad out{0.0, Matrix(v, v, 0.0)};
  int ctx = policy.terminator();
  for (std::size_t i = 0; i < seq.size(); ++i) {
    const int tok = policy.check(seq[i]);
    if (mask.empty() || mask[i]) {
      out.loss -= policy.log_prob(tok, ctx);
      const auto p = policy.probabilities(ctx);
      for (std::size_t j = 0; j < v; ++j) {
        out.grad(static_cast<std::size_t>(ctx), j) += p[j];
      }
      out.grad(static_cast<std::size_t>(ctx), static_cast<std::size_t>(tok)) -= 1.0;
    }
    ctx = tok;
  }
  // scaled once at the end: the result is exactly weight times the unit loss
  out.loss *= weight;
  for (auto & g : out.grad.data) {
    g *= weight;
  }
  return out;
}

}  // namespace detail

/// -sum log p(token | previous token) over the whole sequence.
inline LossGrad mle_loss(const TokenPolicy & policy, std::span<const int> seq)
{
  static const std::vector<bool> all;
  return detail::weighted_nll(policy, seq, all, 1.0);
}

/// Supervision mask selecting plan tokens (everything but the terminator).
inline std::vector<bool> plan_mask(const TokenPolicy & policy, std::span<const int> seq)
{
  std::vector<bool> mask(seq.size());
  for (std::size_t i = 0; i < seq.size(); ++i) {
    mask[i] = seq[i] != policy.terminator();
  }
  return mask;
}

/// -reward * sum log p over masked positions.
inline LossGrad rvlm_loss(
  const TokenPolicy & policy, std::span<const int> seq, double reward, const std::vector<bool> & mask)
{
  require(mask.size() == seq.size(), ErrorCode::ShapeMismatch, "mask length must equal sequence length");
  return detail::weighted_nll(policy, seq, mask, reward);
}

inline LossGrad rvlm_loss(const TokenPolicy & policy, std::span<const int> seq, double reward)
{
  const auto mask = plan_mask(policy, seq);
  return rvlm_loss(policy, seq, reward, mask);
}

struct LossWeights
{
  double lambda_mle{1.0};
  double lambda_rvlm{0.1};

  void validate() const
  {
    require(lambda_mle >= 0.0 && lambda_rvlm >= 0.0, ErrorCode::InvalidArgument, "loss weights must be >= 0");
  }
};

struct Example
{
  std::vector<int> tokens;
  double reward{0.0};
};

/// lambda_mle * mean(mle) + lambda_rvlm * mean(rvlm) over the batch.
inline LossGrad slow_loss(const TokenPolicy & policy, std::span<const Example> batch, const LossWeights & w)
{
  w.validate();
  require(!batch.empty(), ErrorCode::EmptySet, "batch is empty");
  const std::size_t v = policy.vocab();
  LossGrad out{0.0, Matrix(v, v, 0.0)};
  const double n = static_cast<double>(batch.size());
  for (const auto & ex : batch) {
    const auto mle = mle_loss(policy, ex.tokens);
    const auto rv = rvlm_loss(policy, ex.tokens, ex.reward);
    out.loss += (w.lambda_mle * mle.loss + w.lambda_rvlm * rv.loss) / n;
    for (std::size_t i = 0; i < out.grad.data.size(); ++i) {
      out.grad.data[i] += (w.lambda_mle * mle.grad.data[i] + w.lambda_rvlm * rv.grad.data[i]) / n;
    }
  }
  return out;
}

/// One gradient-descent step on slow_loss; returns the loss before the step.
inline double train_step(TokenPolicy & policy, std::span<const Example> batch, const LossWeights & w, double lr)
{
  const auto l = slow_loss(policy, batch, w);
  auto & table = policy.logits();
  for (std::size_t i = 0; i < table.data.size(); ++i) {
    table.data[i] -= lr * l.grad.data[i];
  }
  return l.loss;
}

}  // namespace duoplan::learn

#endif  // DUOPLAN__LEARN__TOKEN_POLICY_HPP_
