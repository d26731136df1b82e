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

#ifndef DUOPLAN__FUSION__IB_HPP_
#define DUOPLAN__FUSION__IB_HPP_

#include "duoplan/core/types.hpp"
#include "duoplan/fusion/attention.hpp"

#include <cmath>
#include <span>
#include <vector>

namespace duoplan::fusion
{

inline constexpr double kLogVarClamp = 10.0;

/// Numerically stable log(1 + e^x).
inline double softplus(double x) { return std::max(x, 0.0) + std::log1p(std::exp(-std::abs(x))); }

inline double sigmoid(double x)
{
  if (x >= 0.0) {
    return 1.0 / (1.0 + std::exp(-x));
  }
  const double e = std::exp(x);
  return e / (1.0 + e);
}

/// Linear Gaussian encoder z -> (mean, log-variance) and a linear Bernoulli
/// decoder reading the latent mean.
struct IbModel
{
  Matrix w_mu;   // d_l x d_z
  std::vector<double> b_mu;
  Matrix w_lv;   // d_l x d_z
  std::vector<double> b_lv;
  Matrix w_dec;  // K x d_l
  std::vector<double> b_dec;
  double beta{1e-3};

  std::size_t dim_z() const { return w_mu.cols; }
  std::size_t dim_latent() const { return w_mu.rows; }
  std::size_t k() const { return w_dec.rows; }

  static IbModel seeded(std::size_t d_z, std::size_t d_l, std::size_t k, std::uint64_t seed, double beta = 1e-3)
  {
    IbModel m;
    m.w_mu = Matrix::seeded(d_l, d_z, seed, 1.0 / std::sqrt(static_cast<double>(d_z)));
    m.b_mu.assign(d_l, 0.0);
    m.w_lv = Matrix::seeded(d_l, d_z, seed + 1, 0.1 / std::sqrt(static_cast<double>(d_z)));
    m.b_lv.assign(d_l, 0.0);
    m.w_dec = Matrix::seeded(k, d_l, seed + 2, 1.0 / std::sqrt(static_cast<double>(d_l)));
    m.b_dec.assign(k, 0.0);
    m.beta = beta;
    return m;
  }

  std::size_t parameter_count() const
  {
    return w_mu.data.size() + b_mu.size() + w_lv.data.size() + b_lv.size() + w_dec.data.size() + b_dec.size();
  }

  /// All trainable parameters in a fixed order.
  std::vector<double> flat() const
  {
    std::vector<double> out;
    out.reserve(parameter_count());
    for (const auto * v : {&w_mu.data, &b_mu, &w_lv.data, &b_lv, &w_dec.data, &b_dec}) {
      out.insert(out.end(), v->begin(), v->end());
    }
    return out;
  }

  void set_flat(std::span<const double> p)
  {
    require(p.size() == parameter_count(), ErrorCode::ShapeMismatch, "parameter vector length mismatch");
    std::size_t off = 0;
    for (auto * v : {&w_mu.data, &b_mu, &w_lv.data, &b_lv, &w_dec.data, &b_dec}) {
      std::copy(p.begin() + static_cast<std::ptrdiff_t>(off), p.begin() + static_cast<std::ptrdiff_t>(off + v->size()),
                v->begin());
      off += v->size();
    }
  }

  void validate() const
  {
    require(w_lv.rows == w_mu.rows && w_lv.cols == w_mu.cols, ErrorCode::ShapeMismatch, "encoder shapes differ");
    require(b_mu.size() == w_mu.rows && b_lv.size() == w_lv.rows, ErrorCode::ShapeMismatch, "encoder bias shape");
    require(w_dec.cols == w_mu.rows && b_dec.size() == w_dec.rows, ErrorCode::ShapeMismatch, "decoder shape");
    require(beta >= 0.0, ErrorCode::InvalidArgument, "beta must be >= 0");
  }
};

struct IbForward
{
  std::vector<double> mean;
  std::vector<double> log_var;  // clamped
  std::vector<double> logits;   // K
};

inline IbForward ib_forward(std::span<const double> z, const IbModel & m)
{
  m.validate();
  require(z.size() == m.dim_z(), ErrorCode::ShapeMismatch, "feature vector length mismatch");
  IbForward f;
  f.mean = matvec(m.w_mu, z);
  f.log_var = matvec(m.w_lv, z);
  for (std::size_t j = 0; j < f.mean.size(); ++j) {
    f.mean[j] += m.b_mu[j];
    f.log_var[j] = std::clamp(f.log_var[j] + m.b_lv[j], -kLogVarClamp, kLogVarClamp);
  }
  f.logits = matvec(m.w_dec, f.mean);
  for (std::size_t k = 0; k < f.logits.size(); ++k) {
    f.logits[k] += m.b_dec[k];
  }
  return f;
}

/// Predicted planning-state bits (logit > 0).
inline PlanningState ib_predict(std::span<const double> z, const IbModel & m)
{
  const auto f = ib_forward(z, m);
  PlanningState s = PlanningState::zeros(f.logits.size());
  for (std::size_t k = 0; k < f.logits.size(); ++k) {
    s.bits[k] = f.logits[k] > 0.0;
  }
  return s;
}

struct IbLoss
{
  double loss{0.0};
  double nll{0.0};
  double kl{0.0};
  std::vector<double> grad;  // in IbModel::flat() order
};

/// Bernoulli negative log-likelihood of the target bits plus beta times the
/// closed-form KL of the encoder posterior to N(0, I).
inline IbLoss ib_loss(std::span<const double> z, const PlanningState & target, const IbModel & m)
{
  for (double v : z) {
    require(std::isfinite(v), ErrorCode::InvalidArgument, "feature vector is not finite");
  }
  require(target.size() == m.k(), ErrorCode::ShapeMismatch, "target has the wrong number of bits");
  const auto f = ib_forward(z, m);
  const std::size_t d_l = m.dim_latent();
  const std::size_t d_z = m.dim_z();
  const std::size_t k = m.k();

  IbLoss out;
  std::vector<double> g_logit(k);
  for (std::size_t i = 0; i < k; ++i) {
    const double y = target.bits[i] ? 1.0 : 0.0;
    // -log p(y | l) = softplus(l) - y * l
    out.nll += y > 0.5 ? softplus(-f.logits[i]) : softplus(f.logits[i]);
    g_logit[i] = sigmoid(f.logits[i]) - y;
  }
  std::vector<double> g_mean(d_l, 0.0);
  std::vector<double> g_lv(d_l, 0.0);
  for (std::size_t j = 0; j < d_l; ++j) {
    const double mu = f.mean[j];
    const double lv = f.log_var[j];
    out.kl += 0.5 * (std::exp(lv) + mu * mu - 1.0 - lv);
    for (std::size_t i = 0; i < k; ++i) {
      g_mean[j] += m.w_dec(i, j) * g_logit[i];
    }
    g_mean[j] += m.beta * mu;
    const double raw = dot(m.w_lv.row(j), z) + m.b_lv[j];
    const bool clamped = raw < -kLogVarClamp || raw > kLogVarClamp;
    g_lv[j] = clamped ? 0.0 : m.beta * 0.5 * (std::exp(lv) - 1.0);
  }
  out.loss = out.nll + m.beta * out.kl;

  out.grad.reserve(m.parameter_count());
  for (std::size_t j = 0; j < d_l; ++j) {
    for (std::size_t c = 0; c < d_z; ++c) {
      out.grad.push_back(g_mean[j] * z[c]);
    }
  }
  out.grad.insert(out.grad.end(), g_mean.begin(), g_mean.end());
  for (std::size_t j = 0; j < d_l; ++j) {
    for (std::size_t c = 0; c < d_z; ++c) {
      out.grad.push_back(g_lv[j] * z[c]);
    }
  }
  out.grad.insert(out.grad.end(), g_lv.begin(), g_lv.end());
  for (std::size_t i = 0; i < k; ++i) {
    for (std::size_t j = 0; j < d_l; ++j) {
      out.grad.push_back(g_logit[i] * f.mean[j]);
    }
  }
  out.grad.insert(out.grad.end(), g_logit.begin(), g_logit.end());
  return out;
}

/// One plain gradient-descent step; returns the loss before the update.
inline double ib_sgd_step(std::span<const double> z, const PlanningState & target, IbModel & m, double lr)
{
  const auto l = ib_loss(z, target, m);
  auto p = m.flat();
  for (std::size_t i = 0; i < p.size(); ++i) {
    p[i] -= lr * l.grad[i];
  }
  m.set_flat(p);
  return l.loss;
}

}  // namespace duoplan::fusion

#endif  // DUOPLAN__FUSION__IB_HPP_
