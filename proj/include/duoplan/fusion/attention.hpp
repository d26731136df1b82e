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

#ifndef DUOPLAN__FUSION__ATTENTION_HPP_
#define DUOPLAN__FUSION__ATTENTION_HPP_

#include "duoplan/core/error.hpp"

#include <algorithm>
#include <cmath>
#include <random>
#include <span>
#include <string>
#include <vector>

namespace duoplan::fusion
{

/// Dense row-major matrix.
struct Matrix
{
  std::size_t rows{0};
  std::size_t cols{0};
  std::vector<double> data;

  Matrix() = default;
  Matrix(std::size_t r, std::size_t c, double fill = 0.0) : rows(r), cols(c), data(r * c, fill) {}
  Matrix(std::size_t r, std::size_t c, std::vector<double> values) : rows(r), cols(c), data(std::move(values))
  {
    require(data.size() == r * c, ErrorCode::ShapeMismatch, "matrix data does not match its shape");
  }

  double & operator()(std::size_t r, std::size_t c) { return data[r * cols + c]; }
  double operator()(std::size_t r, std::size_t c) const { return data[r * cols + c]; }

  std::span<const double> row(std::size_t r) const { return {data.data() + r * cols, cols}; }

  bool all_finite() const
  {
    return std::all_of(data.begin(), data.end(), [](double v) { return std::isfinite(v); });
  }

  bool operator==(const Matrix &) const = default;

  /// Entries drawn from N(0, scale^2) with a fixed seed.
  static Matrix seeded(std::size_t r, std::size_t c, std::uint64_t seed, double scale)
  {
    std::mt19937_64 rng(seed);
    std::normal_distribution<double> dist(0.0, scale);
    Matrix m(r, c);
    for (auto & v : m.data) {
      v = dist(rng);
    }
    return m;
  }
};

/// y = M x
inline std::vector<double> matvec(const Matrix & m, std::span<const double> x)
{
  require(m.cols == x.size(), ErrorCode::ShapeMismatch,
          "matvec: matrix has " + std::to_string(m.cols) + " columns, vector has " + std::to_string(x.size()));
  std::vector<double> y(m.rows, 0.0);
  for (std::size_t r = 0; r < m.rows; ++r) {
    double acc = 0.0;
    for (std::size_t c = 0; c < m.cols; ++c) {
      acc += m(r, c) * x[c];
    }
    y[r] = acc;
  }
  return y;
}

inline double dot(std::span<const double> a, std::span<const double> b)
{
  require(a.size() == b.size(), ErrorCode::ShapeMismatch, "dot: length mismatch");
  double acc = 0.0;
  for (std::size_t i = 0; i < a.size(); ++i) {
    acc += a[i] * b[i];
  }
  return acc;
}

namespace detail
{

/// Sum in ascending order, so any permutation of the terms gives the same bits.
inline double ordered_sum(std::vector<double> terms)
{
  std::sort(terms.begin(), terms.end());
  double s = 0.0;
  for (double t : terms) {
    s += t;
  }
  return s;
}

}  // namespace detail

/// Max-shifted softmax.
inline std::vector<double> softmax(std::span<const double> logits)
{
  require(!logits.empty(), ErrorCode::EmptySet, "softmax of an empty vector");
  const double m = *std::max_element(logits.begin(), logits.end());
  std::vector<double> out(logits.size());
  for (std::size_t i = 0; i < logits.size(); ++i) {
    out[i] = std::exp(logits[i] - m);
  }
  const double z = detail::ordered_sum(out);
  for (auto & v : out) {
    v /= z;
  }
  return out;
}

struct ProjectionSet
{
  Matrix w_q;  // d_k x d_A
  Matrix w_k;  // d_k x d_A
  Matrix w_v;  // d_v x d_A

  void validate(std::size_t d_a) const
  {
    require(w_q.cols == d_a && w_k.cols == d_a && w_v.cols == d_a, ErrorCode::ShapeMismatch,
            "projection column count must equal the embedding dimension");
    require(w_q.rows == w_k.rows, ErrorCode::ShapeMismatch, "W_Q and W_K must share d_k");
    require(w_q.rows > 0 && w_v.rows > 0, ErrorCode::ShapeMismatch, "projection rows must be > 0");
  }
};

struct AttentionResult
{
  std::vector<double> output;   // d_v
  std::vector<double> weights;  // N_A
  std::vector<double> logits;   // N_A, before softmax
};

/// Single-head scaled dot-product attention of one ego query over the action
/// embedding rows.
inline AttentionResult cross_attend(std::span<const double> ego, const Matrix & embeddings, const ProjectionSet & proj)
{
  require(embeddings.rows > 0, ErrorCode::ShapeMismatch, "action embedding table is empty");
  require(ego.size() == embeddings.cols, ErrorCode::ShapeMismatch,
          "ego token has " + std::to_string(ego.size()) + " entries, embeddings have " +
            std::to_string(embeddings.cols));
  proj.validate(embeddings.cols);
  const auto q = matvec(proj.w_q, ego);
  const double scale = 1.0 / std::sqrt(static_cast<double>(proj.w_q.rows));
  AttentionResult r;
  r.logits.resize(embeddings.rows);
  std::vector<std::vector<double>> values(embeddings.rows);
  for (std::size_t i = 0; i < embeddings.rows; ++i) {
    const auto k = matvec(proj.w_k, embeddings.row(i));
    r.logits[i] = dot(q, k) * scale;
    values[i] = matvec(proj.w_v, embeddings.row(i));
  }
  r.weights = softmax(r.logits);
  r.output.assign(proj.w_v.rows, 0.0);
  std::vector<double> terms(embeddings.rows);
  for (std::size_t c = 0; c < r.output.size(); ++c) {
    for (std::size_t i = 0; i < embeddings.rows; ++i) {
      terms[i] = r.weights[i] * values[i][c];
    }
    r.output[c] = detail::ordered_sum(terms);
  }
  return r;
}

}  // namespace duoplan::fusion

#endif  // DUOPLAN__FUSION__ATTENTION_HPP_
