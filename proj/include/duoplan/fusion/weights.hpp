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

#ifndef DUOPLAN__FUSION__WEIGHTS_HPP_
#define DUOPLAN__FUSION__WEIGHTS_HPP_

#include "duoplan/core/serialization.hpp"
#include "duoplan/fusion/attention.hpp"
#include "duoplan/fusion/features.hpp"
#include "duoplan/fusion/ib.hpp"

#include <fstream>
#include <map>
#include <sstream>
#include <string>

namespace duoplan::fusion
{

inline constexpr int kWeightFileVersion = 1;
inline constexpr std::size_t kProjDim = 16;  // d_k = d_v
inline constexpr std::size_t kLatentDim = 8;

/// Named tensors as stored on disk:
/// {"version": 1, "tensors": {name: {"shape": [r, c], "data": [...]}}}.
class WeightFile
{
public:
  void put(const std::string & name, const Matrix & m) { tensors_[name] = m; }

  void put(const std::string & name, const std::vector<double> & v) { tensors_[name] = Matrix(1, v.size(), v); }

  bool contains(const std::string & name) const { return tensors_.count(name) != 0; }

  const Matrix & matrix(const std::string & name, std::size_t rows, std::size_t cols) const
  {
    const auto it = tensors_.find(name);
    require(it != tensors_.end(), ErrorCode::ParseError, "weight file lacks tensor '" + name + "'");
    require(it->second.rows == rows && it->second.cols == cols, ErrorCode::ShapeMismatch,
            "tensor '" + name + "' has shape " + std::to_string(it->second.rows) + "x" +
              std::to_string(it->second.cols) + ", expected " + std::to_string(rows) + "x" + std::to_string(cols));
    return it->second;
  }

  std::vector<double> vector(const std::string & name, std::size_t n) const { return matrix(name, 1, n).data; }

  const std::map<std::string, Matrix> & tensors() const { return tensors_; }

  Json to_json() const
  {
    Json t = Json::object();
    for (const auto & [name, m] : tensors_) {
      t[name] = {{"shape", {m.rows, m.cols}}, {"data", m.data}};
    }
    return {{"version", kWeightFileVersion}, {"tensors", t}};
  }

  static WeightFile from_json(const Json & j)
  {
    require(j.is_object() && j.contains("version"), ErrorCode::ParseError, "weight file has no version field");
    require(j["version"].is_number_integer() && j["version"].get<int>() == kWeightFileVersion, ErrorCode::ParseError,
            "unsupported weight file version");
    require(j.contains("tensors") && j["tensors"].is_object(), ErrorCode::ParseError, "weight file has no tensors");
    WeightFile w;
    for (const auto & [name, t] : j["tensors"].items()) {
      require(t.contains("shape") && t["shape"].is_array() && t["shape"].size() == 2, ErrorCode::ParseError,
              "tensor '" + name + "' needs a 2-d shape");
      require(t.contains("data") && t["data"].is_array(), ErrorCode::ParseError, "tensor '" + name + "' has no data");
      const auto rows = t["shape"][0].get<std::size_t>();
      const auto cols = t["shape"][1].get<std::size_t>();
      Matrix m(rows, cols, t["data"].get<std::vector<double>>());
      require(m.all_finite(), ErrorCode::ParseError, "tensor '" + name + "' is not finite");
      w.tensors_[name] = std::move(m);
    }
    return w;
  }

  void save(const std::string & path) const
  {
    std::ofstream out(path);
    require(static_cast<bool>(out), ErrorCode::InvalidArgument, "cannot write weight file " + path);
    out << to_json().dump(1) << '\n';
  }

  static WeightFile load(const std::string & path)
  {
    std::ifstream in(path);
    require(static_cast<bool>(in), ErrorCode::ParseError, "cannot open weight file " + path);
    std::stringstream ss;
    ss << in.rdbuf();
    Json j;
    try {
      j = Json::parse(ss.str());
    } catch (const std::exception & e) {
      throw Error(ErrorCode::ParseError, std::string("weight file is not JSON: ") + e.what());
    }
    return from_json(j);
  }

private:
  std::map<std::string, Matrix> tensors_;
};

/// Everything the fusion path reads at inference time.
struct FusionWeights
{
  Matrix action_embeddings;  // N_A x d_A
  ProjectionSet projections;
  IbModel ib;

  static FusionWeights seeded(std::uint64_t seed)
  {
    FusionWeights w;
    const double s = 1.0 / std::sqrt(static_cast<double>(kTokenDim));
    w.action_embeddings = Matrix::seeded(kNumMetaActions, kTokenDim, seed, 1.0);
    w.projections.w_q = Matrix::seeded(kProjDim, kTokenDim, seed + 11, s);
    w.projections.w_k = Matrix::seeded(kProjDim, kTokenDim, seed + 12, s);
    w.projections.w_v = Matrix::seeded(kProjDim, kTokenDim, seed + 13, s);
    w.ib = IbModel::seeded(kFeatureDim, kLatentDim, default_planning_queries().size(), seed + 20);
    return w;
  }

  WeightFile to_file() const
  {
    WeightFile f;
    f.put("action_embeddings", action_embeddings);
    f.put("w_q", projections.w_q);
    f.put("w_k", projections.w_k);
    f.put("w_v", projections.w_v);
    f.put("ib.w_mu", ib.w_mu);
    f.put("ib.b_mu", ib.b_mu);
    f.put("ib.w_lv", ib.w_lv);
    f.put("ib.b_lv", ib.b_lv);
    f.put("ib.w_dec", ib.w_dec);
    f.put("ib.b_dec", ib.b_dec);
    f.put("ib.beta", std::vector<double>{ib.beta});
    return f;
  }

  static FusionWeights from_file(const WeightFile & f)
  {
    FusionWeights w;
    const std::size_t k = default_planning_queries().size();
    w.action_embeddings = f.matrix("action_embeddings", kNumMetaActions, kTokenDim);
    w.projections.w_q = f.matrix("w_q", kProjDim, kTokenDim);
    w.projections.w_k = f.matrix("w_k", kProjDim, kTokenDim);
    w.projections.w_v = f.matrix("w_v", kProjDim, kTokenDim);
    w.ib.w_mu = f.matrix("ib.w_mu", kLatentDim, kFeatureDim);
    w.ib.b_mu = f.vector("ib.b_mu", kLatentDim);
    w.ib.w_lv = f.matrix("ib.w_lv", kLatentDim, kFeatureDim);
    w.ib.b_lv = f.vector("ib.b_lv", kLatentDim);
    w.ib.w_dec = f.matrix("ib.w_dec", k, kLatentDim);
    w.ib.b_dec = f.vector("ib.b_dec", k);
    w.ib.beta = f.vector("ib.beta", 1).front();
    w.ib.validate();
    return w;
  }
};

}  // namespace duoplan::fusion

#endif  // DUOPLAN__FUSION__WEIGHTS_HPP_
