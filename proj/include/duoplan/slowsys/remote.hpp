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

#ifndef DUOPLAN__SLOWSYS__REMOTE_HPP_
#define DUOPLAN__SLOWSYS__REMOTE_HPP_

#include "duoplan/core/serialization.hpp"
#include "duoplan/core/types.hpp"
#include "duoplan/slowsys/prompts.hpp"

#include <httplib.h>

#include <chrono>
#include <future>
#include <memory>
#include <mutex>
#include <optional>
#include <string>
#include <vector>

namespace duoplan::slowsys
{

/// One prompt per QA category, in category order.
inline const std::vector<std::string> & qa_template()
{
  static const std::vector<std::string> prompts = {
    "Scene analysis: describe conditions and traffic density around the ego vehicle.",
    "Traffic signs: list the lights, stop lines and speed limits that apply ahead.",
    "Key objects: name the agents that matter for the next seconds and how they will move.",
    "Planning state: answer each yes/no query with 1 or 0.",
    "High-level plan: give the next meta-actions as (longitudinal, lateral) pairs and justify them."};
  return prompts;
}

struct RemoteRequest
{
  std::string scene_id;
  BevPrompt bev;
  VisualPrompt visual;
  std::vector<std::string> qa;
  int k{8};
};

inline Json to_json(const RemoteRequest & r)
{
  Json vis = Json::array();
  for (const auto & p : r.visual.points) {
    vis.push_back(Json::array({p.u, p.v, p.in_frame ? 1 : 0}));
  }
  return {{"scene_id", r.scene_id}, {"bev_prompt", r.bev.text()}, {"visual_prompt", vis},
          {"qa_template", r.qa}, {"k", r.k}};
}

/// Validates a response document and converts it into feedback.
/// Throws MalformedResponse on any schema violation.
inline SlowFeedback parse_remote_response(const std::string & body, int k)
{
  Json j;
  try {
    j = Json::parse(body);
  } catch (const std::exception & e) {
    throw Error(ErrorCode::MalformedResponse, std::string("response is not JSON: ") + e.what());
  }
  auto fail = [](const std::string & what) { throw Error(ErrorCode::MalformedResponse, what); };
  if (!j.is_object()) {
    fail("response must be an object");
  }
  if (!j.contains("planning_state") || !j["planning_state"].is_array()) {
    fail("planning_state missing");
  }
  const auto & bits = j["planning_state"];
  if (static_cast<int>(bits.size()) != k) {
    fail("planning_state has " + std::to_string(bits.size()) + " bits, expected " + std::to_string(k));
  }
  SlowFeedback f;
  f.planning_state = PlanningState::zeros(static_cast<std::size_t>(k));
  for (std::size_t i = 0; i < bits.size(); ++i) {
    if (!bits[i].is_number_integer() || (bits[i].get<int>() != 0 && bits[i].get<int>() != 1)) {
      fail("planning_state entries must be 0 or 1");
    }
    f.planning_state.bits[i] = bits[i].get<int>() == 1;
  }
  if (!j.contains("plan") || !j["plan"].is_array() || j["plan"].empty()) {
    fail("plan must be a non-empty array");
  }
  for (const auto & a : j["plan"]) {
    try {
      f.plan.push_back(meta_action_from_json(a));
    } catch (const Error & e) {
      fail(std::string("plan entry outside the meta-action vocabulary: ") + e.what());
    }
  }
  if (!j.contains("description") || !j["description"].is_string()) {
    fail("description must be a string");
  }
  if (!j.contains("analysis") || !j["analysis"].is_string()) {
    fail("analysis must be a string");
  }
  f.scene_description = j["description"].get<std::string>();
  f.analysis = j["analysis"].get<std::string>();
  f.source = FeedbackSource::Remote;
  return f;
}

enum class RemoteStatus { Ok, Timeout, Malformed, TransportError };

constexpr std::string_view to_string(RemoteStatus s)
{
  switch (s) {
    case RemoteStatus::Ok: return "ok";
    case RemoteStatus::Timeout: return "timeout";
    case RemoteStatus::Malformed: return "malformed";
    case RemoteStatus::TransportError: return "transport_error";
  }
  return "ok";
}

struct RemoteResult
{
  RemoteStatus status{RemoteStatus::Ok};
  std::optional<SlowFeedback> feedback;
  std::string message;
  double elapsed{0.0};
};

struct Endpoint
{
  std::string host;
  int port{80};
  std::string path{"/"};

  /// Accepts http://host[:port][/path].
  static Endpoint parse(const std::string & url)
  {
    const std::string scheme = "http://";
    require(url.rfind(scheme, 0) == 0, ErrorCode::ConfigError, "endpoint must start with http://: " + url);
    Endpoint e;
    std::string rest = url.substr(scheme.size());
    const auto slash = rest.find('/');
    if (slash != std::string::npos) {
      e.path = rest.substr(slash);
      rest = rest.substr(0, slash);
    }
    const auto colon = rest.find(':');
    if (colon != std::string::npos) {
      try {
        e.port = std::stoi(rest.substr(colon + 1));
      } catch (const std::exception &) {
        throw Error(ErrorCode::ConfigError, "endpoint port is not a number: " + url);
      }
      rest = rest.substr(0, colon);
    }
    require(!rest.empty(), ErrorCode::ConfigError, "endpoint host is empty: " + url);
    e.host = rest;
    return e;
  }
};

/// JSON-over-HTTP client for an external reasoning service. Every call is
/// bounded by the configured timeout; a call that overruns is abandoned and
/// reaped in the background.
class RemoteSlowClient
{
public:
  RemoteSlowClient(const std::string & endpoint, double timeout_s)
  : endpoint_(Endpoint::parse(endpoint)), timeout_(timeout_s)
  {
    require(timeout_s > 0.0, ErrorCode::ConfigError, "remote timeout must be > 0");
  }

  RemoteSlowClient(const RemoteSlowClient &) = delete;
  RemoteSlowClient & operator=(const RemoteSlowClient &) = delete;

  ~RemoteSlowClient()
  {
    std::lock_guard lock(mutex_);
    for (auto & f : abandoned_) {
      f.wait();
    }
  }

  double timeout() const { return timeout_; }

  RemoteResult request(const RemoteRequest & req)
  {
    reap();
    const auto start = std::chrono::steady_clock::now();
    auto fut = std::async(std::launch::async, [ep = endpoint_, body = to_json(req).dump(), t = timeout_, k = req.k] {
      return perform(ep, body, t, k);
    });
    const auto budget = std::chrono::duration<double>(timeout_);
    if (fut.wait_for(budget) != std::future_status::ready) {
      {
        std::lock_guard lock(mutex_);
        abandoned_.push_back(std::move(fut));
      }
      RemoteResult r;
      r.status = RemoteStatus::Timeout;
      r.message = "no response within " + std::to_string(timeout_) + " s";
      r.elapsed = std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
      return r;
    }
    RemoteResult r = fut.get();
    r.elapsed = std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
    if (r.feedback) {
      r.feedback->latency = r.elapsed;
    }
    return r;
  }

private:
  static RemoteResult perform(const Endpoint & ep, const std::string & body, double timeout, int k)
  {
    RemoteResult r;
    httplib::Client cli(ep.host, ep.port);
    const auto sec = static_cast<time_t>(timeout);
    const auto usec = static_cast<time_t>((timeout - static_cast<double>(sec)) * 1e6);
    cli.set_connection_timeout(sec, usec);
    cli.set_read_timeout(sec, usec);
    cli.set_write_timeout(sec, usec);
    auto res = cli.Post(ep.path, body, "application/json");
    if (!res) {
      r.status = res.error() == httplib::Error::Read ? RemoteStatus::Timeout : RemoteStatus::TransportError;
      r.message = httplib::to_string(res.error());
      return r;
    }
    if (res->status != 200) {
      r.status = RemoteStatus::Malformed;
      r.message = "HTTP status " + std::to_string(res->status);
      return r;
    }
    try {
      r.feedback = parse_remote_response(res->body, k);
    } catch (const Error & e) {
      r.status = RemoteStatus::Malformed;
      r.message = e.what();
    }
    return r;
  }

  void reap()
  {
    std::lock_guard lock(mutex_);
    std::erase_if(abandoned_, [](std::future<RemoteResult> & f) {
      return f.wait_for(std::chrono::seconds(0)) == std::future_status::ready;
    });
  }

  Endpoint endpoint_;
  double timeout_;
  std::mutex mutex_;
  std::vector<std::future<RemoteResult>> abandoned_;
};

}  // namespace duoplan::slowsys

#endif  // DUOPLAN__SLOWSYS__REMOTE_HPP_
