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

#ifndef DUOPLAN__CORE__ERROR_HPP_
#define DUOPLAN__CORE__ERROR_HPP_

#include <stdexcept>
#include <string>
#include <string_view>

namespace duoplan
{

enum class ErrorCode {
  InvalidArgument,
  EmptyConfig,
  DegenerateTrajectory,
  EmptySet,
  EmptyWindow,
  ShapeMismatch,
  UnknownToken,
  HorizonTooShort,
  ComponentMissing,
  ScenarioInvalid,
  ConfigError,
  LogNotFound,
  MalformedResponse,
  Timeout,
  ParseError,
};

constexpr std::string_view to_string(ErrorCode code)
{
  switch (code) {
    case ErrorCode::InvalidArgument: return "InvalidArgument";
    case ErrorCode::EmptyConfig: return "EmptyConfig";
    case ErrorCode::DegenerateTrajectory: return "DegenerateTrajectory";
    case ErrorCode::EmptySet: return "EmptySet";
    case ErrorCode::EmptyWindow: return "EmptyWindow";
    case ErrorCode::ShapeMismatch: return "ShapeMismatch";
    case ErrorCode::UnknownToken: return "UnknownToken";
    case ErrorCode::HorizonTooShort: return "HorizonTooShort";
    case ErrorCode::ComponentMissing: return "ComponentMissing";
    case ErrorCode::ScenarioInvalid: return "ScenarioInvalid";
    case ErrorCode::ConfigError: return "ConfigError";
    case ErrorCode::LogNotFound: return "LogNotFound";
    case ErrorCode::MalformedResponse: return "MalformedResponse";
    case ErrorCode::Timeout: return "Timeout";
    case ErrorCode::ParseError: return "ParseError";
  }
  return "Unknown";
}

/// Exception carrying a machine-checkable error code. All library entry
/// points report contract violations through this type.
class Error : public std::runtime_error
{
public:
  Error(ErrorCode code, const std::string & message)
  : std::runtime_error(std::string(to_string(code)) + ": " + message), code_(code)
  {
  }

  ErrorCode code() const noexcept { return code_; }

private:
  ErrorCode code_;
};

inline void require(bool condition, ErrorCode code, const std::string & message)
{
  if (!condition) {
    throw Error(code, message);
  }
}

}  // namespace duoplan

#endif  // DUOPLAN__CORE__ERROR_HPP_
