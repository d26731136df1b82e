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

#ifndef DUOPLAN__SIM__COLLISION_HPP_
#define DUOPLAN__SIM__COLLISION_HPP_

#include "duoplan/core/types.hpp"

#include <optional>
#include <span>
#include <string>

namespace duoplan::sim
{

struct CollisionHit
{
  std::string agent_id;
  AgentKind kind{AgentKind::Car};
};

/// First agent (in list order) whose footprint overlaps the ego box.
inline std::optional<CollisionHit> check_collision(const OrientedBox & ego, std::span<const AgentState> agents)
{
  for (const auto & a : agents) {
    require(a.footprint.half_length > 0.0 && a.footprint.half_width > 0.0, ErrorCode::InvalidArgument,
            "agent footprint must be positive");
    if (boxes_overlap(ego, a.box())) {
      return CollisionHit{a.id, a.kind};
    }
  }
  return std::nullopt;
}

}  // namespace duoplan::sim

#endif  // DUOPLAN__SIM__COLLISION_HPP_
