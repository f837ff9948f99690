// SPDX-License-Identifier: Apache-2.0
#include "hosgns/common.hpp"

namespace hosgns {

std::string_view role_name(Role r) {
  switch (r) {
    case Role::Node: return "node";
    case Role::Context: return "context";
    case Role::Time: return "time";
    case Role::ContextTime: return "context-time";
  }
  return "unknown";
}

Role role_from_name(std::string_view name) {
  if (name == "node" || name == "W") return Role::Node;
  if (name == "context" || name == "C") return Role::Context;
  if (name == "time" || name == "T") return Role::Time;
  if (name == "context-time" || name == "S") return Role::ContextTime;
  throw DomainError("unknown role '" + std::string(name) + "'");
}

char role_letter(Role r) {
  switch (r) {
    case Role::Node: return 'W';
    case Role::Context: return 'C';
    case Role::Time: return 'T';
    case Role::ContextTime: return 'S';
  }
  return '?';
}

}  // namespace hosgns
