#pragma once

#include <compare>
#include <optional>
#include <string_view>

#include "codenav/module_path.hpp"

namespace codenav {

// Declaration order is the rendering order.
enum class EdgeKind { Imports, Inherits, Instantiates };

std::string_view to_string(EdgeKind kind);
std::optional<EdgeKind> parse_edge_kind(std::string_view text);

struct DependencyEdge {
  ModulePath source;
  ModulePath target;
  EdgeKind kind = EdgeKind::Imports;

  auto operator<=>(const DependencyEdge&) const = default;
  bool operator==(const DependencyEdge&) const = default;
};

}  // namespace codenav
