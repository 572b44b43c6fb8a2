#pragma once

#include <filesystem>
#include <map>
#include <string>
#include <string_view>
#include <vector>

#include "codenav/edge.hpp"
#include "codenav/error.hpp"
#include "codenav/module_path.hpp"

namespace codenav {

// Immutable once built: sorted unique nodes and edges plus per-node indexes.
class CodeGraph {
 public:
  CodeGraph() = default;

  const std::vector<ModulePath>& nodes() const { return nodes_; }
  const std::vector<DependencyEdge>& edges() const { return edges_; }
  bool contains(const ModulePath& p) const;
  std::size_t count(EdgeKind kind) const;

  // Indices into edges().
  const std::vector<std::size_t>& inbound(const ModulePath& p) const;
  const std::vector<std::size_t>& outbound(const ModulePath& p) const;

  bool operator==(const CodeGraph& o) const {
    return nodes_ == o.nodes_ && edges_ == o.edges_;
  }

 private:
  friend CodeGraph build_graph(std::vector<ModulePath>,
                               std::vector<DependencyEdge>);
  std::vector<ModulePath> nodes_;
  std::vector<DependencyEdge> edges_;
  std::map<ModulePath, std::vector<std::size_t>> in_;
  std::map<ModulePath, std::vector<std::size_t>> out_;
};

// Throws GraphError when an edge endpoint is not a node or source == target.
CodeGraph build_graph(std::vector<ModulePath> files,
                      std::vector<DependencyEdge> edges);

struct Connection {
  EdgeKind kind;
  ModulePath path;
  auto operator<=>(const Connection&) const = default;
  bool operator==(const Connection&) const = default;
};

struct ArchitecturalContext {
  ModulePath center;
  std::vector<Connection> inbound;
  std::vector<Connection> outbound;
  std::size_t total() const { return inbound.size() + outbound.size(); }
};

// Throws FileNotInGraph.
ArchitecturalContext architectural_context(const CodeGraph& graph,
                                           const ModulePath& file);

std::string render_context(const ArchitecturalContext& ctx);

enum class Direction { Inbound, Outbound };

struct RenderedConnection {
  Direction direction;
  EdgeKind kind;
  std::string path;
  bool operator==(const RenderedConnection&) const = default;
};

struct ParsedContext {
  std::vector<RenderedConnection> connections;
  std::size_t total = 0;
};

// Inverse of render_context. Throws FormatError.
ParsedContext parse_rendered_context(std::string_view text);

std::string graph_to_json(const CodeGraph& graph);
CodeGraph graph_from_json(std::string_view text);  // throws FormatError
void save_graph(const CodeGraph& graph, const std::filesystem::path& path);
CodeGraph load_graph(const std::filesystem::path& path);

std::string context_to_json(const ArchitecturalContext& ctx);

}  // namespace codenav
