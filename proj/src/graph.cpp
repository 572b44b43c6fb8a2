#include "codenav/graph.hpp"

#include <algorithm>
#include <fstream>

#include "codenav/extractor.hpp"
#include "json.hpp"

namespace codenav {

using nlohmann::json;

namespace {

constexpr int kGraphFormatVersion = 1;
constexpr std::string_view kIn = "← ";
constexpr std::string_view kOut = "→ ";
constexpr std::size_t kKindField = 13;  // "[INSTANTIATES]" is 14, then a space

const std::vector<std::size_t>& empty_list() {
  static const std::vector<std::size_t> e;
  return e;
}

std::string describe(const DependencyEdge& e) {
  return e.source.str() + " -> " + e.target.str() + " [" +
         std::string(to_string(e.kind)) + "]";
}

std::string total_line(std::size_t n) {
  return "Total: " + std::to_string(n) + " structural connections";
}

}  // namespace

std::string_view to_string(EdgeKind kind) {
  switch (kind) {
    case EdgeKind::Imports: return "IMPORTS";
    case EdgeKind::Inherits: return "INHERITS";
    case EdgeKind::Instantiates: return "INSTANTIATES";
  }
  return "?";
}

std::optional<EdgeKind> parse_edge_kind(std::string_view text) {
  if (text == "IMPORTS") return EdgeKind::Imports;
  if (text == "INHERITS") return EdgeKind::Inherits;
  if (text == "INSTANTIATES") return EdgeKind::Instantiates;
  return std::nullopt;
}

bool CodeGraph::contains(const ModulePath& p) const {
  return std::binary_search(nodes_.begin(), nodes_.end(), p);
}

std::size_t CodeGraph::count(EdgeKind kind) const {
  return static_cast<std::size_t>(std::count_if(
      edges_.begin(), edges_.end(),
      [kind](const DependencyEdge& e) { return e.kind == kind; }));
}

const std::vector<std::size_t>& CodeGraph::inbound(const ModulePath& p) const {
  auto it = in_.find(p);
  return it == in_.end() ? empty_list() : it->second;
}

const std::vector<std::size_t>& CodeGraph::outbound(const ModulePath& p) const {
  auto it = out_.find(p);
  return it == out_.end() ? empty_list() : it->second;
}

CodeGraph build_graph(std::vector<ModulePath> files,
                      std::vector<DependencyEdge> edges) {
  CodeGraph g;
  std::sort(files.begin(), files.end());
  files.erase(std::unique(files.begin(), files.end()), files.end());
  g.nodes_ = std::move(files);
  std::sort(edges.begin(), edges.end());
  edges.erase(std::unique(edges.begin(), edges.end()), edges.end());
  for (const auto& e : edges) {
    if (e.source == e.target) {
      throw GraphError("self edge not allowed: " + describe(e));
    }
    if (!g.contains(e.source) || !g.contains(e.target)) {
      throw GraphError("edge endpoint not in node set: " + describe(e));
    }
  }
  g.edges_ = std::move(edges);
  for (std::size_t i = 0; i < g.edges_.size(); ++i) {
    g.out_[g.edges_[i].source].push_back(i);
    g.in_[g.edges_[i].target].push_back(i);
  }
  return g;
}

ArchitecturalContext architectural_context(const CodeGraph& graph,
                                           const ModulePath& file) {
  if (!graph.contains(file)) throw FileNotInGraph(file.str());
  ArchitecturalContext ctx;
  ctx.center = file;
  for (auto i : graph.inbound(file)) {
    const auto& e = graph.edges()[i];
    ctx.inbound.push_back(Connection{e.kind, e.source});
  }
  for (auto i : graph.outbound(file)) {
    const auto& e = graph.edges()[i];
    ctx.outbound.push_back(Connection{e.kind, e.target});
  }
  std::sort(ctx.inbound.begin(), ctx.inbound.end());
  std::sort(ctx.outbound.begin(), ctx.outbound.end());
  return ctx;
}

std::string render_context(const ArchitecturalContext& ctx) {
  std::string out;
  auto emit = [&](std::string_view arrow, const Connection& c) {
    std::string kind = "[" + std::string(to_string(c.kind)) + "]";
    if (kind.size() < kKindField) kind.resize(kKindField, ' ');
    out.append(arrow).append(kind).append(" ").append(c.path.str()).append("\n");
  };
  for (const auto& c : ctx.inbound) emit(kIn, c);
  for (const auto& c : ctx.outbound) emit(kOut, c);
  out += total_line(ctx.total());
  return out;
}

ParsedContext parse_rendered_context(std::string_view text) {
  ParsedContext pc;
  std::size_t start = 0;
  int line_no = 0;
  bool saw_total = false;
  while (start <= text.size()) {
    auto end = text.find('\n', start);
    if (end == std::string_view::npos) end = text.size();
    std::string_view line = text.substr(start, end - start);
    start = end + 1;
    ++line_no;
    if (line.empty() && end == text.size() && saw_total) break;
    if (saw_total) {
      throw FormatError("line " + std::to_string(line_no) +
                        ": content after total line");
    }
    if (line.starts_with("Total: ")) {
      std::string_view rest = line.substr(7);
      auto sp = rest.find(' ');
      if (sp == std::string_view::npos ||
          rest.substr(sp) != " structural connections") {
        throw FormatError("line " + std::to_string(line_no) + ": bad total line");
      }
      try {
        pc.total = std::stoul(std::string(rest.substr(0, sp)));
      } catch (const std::exception&) {
        throw FormatError("line " + std::to_string(line_no) + ": bad total");
      }
      saw_total = true;
      continue;
    }
    Direction dir;
    if (line.starts_with(kIn)) {
      dir = Direction::Inbound;
      line.remove_prefix(kIn.size());
    } else if (line.starts_with(kOut)) {
      dir = Direction::Outbound;
      line.remove_prefix(kOut.size());
    } else {
      throw FormatError("line " + std::to_string(line_no) + ": no direction arrow");
    }
    auto close = line.find(']');
    if (!line.starts_with("[") || close == std::string_view::npos) {
      throw FormatError("line " + std::to_string(line_no) + ": no kind");
    }
    auto kind = parse_edge_kind(line.substr(1, close - 1));
    if (!kind) {
      throw FormatError("line " + std::to_string(line_no) + ": unknown kind");
    }
    std::size_t path_at = std::max(kKindField, close + 1) + 1;
    if (line.size() <= path_at || line[path_at - 1] != ' ') {
      throw FormatError("line " + std::to_string(line_no) + ": missing path");
    }
    pc.connections.push_back(
        RenderedConnection{dir, *kind, std::string(line.substr(path_at))});
  }
  if (!saw_total) throw FormatError("missing total line");
  if (pc.total != pc.connections.size()) {
    throw FormatError("total does not match the number of connections");
  }
  return pc;
}

std::string graph_to_json(const CodeGraph& graph) {
  json doc;
  doc["version"] = kGraphFormatVersion;
  json nodes = json::array();
  for (const auto& n : graph.nodes()) nodes.push_back(n.str());
  doc["nodes"] = std::move(nodes);
  json edges = json::array();
  for (const auto& e : graph.edges()) {
    edges.push_back({{"source", e.source.str()},
                     {"target", e.target.str()},
                     {"kind", std::string(to_string(e.kind))}});
  }
  doc["edges"] = std::move(edges);
  return doc.dump(2) + "\n";
}

CodeGraph graph_from_json(std::string_view text) {
  json doc;
  try {
    doc = json::parse(text);
  } catch (const json::parse_error& e) {
    throw FormatError(std::string("graph file is not valid JSON: ") + e.what());
  }
  if (!doc.is_object()) throw FormatError("graph file: top level must be an object");
  if (!doc.contains("version") || !doc["version"].is_number_integer()) {
    throw FormatError("graph file: missing integer field 'version'");
  }
  if (doc["version"].get<int>() != kGraphFormatVersion) {
    throw FormatError("graph file: unsupported version " +
                      doc["version"].dump());
  }
  if (!doc.contains("nodes") || !doc["nodes"].is_array()) {
    throw FormatError("graph file: missing array field 'nodes'");
  }
  if (!doc.contains("edges") || !doc["edges"].is_array()) {
    throw FormatError("graph file: missing array field 'edges'");
  }
  auto path_at = [](const json& v, const std::string& where) {
    if (!v.is_string()) throw FormatError(where + ": expected a string path");
    auto p = ModulePath::parse(v.get<std::string>());
    if (!p) throw FormatError(where + ": not a canonical path: " + v.dump());
    return *p;
  };
  std::vector<ModulePath> nodes;
  for (std::size_t i = 0; i < doc["nodes"].size(); ++i) {
    nodes.push_back(path_at(doc["nodes"][i], "nodes[" + std::to_string(i) + "]"));
  }
  std::vector<DependencyEdge> edges;
  for (std::size_t i = 0; i < doc["edges"].size(); ++i) {
    const json& e = doc["edges"][i];
    std::string where = "edges[" + std::to_string(i) + "]";
    if (!e.is_object()) throw FormatError(where + ": expected an object");
    for (const char* f : {"source", "target", "kind"}) {
      if (!e.contains(f)) throw FormatError(where + ": missing field '" + f + "'");
    }
    if (!e["kind"].is_string()) throw FormatError(where + ".kind: expected a string");
    auto kind = parse_edge_kind(e["kind"].get<std::string>());
    if (!kind) throw FormatError(where + ".kind: unknown kind " + e["kind"].dump());
    edges.push_back(DependencyEdge{path_at(e["source"], where + ".source"),
                                   path_at(e["target"], where + ".target"),
                                   *kind});
  }
  try {
    return build_graph(std::move(nodes), std::move(edges));
  } catch (const GraphError& e) {
    throw FormatError(std::string("graph file: ") + e.what());
  }
}

void save_graph(const CodeGraph& graph, const std::filesystem::path& path) {
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) throw IoError(path.string(), "cannot open graph file for writing");
  out << graph_to_json(graph);
  out.flush();
  if (!out) throw IoError(path.string(), "cannot write graph file");
}

CodeGraph load_graph(const std::filesystem::path& path) {
  return graph_from_json(read_text_file(path));
}

std::string context_to_json(const ArchitecturalContext& ctx) {
  auto list = [](const std::vector<Connection>& cs) {
    json a = json::array();
    for (const auto& c : cs) {
      a.push_back({{"kind", std::string(to_string(c.kind))}, {"path", c.path.str()}});
    }
    return a;
  };
  json doc = {{"file", ctx.center.str()},
              {"inbound", list(ctx.inbound)},
              {"outbound", list(ctx.outbound)},
              {"total", ctx.total()}};
  return doc.dump(2);
}

}  // namespace codenav
