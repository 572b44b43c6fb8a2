#pragma once

#include <iosfwd>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "codenav/error.hpp"
#include "codenav/graph.hpp"
#include "codenav/search.hpp"
#include "json.hpp"

namespace codenav {

namespace rpc {
inline constexpr int kParseError = -32700;
inline constexpr int kInvalidRequest = -32600;
inline constexpr int kMethodNotFound = -32601;
inline constexpr int kInvalidParams = -32602;
inline constexpr int kInternalError = -32603;
}  // namespace rpc

inline constexpr std::string_view kContextTool = "get_architectural_context";
inline constexpr std::string_view kSearchTool = "semantic_search";

struct ParamSpec {
  std::string name;
  std::string type;  // JSON-schema type name
  bool required = false;
  std::optional<nlohmann::json> default_value;
  std::string description;
};

struct ToolDescriptor {
  std::string name;
  std::string description;
  std::vector<ParamSpec> input_schema;
  nlohmann::json to_json() const;
};

struct ToolResponse {
  bool ok = true;
  std::string content_text;
  std::string error_message;
};

// Protocol-level failure of a tool call (unknown tool, bad arguments).
class ToolCallError : public Error {
 public:
  ToolCallError(int code, const std::string& msg) : Error(msg), code_(code) {}
  int code() const { return code_; }

 private:
  int code_;
};

class ToolServer {
 public:
  // Borrows both; they must outlive the server.
  ToolServer(const CodeGraph& graph, const SearchIndex& index)
      : graph_(graph), index_(index) {}

  std::vector<ToolDescriptor> list_tools() const;
  // Throws ToolCallError for unknown tools and invalid params.
  ToolResponse call_tool(std::string_view name, const nlohmann::json& arguments) const;

  // One request line in, at most one response line out (none for
  // notifications and blank lines). Never throws.
  std::optional<std::string> handle_line(std::string_view line) const;
  void serve(std::istream& in, std::ostream& out) const;

 private:
  nlohmann::json dispatch(const std::string& method, const nlohmann::json& params) const;

  const CodeGraph& graph_;
  const SearchIndex& index_;
};

}  // namespace codenav
