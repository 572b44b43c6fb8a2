#include "codenav/toolserver.hpp"

#include <istream>
#include <ostream>

namespace codenav {

using nlohmann::json;

namespace {

constexpr std::string_view kProtocolVersion = "2024-11-05";
constexpr std::string_view kServerName = "codenav";
constexpr std::string_view kServerVersion = "0.1.0";

class RpcError : public std::runtime_error {
 public:
  RpcError(int code, const std::string& msg) : std::runtime_error(msg), code_(code) {}
  int code() const { return code_; }

 private:
  int code_;
};

std::string to_line(const json& j) {
  return j.dump(-1, ' ', false, json::error_handler_t::replace);
}

json error_response(const json& id, int code, const std::string& message) {
  return {{"jsonrpc", "2.0"},
          {"id", id},
          {"error", {{"code", code}, {"message", message}}}};
}

const json& require_arg(const json& args, const std::string& name,
                        bool (json::*check)() const noexcept,
                        const std::string& type) {
  if (!args.contains(name)) {
    throw ToolCallError(rpc::kInvalidParams, "missing required argument: " + name);
  }
  const json& v = args[name];
  if (!(v.*check)()) {
    throw ToolCallError(rpc::kInvalidParams,
                        "argument '" + name + "' must be a " + type);
  }
  return v;
}

}  // namespace

json ToolDescriptor::to_json() const {
  json props = json::object();
  json required = json::array();
  for (const auto& p : input_schema) {
    json prop = {{"type", p.type}, {"description", p.description}};
    if (p.default_value) prop["default"] = *p.default_value;
    props[p.name] = std::move(prop);
    if (p.required) required.push_back(p.name);
  }
  return {{"name", name},
          {"description", description},
          {"inputSchema",
           {{"type", "object"}, {"properties", props}, {"required", required}}}};
}

std::vector<ToolDescriptor> ToolServer::list_tools() const {
  return {
      ToolDescriptor{
          std::string(kContextTool),
          "Returns all files structurally connected to the given file (imports, "
          "inheritance, instantiation), inbound and outbound. Use this before "
          "editing any file.",
          {ParamSpec{"file_path", "string", true, std::nullopt,
                     "Repo-relative path, e.g. app/db/repositories/base.py"}}},
      ToolDescriptor{
          std::string(kSearchTool),
          "Searches the codebase using BM25 keyword ranking. Returns the most "
          "relevant files ranked by relevance score.",
          {ParamSpec{"query", "string", true, std::nullopt, "Search query"},
           ParamSpec{"top_n", "integer", false,
                     json(static_cast<int>(kDefaultTopN)),
                     "Maximum number of files to return"}}},
  };
}

ToolResponse ToolServer::call_tool(std::string_view name, const json& arguments) const {
  const json args = arguments.is_null() ? json::object() : arguments;
  if (!args.is_object()) {
    throw ToolCallError(rpc::kInvalidParams, "arguments must be an object");
  }
  if (name == kContextTool) {
    std::string raw =
        require_arg(args, "file_path", &json::is_string, "string").get<std::string>();
    auto p = ModulePath::parse(raw);
    if (!p || !graph_.contains(*p)) {
      return ToolResponse{false, {}, "file not found in graph: " + raw};
    }
    return ToolResponse{true, render_context(architectural_context(graph_, *p)), {}};
  }
  if (name == kSearchTool) {
    std::string query =
        require_arg(args, "query", &json::is_string, "string").get<std::string>();
    std::size_t top_n = kDefaultTopN;
    if (args.contains("top_n")) {
      const json& v = args["top_n"];
      if (!v.is_number_integer() || v.get<long long>() < 1) {
        throw ToolCallError(rpc::kInvalidParams, "top_n must be a positive integer");
      }
      top_n = static_cast<std::size_t>(v.get<long long>());
    }
    auto results = search(index_, query, top_n);
    return ToolResponse{true, render_results(results), {}};
  }
  throw ToolCallError(rpc::kMethodNotFound, "unknown tool: " + std::string(name));
}

json ToolServer::dispatch(const std::string& method, const json& params) const {
  if (method == "initialize") {
    return {{"protocolVersion", kProtocolVersion},
            {"capabilities", {{"tools", json::object()}}},
            {"serverInfo", {{"name", kServerName}, {"version", kServerVersion}}}};
  }
  if (method == "tools/list") {
    json tools = json::array();
    for (const auto& t : list_tools()) tools.push_back(t.to_json());
    return {{"tools", tools}};
  }
  if (method == "tools/call") {
    if (!params.is_object() || !params.contains("name") ||
        !params["name"].is_string()) {
      throw RpcError(rpc::kInvalidParams, "tools/call requires a string 'name'");
    }
    json args = params.contains("arguments") ? params["arguments"] : json::object();
    ToolResponse r;
    try {
      r = call_tool(params["name"].get<std::string>(), args);
    } catch (const ToolCallError& e) {
      throw RpcError(e.code(), e.what());
    }
    const std::string& text = r.ok ? r.content_text : r.error_message;
    return {{"content", json::array({{{"type", "text"}, {"text", text}}})},
            {"isError", !r.ok}};
  }
  throw RpcError(rpc::kMethodNotFound, "method not found: " + method);
}

std::optional<std::string> ToolServer::handle_line(std::string_view line) const {
  auto blank = line.find_first_not_of(" \t\r");
  if (blank == std::string_view::npos) return std::nullopt;
  json id = nullptr;
  try {
    json req;
    try {
      req = json::parse(line);
    } catch (const json::parse_error&) {
      return to_line(error_response(nullptr, rpc::kParseError, "parse error"));
    }
    if (!req.is_object()) {
      return to_line(
          error_response(nullptr, rpc::kInvalidRequest, "request must be an object"));
    }
    bool notification = !req.contains("id");
    if (!notification) {
      id = req["id"];
      if (!id.is_string() && !id.is_number() && !id.is_null()) {
        id = nullptr;
        return to_line(error_response(id, rpc::kInvalidRequest, "invalid id"));
      }
    }
    if (!req.contains("method") || !req["method"].is_string()) {
      if (notification) return std::nullopt;
      return to_line(error_response(id, rpc::kInvalidRequest, "missing method"));
    }
    json params = req.contains("params") ? req["params"] : json::object();
    json result;
    try {
      result = dispatch(req["method"].get<std::string>(), params);
    } catch (const RpcError& e) {
      if (notification) return std::nullopt;
      return to_line(error_response(id, e.code(), e.what()));
    }
    if (notification) return std::nullopt;
    return to_line(json{{"jsonrpc", "2.0"}, {"id", id}, {"result", result}});
  } catch (const std::exception& e) {
    try {
      return to_line(error_response(id, rpc::kInternalError,
                                    std::string("internal error: ") + e.what()));
    } catch (...) {
      return R"({"jsonrpc":"2.0","id":null,"error":{"code":-32603,"message":"internal error"}})";
    }
  }
}

void ToolServer::serve(std::istream& in, std::ostream& out) const {
  std::string line;
  while (std::getline(in, line)) {
    if (auto resp = handle_line(line)) {
      out << *resp << '\n';
      out.flush();
    }
  }
}

}  // namespace codenav
