#include "codenav/metrics.hpp"

#include <algorithm>
#include <map>
#include <regex>

#include "codenav/extractor.hpp"

namespace codenav {

using nlohmann::json;

namespace {

constexpr std::string_view kContextTool = "get_architectural_context";
constexpr std::string_view kSearchTool = "semantic_search";

const std::regex& bash_path_pattern() {
  static const std::regex re(R"((?:app|tests)/[A-Za-z0-9_./-]*\.py)");
  return re;
}

std::string result_text_of(const json& content) {
  if (content.is_string()) return content.get<std::string>();
  if (content.is_array()) {
    std::string out;
    for (const auto& block : content) {
      if (block.is_string()) {
        if (!out.empty()) out += "\n";
        out += block.get<std::string>();
      } else if (block.is_object() && block.contains("text") &&
                 block["text"].is_string()) {
        if (!out.empty()) out += "\n";
        out += block["text"].get<std::string>();
      }
    }
    return out;
  }
  if (content.is_null()) return {};
  return content.dump(-1, ' ', false, json::error_handler_t::replace);
}

std::string id_text(const json& v) {
  if (v.is_string()) return v.get<std::string>();
  if (v.is_number()) return v.dump();
  return {};
}

struct Collector {
  Transcript& t;
  std::map<std::string, std::size_t> by_id;
  std::map<std::string, std::string> orphan_results;

  void call(std::string name, json input, std::string id,
            std::optional<std::string> result) {
    ToolCallRecord r;
    r.ordinal = t.calls.size() + 1;
    r.tool_name = std::move(name);
    r.arguments = input.is_object() ? std::move(input) : json::object();
    r.call_id = std::move(id);
    r.result_text = std::move(result);
    if (!r.call_id.empty()) {
      by_id.emplace(r.call_id, t.calls.size());
      if (!r.result_text) {
        auto o = orphan_results.find(r.call_id);
        if (o != orphan_results.end()) {
          r.result_text = o->second;
          orphan_results.erase(o);
        }
      }
    }
    t.calls.push_back(std::move(r));
  }

  void result(const std::string& id, std::string text) {
    if (id.empty()) return;
    auto it = by_id.find(id);
    if (it == by_id.end()) {
      orphan_results.emplace(id, std::move(text));
      return;
    }
    auto& slot = t.calls[it->second].result_text;
    if (!slot) slot = std::move(text);
  }

  void block(const json& b) {
    if (!b.is_object() || !b.contains("type") || !b["type"].is_string()) return;
    const std::string type = b["type"].get<std::string>();
    if (type == "tool_use" && b.contains("name") && b["name"].is_string()) {
      call(b["name"].get<std::string>(),
           b.contains("input") ? b["input"] : json::object(),
           b.contains("id") ? id_text(b["id"]) : std::string(), std::nullopt);
    } else if (type == "tool_result" && b.contains("tool_use_id")) {
      result(id_text(b["tool_use_id"]),
             result_text_of(b.contains("content") ? b["content"] : json()));
    }
  }

  void record(const json& obj) {
    // Flat {tool, args} records.
    if (obj.contains("tool") && obj["tool"].is_string() && obj.contains("args")) {
      std::optional<std::string> res;
      if (obj.contains("result")) res = result_text_of(obj["result"]);
      call(obj["tool"].get<std::string>(), obj["args"],
           obj.contains("id") ? id_text(obj["id"]) : std::string(), res);
      return;
    }
    block(obj);
    auto scan = [&](const json& content) {
      if (!content.is_array()) return;
      for (const auto& b : content) block(b);
    };
    if (obj.contains("message") && obj["message"].is_object() &&
        obj["message"].contains("content")) {
      scan(obj["message"]["content"]);
    }
    if (obj.contains("content")) scan(obj["content"]);
  }
};

bool mentions_any(const std::string& text, const std::set<ModulePath>& paths) {
  return std::any_of(paths.begin(), paths.end(), [&](const ModulePath& p) {
    return text.find(p.str()) != std::string::npos;
  });
}

}  // namespace

std::string_view to_string(TaskGroup g) {
  switch (g) {
    case TaskGroup::G1: return "G1";
    case TaskGroup::G2: return "G2";
    case TaskGroup::G3: return "G3";
  }
  return "?";
}

std::optional<TaskGroup> parse_task_group(std::string_view text) {
  if (text == "G1") return TaskGroup::G1;
  if (text == "G2") return TaskGroup::G2;
  if (text == "G3") return TaskGroup::G3;
  return std::nullopt;
}

Transcript parse_transcript(std::string_view jsonl, std::string source_path) {
  Transcript t;
  t.source_path = std::move(source_path);
  Collector c{t, {}, {}};
  std::size_t parsed = 0;
  std::size_t start = 0;
  while (start < jsonl.size()) {
    auto end = jsonl.find('\n', start);
    if (end == std::string_view::npos) end = jsonl.size();
    std::string_view line = jsonl.substr(start, end - start);
    start = end + 1;
    if (line.find_first_not_of(" \t\r") == std::string_view::npos) continue;
    json obj;
    try {
      obj = json::parse(line);
    } catch (const json::parse_error&) {
      ++t.malformed_lines;
      continue;
    }
    if (!obj.is_object()) {
      ++t.malformed_lines;
      continue;
    }
    ++parsed;
    c.record(obj);
  }
  if (parsed == 0) {
    throw EmptyTranscript("transcript has no parseable lines" +
                          (t.source_path.empty() ? "" : ": " + t.source_path));
  }
  return t;
}

Transcript load_transcript(const std::filesystem::path& path) {
  return parse_transcript(read_text_file(path), path.string());
}

std::optional<ModulePath> normalize_accessed_path(std::string_view raw,
                                                  std::string_view repo_prefix) {
  std::string_view prefix = repo_prefix;
  while (prefix.size() > 1 && prefix.back() == '/') prefix.remove_suffix(1);
  std::string_view p = raw;
  if (!prefix.empty() && prefix != "/" && p.starts_with(prefix) &&
      (p.size() == prefix.size() || p[prefix.size()] == '/')) {
    p.remove_prefix(prefix.size());
  }
  while (p.starts_with("/")) p.remove_prefix(1);
  std::string norm = std::filesystem::path(std::string(p)).lexically_normal().generic_string();
  auto mp = ModulePath::parse(norm);
  if (!mp) return std::nullopt;
  if (mp->is_python()) return mp;
  if (norm.starts_with("app/") || norm.starts_with("tests/")) return mp;
  return std::nullopt;
}

std::set<ModulePath> call_paths(const ToolCallRecord& call,
                                std::string_view repo_prefix) {
  std::set<ModulePath> out;
  const json& a = call.arguments;
  const std::string& name = call.tool_name;
  if (name == "Read" || name == "Edit" || name == "Write") {
    if (a.contains("file_path") && a["file_path"].is_string()) {
      if (auto p = normalize_accessed_path(a["file_path"].get<std::string>(),
                                           repo_prefix)) {
        out.insert(*p);
      }
    }
  } else if (name == "Bash") {
    if (a.contains("command") && a["command"].is_string()) {
      const std::string cmd = a["command"].get<std::string>();
      for (std::sregex_iterator it(cmd.begin(), cmd.end(), bash_path_pattern()), e;
           it != e; ++it) {
        if (auto p = normalize_accessed_path(it->str(), repo_prefix)) out.insert(*p);
      }
    }
  }
  return out;
}

std::set<ModulePath> files_accessed(const Transcript& t,
                                    std::string_view repo_prefix) {
  std::set<ModulePath> out;
  for (const auto& c : t.calls) out.merge(call_paths(c, repo_prefix));
  return out;
}

double compute_acs(const std::set<ModulePath>& accessed,
                   const std::set<ModulePath>& required) {
  if (required.empty()) throw ContractViolation("required_files must be non-empty");
  std::size_t hit = 0;
  for (const auto& r : required) hit += accessed.contains(r) ? 1 : 0;
  return static_cast<double>(hit) / static_cast<double>(required.size());
}

std::optional<std::size_t> compute_fctc(const Transcript& t,
                                        const std::set<ModulePath>& required,
                                        std::string_view repo_prefix) {
  for (const auto& c : t.calls) {
    for (const auto& p : call_paths(c, repo_prefix)) {
      if (required.contains(p)) return c.ordinal;
    }
  }
  return std::nullopt;
}

bool is_mcp_tool(std::string_view tool_name, std::string_view logical_name) {
  if (tool_name == logical_name) return true;
  return tool_name.size() > logical_name.size() + 2 &&
         tool_name.ends_with(logical_name) &&
         tool_name.substr(tool_name.size() - logical_name.size() - 2, 2) == "__";
}

std::size_t count_mcp_calls(const Transcript& t) {
  return static_cast<std::size_t>(
      std::count_if(t.calls.begin(), t.calls.end(), [](const ToolCallRecord& c) {
        return is_mcp_tool(c.tool_name, kContextTool) ||
               is_mcp_tool(c.tool_name, kSearchTool);
      }));
}

bool detect_veto_event(const Transcript& t, const std::set<ModulePath>& required) {
  bool empty_search = false;
  bool search_found = false;
  bool graph_found = false;
  for (const auto& c : t.calls) {
    if (!c.result_text) continue;
    if (c.tool_name == "Grep" || c.tool_name == "Bash") {
      if (mentions_any(*c.result_text, required)) {
        search_found = true;
      } else {
        empty_search = true;
      }
    } else if (is_mcp_tool(c.tool_name, kContextTool)) {
      graph_found = graph_found || mentions_any(*c.result_text, required);
    }
  }
  return empty_search && !search_found && graph_found;
}

TrialMetrics score_trial(const Transcript& t, const TaskSpec& task,
                         std::string_view repo_prefix) {
  TrialMetrics m;
  m.files_accessed = files_accessed(t, repo_prefix);
  m.acs = compute_acs(m.files_accessed, task.required_files);
  m.fctc = compute_fctc(t, task.required_files, repo_prefix);
  m.mcp_calls = count_mcp_calls(t);
  m.veto_event = detect_veto_event(t, task.required_files);
  return m;
}

TaskSpec task_spec_from_json(const json& doc) {
  if (!doc.is_object()) throw FormatError("task spec: expected a JSON object");
  auto str = [&](const char* f) {
    if (!doc.contains(f) || !doc[f].is_string()) {
      throw FormatError(std::string("task spec: missing string field '") + f + "'");
    }
    return doc[f].get<std::string>();
  };
  TaskSpec s;
  s.id = str("id");
  auto g = parse_task_group(str("group"));
  if (!g) throw FormatError("task spec: group must be G1, G2 or G3");
  s.group = *g;
  s.prompt = doc.contains("prompt") && doc["prompt"].is_string()
                 ? doc["prompt"].get<std::string>()
                 : std::string();
  if (!doc.contains("required_files") || !doc["required_files"].is_array()) {
    throw FormatError("task spec: missing array field 'required_files'");
  }
  for (const auto& f : doc["required_files"]) {
    if (!f.is_string()) throw FormatError("task spec: required_files entries must be strings");
    auto p = ModulePath::parse(f.get<std::string>());
    if (!p) throw FormatError("task spec: not a repo-relative path: " + f.dump());
    s.required_files.insert(*p);
  }
  if (s.required_files.empty()) throw FormatError("task spec: required_files is empty");
  return s;
}

TaskSpec load_task_spec(const std::filesystem::path& path) {
  std::string text = read_text_file(path);
  json doc;
  try {
    doc = json::parse(text);
  } catch (const json::parse_error& e) {
    throw FormatError(path.string() + ": " + e.what());
  }
  return task_spec_from_json(doc);
}

json to_json(const TrialMetrics& m) {
  json files = json::array();
  for (const auto& f : m.files_accessed) files.push_back(f.str());
  return {{"acs", m.acs},
          {"fctc", m.fctc ? json(*m.fctc) : json(nullptr)},
          {"mcp_calls", m.mcp_calls},
          {"veto_event", m.veto_event},
          {"files_accessed", files}};
}

TrialMetrics trial_metrics_from_json(const json& doc) {
  if (!doc.is_object()) throw FormatError("metrics: expected an object");
  TrialMetrics m;
  if (!doc.contains("acs") || !doc["acs"].is_number()) {
    throw FormatError("metrics: missing numeric field 'acs'");
  }
  m.acs = doc["acs"].get<double>();
  if (m.acs < 0.0 || m.acs > 1.0) throw FormatError("metrics: acs outside [0,1]");
  if (doc.contains("fctc") && !doc["fctc"].is_null()) {
    if (!doc["fctc"].is_number_integer() || doc["fctc"].get<long long>() < 1) {
      throw FormatError("metrics: fctc must be a positive integer or null");
    }
    m.fctc = doc["fctc"].get<std::size_t>();
  }
  if (doc.contains("mcp_calls")) {
    if (!doc["mcp_calls"].is_number_integer() || doc["mcp_calls"].get<long long>() < 0) {
      throw FormatError("metrics: mcp_calls must be a non-negative integer");
    }
    m.mcp_calls = doc["mcp_calls"].get<std::size_t>();
  }
  if (doc.contains("veto_event")) {
    if (!doc["veto_event"].is_boolean()) throw FormatError("metrics: veto_event must be a boolean");
    m.veto_event = doc["veto_event"].get<bool>();
  }
  if (doc.contains("files_accessed")) {
    if (!doc["files_accessed"].is_array()) throw FormatError("metrics: files_accessed must be an array");
    for (const auto& f : doc["files_accessed"]) {
      auto p = f.is_string() ? ModulePath::parse(f.get<std::string>()) : std::nullopt;
      if (!p) throw FormatError("metrics: bad files_accessed entry " + f.dump());
      m.files_accessed.insert(*p);
    }
  }
  return m;
}

}  // namespace codenav
