#pragma once

#include <cstddef>
#include <filesystem>
#include <optional>
#include <set>
#include <string>
#include <string_view>
#include <vector>

#include "codenav/error.hpp"
#include "codenav/module_path.hpp"
#include "json.hpp"

namespace codenav {

struct ToolCallRecord {
  std::size_t ordinal = 0;  // 1-based, contiguous
  std::string tool_name;
  nlohmann::json arguments = nlohmann::json::object();
  std::optional<std::string> result_text;
  std::string call_id;
};

struct Transcript {
  std::vector<ToolCallRecord> calls;
  std::string source_path;
  std::size_t malformed_lines = 0;
};

enum class TaskGroup { G1, G2, G3 };

std::string_view to_string(TaskGroup g);
std::optional<TaskGroup> parse_task_group(std::string_view text);

struct TaskSpec {
  std::string id;
  TaskGroup group = TaskGroup::G1;
  std::string prompt;
  std::set<ModulePath> required_files;  // non-empty
};

struct TrialMetrics {
  double acs = 0.0;
  std::optional<std::size_t> fctc;
  std::size_t mcp_calls = 0;
  bool veto_event = false;
  std::set<ModulePath> files_accessed;
  bool operator==(const TrialMetrics&) const = default;
};

// Throws EmptyTranscript when no line parses as JSON.
Transcript parse_transcript(std::string_view jsonl, std::string source_path = {});
Transcript load_transcript(const std::filesystem::path& path);

// Repo-relative form of a path seen in a transcript, or nullopt when it is
// outside the tracked scope.
std::optional<ModulePath> normalize_accessed_path(std::string_view raw,
                                                  std::string_view repo_prefix);

std::set<ModulePath> call_paths(const ToolCallRecord& call,
                                std::string_view repo_prefix);
std::set<ModulePath> files_accessed(const Transcript& t,
                                    std::string_view repo_prefix);

// Throws ContractViolation on an empty required set.
double compute_acs(const std::set<ModulePath>& accessed,
                   const std::set<ModulePath>& required);

std::optional<std::size_t> compute_fctc(const Transcript& t,
                                        const std::set<ModulePath>& required,
                                        std::string_view repo_prefix);

bool is_mcp_tool(std::string_view tool_name, std::string_view logical_name);
std::size_t count_mcp_calls(const Transcript& t);

bool detect_veto_event(const Transcript& t, const std::set<ModulePath>& required);

TrialMetrics score_trial(const Transcript& t, const TaskSpec& task,
                         std::string_view repo_prefix);

TaskSpec task_spec_from_json(const nlohmann::json& doc);  // throws FormatError
TaskSpec load_task_spec(const std::filesystem::path& path);

nlohmann::json to_json(const TrialMetrics& m);
TrialMetrics trial_metrics_from_json(const nlohmann::json& doc);

}  // namespace codenav
