#pragma once

#include <filesystem>
#include <map>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "codenav/metrics.hpp"

namespace codenav {

struct TrialRecord {
  std::string task_id;
  TaskGroup group = TaskGroup::G1;
  std::string condition;
  int run = 1;
  std::string timestamp;  // ISO-8601, compared lexicographically
  TrialMetrics metrics;
};

struct GroupStats {
  double mean = 0.0;
  double std = 0.0;  // sample (n-1); 0 when n == 1
  std::size_t n = 0;
};

enum class Significance { NotSignificant, P05, P01, P001 };
std::string_view label(Significance s);

struct WelchResult {
  double t = 0.0;
  double df = 0.0;
  Significance significance = Significance::NotSignificant;
};

struct GroupKey {
  std::string condition;
  TaskGroup group;
  auto operator<=>(const GroupKey&) const = default;
  bool operator==(const GroupKey&) const = default;
};

// Throws ContractViolation on an empty sample.
GroupStats summarize(std::span<const double> values);

std::map<GroupKey, GroupStats> aggregate(std::span<const TrialRecord> trials);

// Fraction with acs >= 1.0. Throws ContractViolation on an empty list.
double completion_rate(std::span<const TrialRecord> trials);

// Two-sided critical |t| for alpha in {0.05, 0.01, 0.001}, using the next
// lower tabulated df.
double critical_t(double df, double alpha);
Significance significance_for(double abs_t, double df);

// Throws ContractViolation when either n < 2, UndefinedStatistic when both
// variances are zero.
WelchResult welch_t(const GroupStats& a, const GroupStats& b);

struct McpAdoption {
  double adoption = 0.0;
  double mean_calls = 0.0;
  std::optional<double> mean_acs_used;
  std::optional<double> mean_acs_unused;
  std::size_t used = 0;
  std::size_t unused = 0;
};

McpAdoption mcp_adoption(std::span<const TrialRecord> trials);

std::optional<double> mean_fctc(std::span<const TrialRecord> trials);

struct WelchRequest {
  std::string a;
  std::string b;
  std::optional<TaskGroup> group;  // absent: all groups pooled
};

// "C:A on G3" or "C:A". Throws FormatError.
WelchRequest parse_welch_request(std::string_view text);

std::string format_stats_cell(const GroupStats& s);  // "99.4% ± 3.6% (n=31)"

std::string render_report(std::span<const TrialRecord> trials,
                          std::span<const WelchRequest> comparisons);

// Group from the task number when the record has none: 1-10 G1, 11-20 G2,
// 21-30 G3.
std::optional<TaskGroup> group_from_task_id(std::string_view task_id);

// Keeps the latest timestamp per (task_id, condition, run); on equal
// timestamps the later element wins. Output is sorted by that key.
std::vector<TrialRecord> dedupe_trials(std::vector<TrialRecord> trials);

TrialRecord trial_record_from_json(const nlohmann::json& doc);

// Reads every *.json trial file; keeps the latest timestamp per
// (task_id, condition, run). Throws EmptyResultSet when none are found.
std::vector<TrialRecord> load_result_set(const std::filesystem::path& dir);

}  // namespace codenav
