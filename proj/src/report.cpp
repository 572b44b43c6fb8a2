#include "codenav/report.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <limits>
#include <regex>
#include <set>
#include <tuple>

#include "codenav/extractor.hpp"

namespace codenav {

using nlohmann::json;

namespace {

struct CriticalRow {
  double df;
  double t05, t01, t001;
};

// Two-sided Student t critical values.
constexpr CriticalRow kTable[] = {
    {1, 12.706, 63.657, 636.619}, {2, 4.303, 9.925, 31.599},
    {3, 3.182, 5.841, 12.924},    {4, 2.776, 4.604, 8.610},
    {5, 2.571, 4.032, 6.869},     {6, 2.447, 3.707, 5.959},
    {7, 2.365, 3.499, 5.408},     {8, 2.306, 3.355, 5.041},
    {9, 2.262, 3.250, 4.781},     {10, 2.228, 3.169, 4.587},
    {11, 2.201, 3.106, 4.437},    {12, 2.179, 3.055, 4.318},
    {13, 2.160, 3.012, 4.221},    {14, 2.145, 2.977, 4.140},
    {15, 2.131, 2.947, 4.073},    {16, 2.120, 2.921, 4.015},
    {17, 2.110, 2.898, 3.965},    {18, 2.101, 2.878, 3.922},
    {19, 2.093, 2.861, 3.883},    {20, 2.086, 2.845, 3.850},
    {21, 2.080, 2.831, 3.819},    {22, 2.074, 2.819, 3.792},
    {23, 2.069, 2.807, 3.768},    {24, 2.064, 2.797, 3.745},
    {25, 2.060, 2.787, 3.725},    {26, 2.056, 2.779, 3.707},
    {27, 2.052, 2.771, 3.690},    {28, 2.048, 2.763, 3.674},
    {29, 2.045, 2.756, 3.659},    {30, 2.042, 2.750, 3.646},
    {40, 2.021, 2.704, 3.551},    {60, 2.000, 2.660, 3.460},
    {120, 1.980, 2.617, 3.373},
    {std::numeric_limits<double>::infinity(), 1.960, 2.576, 3.291},
};

const CriticalRow& row_for(double df) {
  const CriticalRow* best = &kTable[0];  // df below 1 uses the df=1 row
  for (const auto& r : kTable) {
    if (r.df <= df) best = &r;
  }
  return *best;
}

std::string fmt(const char* pattern, double v) {
  char buf[64];
  std::snprintf(buf, sizeof buf, pattern, v);
  return buf;
}

std::string percent1(double fraction) { return fmt("%.1f", fraction * 100.0) + "%"; }

bool completed(const TrialRecord& t) { return t.metrics.acs >= 1.0 - 1e-12; }

std::vector<double> acs_of(std::span<const TrialRecord> trials) {
  std::vector<double> v;
  v.reserve(trials.size());
  for (const auto& t : trials) v.push_back(t.metrics.acs);
  return v;
}

std::map<GroupKey, std::vector<TrialRecord>> by_key(std::span<const TrialRecord> trials) {
  std::map<GroupKey, std::vector<TrialRecord>> m;
  for (const auto& t : trials) m[GroupKey{t.condition, t.group}].push_back(t);
  return m;
}

std::string cell_or_dash(const std::optional<std::string>& s) {
  return s ? *s : std::string("-");
}

}  // namespace

std::string_view label(Significance s) {
  switch (s) {
    case Significance::NotSignificant: return "n.s.";
    case Significance::P05: return "p<0.05";
    case Significance::P01: return "p<0.01";
    case Significance::P001: return "p<0.001";
  }
  return "?";
}

GroupStats summarize(std::span<const double> values) {
  if (values.empty()) throw ContractViolation("cannot summarize an empty sample");
  GroupStats s;
  s.n = values.size();
  double sum = 0.0;
  for (double v : values) sum += v;
  s.mean = sum / static_cast<double>(s.n);
  if (s.n > 1) {
    double ss = 0.0;
    for (double v : values) ss += (v - s.mean) * (v - s.mean);
    s.std = std::sqrt(ss / static_cast<double>(s.n - 1));
  }
  return s;
}

std::map<GroupKey, GroupStats> aggregate(std::span<const TrialRecord> trials) {
  std::map<GroupKey, GroupStats> out;
  for (const auto& [key, ts] : by_key(trials)) {
    auto v = acs_of(ts);
    out[key] = summarize(v);
  }
  return out;
}

double completion_rate(std::span<const TrialRecord> trials) {
  if (trials.empty()) throw ContractViolation("completion rate of an empty trial list");
  auto n = std::count_if(trials.begin(), trials.end(), completed);
  return static_cast<double>(n) / static_cast<double>(trials.size());
}

double critical_t(double df, double alpha) {
  const CriticalRow& r = row_for(df);
  if (alpha == 0.05) return r.t05;
  if (alpha == 0.01) return r.t01;
  if (alpha == 0.001) return r.t001;
  throw ContractViolation("alpha must be 0.05, 0.01 or 0.001");
}

Significance significance_for(double abs_t, double df) {
  const CriticalRow& r = row_for(df);
  if (abs_t > r.t001) return Significance::P001;
  if (abs_t > r.t01) return Significance::P01;
  if (abs_t > r.t05) return Significance::P05;
  return Significance::NotSignificant;
}

WelchResult welch_t(const GroupStats& a, const GroupStats& b) {
  if (a.n < 2 || b.n < 2) throw ContractViolation("Welch's t-test needs n >= 2 in both groups");
  double va = a.std * a.std / static_cast<double>(a.n);
  double vb = b.std * b.std / static_cast<double>(b.n);
  if (va + vb == 0.0) throw UndefinedStatistic("both groups have zero variance");
  WelchResult r;
  r.t = (a.mean - b.mean) / std::sqrt(va + vb);
  r.df = (va + vb) * (va + vb) /
         (va * va / static_cast<double>(a.n - 1) + vb * vb / static_cast<double>(b.n - 1));
  r.significance = significance_for(std::fabs(r.t), r.df);
  return r;
}

McpAdoption mcp_adoption(std::span<const TrialRecord> trials) {
  McpAdoption m;
  if (trials.empty()) return m;
  std::vector<double> used, unused;
  double calls = 0.0;
  for (const auto& t : trials) {
    calls += static_cast<double>(t.metrics.mcp_calls);
    (t.metrics.mcp_calls >= 1 ? used : unused).push_back(t.metrics.acs);
  }
  auto mean = [](const std::vector<double>& v) -> std::optional<double> {
    if (v.empty()) return std::nullopt;
    double s = 0.0;
    for (double x : v) s += x;
    return s / static_cast<double>(v.size());
  };
  m.used = used.size();
  m.unused = unused.size();
  m.adoption = static_cast<double>(m.used) / static_cast<double>(trials.size());
  m.mean_calls = calls / static_cast<double>(trials.size());
  m.mean_acs_used = mean(used);
  m.mean_acs_unused = mean(unused);
  return m;
}

std::optional<double> mean_fctc(std::span<const TrialRecord> trials) {
  double sum = 0.0;
  std::size_t n = 0;
  for (const auto& t : trials) {
    if (t.metrics.fctc) {
      sum += static_cast<double>(*t.metrics.fctc);
      ++n;
    }
  }
  if (n == 0) return std::nullopt;
  return sum / static_cast<double>(n);
}

WelchRequest parse_welch_request(std::string_view text) {
  static const std::regex re(R"(^\s*([^:\s]+)\s*:\s*([^:\s]+)\s*(?:on\s+(\S+))?\s*$)");
  std::string s(text);
  std::smatch m;
  if (!std::regex_match(s, m, re)) {
    throw FormatError("t-test request must look like 'C:A on G3': " + s);
  }
  WelchRequest r{m.str(1), m.str(2), std::nullopt};
  if (m[3].matched) {
    r.group = parse_task_group(m.str(3));
    if (!r.group) throw FormatError("unknown group in t-test request: " + m.str(3));
  }
  return r;
}

std::string format_stats_cell(const GroupStats& s) {
  return percent1(s.mean) + " ± " + percent1(s.std) + " (n=" + std::to_string(s.n) + ")";
}

std::string render_report(std::span<const TrialRecord> trials,
                          std::span<const WelchRequest> comparisons) {
  auto keyed = by_key(trials);
  std::set<std::string> conditions;
  for (const auto& t : trials) conditions.insert(t.condition);
  const TaskGroup groups[] = {TaskGroup::G1, TaskGroup::G2, TaskGroup::G3};

  std::string out = "## ACS by condition and group\n\n";
  out += "| Condition | G1 | G2 | G3 | Overall |\n|---|---|---|---|---|\n";
  for (const auto& c : conditions) {
    out += "| " + c + " |";
    std::vector<double> all;
    for (auto g : groups) {
      auto it = keyed.find(GroupKey{c, g});
      if (it == keyed.end()) {
        out += " - |";
        continue;
      }
      auto v = acs_of(it->second);
      all.insert(all.end(), v.begin(), v.end());
      out += " " + format_stats_cell(summarize(v)) + " |";
    }
    out += " " + format_stats_cell(summarize(all)) + " |\n";
  }

  out += "\n## Completion rate and FCTC\n\n";
  out += "| Condition | Group | Completion | Mean FCTC |\n|---|---|---|---|\n";
  for (const auto& [key, ts] : keyed) {
    auto done = std::count_if(ts.begin(), ts.end(), completed);
    out += "| " + key.condition + " | " + std::string(to_string(key.group)) + " | " +
           fmt("%.0f", completion_rate(ts) * 100.0) + "% (" + std::to_string(done) +
           "/" + std::to_string(ts.size()) + ") | ";
    auto f = mean_fctc(ts);
    out += cell_or_dash(f ? std::optional<std::string>(fmt("%.2f", *f)) : std::nullopt) +
           " |\n";
  }

  out += "\n## MCP adoption\n\n";
  out += "| Condition | Group | Adoption | Mean calls | ACS (calls >= 1) | ACS (calls = 0) |\n";
  out += "|---|---|---|---|---|---|\n";
  for (const auto& [key, ts] : keyed) {
    auto m = mcp_adoption(ts);
    auto pct = [](const std::optional<double>& v) {
      return v ? std::optional<std::string>(percent1(*v)) : std::nullopt;
    };
    out += "| " + key.condition + " | " + std::string(to_string(key.group)) + " | " +
           percent1(m.adoption) + " (" + std::to_string(m.used) + "/" +
           std::to_string(ts.size()) + ") | " + fmt("%.2f", m.mean_calls) + " | " +
           cell_or_dash(pct(m.mean_acs_used)) + " | " +
           cell_or_dash(pct(m.mean_acs_unused)) + " |\n";
  }

  if (!comparisons.empty()) {
    out += "\n## Welch's t-test\n\n";
    for (const auto& req : comparisons) {
      auto pick = [&](const std::string& cond) {
        std::vector<double> v;
        for (const auto& t : trials) {
          if (t.condition == cond && (!req.group || t.group == *req.group)) {
            v.push_back(t.metrics.acs);
          }
        }
        return v;
      };
      std::string scope = req.group ? std::string(to_string(*req.group)) : "all groups";
      out += req.a + " vs " + req.b + " (" + scope + "): ";
      auto va = pick(req.a);
      auto vb = pick(req.b);
      if (va.empty() || vb.empty()) {
        out += "not computed (no trials)\n";
        continue;
      }
      if (va.size() < 2 || vb.size() < 2) {
        out += "not computed (n < 2)\n";
        continue;
      }
      try {
        auto r = welch_t(summarize(va), summarize(vb));
        out += "t=" + fmt("%.2f", r.t) + ", df=" + fmt("%.1f", r.df) + ", " +
               std::string(label(r.significance)) + "\n";
      } catch (const UndefinedStatistic&) {
        out += "not computed (zero variance in both groups)\n";
      }
    }
  }
  return out;
}

std::optional<TaskGroup> group_from_task_id(std::string_view task_id) {
  // The last run of digits is the task number: "task_23" -> 23.
  auto end = task_id.find_last_of("0123456789");
  if (end == std::string_view::npos) return std::nullopt;
  auto begin = task_id.find_last_not_of("0123456789", end);
  begin = begin == std::string_view::npos ? 0 : begin + 1;
  std::string_view digits = task_id.substr(begin, end - begin + 1);
  if (digits.size() > 6) return std::nullopt;
  int n = std::stoi(std::string(digits));
  if (n >= 1 && n <= 10) return TaskGroup::G1;
  if (n >= 11 && n <= 20) return TaskGroup::G2;
  if (n >= 21 && n <= 30) return TaskGroup::G3;
  return std::nullopt;
}

TrialRecord trial_record_from_json(const json& doc) {
  if (!doc.is_object()) throw FormatError("trial: expected a JSON object");
  TrialRecord r;
  auto str = [&](const char* f, bool required) -> std::string {
    if (!doc.contains(f)) {
      if (required) throw FormatError(std::string("trial: missing field '") + f + "'");
      return {};
    }
    if (!doc[f].is_string()) throw FormatError(std::string("trial: '") + f + "' must be a string");
    return doc[f].get<std::string>();
  };
  r.task_id = str("task_id", true);
  r.condition = str("condition", true);
  r.timestamp = str("timestamp", false);
  if (doc.contains("run")) {
    if (!doc["run"].is_number_integer()) throw FormatError("trial: 'run' must be an integer");
    r.run = doc["run"].get<int>();
  }
  if (doc.contains("group")) {
    auto g = doc["group"].is_string() ? parse_task_group(doc["group"].get<std::string>())
                                      : std::nullopt;
    if (!g) throw FormatError("trial: group must be G1, G2 or G3");
    r.group = *g;
  } else {
    auto g = group_from_task_id(r.task_id);
    if (!g) throw FormatError("trial: cannot derive group from task_id " + r.task_id);
    r.group = *g;
  }
  if (!doc.contains("metrics")) throw FormatError("trial: missing field 'metrics'");
  r.metrics = trial_metrics_from_json(doc["metrics"]);
  return r;
}

std::vector<TrialRecord> dedupe_trials(std::vector<TrialRecord> trials) {
  std::map<std::tuple<std::string, std::string, int>, TrialRecord> latest;
  for (auto& t : trials) {
    auto key = std::make_tuple(t.task_id, t.condition, t.run);
    auto it = latest.find(key);
    if (it == latest.end()) {
      latest.emplace(key, std::move(t));
    } else if (t.timestamp >= it->second.timestamp) {
      it->second = std::move(t);
    }
  }
  std::vector<TrialRecord> out;
  for (auto& [_, t] : latest) out.push_back(std::move(t));
  return out;
}

std::vector<TrialRecord> load_result_set(const std::filesystem::path& dir) {
  namespace fs = std::filesystem;
  std::error_code ec;
  if (!fs::is_directory(dir, ec)) throw IoError(dir.string(), "results directory not found");
  std::vector<fs::path> files;
  for (const auto& e : fs::directory_iterator(dir, ec)) {
    if (e.is_regular_file() && e.path().extension() == ".json") files.push_back(e.path());
  }
  if (ec) throw IoError(dir.string(), "cannot read results directory");
  std::sort(files.begin(), files.end());
  std::vector<TrialRecord> trials;
  for (const auto& f : files) {
    json doc;
    try {
      doc = json::parse(read_text_file(f));
    } catch (const json::parse_error& e) {
      throw FormatError(f.string() + ": " + e.what());
    }
    try {
      trials.push_back(trial_record_from_json(doc));
    } catch (const FormatError& e) {
      throw FormatError(f.string() + ": " + e.what());
    }
  }
  if (trials.empty()) throw EmptyResultSet("no trial files in " + dir.string());
  return dedupe_trials(std::move(trials));
}

}  // namespace codenav
