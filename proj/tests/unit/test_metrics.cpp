#include <string>

#include "codenav/metrics.hpp"
#include "doctest.h"

using namespace codenav;
using nlohmann::json;

namespace {

using Paths = std::set<ModulePath>;

ModulePath mp(const char* s) { return ModulePath(s); }

std::string use(const std::string& id, const std::string& name, const json& input) {
  return json{{"type", "assistant"},
              {"message",
               {{"role", "assistant"},
                {"content", json::array({{{"type", "tool_use"},
                                          {"id", id},
                                          {"name", name},
                                          {"input", input}}})}}}}
             .dump() +
         "\n";
}

std::string result(const std::string& id, const json& content) {
  return json{{"type", "user"},
              {"message",
               {{"role", "user"},
                {"content", json::array({{{"type", "tool_result"},
                                          {"tool_use_id", id},
                                          {"content", content}}})}}}}
             .dump() +
         "\n";
}

ToolCallRecord call(const std::string& name, json args,
                    std::optional<std::string> res = std::nullopt) {
  ToolCallRecord r;
  r.tool_name = name;
  r.arguments = std::move(args);
  r.result_text = std::move(res);
  return r;
}

Transcript of(std::vector<ToolCallRecord> calls) {
  Transcript t;
  for (std::size_t i = 0; i < calls.size(); ++i) calls[i].ordinal = i + 1;
  t.calls = std::move(calls);
  return t;
}

}  // namespace

TEST_CASE("parse_transcript keeps tool calls in order") {
  auto text = use("t1", "Read", {{"file_path", "/r/app/main.py"}}) +
              use("t2", "Edit", {{"file_path", "/r/app/main.py"}}) +
              use("t3", "Bash", {{"command", "ls"}});
  auto t = parse_transcript(text, "x.jsonl");
  REQUIRE(t.calls.size() == 3);
  CHECK(t.calls[0].tool_name == "Read");
  CHECK(t.calls[1].tool_name == "Edit");
  CHECK(t.calls[2].tool_name == "Bash");
  for (std::size_t i = 0; i < 3; ++i) CHECK(t.calls[i].ordinal == i + 1);
  CHECK(t.source_path == "x.jsonl");
  CHECK(t.malformed_lines == 0);
}

TEST_CASE("parse_transcript counts malformed lines") {
  auto text = use("t1", "Read", {{"file_path", "a"}}) + "{not json\n" +
              use("t2", "Read", {{"file_path", "b"}});
  auto t = parse_transcript(text);
  CHECK(t.calls.size() == 2);
  CHECK(t.malformed_lines == 1);
}

TEST_CASE("parse_transcript on empty input") {
  CHECK_THROWS_AS(parse_transcript(""), EmptyTranscript);
  CHECK_THROWS_AS(parse_transcript("\n\n garbage\n"), EmptyTranscript);
}

TEST_CASE("tool results pair by id, including text blocks and early results") {
  auto text = use("a", "Grep", {{"pattern", "x"}}) +
              result("a", json::array({{{"type", "text"}, {"text", "one"}},
                                       {{"type", "text"}, {"text", "two"}}})) +
              result("later", "early") + use("later", "Bash", {{"command", "ls"}}) +
              use("none", "Read", {{"file_path", "f"}});
  auto t = parse_transcript(text);
  REQUIRE(t.calls.size() == 3);
  CHECK(*t.calls[0].result_text == "one\ntwo");
  CHECK(*t.calls[1].result_text == "early");
  CHECK_FALSE(t.calls[2].result_text.has_value());
}

TEST_CASE("flat {tool, args} records") {
  auto t = parse_transcript(
      R"({"tool":"Read","args":{"file_path":"app/x.py"}})"
      "\n"
      R"({"tool":"Grep","args":{"pattern":"q"},"result":"nothing"})"
      "\n");
  REQUIRE(t.calls.size() == 2);
  CHECK(t.calls[0].arguments["file_path"] == "app/x.py");
  CHECK(*t.calls[1].result_text == "nothing");
}

TEST_CASE("files_accessed normalises Read/Edit/Write and Bash paths") {
  auto t = of({call("Read", {{"file_path", "/repo/app/main.py"}}),
               call("Bash", {{"command", "grep -n foo app/api/routes/api.py tests/conftest.py"}}),
               call("Write", {{"file_path", "/repo/app/templates/x.html"}}),
               call("Edit", {{"file_path", "/repo/README.md"}}),
               call("Glob", {{"pattern", "**/*.py"}}),
               call("Grep", {{"pattern", "app/core/config.py"}})});
  CHECK(files_accessed(t, "/repo") == Paths{mp("app/api/routes/api.py"), mp("app/main.py"),
                                            mp("app/templates/x.html"),
                                            mp("tests/conftest.py")});
}

TEST_CASE("normalize_accessed_path") {
  CHECK(normalize_accessed_path("/repo/app/main.py", "/repo")->str() == "app/main.py");
  CHECK(normalize_accessed_path("/repo/app/main.py", "/repo/")->str() == "app/main.py");
  CHECK(normalize_accessed_path("app/./db/../main.py", "/repo")->str() == "app/main.py");
  CHECK(normalize_accessed_path("/repository/app/main.py", "/repo")->str() ==
        "repository/app/main.py");
  CHECK_FALSE(normalize_accessed_path("/repo/../etc/passwd", "/repo"));
  CHECK_FALSE(normalize_accessed_path("/repo/setup.cfg", "/repo"));
  CHECK_FALSE(normalize_accessed_path("", "/repo"));
}

TEST_CASE("compute_acs") {
  Paths req{mp("a.py"), mp("b.py"), mp("c.py"), mp("d.py")};
  CHECK(compute_acs({mp("a.py"), mp("b.py"), mp("c.py")}, req) == 0.75);
  CHECK(compute_acs({mp("a.py"), mp("b.py"), mp("c.py"), mp("d.py"), mp("e.py")}, req) == 1.0);
  CHECK(compute_acs({mp("z.py")}, req) == 0.0);
  CHECK_THROWS_AS(compute_acs({mp("a.py")}, {}), ContractViolation);
}

TEST_CASE("compute_fctc is the 1-based first hit") {
  Paths req{mp("app/req.py")};
  CHECK(compute_fctc(of({call("Read", {{"file_path", "/r/app/req.py"}})}), req, "/r") == 1u);
  CHECK(compute_fctc(of({call("Glob", {{"pattern", "*"}}),
                         call("Read", {{"file_path", "/r/app/other.py"}}),
                         call("Read", {{"file_path", "/r/app/req.py"}})}),
                     req, "/r") == 3u);
  CHECK_FALSE(compute_fctc(of({call("Read", {{"file_path", "/r/app/other.py"}})}), req, "/r"));
}

TEST_CASE("count_mcp_calls matches names and namespaced names") {
  CHECK(count_mcp_calls(of({call("get_architectural_context", json::object()),
                            call("semantic_search", json::object())})) == 2);
  CHECK(count_mcp_calls(of({call("Read", json::object())})) == 0);
  CHECK(count_mcp_calls(of({call("mcp__codecompass__get_architectural_context",
                                 json::object())})) == 1);
  CHECK(count_mcp_calls(of({call("my_semantic_search", json::object()),
                            call("__semantic_search_x", json::object())})) == 0);
  CHECK(is_mcp_tool("a__b__semantic_search", "semantic_search"));
  CHECK_FALSE(is_mcp_tool("__semantic_search", "semantic_search"));
}

TEST_CASE("detect_veto_event clauses") {
  Paths req{mp("app/api/dependencies/database.py")};
  auto graph_hit = call("get_architectural_context", {{"file_path", "app/db/repositories/base.py"}},
                        "← [INSTANTIATES] app/api/dependencies/database.py");
  CHECK(detect_veto_event(of({call("Grep", {{"pattern", "x"}}, ""), graph_hit}), req));
  CHECK_FALSE(detect_veto_event(of({call("Grep", {{"pattern", "x"}}, "")}), req));
  CHECK_FALSE(detect_veto_event(
      of({call("Grep", {{"pattern", "x"}}, "app/api/dependencies/database.py:3"), graph_hit}),
      req));
  CHECK_FALSE(detect_veto_event(
      of({call("Grep", {{"pattern", "x"}}, ""),
          call("Bash", {{"command", "grep"}}, "app/api/dependencies/database.py"), graph_hit}),
      req));
  // Missing result texts: conservative false.
  CHECK_FALSE(detect_veto_event(of({call("Grep", {{"pattern", "x"}}),
                                    call("get_architectural_context", json::object())}),
                                req));
  CHECK_FALSE(detect_veto_event(of({graph_hit}), req));
  auto graph_miss = call("get_architectural_context", json::object(), "Total: 0 structural connections");
  CHECK_FALSE(detect_veto_event(of({call("Grep", json::object(), ""), graph_miss}), req));
}

TEST_CASE("golden task-23 transcript") {
  auto task = load_task_spec(std::string(CODENAV_TEST_DATA) + "/task_23.json");
  auto t = load_transcript(std::string(CODENAV_TEST_DATA) + "/task23_transcript.jsonl");
  CHECK(t.calls.size() == 6);
  auto m = score_trial(t, task, "/workspace/fastapi-realworld-example-app");
  CHECK(m.acs == 1.0);
  CHECK(m.mcp_calls == 1);
  CHECK(m.veto_event);
  CHECK(m.fctc == 2u);
  CHECK(m.files_accessed == Paths{mp("app/api/dependencies/database.py"),
                                  mp("app/db/repositories/base.py")});
}

TEST_CASE("task spec parsing") {
  auto s = task_spec_from_json(json::parse(
      R"({"id":"task_01","group":"G1","prompt":"p","required_files":["app/resources/strings.py"]})"));
  CHECK(s.group == TaskGroup::G1);
  CHECK(s.required_files.size() == 1);
  CHECK_THROWS_AS(task_spec_from_json(json::parse(R"({"id":"t","group":"G4","required_files":["a.py"]})")),
                  FormatError);
  CHECK_THROWS_AS(task_spec_from_json(json::parse(R"({"id":"t","group":"G1","required_files":[]})")),
                  FormatError);
  CHECK_THROWS_AS(task_spec_from_json(json::parse(R"({"id":"t","group":"G1","required_files":["/abs.py"]})")),
                  FormatError);
}

TEST_CASE("trial metrics JSON round trip") {
  TrialMetrics m;
  m.acs = 0.5;
  m.fctc = 4;
  m.mcp_calls = 2;
  m.veto_event = true;
  m.files_accessed = {mp("app/a.py")};
  auto j = to_json(m);
  for (const char* k : {"acs", "fctc", "mcp_calls", "veto_event", "files_accessed"}) {
    CHECK(j.contains(k));
  }
  CHECK(trial_metrics_from_json(j) == m);
  m.fctc.reset();
  CHECK(to_json(m)["fctc"].is_null());
  CHECK(trial_metrics_from_json(to_json(m)) == m);
}
