#include "codenav/cli.hpp"

#include <algorithm>
#include <chrono>
#include <iostream>

#include "CLI11.hpp"
#include "codenav/extractor.hpp"
#include "codenav/graph.hpp"
#include "codenav/metrics.hpp"
#include "codenav/report.hpp"
#include "codenav/search.hpp"
#include "codenav/toolserver.hpp"

namespace codenav {
namespace {

struct Options {
  std::string repo;
  std::string out_path;
  std::string graph;
  std::string file;
  std::string format = "text";
  std::string query;
  std::size_t top_n = kDefaultTopN;
  bool preamble = false;
  std::string transcript;
  std::string task;
  std::string repo_prefix;
  std::string results;
  std::vector<std::string> ttests;
};

int cmd_index(const Options& o, std::ostream& out, std::ostream& err) {
  auto repo = index_repository(o.repo);
  for (const auto& e : repo.parse_errors) err << "warning: " << e.what() << "\n";
  CodeGraph g = build_graph(repo.files, repo.edges);
  save_graph(g, o.out_path);
  out << "nodes=" << g.nodes().size() << " edges=" << g.edges().size()
      << " imports=" << g.count(EdgeKind::Imports)
      << " inherits=" << g.count(EdgeKind::Inherits)
      << " instantiates=" << g.count(EdgeKind::Instantiates) << "\n";
  return exit_code::kOk;
}

int cmd_context(const Options& o, std::ostream& out) {
  CodeGraph g = load_graph(o.graph);
  auto p = ModulePath::parse(o.file);
  if (!p) throw FileNotInGraph(o.file);
  auto ctx = architectural_context(g, *p);
  out << (o.format == "json" ? context_to_json(ctx) : render_context(ctx)) << "\n";
  return exit_code::kOk;
}

int cmd_search(const Options& o, std::ostream& out) {
  if (o.top_n == 0) throw ContractViolation("--top-n must be at least 1");
  SearchIndex index = build_search_index(o.repo);
  if (o.preamble) {
    out << render_bm25_preamble(search(index, o.query, kPreambleSize)) << "\n";
    return exit_code::kOk;
  }
  auto results = search(index, o.query, o.top_n);
  if (o.format == "json") {
    nlohmann::json a = nlohmann::json::array();
    for (const auto& r : results) a.push_back({{"file", r.file.str()}, {"score", r.score}});
    out << a.dump(2) << "\n";
  } else {
    out << render_results(results) << "\n";
  }
  return exit_code::kOk;
}

int cmd_serve(const Options& o, std::istream& in, std::ostream& out) {
  CodeGraph g = load_graph(o.graph);
  SearchIndex index = build_search_index(o.repo);
  ToolServer(g, index).serve(in, out);
  return exit_code::kOk;
}

int cmd_score(const Options& o, std::ostream& out, std::ostream& err) {
  TaskSpec task = load_task_spec(o.task);
  Transcript t = load_transcript(o.transcript);
  if (t.malformed_lines > 0) {
    err << "warning: skipped " << t.malformed_lines << " malformed line(s) in "
        << o.transcript << "\n";
  }
  TrialMetrics m = score_trial(t, task, o.repo_prefix);
  if (o.format == "json") {
    out << to_json(m).dump(2) << "\n";
    return exit_code::kOk;
  }
  out << "task: " << task.id << " (" << to_string(task.group) << ")\n";
  char acs[32];
  std::snprintf(acs, sizeof acs, "%.3f", m.acs);
  out << "acs: " << acs << "\n";
  out << "fctc: " << (m.fctc ? std::to_string(*m.fctc) : std::string("-")) << "\n";
  out << "mcp_calls: " << m.mcp_calls << "\n";
  out << "veto_event: " << (m.veto_event ? "true" : "false") << "\n";
  out << "files_accessed:";
  for (const auto& f : m.files_accessed) out << " " << f;
  out << "\n";
  return exit_code::kOk;
}

int cmd_report(const Options& o, std::ostream& out) {
  std::vector<WelchRequest> reqs;
  for (const auto& t : o.ttests) reqs.push_back(parse_welch_request(t));
  auto trials = load_result_set(o.results);
  out << render_report(trials, reqs);
  return exit_code::kOk;
}

}  // namespace

int run_cli(const std::vector<std::string>& args, std::istream& in,
            std::ostream& out, std::ostream& err) {
  CLI::App app{"Static code-navigation engine: dependency graph, BM25 search, "
               "tool server and transcript metrics",
               "codenav"};
  app.require_subcommand(1);
  Options o;
  auto formats = CLI::IsMember({"text", "json"});

  auto* index = app.add_subcommand("index", "Index a repository into a graph file");
  index->add_option("--repo", o.repo, "Repository root")->required();
  index->add_option("--out", o.out_path, "Graph file to write")->required();

  auto* context = app.add_subcommand("context", "Print the 1-hop context of a file");
  context->add_option("--graph", o.graph, "Graph file")->required();
  context->add_option("--file", o.file, "Repo-relative file path")->required();
  context->add_option("--format", o.format, "text or json")->check(formats);

  auto* search_cmd = app.add_subcommand("search", "BM25 search over a repository");
  search_cmd->add_option("--repo", o.repo, "Repository root")->required();
  search_cmd->add_option("--query", o.query, "Query text")->required();
  search_cmd->add_option("--top-n", o.top_n, "Maximum files to list");
  search_cmd->add_flag("--preamble", o.preamble, "Print the top-10 prompt block");
  search_cmd->add_option("--format", o.format, "text or json")->check(formats);

  auto* serve = app.add_subcommand("serve", "Run the JSON-RPC tool server on stdio");
  serve->add_option("--graph", o.graph, "Graph file")->required();
  serve->add_option("--repo", o.repo, "Repository root for search")->required();

  auto* score = app.add_subcommand("score", "Score one transcript against a task");
  score->add_option("--transcript", o.transcript, "JSONL transcript")->required();
  score->add_option("--task", o.task, "Task spec JSON")->required();
  score->add_option("--repo-prefix", o.repo_prefix, "Absolute repo path used in the session")
      ->required();
  score->add_option("--format", o.format, "text or json")->check(formats);

  auto* report = app.add_subcommand("report", "Aggregate a directory of trial files");
  report->add_option("--results", o.results, "Directory of trial JSON files")->required();
  report->add_option("--ttest", o.ttests, "Comparison such as 'C:A on G3'")
      ->allow_extra_args(false);

  std::vector<std::string> reversed(args.rbegin(), args.rend());
  try {
    app.parse(reversed);
  } catch (const CLI::CallForHelp&) {
    out << app.help();
    return exit_code::kOk;
  } catch (const CLI::ParseError& e) {
    const CLI::App* failing = &app;
    for (auto* sub : app.get_subcommands()) failing = sub;
    err << "error: " << e.what() << "\n";
    if (failing != &app) err << "run '" << failing->get_name() << " --help' for usage\n";
    return exit_code::kInput;
  }

  try {
    if (index->parsed()) return cmd_index(o, out, err);
    if (context->parsed()) return cmd_context(o, out);
    if (search_cmd->parsed()) return cmd_search(o, out);
    if (serve->parsed()) return cmd_serve(o, in, out);
    if (score->parsed()) return cmd_score(o, out, err);
    if (report->parsed()) return cmd_report(o, out);
  } catch (const FileNotInGraph& e) {
    err << e.what() << "\n";
    return exit_code::kNotFound;
  } catch (const EmptyTranscript& e) {
    err << "error: " << e.what() << "\n";
    return exit_code::kEmptyData;
  } catch (const EmptyResultSet& e) {
    err << "error: " << e.what() << "\n";
    return exit_code::kEmptyData;
  } catch (const Error& e) {
    err << "error: " << e.what() << "\n";
    return exit_code::kInput;
  } catch (const std::exception& e) {
    err << "internal error: " << e.what() << "\n";
    return exit_code::kInternal;
  }
  return exit_code::kInput;
}

}  // namespace codenav
