#include "codenav/search.hpp"

#include <algorithm>
#include <cctype>
#include <cmath>
#include <cstdio>
#include <map>

#include "codenav/error.hpp"
#include "codenav/extractor.hpp"
#include "codenav/syntax.hpp"

namespace codenav {
namespace {

bool is_alnum(unsigned char c) {
  return (c >= 'a' && c <= 'z') || (c >= 'A' && c <= 'Z') ||
         (c >= '0' && c <= '9');
}
bool is_upper(unsigned char c) { return c >= 'A' && c <= 'Z'; }
bool is_lower_or_digit(unsigned char c) {
  return (c >= 'a' && c <= 'z') || (c >= '0' && c <= '9');
}

void push_term(std::vector<std::string>& out, std::string_view word) {
  if (word.size() < 2) return;
  std::string t(word);
  for (auto& c : t) c = static_cast<char>(std::tolower(static_cast<unsigned char>(c)));
  out.push_back(std::move(t));
}

// Splits one alphanumeric run at case boundaries: "getHTTPServer" ->
// get, HTTP, Server.
void split_identifier(std::vector<std::string>& out, std::string_view run) {
  std::size_t start = 0;
  for (std::size_t i = 1; i < run.size(); ++i) {
    unsigned char prev = run[i - 1];
    unsigned char cur = run[i];
    bool boundary = is_lower_or_digit(prev) && is_upper(cur);
    if (!boundary && is_upper(prev) && is_upper(cur) && i + 1 < run.size() &&
        std::islower(static_cast<unsigned char>(run[i + 1]))) {
      boundary = true;  // end of an acronym
    }
    if (boundary) {
      push_term(out, run.substr(start, i - start));
      start = i;
    }
  }
  push_term(out, run.substr(start));
}

std::string slice_lines(std::string_view text, int first, int last) {
  std::size_t pos = 0;
  int line = 1;
  while (line < first && pos < text.size()) {
    auto nl = text.find('\n', pos);
    if (nl == std::string_view::npos) return {};
    pos = nl + 1;
    ++line;
  }
  std::size_t end = pos;
  while (line <= last && end < text.size()) {
    auto nl = text.find('\n', end);
    end = nl == std::string_view::npos ? text.size() : nl + 1;
    ++line;
  }
  return std::string(text.substr(pos, end - pos));
}

}  // namespace

std::vector<std::string> tokenize(std::string_view text) {
  std::vector<std::string> out;
  std::size_t i = 0;
  while (i < text.size()) {
    if (!is_alnum(static_cast<unsigned char>(text[i]))) {
      ++i;
      continue;
    }
    std::size_t j = i;
    while (j < text.size() && is_alnum(static_cast<unsigned char>(text[j]))) ++j;
    split_identifier(out, text.substr(i, j - i));
    i = j;
  }
  return out;
}

std::vector<CodeChunk> chunk_file(const SourceFile& file) {
  std::vector<CodeChunk> out;
  if (file.text.empty()) return out;
  std::vector<TopLevelDefinition> defs;
  try {
    defs = parse_source(file.text, file.path).definitions;
  } catch (const ParseError&) {
    defs.clear();  // unparsable: whole-file chunk
  }
  if (defs.empty()) {
    CodeChunk c{file.path, std::string(kModuleSymbol), ChunkKind::WholeFile,
                tokenize(file.text)};
    if (c.length() > 0) out.push_back(std::move(c));
    return out;
  }
  std::map<std::string, int> seen;
  for (const auto& d : defs) {
    int n = ++seen[d.name];
    std::string symbol = n == 1 ? d.name : d.name + "#" + std::to_string(n);
    CodeChunk c{file.path, std::move(symbol),
                d.kind == DefinitionKind::Class ? ChunkKind::Class
                                                : ChunkKind::Function,
                tokenize(slice_lines(file.text, d.first_line, d.last_line))};
    if (c.length() > 0) out.push_back(std::move(c));
  }
  return out;
}

std::vector<CodeChunk> chunk_repository(std::span<const SourceFile> files) {
  std::vector<CodeChunk> out;
  for (const auto& f : files) {
    auto cs = chunk_file(f);
    std::move(cs.begin(), cs.end(), std::back_inserter(out));
  }
  return out;
}

SearchIndex SearchIndex::build(std::vector<CodeChunk> chunks, Bm25Params params) {
  SearchIndex idx;
  idx.params_ = params;
  idx.chunks_ = std::move(chunks);
  idx.tf_.resize(idx.chunks_.size());
  std::size_t total = 0;
  for (std::size_t i = 0; i < idx.chunks_.size(); ++i) {
    for (const auto& t : idx.chunks_[i].tokens) ++idx.tf_[i][t];
    for (const auto& [term, _] : idx.tf_[i]) ++idx.df_[term];
    total += idx.chunks_[i].length();
  }
  idx.avg_length_ = idx.chunks_.empty()
                        ? 0.0
                        : static_cast<double>(total) /
                              static_cast<double>(idx.chunks_.size());
  return idx;
}

std::size_t SearchIndex::df(const std::string& term) const {
  auto it = df_.find(term);
  return it == df_.end() ? 0 : it->second;
}

double SearchIndex::idf(const std::string& term) const {
  double n = static_cast<double>(doc_count());
  double d = static_cast<double>(df(term));
  return std::log(1.0 + (n - d + 0.5) / (d + 0.5));
}

std::uint32_t SearchIndex::tf(std::size_t chunk, const std::string& term) const {
  const auto& m = tf_.at(chunk);
  auto it = m.find(term);
  return it == m.end() ? 0 : it->second;
}

double bm25_score(std::span<const std::string> query_terms, std::size_t chunk,
                  const SearchIndex& index) {
  const auto& p = index.params();
  double len = static_cast<double>(index.chunks().at(chunk).length());
  double norm = p.k1 * (1.0 - p.b + p.b * len / index.avg_length());
  double score = 0.0;
  for (const auto& t : query_terms) {
    double f = index.tf(chunk, t);
    if (f == 0.0) continue;
    score += index.idf(t) * (f * (p.k1 + 1.0)) / (f + norm);
  }
  return score;
}

std::vector<SearchResult> search(const SearchIndex& index, std::string_view query,
                                 std::size_t top_n) {
  if (top_n == 0) throw ContractViolation("top_n must be at least 1");
  auto terms = tokenize(query);
  if (terms.empty() || index.doc_count() == 0) return {};
  std::map<ModulePath, double> best;
  for (std::size_t i = 0; i < index.doc_count(); ++i) {
    double s = bm25_score(terms, i, index);
    if (s <= 0.0) continue;
    auto& b = best[index.chunks()[i].file];
    b = std::max(b, s);
  }
  std::vector<SearchResult> out;
  for (auto& [file, s] : best) out.push_back(SearchResult{file, s});
  std::stable_sort(out.begin(), out.end(),
                   [](const SearchResult& a, const SearchResult& b) {
                     if (a.score != b.score) return a.score > b.score;
                     return a.file < b.file;
                   });
  if (out.size() > top_n) out.resize(top_n);
  return out;
}

std::string format_score(double score) {
  char buf[64];
  std::snprintf(buf, sizeof buf, "%.3f", score);
  return buf;
}

std::string render_results(std::span<const SearchResult> results) {
  if (results.empty()) return "(no matches)";
  std::string out;
  for (std::size_t i = 0; i < results.size(); ++i) {
    if (i) out += "\n";
    out += std::to_string(i + 1) + ". " + results[i].file.str() +
           " (score: " + format_score(results[i].score) + ")";
  }
  return out;
}

std::string render_bm25_preamble(std::span<const SearchResult> results) {
  return "## Relevant files (BM25)\n" +
         render_results(results.first(std::min(results.size(), kPreambleSize)));
}

std::vector<SourceFile> load_sources(const std::filesystem::path& repo_root) {
  std::vector<SourceFile> out;
  for (auto& f : discover_files(repo_root)) {
    std::string text = read_text_file(repo_root / f.str());
    out.push_back(SourceFile{std::move(f), std::move(text)});
  }
  return out;
}

SearchIndex build_search_index(const std::filesystem::path& repo_root) {
  auto sources = load_sources(repo_root);
  return SearchIndex::build(chunk_repository(sources));
}

}  // namespace codenav
