#pragma once

#include <cstdint>
#include <filesystem>
#include <span>
#include <string>
#include <string_view>
#include <unordered_map>
#include <vector>

#include "codenav/module_path.hpp"

namespace codenav {

enum class ChunkKind { Function, Class, WholeFile };

struct CodeChunk {
  ModulePath file;
  std::string symbol;  // definition name, "<module>" for whole-file chunks
  ChunkKind kind = ChunkKind::WholeFile;
  std::vector<std::string> tokens;
  std::size_t length() const { return tokens.size(); }
};

struct SourceFile {
  ModulePath path;
  std::string text;
};

inline constexpr std::string_view kModuleSymbol = "<module>";

std::vector<std::string> tokenize(std::string_view text);

// One chunk per top-level def/class (decorators included); whole-file chunk
// when there are none. Chunks without any term are dropped.
std::vector<CodeChunk> chunk_file(const SourceFile& file);
std::vector<CodeChunk> chunk_repository(std::span<const SourceFile> files);

struct Bm25Params {
  double k1 = 1.5;
  double b = 0.75;
};

class SearchIndex {
 public:
  SearchIndex() = default;
  static SearchIndex build(std::vector<CodeChunk> chunks, Bm25Params params = {});

  const std::vector<CodeChunk>& chunks() const { return chunks_; }
  std::size_t doc_count() const { return chunks_.size(); }
  double avg_length() const { return avg_length_; }
  const Bm25Params& params() const { return params_; }
  std::size_t df(const std::string& term) const;
  double idf(const std::string& term) const;
  std::uint32_t tf(std::size_t chunk, const std::string& term) const;

 private:
  std::vector<CodeChunk> chunks_;
  std::vector<std::unordered_map<std::string, std::uint32_t>> tf_;
  std::unordered_map<std::string, std::size_t> df_;
  double avg_length_ = 0.0;
  Bm25Params params_;
};

double bm25_score(std::span<const std::string> query_terms, std::size_t chunk,
                  const SearchIndex& index);

struct SearchResult {
  ModulePath file;
  double score = 0.0;
  bool operator==(const SearchResult&) const = default;
};

inline constexpr std::size_t kDefaultTopN = 8;
inline constexpr std::size_t kPreambleSize = 10;

// Throws ContractViolation when top_n is 0.
std::vector<SearchResult> search(const SearchIndex& index, std::string_view query,
                                 std::size_t top_n = kDefaultTopN);

std::string format_score(double score);
// "1. path (score: 1.234)" lines, or "(no matches)".
std::string render_results(std::span<const SearchResult> results);
std::string render_bm25_preamble(std::span<const SearchResult> results);

std::vector<SourceFile> load_sources(const std::filesystem::path& repo_root);
SearchIndex build_search_index(const std::filesystem::path& repo_root);

}  // namespace codenav
