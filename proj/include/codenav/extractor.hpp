#pragma once

#include <filesystem>
#include <map>
#include <optional>
#include <set>
#include <string>
#include <vector>

#include "codenav/edge.hpp"
#include "codenav/error.hpp"
#include "codenav/module_path.hpp"
#include "codenav/syntax.hpp"

namespace codenav {

using FileSet = std::set<ModulePath>;

// Sorted ".py" files under root, skipping hidden and vendored directories.
std::vector<ModulePath> discover_files(const std::filesystem::path& repo_root);

bool is_excluded_dir(std::string_view name);

// A from-import of a package may name several submodules, so this can yield
// more than one file. Empty means external or unresolvable.
std::vector<ModulePath> resolve_import(const ImportSpec& spec,
                                       const ModulePath& importer,
                                       const FileSet& files);

// Single-module form: the file the dotted target itself names.
std::optional<ModulePath> resolve_module(const std::string& dotted,
                                         int relative_level,
                                         const ModulePath& importer,
                                         const FileSet& files);

struct SymbolRef {
  ModulePath file;
  std::string symbol;  // qualified within file, e.g. "AppSettings.Config"
  bool operator==(const SymbolRef&) const = default;
};

// Every class reachable by qualified name, plus the per-file bindings needed
// to follow re-exports ("from .base import X" in a package __init__).
class ClassRegistry {
 public:
  ClassRegistry() = default;
  ClassRegistry(const std::vector<ModuleSyntax>& syntaxes, const FileSet& files);

  void add_class(const ModulePath& file, const std::string& qualified);
  bool is_class(const ModulePath& file, const std::string& qualified) const;
  std::size_t size() const { return classes_.size(); }

  // Follows import re-exports up to a fixed depth. Returns the defining
  // location when `symbol` in `file` names a class.
  std::optional<SymbolRef> locate_class(const ModulePath& file,
                                        const std::string& symbol) const;

  // Resolves a dotted expression as written in `syntax` to a class.
  std::optional<SymbolRef> resolve_expression(const ModuleSyntax& syntax,
                                              const std::string& expr) const;

 private:
  std::optional<SymbolRef> locate(const ModulePath& file,
                                  const std::string& symbol, int depth) const;
  std::optional<SymbolRef> resolve_in(const ModuleSyntax& syntax,
                                      const std::string& expr, int depth) const;

  std::set<std::pair<ModulePath, std::string>> classes_;
  std::map<ModulePath, const ModuleSyntax*> syntax_;
  const FileSet* files_ = nullptr;
};

std::vector<DependencyEdge> extract_edges(const ModuleSyntax& syntax,
                                          const FileSet& files,
                                          const ClassRegistry& registry);

struct IndexedRepository {
  std::vector<ModulePath> files;
  std::vector<ModuleSyntax> syntaxes;  // parsed files only
  std::vector<ParseError> parse_errors;
  std::vector<DependencyEdge> edges;   // sorted, deduplicated
};

IndexedRepository index_repository(const std::filesystem::path& repo_root);

std::string read_text_file(const std::filesystem::path& path);

}  // namespace codenav
