#include "codenav/extractor.hpp"

#include <algorithm>
#include <array>
#include <fstream>
#include <regex>
#include <sstream>

namespace codenav {
namespace fs = std::filesystem;

namespace {

constexpr int kMaxReexportDepth = 8;

std::string join_path(const std::string& dir, const std::string& rest) {
  if (dir.empty()) return rest;
  if (rest.empty()) return dir;
  return dir + "/" + rest;
}

std::string dots_to_slashes(std::string s) {
  std::replace(s.begin(), s.end(), '.', '/');
  return s;
}

std::optional<ModulePath> existing(const std::string& candidate,
                                   const FileSet& files) {
  auto p = ModulePath::parse(candidate);
  if (p && files.contains(*p)) return p;
  return std::nullopt;
}

// Directory the import is anchored at; nullopt when the dots climb past the
// repository root.
std::optional<std::string> anchor_dir(int level, const ModulePath& importer) {
  if (level == 0) return std::string();
  std::string dir = importer.parent_dir();
  for (int i = 1; i < level; ++i) {
    if (dir.empty()) return std::nullopt;
    auto slash = dir.rfind('/');
    dir = slash == std::string::npos ? std::string() : dir.substr(0, slash);
  }
  return dir;
}

bool is_package_dir(const std::string& dir, const FileSet& files) {
  if (dir.empty()) return false;
  std::string prefix = dir + "/";
  auto it = std::lower_bound(
      files.begin(), files.end(), prefix,
      [](const ModulePath& p, const std::string& s) { return p.str() < s; });
  return it != files.end() && it->str().starts_with(prefix);
}

std::string strip_spaces(const std::string& s) {
  std::string out;
  for (char c : s) {
    if (c != ' ' && c != '\t' && c != '\n' && c != '\r' && c != '\\') {
      out.push_back(c);
    }
  }
  return out;
}

std::vector<std::string> split_dots(const std::string& s) {
  std::vector<std::string> parts;
  std::size_t start = 0;
  while (true) {
    auto dot = s.find('.', start);
    parts.push_back(s.substr(start, dot - start));
    if (dot == std::string::npos) return parts;
    start = dot + 1;
  }
}

std::string join_dots(const std::vector<std::string>& parts, std::size_t from,
                      std::size_t to) {
  std::string out;
  for (std::size_t i = from; i < to; ++i) {
    if (i > from) out.push_back('.');
    out += parts[i];
  }
  return out;
}

}  // namespace

bool is_excluded_dir(std::string_view name) {
  static constexpr std::array<std::string_view, 6> kSkip = {
      "venv", ".venv", "node_modules", "__pycache__", "build", "dist"};
  if (!name.empty() && name.front() == '.') return true;
  return std::find(kSkip.begin(), kSkip.end(), name) != kSkip.end();
}

std::vector<ModulePath> discover_files(const fs::path& repo_root) {
  std::error_code ec;
  if (!fs::is_directory(repo_root, ec)) {
    throw IoError(repo_root.string(), "repository root is not a readable directory");
  }
  std::vector<ModulePath> out;
  fs::recursive_directory_iterator it(
      repo_root, fs::directory_options::skip_permission_denied, ec);
  if (ec) throw IoError(repo_root.string(), "cannot read repository root");
  for (; it != fs::recursive_directory_iterator(); it.increment(ec)) {
    if (ec) throw IoError(it->path().string(), "cannot read directory entry");
    const fs::path& p = it->path();
    std::string name = p.filename().string();
    if (it->is_directory(ec)) {
      if (is_excluded_dir(name)) it.disable_recursion_pending();
      continue;
    }
    if (name.empty() || name.front() == '.') continue;
    if (!name.ends_with(".py") || !it->is_regular_file(ec)) continue;
    auto rel = ModulePath::parse(fs::relative(p, repo_root).generic_string());
    if (rel) out.push_back(std::move(*rel));
  }
  std::sort(out.begin(), out.end());
  return out;
}

std::optional<ModulePath> resolve_module(const std::string& dotted,
                                         int relative_level,
                                         const ModulePath& importer,
                                         const FileSet& files) {
  auto anchor = anchor_dir(relative_level, importer);
  if (!anchor) return std::nullopt;
  if (dotted.empty()) {
    if (anchor->empty()) return std::nullopt;
    return existing(*anchor + "/__init__.py", files);
  }
  std::string base = join_path(*anchor, dots_to_slashes(dotted));
  if (auto f = existing(base + ".py", files)) return f;
  return existing(base + "/__init__.py", files);
}

std::vector<ModulePath> resolve_import(const ImportSpec& spec,
                                       const ModulePath& importer,
                                       const FileSet& files) {
  std::vector<ModulePath> out;
  auto add = [&](std::optional<ModulePath> p) {
    if (p && std::find(out.begin(), out.end(), *p) == out.end()) {
      out.push_back(std::move(*p));
    }
  };
  if (spec.kind == ImportKind::Plain || spec.star) {
    add(resolve_module(spec.dotted_target, spec.relative_level, importer, files));
    return out;
  }
  auto anchor = anchor_dir(spec.relative_level, importer);
  if (!anchor) return out;
  std::string pkg_dir = join_path(*anchor, dots_to_slashes(spec.dotted_target));
  bool package = is_package_dir(pkg_dir, files) &&
                 !existing(pkg_dir + ".py", files);
  bool need_module = !package;
  if (package) {
    for (const auto& n : spec.imported_names) {
      std::string sub = spec.dotted_target.empty()
                            ? n.name
                            : spec.dotted_target + "." + n.name;
      auto hit = resolve_module(sub, spec.relative_level, importer, files);
      if (hit) {
        add(hit);
      } else {
        need_module = true;
      }
    }
  }
  if (need_module) {
    add(resolve_module(spec.dotted_target, spec.relative_level, importer, files));
  }
  return out;
}

ClassRegistry::ClassRegistry(const std::vector<ModuleSyntax>& syntaxes,
                             const FileSet& files)
    : files_(&files) {
  for (const auto& s : syntaxes) {
    syntax_[s.path] = &s;
    for (const auto& c : s.class_defs) {
      if (c.reachable) add_class(s.path, c.qualified_name);
    }
  }
}

void ClassRegistry::add_class(const ModulePath& file,
                              const std::string& qualified) {
  classes_.emplace(file, qualified);
}

bool ClassRegistry::is_class(const ModulePath& file,
                             const std::string& qualified) const {
  return classes_.contains({file, qualified});
}

std::optional<SymbolRef> ClassRegistry::locate_class(
    const ModulePath& file, const std::string& symbol) const {
  return locate(file, symbol, 0);
}

std::optional<SymbolRef> ClassRegistry::locate(const ModulePath& file,
                                               const std::string& symbol,
                                               int depth) const {
  if (symbol.empty()) return std::nullopt;
  if (is_class(file, symbol)) return SymbolRef{file, symbol};
  if (depth >= kMaxReexportDepth) return std::nullopt;
  auto it = syntax_.find(file);
  if (it == syntax_.end()) return std::nullopt;
  return resolve_in(*it->second, symbol, depth + 1);
}

std::optional<SymbolRef> ClassRegistry::resolve_expression(
    const ModuleSyntax& syntax, const std::string& expr) const {
  return resolve_in(syntax, expr, 0);
}

std::optional<SymbolRef> ClassRegistry::resolve_in(const ModuleSyntax& syntax,
                                                   const std::string& raw,
                                                   int depth) const {
  static const std::regex kDotted(
      R"([A-Za-z_][A-Za-z_0-9]*(\.[A-Za-z_][A-Za-z_0-9]*)*)");
  if (files_ == nullptr) return std::nullopt;
  std::string expr = strip_spaces(raw);
  // Base[T] inherits from Base.
  if (auto br = expr.find('['); br != std::string::npos) expr.resize(br);
  if (!std::regex_match(expr, kDotted)) return std::nullopt;
  auto parts = split_dots(expr);
  auto b = syntax.name_bindings.find(parts[0]);
  if (b == syntax.name_bindings.end()) return std::nullopt;
  const NameBinding& nb = b->second;
  std::string rest = join_dots(parts, 1, parts.size());

  if (nb.origin == BindingOrigin::Local) {
    if (is_class(syntax.path, expr)) return SymbolRef{syntax.path, expr};
    return std::nullopt;
  }
  if (nb.import_index >= syntax.imports.size()) return std::nullopt;
  const ImportSpec& imp = syntax.imports[nb.import_index];

  if (nb.origin == BindingOrigin::FromImport) {
    std::string sub = imp.dotted_target.empty()
                          ? nb.symbol
                          : imp.dotted_target + "." + nb.symbol;
    auto anchor = anchor_dir(imp.relative_level, syntax.path);
    std::string pkg_dir =
        anchor ? join_path(*anchor, dots_to_slashes(imp.dotted_target)) : "";
    if (anchor && is_package_dir(pkg_dir, *files_)) {
      if (auto m = resolve_module(sub, imp.relative_level, syntax.path, *files_)) {
        return rest.empty() ? std::nullopt : locate(*m, rest, depth);
      }
    }
    auto m = resolve_module(imp.dotted_target, imp.relative_level, syntax.path,
                            *files_);
    if (!m) return std::nullopt;
    return locate(*m, rest.empty() ? nb.symbol : nb.symbol + "." + rest, depth);
  }

  // Module import.
  if (!imp.alias.empty()) {
    auto m = resolve_module(imp.dotted_target, imp.relative_level, syntax.path,
                            *files_);
    if (!m || rest.empty()) return std::nullopt;
    return locate(*m, rest, depth);
  }
  for (std::size_t k = parts.size() - 1; k >= 1; --k) {
    auto m = resolve_module(join_dots(parts, 0, k), 0, syntax.path, *files_);
    if (m) return locate(*m, join_dots(parts, k, parts.size()), depth);
  }
  return std::nullopt;
}

std::vector<DependencyEdge> extract_edges(const ModuleSyntax& syntax,
                                          const FileSet& files,
                                          const ClassRegistry& registry) {
  std::set<DependencyEdge> edges;
  const ModulePath& self = syntax.path;
  auto add = [&](const ModulePath& target, EdgeKind kind) {
    if (target != self) edges.insert(DependencyEdge{self, target, kind});
  };
  for (const auto& imp : syntax.imports) {
    for (const auto& t : resolve_import(imp, self, files)) {
      add(t, EdgeKind::Imports);
    }
  }
  for (const auto& cd : syntax.class_defs) {
    for (const auto& base : cd.bases) {
      if (auto r = registry.resolve_expression(syntax, base)) {
        add(r->file, EdgeKind::Inherits);
      }
    }
  }
  std::multimap<std::string, std::string> typed;
  for (const auto& t : syntax.class_typed_names) {
    typed.emplace(t.name, t.class_expr);
  }
  for (const auto& call : syntax.call_sites) {
    if (auto r = registry.resolve_expression(syntax, call.callee)) {
      add(r->file, EdgeKind::Instantiates);
    }
    auto [lo, hi] = typed.equal_range(call.callee);
    for (auto it = lo; it != hi; ++it) {
      if (auto r = registry.resolve_expression(syntax, it->second)) {
        add(r->file, EdgeKind::Instantiates);
      }
    }
  }
  return {edges.begin(), edges.end()};
}

std::string read_text_file(const fs::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw IoError(path.string(), "cannot open file");
  std::ostringstream ss;
  ss << in.rdbuf();
  if (in.bad()) throw IoError(path.string(), "cannot read file");
  return ss.str();
}

IndexedRepository index_repository(const fs::path& repo_root) {
  IndexedRepository out;
  out.files = discover_files(repo_root);
  FileSet files(out.files.begin(), out.files.end());
  std::vector<std::pair<ModulePath, std::vector<std::string>>> recovered;
  for (const auto& f : out.files) {
    std::string text = read_text_file(repo_root / f.str());
    try {
      out.syntaxes.push_back(parse_source(text, f));
    } catch (const ParseError& e) {
      out.parse_errors.push_back(e);
      recovered.emplace_back(f, recover_class_names(text));
    }
  }
  ClassRegistry registry(out.syntaxes, files);
  for (const auto& [f, names] : recovered) {
    for (const auto& n : names) registry.add_class(f, n);
  }
  std::set<DependencyEdge> all;
  for (const auto& s : out.syntaxes) {
    for (auto& e : extract_edges(s, files, registry)) all.insert(std::move(e));
  }
  out.edges.assign(all.begin(), all.end());
  return out;
}

}  // namespace codenav
