#pragma once

#include <cstddef>
#include <map>
#include <string>
#include <string_view>
#include <vector>

#include "codenav/module_path.hpp"

namespace codenav {

enum class ImportKind { Plain, From };

struct ImportedName {
  std::string name;
  std::string alias;  // empty when there is no "as"
  const std::string& bound() const { return alias.empty() ? name : alias; }
  bool operator==(const ImportedName&) const = default;
};

struct ImportSpec {
  ImportKind kind = ImportKind::Plain;
  std::string dotted_target;  // may be empty for "from . import x"
  int relative_level = 0;
  std::vector<ImportedName> imported_names;  // from-imports only
  std::string alias;                         // "import a.b as x"
  bool star = false;
  int line = 0;
  bool operator==(const ImportSpec&) const = default;
};

struct ClassDef {
  std::string name;
  std::string qualified_name;  // "Outer.Inner" for nested classes
  std::vector<std::string> bases;  // verbatim source text
  int line = 0;
  // False when the class lives inside a function and cannot be named from
  // another module.
  bool reachable = true;
};

struct CallSite {
  std::string callee;  // verbatim dotted name, e.g. "repo_type" or "m.Cls"
  int line = 0;
};

// A parameter or variable annotated "Type[X]" (class-of-X).
struct ClassTypedName {
  std::string name;
  std::string class_expr;
  int line = 0;
};

enum class SymbolKind { Class, Function, Other };
enum class BindingOrigin { Local, FromImport, ModuleImport };

// Unresolved binding. Origins are resolved against the file set later, since
// parsing a single file cannot know which modules exist.
struct NameBinding {
  BindingOrigin origin = BindingOrigin::Local;
  SymbolKind kind = SymbolKind::Other;  // meaningful for Local only
  std::size_t import_index = 0;         // into ModuleSyntax::imports
  std::string symbol;  // imported name, or the local name
};

enum class DefinitionKind { Function, Class };

struct TopLevelDefinition {
  std::string name;
  DefinitionKind kind = DefinitionKind::Function;
  int first_line = 0;  // first decorator line when decorated
  int last_line = 0;
};

struct ModuleSyntax {
  ModulePath path;
  std::vector<ImportSpec> imports;
  std::vector<ClassDef> class_defs;
  std::vector<CallSite> call_sites;
  std::vector<ClassTypedName> class_typed_names;
  std::map<std::string, NameBinding> name_bindings;
  std::vector<TopLevelDefinition> definitions;
};

// Throws ParseError carrying path and line on a syntax error.
ModuleSyntax parse_source(std::string_view source_text, const ModulePath& path);

// Line-oriented fallback for files that fail to parse: qualified names of
// classes that are reachable from module scope.
std::vector<std::string> recover_class_names(std::string_view source_text);

}  // namespace codenav
