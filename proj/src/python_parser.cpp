#include <algorithm>
#include <optional>
#include <regex>
#include <span>

#include "codenav/error.hpp"
#include "codenav/python_lexer.hpp"
#include "codenav/syntax.hpp"

namespace codenav {
namespace {

using python::SyntaxError;
using python::Token;
using python::TokenKind;
using Toks = std::span<const Token>;

std::string verbatim(Toks toks) {
  if (toks.empty()) return {};
  const char* b = toks.front().text.data();
  const char* e = toks.back().text.data() + toks.back().text.size();
  return std::string(b, static_cast<std::size_t>(e - b));
}

bool is_open(const Token& t) {
  return t.kind == TokenKind::Op &&
         (t.text == "(" || t.text == "[" || t.text == "{");
}
bool is_close(const Token& t) {
  return t.kind == TokenKind::Op &&
         (t.text == ")" || t.text == "]" || t.text == "}");
}

// Splits on a top-level operator (outside brackets).
std::vector<Toks> split_top(Toks toks, std::string_view sep) {
  std::vector<Toks> parts;
  int depth = 0;
  std::size_t start = 0;
  for (std::size_t i = 0; i < toks.size(); ++i) {
    if (is_open(toks[i])) ++depth;
    else if (is_close(toks[i])) --depth;
    else if (depth == 0 && toks[i].is_op(sep)) {
      parts.push_back(toks.subspan(start, i - start));
      start = i + 1;
    }
  }
  parts.push_back(toks.subspan(start));
  return parts;
}

std::optional<std::size_t> find_top(Toks toks, std::string_view op,
                                    std::size_t from = 0) {
  int depth = 0;
  for (std::size_t i = 0; i < toks.size(); ++i) {
    if (is_open(toks[i])) ++depth;
    else if (is_close(toks[i])) --depth;
    else if (i >= from && depth == 0 && toks[i].is_op(op)) return i;
  }
  return std::nullopt;
}

// Index of the matching close bracket for the open bracket at `open`.
std::size_t matching(Toks toks, std::size_t open) {
  int depth = 0;
  for (std::size_t i = open; i < toks.size(); ++i) {
    if (is_open(toks[i])) ++depth;
    else if (is_close(toks[i]) && --depth == 0) return i;
  }
  throw SyntaxError(toks[open].line, "unbalanced brackets");
}

// The ':' ending a compound-statement header; lambdas at bracket depth 0
// consume one colon each.
std::optional<std::size_t> header_colon(Toks toks, std::size_t from) {
  int depth = 0;
  int lambdas = 0;
  for (std::size_t i = from; i < toks.size(); ++i) {
    const Token& t = toks[i];
    if (is_open(t)) ++depth;
    else if (is_close(t)) --depth;
    else if (depth == 0 && t.is_name("lambda")) ++lambdas;
    else if (depth == 0 && t.is_op(":")) {
      if (lambdas == 0) return i;
      --lambdas;
    }
  }
  return std::nullopt;
}

// "Name(.Name)*" -> dotted text, otherwise nullopt.
std::optional<std::string> dotted_name(Toks toks) {
  if (toks.empty() || toks.size() % 2 == 0) return std::nullopt;
  std::string out;
  for (std::size_t i = 0; i < toks.size(); ++i) {
    if (i % 2 == 0) {
      if (toks[i].kind != TokenKind::Name || python::is_keyword(toks[i].text)) {
        return std::nullopt;
      }
      out.append(toks[i].text);
    } else {
      if (!toks[i].is_op(".")) return std::nullopt;
      out.push_back('.');
    }
  }
  return out;
}

// Outermost Type[X] / type[X] / typing.Type[X]; X a dotted name, possibly
// quoted as a forward reference.
std::optional<std::string> class_of(Toks ann) {
  std::size_t i = 0;
  if (ann.size() >= 3 && ann[0].is_name("typing") && ann[1].is_op(".")) i = 2;
  if (i >= ann.size()) return std::nullopt;
  if (!ann[i].is_name("Type") && !ann[i].is_name("type")) return std::nullopt;
  if (i + 1 >= ann.size() || !ann[i + 1].is_op("[")) return std::nullopt;
  if (!ann.back().is_op("]")) return std::nullopt;
  Toks inner = ann.subspan(i + 2, ann.size() - i - 3);
  if (matching(ann, i + 1) != ann.size() - 1) return std::nullopt;
  if (inner.size() == 1 && inner[0].kind == TokenKind::String) {
    std::string_view s = inner[0].text;
    if (s.size() >= 2 && (s.front() == '"' || s.front() == '\'')) {
      std::string body(s.substr(1, s.size() - 2));
      if (!body.empty() && std::regex_match(body, std::regex(
              R"([A-Za-z_][A-Za-z_0-9]*(\.[A-Za-z_][A-Za-z_0-9]*)*)"))) {
        return body;
      }
    }
    return std::nullopt;
  }
  return dotted_name(inner);
}

struct Scope {
  int depth;
  DefinitionKind kind;
  std::string name;
};

class Parser {
 public:
  explicit Parser(ModuleSyntax& out) : out_(out) {}

  void run(const std::vector<Token>& toks) {
    scan_calls(toks);
    int depth = 0;
    std::size_t i = 0;
    while (i < toks.size() && toks[i].kind != TokenKind::End) {
      const Token& t = toks[i];
      if (t.kind == TokenKind::Indent) {
        ++depth;
        ++i;
        continue;
      }
      if (t.kind == TokenKind::Dedent) {
        --depth;
        ++i;
        continue;
      }
      std::size_t j = i;
      while (toks[j].kind != TokenKind::Newline &&
             toks[j].kind != TokenKind::End) {
        ++j;
      }
      logical_line(Toks(toks).subspan(i, j - i), depth);
      i = toks[j].kind == TokenKind::Newline ? j + 1 : j;
    }
  }

 private:
  void logical_line(Toks line, int depth) {
    if (line.empty()) return;
    while (!scopes_.empty() && scopes_.back().depth >= depth) scopes_.pop_back();
    int end_line = 0;
    for (const auto& t : line) end_line = std::max(end_line, t.end_line);
    if (depth == 0) open_top_ = false;
    if (open_top_) {
      auto& d = out_.definitions.back();
      d.last_line = std::max(d.last_line, end_line);
    }
    if (line[0].is_op("@")) {
      if (depth == 0 && pending_decorator_ < 0) pending_decorator_ = line[0].line;
      return;
    }
    statement(line, depth, end_line);
    if (depth == 0) pending_decorator_ = -1;
  }

  void statement(Toks toks, int depth, int end_line) {
    std::size_t i = 0;
    if (toks[0].is_name("async") && toks.size() > 1 &&
        (toks[1].is_name("def") || toks[1].is_name("for") ||
         toks[1].is_name("with"))) {
      i = 1;
    }
    const Token& head = toks[i];
    if (head.is_name("class") || head.is_name("def")) {
      definition(toks, i, depth, end_line);
      return;
    }
    static constexpr std::string_view kCompound[] = {
        "if", "elif", "else", "for", "while", "try", "except", "finally",
        "with"};
    bool compound = false;
    for (auto k : kCompound) compound = compound || head.is_name(k);
    if (!compound && (head.is_name("match") || head.is_name("case")) &&
        toks.size() > 2 && toks.back().is_op(":") &&
        !(toks[i + 1].kind == TokenKind::Op && !is_open(toks[i + 1]) &&
          !toks[i + 1].is_op("-") && !toks[i + 1].is_op("*"))) {
      compound = true;
    }
    if (compound) {
      auto colon = header_colon(toks, i + 1);
      if (!colon) throw SyntaxError(head.line, "expected ':'");
      suite(toks.subspan(*colon + 1), depth);
      return;
    }
    for (Toks simple : split_top(toks, ";")) {
      if (!simple.empty()) simple_statement(simple);
    }
  }

  void suite(Toks rest, int depth) {
    if (rest.empty()) return;
    statement(rest, depth + 1, rest.back().end_line);
  }

  std::vector<std::string> enclosing(bool& reachable) const {
    std::vector<std::string> names;
    reachable = true;
    for (const auto& s : scopes_) {
      if (s.kind != DefinitionKind::Class) reachable = false;
      names.push_back(s.name);
    }
    return names;
  }

  void definition(Toks toks, std::size_t i, int depth, int end_line) {
    const Token& head = toks[i];
    bool is_class = head.is_name("class");
    if (i + 1 >= toks.size() || toks[i + 1].kind != TokenKind::Name ||
        python::is_keyword(toks[i + 1].text)) {
      throw SyntaxError(head.line, "invalid syntax");
    }
    std::string name(toks[i + 1].text);
    std::size_t after = i + 2;
    // PEP 695 type parameters.
    if (after < toks.size() && toks[after].is_op("[")) {
      after = matching(toks, after) + 1;
    }
    Toks args;
    if (after < toks.size() && toks[after].is_op("(")) {
      std::size_t close = matching(toks, after);
      args = toks.subspan(after + 1, close - after - 1);
      after = close + 1;
    } else if (!is_class) {
      throw SyntaxError(head.line, "expected '('");
    }
    auto colon = header_colon(toks, after);
    if (!colon) throw SyntaxError(head.line, "expected ':'");

    bool reachable = true;
    auto outer = enclosing(reachable);
    bool top = scopes_.empty();
    if (is_class) {
      ClassDef cd;
      cd.name = name;
      for (const auto& o : outer) cd.qualified_name += o + ".";
      cd.qualified_name += name;
      cd.line = head.line;
      cd.reachable = reachable;
      for (Toks arg : split_top(args, ",")) {
        if (arg.empty()) continue;
        if (arg[0].is_op("*") || arg[0].is_op("**")) continue;
        if (find_top(arg, "=")) continue;  // metaclass=..., keyword args
        cd.bases.push_back(verbatim(arg));
      }
      out_.class_defs.push_back(std::move(cd));
    } else {
      parameters(args);
    }
    if (top) {
      out_.name_bindings[name] = NameBinding{
          BindingOrigin::Local,
          is_class ? SymbolKind::Class : SymbolKind::Function, 0, name};
      int first = pending_decorator_ >= 0 ? pending_decorator_ : toks[0].line;
      out_.definitions.push_back(TopLevelDefinition{
          name, is_class ? DefinitionKind::Class : DefinitionKind::Function,
          first, end_line});
      open_top_ = true;
    }
    scopes_.push_back(Scope{depth, is_class ? DefinitionKind::Class
                                            : DefinitionKind::Function,
                            name});
    suite(toks.subspan(*colon + 1), depth);
  }

  void parameters(Toks args) {
    for (Toks p : split_top(args, ",")) {
      std::size_t k = 0;
      while (k < p.size() && (p[k].is_op("*") || p[k].is_op("**"))) ++k;
      if (k + 1 >= p.size() || p[k].kind != TokenKind::Name) continue;
      if (!p[k + 1].is_op(":")) continue;
      Toks ann = p.subspan(k + 2);
      if (auto eq = find_top(ann, "=")) ann = ann.first(*eq);
      record_annotation(std::string(p[k].text), ann, p[k].line);
    }
  }

  void record_annotation(std::string name, Toks ann, int line) {
    if (ann.empty()) return;
    if (auto x = class_of(ann)) {
      out_.class_typed_names.push_back(ClassTypedName{std::move(name), *x, line});
    }
  }

  void simple_statement(Toks toks) {
    if (toks[0].is_name("import")) {
      plain_import(toks);
      return;
    }
    if (toks[0].is_name("from")) {
      from_import(toks);
      return;
    }
    // name: annotation [= value]
    if (toks.size() >= 3 && toks[0].kind == TokenKind::Name &&
        !python::is_keyword(toks[0].text) && toks[1].is_op(":")) {
      Toks ann = toks.subspan(2);
      if (auto eq = find_top(ann, "=")) ann = ann.first(*eq);
      record_annotation(std::string(toks[0].text), ann, toks[0].line);
      if (scopes_.empty()) bind_other(toks[0].text);
      return;
    }
    if (!scopes_.empty()) return;
    // Module-level assignment targets shadow earlier bindings.
    auto parts = split_top(toks, "=");
    for (std::size_t p = 0; p + 1 < parts.size(); ++p) {
      for (Toks target : split_top(parts[p], ",")) {
        if (target.size() == 1 && target[0].kind == TokenKind::Name &&
            !python::is_keyword(target[0].text)) {
          bind_other(target[0].text);
        }
      }
    }
  }

  void bind_other(std::string_view name) {
    out_.name_bindings[std::string(name)] =
        NameBinding{BindingOrigin::Local, SymbolKind::Other, 0, std::string(name)};
  }

  // Reads Name(.Name)* starting at `k`; advances `k`.
  std::string read_dotted(Toks toks, std::size_t& k) {
    std::string out;
    while (true) {
      if (k >= toks.size() || toks[k].kind != TokenKind::Name ||
          python::is_keyword(toks[k].text)) {
        throw SyntaxError(toks[std::min(k, toks.size() - 1)].line,
                          "invalid import");
      }
      out.append(toks[k].text);
      ++k;
      if (k < toks.size() && toks[k].is_op(".")) {
        out.push_back('.');
        ++k;
        continue;
      }
      return out;
    }
  }

  std::string read_alias(Toks toks, std::size_t& k) {
    if (k < toks.size() && toks[k].is_name("as")) {
      ++k;
      if (k >= toks.size() || toks[k].kind != TokenKind::Name) {
        throw SyntaxError(toks.back().line, "invalid import alias");
      }
      return std::string(toks[k++].text);
    }
    return {};
  }

  void plain_import(Toks toks) {
    std::size_t k = 1;
    while (true) {
      ImportSpec spec;
      spec.kind = ImportKind::Plain;
      spec.line = toks[0].line;
      spec.dotted_target = read_dotted(toks, k);
      spec.alias = read_alias(toks, k);
      std::size_t idx = out_.imports.size();
      std::string bound = spec.alias.empty()
                              ? spec.dotted_target.substr(
                                    0, spec.dotted_target.find('.'))
                              : spec.alias;
      out_.name_bindings[bound] = NameBinding{
          BindingOrigin::ModuleImport, SymbolKind::Other, idx, bound};
      out_.imports.push_back(std::move(spec));
      if (k >= toks.size()) return;
      if (!toks[k].is_op(",")) throw SyntaxError(toks[k].line, "invalid import");
      ++k;
    }
  }

  void from_import(Toks toks) {
    ImportSpec spec;
    spec.kind = ImportKind::From;
    spec.line = toks[0].line;
    std::size_t k = 1;
    while (k < toks.size() && (toks[k].is_op(".") || toks[k].is_op("..."))) {
      spec.relative_level += static_cast<int>(toks[k].text.size());
      ++k;
    }
    if (k < toks.size() && !toks[k].is_name("import")) {
      spec.dotted_target = read_dotted(toks, k);
    } else if (spec.relative_level == 0) {
      throw SyntaxError(toks[0].line, "invalid import");
    }
    if (k >= toks.size() || !toks[k].is_name("import")) {
      throw SyntaxError(toks[0].line, "expected 'import'");
    }
    ++k;
    if (k < toks.size() && toks[k].is_op("*")) {
      spec.star = true;
      if (k + 1 != toks.size()) throw SyntaxError(toks[k].line, "invalid import");
      out_.imports.push_back(std::move(spec));
      return;
    }
    Toks names = toks.subspan(k);
    if (!names.empty() && names[0].is_op("(")) {
      if (!names.back().is_op(")")) {
        throw SyntaxError(names[0].line, "invalid import");
      }
      names = names.subspan(1, names.size() - 2);
    }
    std::size_t idx = out_.imports.size();
    for (Toks item : split_top(names, ",")) {
      if (item.empty()) continue;  // trailing comma
      std::size_t p = 0;
      if (item[0].kind != TokenKind::Name || python::is_keyword(item[0].text)) {
        throw SyntaxError(item[0].line, "invalid import");
      }
      ImportedName n{std::string(item[0].text), {}};
      p = 1;
      n.alias = read_alias(item, p);
      if (p != item.size()) throw SyntaxError(item[0].line, "invalid import");
      out_.name_bindings[n.bound()] =
          NameBinding{BindingOrigin::FromImport, SymbolKind::Other, idx, n.name};
      spec.imported_names.push_back(std::move(n));
    }
    if (spec.imported_names.empty()) {
      throw SyntaxError(toks[0].line, "invalid import");
    }
    out_.imports.push_back(std::move(spec));
  }

  // Call sites anywhere in the file: a dotted name chain that is not itself
  // an attribute of something else, immediately followed by "(".
  void scan_calls(const std::vector<Token>& toks) {
    for (std::size_t i = 0; i < toks.size(); ++i) {
      const Token& t = toks[i];
      if (t.kind != TokenKind::Name || python::is_keyword(t.text)) continue;
      if (i > 0) {
        const Token& prev = toks[i - 1];
        if (prev.is_op(".") || prev.is_name("def") || prev.is_name("class")) {
          continue;
        }
      }
      std::size_t j = i + 1;
      while (j + 1 < toks.size() && toks[j].is_op(".") &&
             toks[j + 1].kind == TokenKind::Name) {
        j += 2;
      }
      if (j < toks.size() && toks[j].is_op("(")) {
        out_.call_sites.push_back(
            CallSite{verbatim(Toks(toks).subspan(i, j - i)), t.line});
      }
      i = j - 1;
    }
  }

  ModuleSyntax& out_;
  std::vector<Scope> scopes_;
  int pending_decorator_ = -1;
  bool open_top_ = false;
};

}  // namespace

ModuleSyntax parse_source(std::string_view source_text, const ModulePath& path) {
  ModuleSyntax out;
  out.path = path;
  try {
    auto toks = python::tokenize(source_text);
    Parser(out).run(toks);
  } catch (const SyntaxError& e) {
    throw ParseError(path.str(), e.line(), e.what());
  }
  return out;
}

std::vector<std::string> recover_class_names(std::string_view source_text) {
  static const std::regex kHeader(
      R"(^([ \t]*)(?:async[ \t]+)?(class|def)[ \t]+([A-Za-z_][A-Za-z_0-9]*))");
  struct Frame {
    std::size_t indent;
    bool is_class;
    std::string name;
  };
  std::vector<Frame> stack;
  std::vector<std::string> out;
  std::size_t start = 0;
  while (start < source_text.size()) {
    std::size_t end = source_text.find('\n', start);
    if (end == std::string_view::npos) end = source_text.size();
    std::string line(source_text.substr(start, end - start));
    start = end + 1;
    std::smatch m;
    if (!std::regex_search(line, m, kHeader)) continue;
    std::size_t indent = static_cast<std::size_t>(m.length(1));
    while (!stack.empty() && stack.back().indent >= indent) stack.pop_back();
    bool is_class = m.str(2) == "class";
    bool reachable = std::all_of(stack.begin(), stack.end(),
                                 [](const Frame& f) { return f.is_class; });
    if (is_class && reachable) {
      std::string q;
      for (const auto& f : stack) q += f.name + ".";
      out.push_back(q + m.str(3));
    }
    stack.push_back(Frame{indent, is_class, m.str(3)});
  }
  return out;
}

}  // namespace codenav
