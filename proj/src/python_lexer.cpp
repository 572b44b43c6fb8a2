#include "codenav/python_lexer.hpp"

#include <algorithm>
#include <array>

namespace codenav::python {
namespace {

constexpr std::array<std::string_view, 35> kKeywords = {
    "False", "None",   "True",    "and",      "as",       "assert", "async",
    "await", "break",  "class",   "continue", "def",      "del",    "elif",
    "else",  "except", "finally", "for",      "from",     "global", "if",
    "import", "in",    "is",      "lambda",   "nonlocal", "not",    "or",
    "pass",  "raise",  "return",  "try",      "while",    "with",   "yield"};

constexpr std::array<std::string_view, 5> kOps3 = {"**=", "//=", ">>=",
                                                   "<<=", "..."};
constexpr std::array<std::string_view, 20> kOps2 = {
    "**", "//", ">>", "<<", "+=", "-=", "*=", "/=", "%=", "&=",
    "|=", "^=", "@=", "!=", "==", "<=", ">=", "->", ":=", "<>"};

bool is_ident_start(unsigned char c) {
  return (c >= 'a' && c <= 'z') || (c >= 'A' && c <= 'Z') || c == '_' ||
         c >= 0x80;
}
bool is_ident_char(unsigned char c) {
  return is_ident_start(c) || (c >= '0' && c <= '9');
}
bool is_digit(unsigned char c) { return c >= '0' && c <= '9'; }

bool is_string_prefix(std::string_view w) {
  if (w.size() > 2) return false;
  std::string lower;
  for (char c : w) lower.push_back(static_cast<char>(c | 0x20));
  static constexpr std::array<std::string_view, 10> kPrefixes = {
      "r", "u", "b", "f", "br", "rb", "fr", "rf", "t", "tr"};
  return std::find(kPrefixes.begin(), kPrefixes.end(), lower) !=
         kPrefixes.end();
}

class Lexer {
 public:
  explicit Lexer(std::string_view src) : src_(src) {}

  std::vector<Token> run() {
    indents_.push_back(0);
    while (true) {
      if (at_line_start_ && brackets_.empty()) {
        if (!read_indentation()) break;
      }
      if (pos_ >= src_.size()) break;
      unsigned char c = src_[pos_];
      if (c == ' ' || c == '\t' || c == '\f') {
        ++pos_;
      } else if (c == '#') {
        skip_comment();
      } else if (c == '\n' || c == '\r') {
        end_physical_line();
      } else if (c == '\\') {
        continuation();
      } else if (is_ident_start(c)) {
        name_or_prefixed_string();
      } else if (is_digit(c) ||
                 (c == '.' && pos_ + 1 < src_.size() &&
                  is_digit(static_cast<unsigned char>(src_[pos_ + 1])))) {
        number();
      } else if (c == '"' || c == '\'') {
        string_literal(pos_);
      } else {
        op();
      }
    }
    if (!brackets_.empty()) {
      throw SyntaxError(brackets_.back().second,
                        std::string("'") + brackets_.back().first +
                            "' was never closed");
    }
    if (line_has_content_) emit(TokenKind::Newline, pos_, 0);
    while (indents_.size() > 1) {
      indents_.pop_back();
      emit(TokenKind::Dedent, pos_, 0);
    }
    emit(TokenKind::End, pos_, 0);
    return std::move(out_);
  }

 private:
  void emit(TokenKind kind, std::size_t start, std::size_t len,
            int start_line = -1) {
    int l = start_line < 0 ? line_ : start_line;
    out_.push_back(Token{kind, src_.substr(start, len), l, line_, start});
    if (kind != TokenKind::Newline && kind != TokenKind::Indent &&
        kind != TokenKind::Dedent && kind != TokenKind::End) {
      line_has_content_ = true;
    }
  }

  // Returns false at end of input.
  bool read_indentation() {
    while (true) {
      int col = 0;
      std::size_t p = pos_;
      while (p < src_.size()) {
        char c = src_[p];
        if (c == ' ') {
          ++col;
        } else if (c == '\t') {
          col = (col / 8 + 1) * 8;
        } else if (c == '\f') {
          col = 0;
        } else {
          break;
        }
        ++p;
      }
      pos_ = p;
      if (p >= src_.size()) return false;
      char c = src_[p];
      if (c == '#') {
        skip_comment();
        continue;
      }
      if (c == '\n' || c == '\r') {
        consume_newline();
        continue;
      }
      at_line_start_ = false;
      if (col > indents_.back()) {
        indents_.push_back(col);
        emit(TokenKind::Indent, pos_, 0);
        line_has_content_ = false;
      } else {
        while (col < indents_.back()) {
          indents_.pop_back();
          emit(TokenKind::Dedent, pos_, 0);
        }
        if (col != indents_.back()) {
          throw SyntaxError(line_,
                            "unindent does not match any outer indentation "
                            "level");
        }
      }
      return true;
    }
  }

  void skip_comment() {
    while (pos_ < src_.size() && src_[pos_] != '\n' && src_[pos_] != '\r') {
      ++pos_;
    }
  }

  void consume_newline() {
    if (src_[pos_] == '\r' && pos_ + 1 < src_.size() && src_[pos_ + 1] == '\n') {
      pos_ += 2;
    } else {
      ++pos_;
    }
    ++line_;
  }

  void end_physical_line() {
    std::size_t at = pos_;
    int l = line_;
    consume_newline();
    if (!brackets_.empty()) return;
    if (line_has_content_) {
      out_.push_back(Token{TokenKind::Newline, src_.substr(at, 0), l, l, at});
      line_has_content_ = false;
    }
    at_line_start_ = true;
  }

  void continuation() {
    std::size_t p = pos_ + 1;
    if (p < src_.size() && (src_[p] == '\n' || src_[p] == '\r')) {
      pos_ = p;
      consume_newline();
      return;
    }
    if (p >= src_.size()) throw SyntaxError(line_, "unexpected EOF after '\\'");
    throw SyntaxError(line_, "unexpected character after line continuation");
  }

  void name_or_prefixed_string() {
    std::size_t start = pos_;
    while (pos_ < src_.size() &&
           is_ident_char(static_cast<unsigned char>(src_[pos_]))) {
      ++pos_;
    }
    std::string_view word = src_.substr(start, pos_ - start);
    if (pos_ < src_.size() && (src_[pos_] == '"' || src_[pos_] == '\'') &&
        is_string_prefix(word)) {
      pos_ = start;
      string_literal(start + word.size());
      return;
    }
    emit(TokenKind::Name, start, pos_ - start);
  }

  void number() {
    std::size_t start = pos_;
    while (pos_ < src_.size()) {
      unsigned char c = src_[pos_];
      if (is_ident_char(c) || c == '.') {
        ++pos_;
      } else if ((c == '+' || c == '-') && pos_ > start &&
                 (src_[pos_ - 1] == 'e' || src_[pos_ - 1] == 'E') &&
                 !(src_[start] == '0' && pos_ - start > 1 &&
                   (src_[start + 1] == 'x' || src_[start + 1] == 'X'))) {
        ++pos_;
      } else {
        break;
      }
    }
    emit(TokenKind::Number, start, pos_ - start);
  }

  // `quote_at` points at the opening quote; pos_ at the token start (prefix).
  void string_literal(std::size_t quote_at) {
    std::size_t start = pos_;
    int start_line = line_;
    char q = src_[quote_at];
    bool triple = quote_at + 2 < src_.size() && src_[quote_at + 1] == q &&
                  src_[quote_at + 2] == q;
    std::size_t p = quote_at + (triple ? 3 : 1);
    while (true) {
      if (p >= src_.size()) {
        throw SyntaxError(start_line, triple
                                          ? "unterminated triple-quoted string"
                                          : "unterminated string literal");
      }
      char c = src_[p];
      if (c == '\\') {
        if (p + 1 < src_.size()) {
          char n = src_[p + 1];
          if (n == '\r' && p + 2 < src_.size() && src_[p + 2] == '\n') ++p;
          if (n == '\n' || n == '\r') ++line_;
        }
        p += 2;
        continue;
      }
      if (c == '\n' || c == '\r') {
        if (!triple) throw SyntaxError(start_line, "unterminated string literal");
        if (c == '\r' && p + 1 < src_.size() && src_[p + 1] == '\n') ++p;
        ++line_;
        ++p;
        continue;
      }
      if (c == q) {
        if (!triple) {
          ++p;
          break;
        }
        if (p + 2 < src_.size() && src_[p + 1] == q && src_[p + 2] == q) {
          p += 3;
          break;
        }
      }
      ++p;
    }
    pos_ = p;
    emit(TokenKind::String, start, p - start, start_line);
  }

  void op() {
    std::size_t start = pos_;
    std::string_view rest = src_.substr(pos_);
    std::size_t len = 0;
    for (auto o : kOps3) {
      if (rest.starts_with(o)) len = 3;
    }
    if (len == 0) {
      for (auto o : kOps2) {
        if (rest.starts_with(o)) len = 2;
      }
    }
    if (len == 0) {
      static constexpr std::string_view kSingle = "+-*/%@&|^~<>()[]{},:;.=";
      char c = rest.front();
      if (kSingle.find(c) == std::string_view::npos) {
        throw SyntaxError(line_, std::string("invalid character '") + c + "'");
      }
      len = 1;
      if (c == '(' || c == '[' || c == '{') {
        brackets_.emplace_back(c, line_);
      } else if (c == ')' || c == ']' || c == '}') {
        char want = c == ')' ? '(' : c == ']' ? '[' : '{';
        if (brackets_.empty()) {
          throw SyntaxError(line_, std::string("unmatched '") + c + "'");
        }
        if (brackets_.back().first != want) {
          throw SyntaxError(line_, std::string("closing '") + c +
                                       "' does not match '" +
                                       brackets_.back().first + "'");
        }
        brackets_.pop_back();
      }
    }
    pos_ += len;
    emit(TokenKind::Op, start, len);
  }

  std::string_view src_;
  std::size_t pos_ = 0;
  int line_ = 1;
  bool at_line_start_ = true;
  bool line_has_content_ = false;
  std::vector<int> indents_;
  std::vector<std::pair<char, int>> brackets_;
  std::vector<Token> out_;
};

}  // namespace

bool is_keyword(std::string_view word) {
  return std::find(kKeywords.begin(), kKeywords.end(), word) != kKeywords.end();
}

std::vector<Token> tokenize(std::string_view source) {
  // A UTF-8 BOM is not part of the program text.
  if (source.starts_with("\xEF\xBB\xBF")) {
    std::vector<Token> toks = Lexer(source.substr(3)).run();
    for (auto& t : toks) t.offset += 3;
    return toks;
  }
  return Lexer(source).run();
}

}  // namespace codenav::python
