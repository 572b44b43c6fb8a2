#pragma once

#include <cstddef>
#include <stdexcept>
#include <string>
#include <string_view>
#include <vector>

namespace codenav::python {

enum class TokenKind { Name, Number, String, Op, Newline, Indent, Dedent, End };

struct Token {
  TokenKind kind;
  std::string_view text;  // view into the source buffer
  int line;               // 1-based line of the first character
  int end_line;           // differs from line only for multi-line strings
  std::size_t offset;     // byte offset of the first character

  bool is_op(std::string_view op) const {
    return kind == TokenKind::Op && text == op;
  }
  bool is_name(std::string_view n) const {
    return kind == TokenKind::Name && text == n;
  }
};

class SyntaxError : public std::runtime_error {
 public:
  SyntaxError(int line, const std::string& msg)
      : std::runtime_error(msg), line_(line) {}
  int line() const { return line_; }

 private:
  int line_;
};

bool is_keyword(std::string_view word);

// Full token stream including NEWLINE/INDENT/DEDENT and a trailing End.
// The returned views borrow from `source`.
std::vector<Token> tokenize(std::string_view source);

}  // namespace codenav::python
