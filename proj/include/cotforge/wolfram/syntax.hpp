#pragma once

// Tokens, AST and errors for the wolfram-dialect subset used by program CoTs.

#include <cstdint>
#include <stdexcept>
#include <string>
#include <string_view>
#include <vector>

namespace cotforge::wolfram {

struct SourcePos {
  int line = 1;
  int column = 1;
  friend auto operator<=>(const SourcePos&, const SourcePos&) = default;
};

enum class ErrorKind {
  unterminated_comment,
  illegal_character,
  syntax,
  undefined_identifier,
  division_by_zero,
  step_limit,
  magnitude_limit,
  unsupported_function,
  unsupported_equation,
  free_variable,
  domain,
  timeout,
};

std::string_view to_string(ErrorKind k);

class Error : public std::runtime_error {
 public:
  Error(ErrorKind kind, SourcePos pos, const std::string& message);
  ErrorKind kind() const { return kind_; }
  SourcePos pos() const { return pos_; }
  // Message without the "line:col" prefix.
  const std::string& detail() const { return detail_; }

  bool is_lex_or_syntax() const {
    return kind_ == ErrorKind::unterminated_comment || kind_ == ErrorKind::illegal_character ||
           kind_ == ErrorKind::syntax;
  }

 private:
  ErrorKind kind_;
  SourcePos pos_;
  std::string detail_;
};

enum class TokenKind { number, identifier, op, bracket, comma, semicolon, comment };

std::string_view to_string(TokenKind k);

struct Token {
  TokenKind kind;
  std::string lexeme;
  SourcePos pos;
};

// Brackets are emitted one character at a time; the parser recognizes "[["
// and "]]" for Part. Operators: + - * / ^ = == -> /.
std::vector<Token> tokenize(std::string_view source);

struct Expr {
  enum class Kind {
    number,      // text = literal; integer literals are exact
    identifier,  // text = name
    negate,      // children[0]
    binary,      // text = "+", "-", "*", "/", "^"; children[0], children[1]
    equation,    // children[0] == children[1]
    call,        // text = head; children = args
    list,        // children = items
    part,        // children[0] = target; children[1..] = indices
    rule,        // children[0] -> children[1]
    replace_all, // children[0] /. children[1]
    assign,      // text = target; children[0] = value
    program,     // children = statements
  };

  Kind kind;
  SourcePos pos;
  std::string text;
  std::vector<Expr> children;
};

// Parses a token stream (comments are skipped). Statements are separated by
// ';' or by a line break outside any bracket.
Expr parse(const std::vector<Token>& tokens);
Expr parse(std::string_view source);

// Compact prefix form for tests and debugging, e.g. "(+ 2 (* 3 4))".
std::string to_sexpr(const Expr& e);

}  // namespace cotforge::wolfram
