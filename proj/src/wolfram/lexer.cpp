#include <cctype>

#include "cotforge/wolfram/syntax.hpp"

namespace cotforge::wolfram {

std::string_view to_string(ErrorKind k) {
  switch (k) {
    case ErrorKind::unterminated_comment: return "unterminated_comment";
    case ErrorKind::illegal_character: return "illegal_character";
    case ErrorKind::syntax: return "syntax";
    case ErrorKind::undefined_identifier: return "undefined_identifier";
    case ErrorKind::division_by_zero: return "division_by_zero";
    case ErrorKind::step_limit: return "step_limit";
    case ErrorKind::magnitude_limit: return "magnitude_limit";
    case ErrorKind::unsupported_function: return "unsupported_function";
    case ErrorKind::unsupported_equation: return "unsupported_equation";
    case ErrorKind::free_variable: return "free_variable";
    case ErrorKind::domain: return "domain";
    case ErrorKind::timeout: return "timeout";
  }
  return "?";
}

Error::Error(ErrorKind kind, SourcePos pos, const std::string& message)
    : std::runtime_error(std::to_string(pos.line) + ":" + std::to_string(pos.column) + ": " +
                         std::string(to_string(kind)) + ": " + message),
      kind_(kind),
      pos_(pos),
      detail_(message) {}

std::string_view to_string(TokenKind k) {
  switch (k) {
    case TokenKind::number: return "number";
    case TokenKind::identifier: return "identifier";
    case TokenKind::op: return "operator";
    case TokenKind::bracket: return "bracket";
    case TokenKind::comma: return "comma";
    case TokenKind::semicolon: return "semicolon";
    case TokenKind::comment: return "comment";
  }
  return "?";
}

namespace {

bool is_digit(char c) { return std::isdigit(static_cast<unsigned char>(c)) != 0; }
bool is_ident_start(char c) { return std::isalpha(static_cast<unsigned char>(c)) != 0 || c == '$'; }
bool is_ident_char(char c) { return is_ident_start(c) || is_digit(c) || c == '_'; }

class Lexer {
 public:
  explicit Lexer(std::string_view src) : src_(src) {}

  std::vector<Token> run() {
    std::vector<Token> out;
    while (i_ < src_.size()) {
      const char c = src_[i_];
      if (c == '\n') {
        advance();
        continue;
      }
      if (c == ' ' || c == '\t' || c == '\r') {
        advance();
        continue;
      }
      const SourcePos start = pos_;
      const std::size_t begin = i_;
      if (c == '(' && peek(1) == '*') {
        auto end = src_.find("*)", i_ + 2);
        if (end == std::string_view::npos) {
          throw Error(ErrorKind::unterminated_comment, start, "comment opened here is never closed");
        }
        while (i_ < end + 2) advance();
        out.push_back({TokenKind::comment, std::string(src_.substr(begin, i_ - begin)), start});
        continue;
      }
      if (is_digit(c) || (c == '.' && is_digit(peek(1)))) {
        while (i_ < src_.size() && is_digit(src_[i_])) advance();
        if (i_ < src_.size() && src_[i_] == '.' && peek(1) != '.') {
          advance();
          while (i_ < src_.size() && is_digit(src_[i_])) advance();
        }
        out.push_back({TokenKind::number, std::string(src_.substr(begin, i_ - begin)), start});
        continue;
      }
      if (is_ident_start(c)) {
        while (i_ < src_.size() && is_ident_char(src_[i_])) advance();
        out.push_back({TokenKind::identifier, std::string(src_.substr(begin, i_ - begin)), start});
        continue;
      }
      auto two = src_.substr(i_, 2);
      if (two == "==" || two == "->" || two == "/.") {
        advance();
        advance();
        out.push_back({TokenKind::op, std::string(two), start});
        continue;
      }
      switch (c) {
        case '+': case '-': case '*': case '/': case '^': case '=':
          advance();
          out.push_back({TokenKind::op, std::string(1, c), start});
          continue;
        case '(': case ')': case '[': case ']': case '{': case '}':
          advance();
          out.push_back({TokenKind::bracket, std::string(1, c), start});
          continue;
        case ',':
          advance();
          out.push_back({TokenKind::comma, ",", start});
          continue;
        case ';':
          advance();
          out.push_back({TokenKind::semicolon, ";", start});
          continue;
        default:
          break;
      }
      std::string shown = std::isprint(static_cast<unsigned char>(c)) ? std::string(1, c)
                                                                       : "\\x" + hex(static_cast<unsigned char>(c));
      throw Error(ErrorKind::illegal_character, start, "character '" + shown + "' is outside the supported subset");
    }
    return out;
  }

 private:
  static std::string hex(unsigned char c) {
    constexpr char digits[] = "0123456789abcdef";
    return {digits[c >> 4], digits[c & 15]};
  }

  char peek(std::size_t ahead) const { return i_ + ahead < src_.size() ? src_[i_ + ahead] : '\0'; }

  void advance() {
    if (src_[i_] == '\n') {
      ++pos_.line;
      pos_.column = 1;
    } else {
      ++pos_.column;
    }
    ++i_;
  }

  std::string_view src_;
  std::size_t i_ = 0;
  SourcePos pos_;
};

}  // namespace

std::vector<Token> tokenize(std::string_view source) { return Lexer(source).run(); }

}  // namespace cotforge::wolfram
