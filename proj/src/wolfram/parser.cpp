#include <optional>

#include "cotforge/wolfram/syntax.hpp"

namespace cotforge::wolfram {

namespace {

struct InfixOp {
  int lbp;
  bool right_assoc;
};

// Higher binds tighter. Unary minus sits between '^' and '*'.
constexpr int kUnaryMinusBp = 70;
constexpr int kPostfixBp = 90;

std::optional<InfixOp> infix_op(const Token& t) {
  if (t.kind != TokenKind::op) return std::nullopt;
  const auto& s = t.lexeme;
  if (s == "=") return InfixOp{10, true};
  if (s == "/.") return InfixOp{20, false};
  if (s == "->") return InfixOp{30, true};
  if (s == "==") return InfixOp{40, false};
  if (s == "+" || s == "-") return InfixOp{50, false};
  if (s == "*" || s == "/") return InfixOp{60, false};
  if (s == "^") return InfixOp{80, true};
  return std::nullopt;
}

class Parser {
 public:
  explicit Parser(const std::vector<Token>& tokens) {
    for (const auto& t : tokens) {
      if (t.kind != TokenKind::comment) tokens_.push_back(t);
    }
  }

  Expr program() {
    Expr prog{Expr::Kind::program, {1, 1}, {}, {}};
    while (true) {
      while (at_semicolon()) consume();
      if (at_end()) break;
      prog.children.push_back(expression(0));
      if (at_end()) break;
      if (at_semicolon()) continue;
      if (peek().pos.line > last_line_) continue;
      throw Error(ErrorKind::syntax, peek().pos,
                  "expected ';' or line break before '" + peek().lexeme + "'");
    }
    check_equations(prog, false);
    return prog;
  }

 private:
  bool at_end() const { return i_ >= tokens_.size(); }
  bool at_semicolon() const { return !at_end() && tokens_[i_].kind == TokenKind::semicolon; }
  const Token& peek(std::size_t ahead = 0) const { return tokens_[i_ + ahead]; }
  bool has(std::size_t ahead) const { return i_ + ahead < tokens_.size(); }

  const Token& consume() {
    last_line_ = tokens_[i_].pos.line;
    return tokens_[i_++];
  }

  bool at_bracket(char b, std::size_t ahead = 0) const {
    return has(ahead) && peek(ahead).kind == TokenKind::bracket && peek(ahead).lexeme[0] == b;
  }

  SourcePos end_pos() const {
    if (tokens_.empty()) return {1, 1};
    auto p = tokens_.back().pos;
    p.column += static_cast<int>(tokens_.back().lexeme.size());
    return p;
  }

  [[noreturn]] void fail_expected(const std::string& what) const {
    if (at_end()) throw Error(ErrorKind::syntax, end_pos(), "expected " + what + " but input ended");
    throw Error(ErrorKind::syntax, peek().pos, "expected " + what + ", found '" + peek().lexeme + "'");
  }

  void expect_bracket(char b) {
    if (!at_bracket(b)) fail_expected(std::string("'") + b + "'");
    consume();
  }

  bool part_opens() const {
    return at_bracket('[') && at_bracket('[', 1) && peek(1).pos.line == peek().pos.line &&
           peek(1).pos.column == peek().pos.column + 1;
  }

  Expr expression(int min_bp) {
    Expr lhs = prefix();
    while (!at_end()) {
      const Token& t = peek();
      if (nesting_ == 0 && t.pos.line > last_line_) break;
      if (t.kind == TokenKind::bracket && t.lexeme == "[") {
        if (kPostfixBp <= min_bp) break;
        lhs = postfix(std::move(lhs));
        continue;
      }
      auto op = infix_op(t);
      if (!op || op->lbp <= min_bp) break;
      consume();
      Expr rhs = expression(op->right_assoc ? op->lbp - 1 : op->lbp);
      lhs = combine(t, std::move(lhs), std::move(rhs));
    }
    return lhs;
  }

  Expr combine(const Token& op, Expr lhs, Expr rhs) {
    const auto& s = op.lexeme;
    if (s == "=") {
      if (lhs.kind != Expr::Kind::identifier) {
        throw Error(ErrorKind::syntax, op.pos, "assignment target must be an identifier");
      }
      return Expr{Expr::Kind::assign, op.pos, lhs.text, {std::move(rhs)}};
    }
    Expr::Kind kind = Expr::Kind::binary;
    if (s == "==") kind = Expr::Kind::equation;
    if (s == "->") kind = Expr::Kind::rule;
    if (s == "/.") kind = Expr::Kind::replace_all;
    return Expr{kind, op.pos, kind == Expr::Kind::binary ? s : std::string(), {std::move(lhs), std::move(rhs)}};
  }

  Expr prefix() {
    if (at_end()) fail_expected("an expression");
    const Token& t = peek();
    switch (t.kind) {
      case TokenKind::number:
        consume();
        return Expr{Expr::Kind::number, t.pos, t.lexeme, {}};
      case TokenKind::identifier:
        consume();
        return Expr{Expr::Kind::identifier, t.pos, t.lexeme, {}};
      case TokenKind::op:
        if (t.lexeme == "-" || t.lexeme == "+") {
          const Token op = consume();
          Expr operand = expression(kUnaryMinusBp);
          if (op.lexeme == "+") return operand;
          return Expr{Expr::Kind::negate, op.pos, {}, {std::move(operand)}};
        }
        break;
      case TokenKind::bracket:
        if (t.lexeme == "(") {
          consume();
          ++nesting_;
          Expr inner = expression(0);
          expect_bracket(')');
          --nesting_;
          return inner;
        }
        if (t.lexeme == "{") {
          const Token open = consume();
          ++nesting_;
          Expr list{Expr::Kind::list, open.pos, {}, {}};
          if (!at_bracket('}')) list.children = comma_list();
          expect_bracket('}');
          --nesting_;
          return list;
        }
        break;
      default:
        break;
    }
    fail_expected("an expression");
  }

  std::vector<Expr> comma_list() {
    std::vector<Expr> items;
    items.push_back(expression(0));
    while (!at_end() && peek().kind == TokenKind::comma) {
      consume();
      items.push_back(expression(0));
    }
    return items;
  }

  Expr postfix(Expr lhs) {
    if (part_opens()) {
      const Token open = consume();
      consume();
      ++nesting_;
      Expr part{Expr::Kind::part, open.pos, {}, {std::move(lhs)}};
      for (auto& idx : comma_list()) part.children.push_back(std::move(idx));
      expect_bracket(']');
      expect_bracket(']');
      --nesting_;
      return part;
    }
    if (lhs.kind != Expr::Kind::identifier) {
      throw Error(ErrorKind::syntax, peek().pos, "function head must be an identifier");
    }
    consume();
    ++nesting_;
    Expr call{Expr::Kind::call, lhs.pos, lhs.text, {}};
    if (!at_bracket(']')) call.children = comma_list();
    expect_bracket(']');
    --nesting_;
    return call;
  }

  // Equations are only meaningful as the first argument of Solve.
  static void check_equations(const Expr& e, bool allowed) {
    if (e.kind == Expr::Kind::equation) {
      if (!allowed) throw Error(ErrorKind::syntax, e.pos, "equation '==' is only allowed as the first argument of Solve");
      for (const auto& c : e.children) check_equations(c, false);
      return;
    }
    for (std::size_t i = 0; i < e.children.size(); ++i) {
      const bool solve_eq = e.kind == Expr::Kind::call && e.text == "Solve" && i == 0;
      check_equations(e.children[i], solve_eq);
    }
  }

  std::vector<Token> tokens_;
  std::size_t i_ = 0;
  int nesting_ = 0;
  int last_line_ = 1;
};

std::string kind_tag(const Expr& e) {
  switch (e.kind) {
    case Expr::Kind::number: return e.text;
    case Expr::Kind::identifier: return e.text;
    case Expr::Kind::negate: return "neg";
    case Expr::Kind::binary: return e.text;
    case Expr::Kind::equation: return "==";
    case Expr::Kind::call: return "call " + e.text;
    case Expr::Kind::list: return "list";
    case Expr::Kind::part: return "part";
    case Expr::Kind::rule: return "->";
    case Expr::Kind::replace_all: return "/.";
    case Expr::Kind::assign: return "= " + e.text;
    case Expr::Kind::program: return "program";
  }
  return "?";
}

}  // namespace

Expr parse(const std::vector<Token>& tokens) { return Parser(tokens).program(); }

Expr parse(std::string_view source) { return parse(tokenize(source)); }

std::string to_sexpr(const Expr& e) {
  if (e.kind == Expr::Kind::number || e.kind == Expr::Kind::identifier) return e.text;
  std::string s = "(" + kind_tag(e);
  for (const auto& c : e.children) s += " " + to_sexpr(c);
  return s + ")";
}

}  // namespace cotforge::wolfram
