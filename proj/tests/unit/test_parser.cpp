#include "doctest.h"

#include "cotforge/wolfram/syntax.hpp"

using namespace cotforge::wolfram;

namespace {

std::string sx(std::string_view src) { return to_sexpr(parse(src)); }

ErrorKind parse_error(std::string_view src) {
  try {
    parse(src);
  } catch (const Error& e) {
    return e.kind();
  }
  FAIL("no error raised for: " << src);
  return ErrorKind::domain;
}

}  // namespace

TEST_CASE("precedence and associativity") {
  CHECK(sx("2 + 3 * 4") == "(program (+ 2 (* 3 4)))");
  CHECK(sx("10 - 4 - 3") == "(program (- (- 10 4) 3))");
  CHECK(sx("2 ^ 3 ^ 2") == "(program (^ 2 (^ 3 2)))");
  CHECK(sx("-2 ^ 2") == "(program (neg (^ 2 2)))");
  CHECK(sx("a = b = 3") == "(program (= a (= b 3)))");
  CHECK(sx("(1 + 2) * 3") == "(program (* (+ 1 2) 3))");
}

TEST_CASE("calls, lists, parts and rules") {
  CHECK(sx("Max[1, {2, 3}]") == "(program (call Max 1 (list 2 3)))");
  CHECK(sx("v[[2, 1]]") == "(program (part v 2 1))");
  CHECK(sx("x /. s[[1]]") == "(program (/. x (part s 1)))");
  CHECK(sx("Solve[x^2 == 4, x]") == "(program (call Solve (== (^ x 2) 4) x))");
  CHECK(sx("x /. x -> 2") == "(program (/. x (-> x 2)))");
}

TEST_CASE("statement separation") {
  CHECK(sx("a = 1; b = 2\nc = 3") == "(program (= a 1) (= b 2) (= c 3))");
  // Line breaks inside brackets continue the statement.
  CHECK(sx("t = Total[{1,\n 2}]") == "(program (= t (call Total (list 1 2))))");
  CHECK(sx("a = 1;;\n\n;b = 2;") == "(program (= a 1) (= b 2))");
  CHECK(sx("(* only a comment *)") == "(program)");
}

TEST_CASE("comments are inert") {
  CHECK(sx("a = (* c *) 1 + (* d *) 2 (* e *)") == sx("a = 1 + 2"));
}

TEST_CASE("syntax errors") {
  CHECK(parse_error("a = ") == ErrorKind::syntax);
  CHECK(parse_error("3 = a") == ErrorKind::syntax);
  CHECK(parse_error("f[1, 2") == ErrorKind::syntax);
  CHECK(parse_error("(1 + 2") == ErrorKind::syntax);
  CHECK(parse_error("5 x") == ErrorKind::syntax);
  CHECK(parse_error("a = 1 2") == ErrorKind::syntax);
  CHECK(parse_error("a = x == 1") == ErrorKind::syntax);
  try {
    parse("a = 1\nb = * 2");
  } catch (const Error& e) {
    CHECK(e.pos().line == 2);
  }
}
