#include "doctest.h"

#include "cotforge/wolfram/evaluator.hpp"

using namespace cotforge::wolfram;

namespace {

std::string solve_src(std::string_view eq, const Environment& env = {}) {
  // '==' only parses as the first argument of Solve.
  const auto prog = parse("Solve[" + std::string(eq) + ", x]");
  REQUIRE(prog.children.size() == 1);
  return solve_equation(prog.children[0].children[0], "x", env).to_string();
}

ErrorKind solve_error(std::string_view eq) {
  try {
    solve_src(eq);
  } catch (const Error& e) {
    return e.kind();
  }
  FAIL("no error raised for: " << eq);
  return ErrorKind::syntax;
}

}  // namespace

TEST_CASE("linear equations") {
  CHECK(solve_src("2*x + 3 == 11") == "{{x -> 4}}");
  CHECK(solve_src("x/3 == 5 - x") == "{{x -> 15/4}}");
  CHECK(solve_src("0.5*x == 1") == "{{x -> 2.}}");
}

TEST_CASE("quadratics are ascending and exact when the discriminant is a square") {
  CHECK(solve_src("x^2 - 5*x + 6 == 0") == "{{x -> 2}, {x -> 3}}");
  CHECK(solve_src("-x^2 + 1 == 0") == "{{x -> -1}, {x -> 1}}");
  CHECK(solve_src("x*x == 4*x - 4") == "{{x -> 2}, {x -> 2}}");
  CHECK(solve_src("x^2 == 2") == "{{x -> -1.4142135623730951}, {x -> 1.4142135623730951}}");
}

TEST_CASE("no real roots") {
  CHECK(solve_src("x^2 + 1 == 0") == "{}");
  CHECK(solve_src("0*x + 3 == 0") == "{}");
}

TEST_CASE("bound identifiers act as constants") {
  Environment env;
  env.emplace("a", Value(Number::integer(3)));
  CHECK(solve_src("a*x == 12", env) == "{{x -> 4}}");
}

TEST_CASE("unsupported forms") {
  CHECK(solve_error("x^3 == 1") == ErrorKind::unsupported_equation);
  CHECK(solve_error("1/x == 2") == ErrorKind::unsupported_equation);
  CHECK(solve_error("x == x") == ErrorKind::unsupported_equation);
  CHECK(solve_error("x + y == 1") == ErrorKind::free_variable);
  CHECK(solve_error("x + 1") == ErrorKind::unsupported_equation);
}
