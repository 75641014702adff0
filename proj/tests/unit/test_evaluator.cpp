#include "doctest.h"

#include "cotforge/wolfram/evaluator.hpp"

using namespace cotforge::wolfram;

namespace {

std::string answer_of(std::string_view src) {
  const auto r = evaluate(src);
  const auto a = final_answer(r);
  REQUIRE(a.has_value());
  return a->to_string();
}

ErrorKind eval_error(std::string_view src, const EvalLimits& limits = {}) {
  try {
    evaluate(src, limits);
  } catch (const Error& e) {
    return e.kind();
  }
  FAIL("no error raised for: " << src);
  return ErrorKind::syntax;
}

}  // namespace

TEST_CASE("exact rational arithmetic") {
  CHECK(answer_of("3/4 + 2") == "11/4");
  CHECK(answer_of("v1 = 6/4\nanswer = v1 * 2") == "3");
  CHECK(answer_of("2^10") == "1024");
  CHECK(answer_of("2^-2") == "1/4");
  CHECK(answer_of("-(3 - 5)") == "2");
}

TEST_CASE("reals are contagious") {
  CHECK(answer_of("1.5 + 1/2") == "2.");
  CHECK(answer_of("N[1/4]") == "0.25");
  CHECK(answer_of("4^0.5") == "2.");
}

TEST_CASE("builtins") {
  CHECK(answer_of("Sqrt[16/9]") == "4/3");
  CHECK(answer_of("Sqrt[2]") == "1.4142135623730951");
  CHECK(answer_of("Floor[-7/2]") == "-4");
  CHECK(answer_of("Ceiling[7/2]") == "4");
  CHECK(answer_of("Round[5/2]") == "2");
  CHECK(answer_of("Round[7/2]") == "4");
  CHECK(answer_of("Abs[-3]") == "3");
  CHECK(answer_of("Max[1, {7, 2}, 5]") == "7");
  CHECK(answer_of("Min[{4, 2.5}]") == "2.5");
  CHECK(answer_of("Total[{1, 2, 3/2}]") == "9/2");
  CHECK(answer_of("Length[{1, 2, 3}]") == "3");
  CHECK(answer_of("Floor[{1/2, 5/2}]") == "{0, 2}");
}

TEST_CASE("lists, parts and replacement") {
  CHECK(answer_of("v = {10, {20, 30}}\nv[[2, 1]]") == "20");
  CHECK(answer_of("x + 1 /. x -> 4") == "5");
  CHECK(answer_of("s = Solve[x^2 - 5*x + 6 == 0, x]\nanswer = x /. s[[2]]") == "3");
  CHECK(answer_of("s = Solve[x^2 - 5*x + 6 == 0, x]\nx /. s") == "{2, 3}");
  CHECK(eval_error("v = {1, 2}\nv[[3]]") == ErrorKind::domain);
}

TEST_CASE("final answer falls back to the last statement") {
  const auto r = evaluate("a = 2\nb = a * 3");
  CHECK(final_answer(r)->to_string() == "6");
  CHECK(r.env.at("a").to_string() == "2");
  CHECK_FALSE(final_answer(evaluate("")).has_value());
}

TEST_CASE("evaluation errors") {
  CHECK(eval_error("a = 1/0") == ErrorKind::division_by_zero);
  CHECK(eval_error("a = b + 1") == ErrorKind::undefined_identifier);
  CHECK(eval_error("Sin[1]") == ErrorKind::unsupported_function);
  CHECK(eval_error("Sqrt[-4]") == ErrorKind::domain);
  CHECK(eval_error("10^200") == ErrorKind::magnitude_limit);
  CHECK(eval_error("1/10^101") == ErrorKind::magnitude_limit);
  EvalLimits tight;
  tight.max_steps = 5;
  CHECK(eval_error("a = 1 + 2 + 3 + 4 + 5 + 6", tight) == ErrorKind::step_limit);
}

TEST_CASE("magnitude bound is inclusive") {
  // The bound is the double nearest 1e100, which lies just above 10^100.
  CHECK(answer_of("10^100") == "1" + std::string(100, '0'));
  CHECK(eval_error("2 * 10^100") == ErrorKind::magnitude_limit);
}

TEST_CASE("values are structurally compared") {
  CHECK(Value(Number::integer(2)) == Value(Number::integer(2)));
  CHECK_FALSE(Value(Number::integer(2)) == Value(Number(2.0)));
  CHECK(compare(Number::integer(2), Number(2.0)) == 0);
}
