#pragma once

#include <chrono>
#include <cstdint>
#include <functional>
#include <map>
#include <optional>
#include <string>
#include <string_view>

#include "cotforge/wolfram/syntax.hpp"
#include "cotforge/wolfram/value.hpp"

namespace cotforge::wolfram {

// Numerators and denominators of exact values, and the magnitude of reals,
// must stay within max_numeric_magnitude.
struct EvalLimits {
  std::int64_t max_steps = 1'000'000;
  double max_numeric_magnitude = 1e100;
  // Optional wall-clock bound, checked periodically.
  std::optional<std::chrono::steady_clock::time_point> deadline;
};

using Environment = std::map<std::string, Value, std::less<>>;

struct EvalResult {
  Environment env;
  std::optional<Value> last;  // value of the final statement, if any
};

// One evaluator per program run; instances share nothing.
class Evaluator {
 public:
  explicit Evaluator(EvalLimits limits = {});

  EvalResult run(const Expr& program);

  // Evaluates a single expression against an existing environment.
  Value eval(const Expr& e, const Environment& env);

  std::int64_t steps() const { return steps_; }

 private:
  struct Scope;

  Value eval_in(const Expr& e, Scope& scope);
  Value call(const Expr& e, Scope& scope);
  Value arith(const Expr& at, char op, const Value& a, const Value& b);
  Number arith_number(const Expr& at, char op, const Number& a, const Number& b);
  Number power(const Expr& at, const Number& base, const Number& exponent);
  Value part(const Expr& e, Scope& scope);
  Value replace_all(const Expr& e, Scope& scope);
  Value solve(const Expr& e, Scope& scope);
  Number checked(const Expr& at, Number n) const;
  void tick(const Expr& at);

  EvalLimits limits_;
  Rational magnitude_bound_;
  std::int64_t steps_ = 0;
};

// Parses and runs `source`. Lex/syntax problems and evaluation failures are
// reported as wolfram::Error.
EvalResult evaluate(std::string_view source, const EvalLimits& limits = {});
EvalResult evaluate(const Expr& program, const EvalLimits& limits = {});

// The value bound to `answer` if present, otherwise the last statement's value.
std::optional<Value> final_answer(const EvalResult& result);

// Solves a polynomial equation of degree <= 2 in `var` over the reals.
//
// lhs - rhs is normalized into a polynomial with exact or real coefficients;
// identifiers other than `var` are looked up in `env`, and subexpressions not
// mentioning `var` are evaluated with `eval_constant`. Returns Solve-style
// {{var -> r1}, {var -> r2}, ...} with roots ascending; a negative
// discriminant or a non-zero constant gives {}. A repeated quadratic root is
// listed twice. Degree >= 3, division by the variable, and identities (0 == 0)
// raise unsupported_equation; unbound identifiers raise free_variable.
Value solve_equation(const Expr& equation, const std::string& var, const Environment& env,
                     const std::function<Value(const Expr&)>& eval_constant);

// Convenience overload evaluating constants with a fresh Evaluator.
Value solve_equation(const Expr& equation, const std::string& var, const Environment& env,
                     const EvalLimits& limits = {});

}  // namespace cotforge::wolfram
