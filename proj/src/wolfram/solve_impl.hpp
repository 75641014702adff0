#pragma once

#include <functional>
#include <optional>
#include <string>
#include <string_view>

#include "cotforge/wolfram/evaluator.hpp"

namespace cotforge::wolfram::detail {

using Lookup = std::function<const Value*(std::string_view)>;
using EvalConstant = std::function<Value(const Expr&)>;
using CheckNumber = std::function<Number(const Expr&, Number)>;

Value solve(const Expr& equation, const std::string& var, const Lookup& lookup,
            const EvalConstant& eval_constant, const CheckNumber& check);

// floor(sqrt(n)) == sqrt(n) test for exact values; returns the root.
std::optional<Rational> exact_sqrt(const Rational& r);

}  // namespace cotforge::wolfram::detail
