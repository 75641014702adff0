#pragma once

#include <memory>
#include <optional>
#include <string>
#include <variant>
#include <vector>

#include <boost/multiprecision/cpp_int.hpp>

namespace cotforge::wolfram {

using Rational = boost::multiprecision::cpp_rational;
using BigInt = boost::multiprecision::cpp_int;

// Exact rational or finite machine real. Arithmetic between two rationals
// stays exact; anything touching a real is coerced to real.
class Number {
 public:
  Number() = default;
  Number(Rational r) : rep_(std::move(r)) {}
  Number(double d) : rep_(d) {}
  static Number integer(long long v) { return Number(Rational(v)); }

  bool is_exact() const { return std::holds_alternative<Rational>(rep_); }
  const Rational& exact() const { return std::get<Rational>(rep_); }
  double real() const { return std::get<double>(rep_); }
  double to_double() const;
  bool is_zero() const;
  bool is_integer() const;
  int sign() const;

  friend Number operator+(const Number& a, const Number& b);
  friend Number operator-(const Number& a, const Number& b);
  friend Number operator*(const Number& a, const Number& b);
  // Caller checks for a zero divisor.
  friend Number operator/(const Number& a, const Number& b);
  Number operator-() const;

  // Exact comparison when both are rational, otherwise by double value.
  friend int compare(const Number& a, const Number& b);
  friend bool operator==(const Number& a, const Number& b) { return compare(a, b) == 0; }

  std::string to_string() const;

 private:
  std::variant<Rational, double> rep_{Rational(0)};
};

class Value;

struct ValueList {
  std::vector<Value> items;
};

struct RuleValue {
  std::string name;
  std::shared_ptr<const Value> rhs;
};

class Value {
 public:
  Value() = default;
  Value(Number n) : rep_(std::move(n)) {}
  Value(ValueList l) : rep_(std::move(l)) {}
  Value(RuleValue r) : rep_(std::move(r)) {}

  static Value list(std::vector<Value> items) { return Value(ValueList{std::move(items)}); }
  static Value rule(std::string name, Value rhs) {
    return Value(RuleValue{std::move(name), std::make_shared<const Value>(std::move(rhs))});
  }

  bool is_number() const { return std::holds_alternative<Number>(rep_); }
  bool is_list() const { return std::holds_alternative<ValueList>(rep_); }
  bool is_rule() const { return std::holds_alternative<RuleValue>(rep_); }

  const Number& number() const { return std::get<Number>(rep_); }
  const std::vector<Value>& items() const { return std::get<ValueList>(rep_).items; }
  const RuleValue& rule() const { return std::get<RuleValue>(rep_); }

  // Structural equality; numbers compare exactly (rational 2 != real 2.).
  friend bool operator==(const Value& a, const Value& b);

  // Wolfram-style rendering: 7/2, 3.5, {1, 2}, x -> 2
  std::string to_string() const;

 private:
  std::variant<Number, ValueList, RuleValue> rep_;
};

}  // namespace cotforge::wolfram
