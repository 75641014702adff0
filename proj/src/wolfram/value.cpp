#include "cotforge/wolfram/value.hpp"

#include <cmath>

#include "cotforge/text.hpp"

namespace cotforge::wolfram {

double Number::to_double() const {
  if (is_exact()) return exact().convert_to<double>();
  return real();
}

bool Number::is_zero() const { return is_exact() ? exact() == 0 : real() == 0.0; }

bool Number::is_integer() const {
  if (is_exact()) return boost::multiprecision::denominator(exact()) == 1;
  return std::isfinite(real()) && std::floor(real()) == real();
}

int Number::sign() const {
  if (is_exact()) return exact().sign();
  return real() > 0 ? 1 : (real() < 0 ? -1 : 0);
}

Number operator+(const Number& a, const Number& b) {
  if (a.is_exact() && b.is_exact()) return Number(Rational(a.exact() + b.exact()));
  return Number(a.to_double() + b.to_double());
}

Number operator-(const Number& a, const Number& b) {
  if (a.is_exact() && b.is_exact()) return Number(Rational(a.exact() - b.exact()));
  return Number(a.to_double() - b.to_double());
}

Number operator*(const Number& a, const Number& b) {
  if (a.is_exact() && b.is_exact()) return Number(Rational(a.exact() * b.exact()));
  return Number(a.to_double() * b.to_double());
}

Number operator/(const Number& a, const Number& b) {
  if (a.is_exact() && b.is_exact()) return Number(Rational(a.exact() / b.exact()));
  return Number(a.to_double() / b.to_double());
}

Number Number::operator-() const {
  if (is_exact()) return Number(Rational(-exact()));
  return Number(-real());
}

int compare(const Number& a, const Number& b) {
  if (a.is_exact() && b.is_exact()) return a.exact().compare(b.exact()) < 0 ? -1 : (a.exact() == b.exact() ? 0 : 1);
  const double x = a.to_double(), y = b.to_double();
  return x < y ? -1 : (x > y ? 1 : 0);
}

std::string Number::to_string() const {
  if (is_exact()) {
    const auto& r = exact();
    if (boost::multiprecision::denominator(r) == 1) return boost::multiprecision::numerator(r).str();
    return boost::multiprecision::numerator(r).str() + "/" + boost::multiprecision::denominator(r).str();
  }
  std::string s = format_double(real());
  if (s.find_first_of(".e") == std::string::npos) s += ".";
  return s;
}

bool operator==(const Value& a, const Value& b) {
  if (a.is_number() && b.is_number()) {
    const auto& x = a.number();
    const auto& y = b.number();
    if (x.is_exact() != y.is_exact()) return false;
    return x.is_exact() ? x.exact() == y.exact() : x.real() == y.real();
  }
  if (a.is_list() && b.is_list()) return a.items() == b.items();
  if (a.is_rule() && b.is_rule()) return a.rule().name == b.rule().name && *a.rule().rhs == *b.rule().rhs;
  return false;
}

std::string Value::to_string() const {
  if (is_number()) return number().to_string();
  if (is_rule()) return rule().name + " -> " + rule().rhs->to_string();
  std::string s = "{";
  for (std::size_t i = 0; i < items().size(); ++i) {
    if (i) s += ", ";
    s += items()[i].to_string();
  }
  return s + "}";
}

}  // namespace cotforge::wolfram
