#include <algorithm>
#include <cmath>
#include <vector>

#include "solve_impl.hpp"

namespace cotforge::wolfram {

namespace detail {

namespace {

constexpr std::size_t kMaxIntermediateDegree = 8;

using Poly = std::vector<Number>;  // index = degree

bool mentions(const Expr& e, const std::string& var) {
  if (e.kind == Expr::Kind::identifier) return e.text == var;
  return std::any_of(e.children.begin(), e.children.end(), [&](const Expr& c) { return mentions(c, var); });
}

void collect_identifiers(const Expr& e, std::vector<const Expr*>& out) {
  if (e.kind == Expr::Kind::identifier) out.push_back(&e);
  for (const auto& c : e.children) collect_identifiers(c, out);
}

void trim(Poly& p) {
  while (p.size() > 1 && p.back().is_zero()) p.pop_back();
}

Poly add(const Poly& a, const Poly& b, bool subtract) {
  Poly out(std::max(a.size(), b.size()), Number::integer(0));
  for (std::size_t i = 0; i < a.size(); ++i) out[i] = a[i];
  for (std::size_t i = 0; i < b.size(); ++i) out[i] = subtract ? out[i] - b[i] : out[i] + b[i];
  trim(out);
  return out;
}

class PolyBuilder {
 public:
  PolyBuilder(const std::string& var, const Lookup& lookup, const EvalConstant& eval_constant,
              const CheckNumber& check)
      : var_(var), lookup_(lookup), eval_constant_(eval_constant), check_(check) {}

  Poly build(const Expr& e) {
    if (!mentions(e, var_)) return {constant(e)};
    switch (e.kind) {
      case Expr::Kind::identifier:
        return {Number::integer(0), Number::integer(1)};
      case Expr::Kind::negate: {
        Poly p = build(e.children[0]);
        for (auto& c : p) c = -c;
        return p;
      }
      case Expr::Kind::binary:
        return binary(e);
      default:
        throw Error(ErrorKind::unsupported_equation, e.pos,
                    "'" + var_ + "' appears in a construct that is not polynomial");
    }
  }

 private:
  Number constant(const Expr& e) {
    std::vector<const Expr*> ids;
    collect_identifiers(e, ids);
    for (const auto* id : ids) {
      if (!lookup_(id->text)) {
        throw Error(ErrorKind::free_variable, id->pos,
                    "'" + id->text + "' is unbound; only '" + var_ + "' may be free in Solve");
      }
    }
    Value v = eval_constant_(e);
    if (!v.is_number()) throw Error(ErrorKind::unsupported_equation, e.pos, "equation coefficient is not a number");
    return v.number();
  }

  Poly binary(const Expr& e) {
    const char op = e.text[0];
    if (op == '+' || op == '-') return add(build(e.children[0]), build(e.children[1]), op == '-');
    if (op == '*') return multiply(e, build(e.children[0]), build(e.children[1]));
    if (op == '/') {
      if (mentions(e.children[1], var_)) {
        throw Error(ErrorKind::unsupported_equation, e.pos, "'" + var_ + "' appears in a denominator");
      }
      Number d = constant(e.children[1]);
      if (d.is_zero()) throw Error(ErrorKind::division_by_zero, e.pos, "division by zero");
      Poly p = build(e.children[0]);
      for (auto& c : p) c = check_(e, c / d);
      return p;
    }
    // '^'
    if (mentions(e.children[1], var_)) {
      throw Error(ErrorKind::unsupported_equation, e.pos, "'" + var_ + "' appears in an exponent");
    }
    Number exponent = constant(e.children[1]);
    if (!exponent.is_exact() || !exponent.is_integer() || exponent.sign() < 0 ||
        exponent.exact() > static_cast<long long>(kMaxIntermediateDegree)) {
      throw Error(ErrorKind::unsupported_equation, e.pos, "exponent of '" + var_ + "' must be a small non-negative integer");
    }
    const int n = boost::multiprecision::numerator(exponent.exact()).convert_to<int>();
    Poly base = build(e.children[0]);
    Poly out{Number::integer(1)};
    for (int i = 0; i < n; ++i) out = multiply(e, out, base);
    return out;
  }

  Poly multiply(const Expr& at, const Poly& a, const Poly& b) {
    if (a.size() + b.size() - 2 > kMaxIntermediateDegree) {
      throw Error(ErrorKind::unsupported_equation, at.pos, "polynomial degree too high");
    }
    Poly out(a.size() + b.size() - 1, Number::integer(0));
    for (std::size_t i = 0; i < a.size(); ++i) {
      for (std::size_t j = 0; j < b.size(); ++j) out[i + j] = check_(at, out[i + j] + a[i] * b[j]);
    }
    trim(out);
    return out;
  }

  const std::string& var_;
  const Lookup& lookup_;
  const EvalConstant& eval_constant_;
  const CheckNumber& check_;
};

Value solutions(const std::string& var, std::vector<Number> roots) {
  std::stable_sort(roots.begin(), roots.end(), [](const Number& a, const Number& b) { return compare(a, b) < 0; });
  std::vector<Value> sets;
  for (auto& r : roots) sets.push_back(Value::list({Value::rule(var, Value(std::move(r)))}));
  return Value::list(std::move(sets));
}

long double eval_poly(long double a, long double b, long double c, long double x) { return (a * x + b) * x + c; }

long double polish(long double a, long double b, long double c, long double x) {
  const long double d = 2 * a * x + b;
  if (d == 0) return x;
  const long double next = x - eval_poly(a, b, c, x) / d;
  return std::fabs(eval_poly(a, b, c, next)) <= std::fabs(eval_poly(a, b, c, x)) ? next : x;
}

}  // namespace

std::optional<Rational> exact_sqrt(const Rational& r) {
  if (r < 0) return std::nullopt;
  const BigInt num = boost::multiprecision::numerator(r);
  const BigInt den = boost::multiprecision::denominator(r);
  const BigInt sn = boost::multiprecision::sqrt(num);
  const BigInt sd = boost::multiprecision::sqrt(den);
  if (sn * sn != num || sd * sd != den) return std::nullopt;
  return Rational(sn, sd);
}

Value solve(const Expr& equation, const std::string& var, const Lookup& lookup,
            const EvalConstant& eval_constant, const CheckNumber& check) {
  if (equation.kind != Expr::Kind::equation) {
    throw Error(ErrorKind::unsupported_equation, equation.pos, "Solve expects an equation 'lhs == rhs'");
  }
  PolyBuilder builder(var, lookup, eval_constant, check);
  Poly p = add(builder.build(equation.children[0]), builder.build(equation.children[1]), true);
  const SourcePos at = equation.pos;

  if (p.size() == 1) {
    if (p[0].is_zero()) throw Error(ErrorKind::unsupported_equation, at, "equation holds for every value of '" + var + "'");
    return Value::list({});
  }
  if (p.size() == 2) {
    return solutions(var, {check(equation, -p[0] / p[1])});
  }
  if (p.size() > 3) {
    throw Error(ErrorKind::unsupported_equation, at, "degree " + std::to_string(p.size() - 1) + " equations are not supported");
  }

  const Number& a = p[2];
  const Number& b = p[1];
  const Number& c = p[0];
  if (a.is_exact() && b.is_exact() && c.is_exact()) {
    const Rational disc = b.exact() * b.exact() - 4 * a.exact() * c.exact();
    if (disc < 0) return Value::list({});
    const Rational two_a = 2 * a.exact();
    if (disc == 0) {
      Number r = check(equation, Number(Rational(-b.exact() / two_a)));
      return solutions(var, {r, r});
    }
    if (auto s = exact_sqrt(disc)) {
      return solutions(var, {check(equation, Number(Rational((-b.exact() - *s) / two_a))),
                             check(equation, Number(Rational((-b.exact() + *s) / two_a)))});
    }
  }

  const long double la = a.to_double(), lb = b.to_double(), lc = c.to_double();
  const long double disc = lb * lb - 4 * la * lc;
  if (disc < 0) return Value::list({});
  if (disc == 0) {
    Number r = check(equation, Number(static_cast<double>(-lb / (2 * la))));
    return solutions(var, {r, r});
  }
  const long double sq = std::sqrt(disc);
  const long double q = -0.5L * (lb + std::copysign(sq, lb));
  long double r1 = q / la;
  long double r2 = q != 0 ? lc / q : -r1;
  r1 = polish(la, lb, lc, r1);
  r2 = polish(la, lb, lc, r2);
  return solutions(var, {check(equation, Number(static_cast<double>(r1))),
                         check(equation, Number(static_cast<double>(r2)))});
}

}  // namespace detail

}  // namespace cotforge::wolfram
