#include "cotforge/wolfram/evaluator.hpp"

#include <charconv>
#include <cmath>
#include <vector>

#include "solve_impl.hpp"

namespace cotforge::wolfram {

namespace mp = boost::multiprecision;

struct Evaluator::Scope {
  Environment* env;
  // Rule bindings introduced by '/.', innermost last. They only cover names
  // that are unbound in env, mirroring evaluate-then-substitute.
  std::vector<const Environment*> overlays;

  const Value* find(std::string_view name) const {
    if (auto it = env->find(name); it != env->end()) return &it->second;
    for (auto o = overlays.rbegin(); o != overlays.rend(); ++o) {
      if (auto it = (*o)->find(name); it != (*o)->end()) return &it->second;
    }
    return nullptr;
  }
};

namespace {

Rational rational_from_double(double d) { return Rational(d); }

BigInt floor_div(const Rational& r) {
  const BigInt n = mp::numerator(r);
  const BigInt d = mp::denominator(r);
  BigInt q = n / d;  // truncates toward zero
  if (n % d != 0 && n < 0) --q;
  return q;
}

Rational round_half_even(const Rational& r) {
  const BigInt f = floor_div(r);
  const Rational frac = r - Rational(f);
  const Rational half(1, 2);
  if (frac > half) return Rational(f + 1);
  if (frac < half) return Rational(f);
  return Rational(f % 2 == 0 ? f : f + 1);
}

}  // namespace

Evaluator::Evaluator(EvalLimits limits) : limits_(limits) {
  if (limits_.max_steps <= 0 || !(limits_.max_numeric_magnitude > 0)) {
    throw std::invalid_argument("EvalLimits must be positive");
  }
  magnitude_bound_ = rational_from_double(limits_.max_numeric_magnitude);
}

void Evaluator::tick(const Expr& at) {
  if (++steps_ > limits_.max_steps) {
    throw Error(ErrorKind::step_limit, at.pos, "step limit of " + std::to_string(limits_.max_steps) + " exceeded");
  }
  if (limits_.deadline && (steps_ & 255) == 0 && std::chrono::steady_clock::now() > *limits_.deadline) {
    throw Error(ErrorKind::timeout, at.pos, "wall-clock deadline exceeded");
  }
}

Number Evaluator::checked(const Expr& at, Number n) const {
  if (n.is_exact()) {
    const auto& r = n.exact();
    if (mp::abs(mp::numerator(r)) > magnitude_bound_ || mp::denominator(r) > magnitude_bound_) {
      throw Error(ErrorKind::magnitude_limit, at.pos, "exact value exceeds the numeric magnitude limit");
    }
    return n;
  }
  if (!std::isfinite(n.real())) throw Error(ErrorKind::domain, at.pos, "result is not a finite real");
  if (std::fabs(n.real()) > limits_.max_numeric_magnitude) {
    throw Error(ErrorKind::magnitude_limit, at.pos, "real value exceeds the numeric magnitude limit");
  }
  return n;
}

EvalResult Evaluator::run(const Expr& program) {
  EvalResult result;
  Scope scope{&result.env, {}};
  if (program.kind != Expr::Kind::program) {
    result.last = eval_in(program, scope);
    return result;
  }
  for (const auto& stmt : program.children) result.last = eval_in(stmt, scope);
  return result;
}

Value Evaluator::eval(const Expr& e, const Environment& env) {
  Environment copy = env;
  Scope scope{&copy, {}};
  return eval_in(e, scope);
}

Value Evaluator::eval_in(const Expr& e, Scope& scope) {
  tick(e);
  switch (e.kind) {
    case Expr::Kind::number: {
      if (e.text.find('.') == std::string::npos) {
        return Value(checked(e, Number(Rational(BigInt(e.text)))));
      }
      std::string text = e.text;
      if (text.front() == '.') text.insert(0, "0");
      double d = 0.0;
      std::from_chars(text.data(), text.data() + text.size(), d);
      return Value(checked(e, Number(d)));
    }
    case Expr::Kind::identifier: {
      if (const Value* v = scope.find(e.text)) return *v;
      throw Error(ErrorKind::undefined_identifier, e.pos, "'" + e.text + "' is not defined");
    }
    case Expr::Kind::negate:
      return arith(e, '*', Value(Number::integer(-1)), eval_in(e.children[0], scope));
    case Expr::Kind::binary: {
      Value lhs = eval_in(e.children[0], scope);
      Value rhs = eval_in(e.children[1], scope);
      return arith(e, e.text[0], lhs, rhs);
    }
    case Expr::Kind::equation:
      throw Error(ErrorKind::domain, e.pos, "an equation can only be used inside Solve");
    case Expr::Kind::call:
      return call(e, scope);
    case Expr::Kind::list: {
      std::vector<Value> items;
      items.reserve(e.children.size());
      for (const auto& c : e.children) items.push_back(eval_in(c, scope));
      return Value::list(std::move(items));
    }
    case Expr::Kind::part:
      return part(e, scope);
    case Expr::Kind::rule: {
      const Expr& lhs = e.children[0];
      if (lhs.kind != Expr::Kind::identifier) {
        throw Error(ErrorKind::domain, lhs.pos, "rule left-hand side must be an identifier");
      }
      return Value::rule(lhs.text, eval_in(e.children[1], scope));
    }
    case Expr::Kind::replace_all:
      return replace_all(e, scope);
    case Expr::Kind::assign: {
      Value v = eval_in(e.children[0], scope);
      (*scope.env)[e.text] = v;
      return v;
    }
    case Expr::Kind::program: {
      Value last;
      for (const auto& stmt : e.children) last = eval_in(stmt, scope);
      return last;
    }
  }
  throw Error(ErrorKind::domain, e.pos, "unknown expression");
}

Value Evaluator::arith(const Expr& at, char op, const Value& a, const Value& b) {
  if (a.is_number() && b.is_number()) return Value(arith_number(at, op, a.number(), b.number()));
  if (a.is_rule() || b.is_rule()) throw Error(ErrorKind::domain, at.pos, "arithmetic on a rule");
  // Listable: element-wise on equal-length lists, scalars broadcast.
  std::vector<Value> out;
  if (a.is_list() && b.is_list()) {
    if (a.items().size() != b.items().size()) {
      throw Error(ErrorKind::domain, at.pos, "lists of unequal length cannot be combined");
    }
    for (std::size_t i = 0; i < a.items().size(); ++i) out.push_back(arith(at, op, a.items()[i], b.items()[i]));
  } else if (a.is_list()) {
    for (const auto& x : a.items()) out.push_back(arith(at, op, x, b));
  } else {
    for (const auto& y : b.items()) out.push_back(arith(at, op, a, y));
  }
  return Value::list(std::move(out));
}

Number Evaluator::arith_number(const Expr& at, char op, const Number& a, const Number& b) {
  switch (op) {
    case '+': return checked(at, a + b);
    case '-': return checked(at, a - b);
    case '*': return checked(at, a * b);
    case '/':
      if (b.is_zero()) throw Error(ErrorKind::division_by_zero, at.pos, "division by zero");
      return checked(at, a / b);
    case '^': return power(at, a, b);
  }
  throw Error(ErrorKind::domain, at.pos, std::string("unknown operator ") + op);
}

Number Evaluator::power(const Expr& at, const Number& base, const Number& exponent) {
  if (base.is_exact() && exponent.is_exact() && exponent.is_integer()) {
    const Rational& b = base.exact();
    const BigInt e = mp::numerator(exponent.exact());
    if (b == 0) {
      if (e < 0) throw Error(ErrorKind::division_by_zero, at.pos, "zero raised to a negative power");
      return Number::integer(e == 0 ? 1 : 0);
    }
    const BigInt n = mp::abs(mp::numerator(b));
    const BigInt d = mp::denominator(b);
    const BigInt abs_e = mp::abs(e);
    if (n != 1 || d != 1) {
      // Reject before computing: bits(result) ~ e * bits(max(n, d)).
      const double bits = static_cast<double>(std::max(mp::msb(n), d > 1 ? mp::msb(d) : 0u) + 1);
      if (abs_e > 100000 || abs_e.convert_to<double>() * (bits - 1) > std::log2(limits_.max_numeric_magnitude) + 1) {
        throw Error(ErrorKind::magnitude_limit, at.pos, "power exceeds the numeric magnitude limit");
      }
    }
    const unsigned k = abs_e > 100000 ? 0u : abs_e.convert_to<unsigned>();
    Rational r(mp::pow(mp::numerator(b), k), mp::pow(d, k));
    if (mp::abs(mp::numerator(b)) == 1 && d == 1) {
      // +-1 to a huge power: parity is all that matters
      r = Rational(mp::numerator(b) < 0 && (abs_e % 2 == 1) ? -1 : 1);
    }
    if (e < 0) r = 1 / r;
    return checked(at, Number(std::move(r)));
  }
  if (base.is_exact() && exponent.is_exact() && mp::denominator(exponent.exact()) == 2 && base.sign() >= 0) {
    if (auto root = detail::exact_sqrt(base.exact())) {
      return power(at, Number(*root), Number(Rational(mp::numerator(exponent.exact()))));
    }
  }
  const double x = base.to_double();
  const double y = exponent.to_double();
  if (x < 0 && std::floor(y) != y) {
    throw Error(ErrorKind::domain, at.pos, "negative base with a fractional exponent has no real value");
  }
  if (x == 0 && y < 0) throw Error(ErrorKind::division_by_zero, at.pos, "zero raised to a negative power");
  return checked(at, Number(std::pow(x, y)));
}

Value Evaluator::part(const Expr& e, Scope& scope) {
  Value target = eval_in(e.children[0], scope);
  for (std::size_t i = 1; i < e.children.size(); ++i) {
    const Expr& idx_expr = e.children[i];
    Value idx = eval_in(idx_expr, scope);
    if (!idx.is_number() || !idx.number().is_exact() || !idx.number().is_integer()) {
      throw Error(ErrorKind::domain, idx_expr.pos, "part index must be an integer");
    }
    if (!target.is_list()) throw Error(ErrorKind::domain, idx_expr.pos, "part of a non-list value");
    const auto n = static_cast<long long>(target.items().size());
    const BigInt raw = mp::numerator(idx.number().exact());
    if (raw == 0 || mp::abs(raw) > n) {
      throw Error(ErrorKind::domain, idx_expr.pos,
                  "part " + raw.str() + " of a list of length " + std::to_string(n) + " does not exist");
    }
    long long k = raw.convert_to<long long>();
    if (k < 0) k = n + k + 1;
    Value next = target.items()[static_cast<std::size_t>(k - 1)];
    target = std::move(next);
  }
  return target;
}

namespace {

bool is_rule_list(const Value& v) {
  if (!v.is_list()) return false;
  for (const auto& x : v.items()) {
    if (!x.is_rule()) return false;
  }
  return true;
}

}  // namespace

Value Evaluator::replace_all(const Expr& e, Scope& scope) {
  Value rules = eval_in(e.children[1], scope);
  std::vector<std::vector<const RuleValue*>> sets;
  bool mapped = false;
  if (rules.is_rule()) {
    sets.push_back({&rules.rule()});
  } else if (is_rule_list(rules)) {
    sets.emplace_back();
    for (const auto& r : rules.items()) sets.back().push_back(&r.rule());
  } else if (rules.is_list()) {
    mapped = true;
    for (const auto& inner : rules.items()) {
      if (inner.is_rule()) {
        sets.push_back({&inner.rule()});
      } else if (is_rule_list(inner)) {
        sets.emplace_back();
        for (const auto& r : inner.items()) sets.back().push_back(&r.rule());
      } else {
        throw Error(ErrorKind::domain, e.children[1].pos, "'/.' expects rules or lists of rules");
      }
    }
  } else {
    throw Error(ErrorKind::domain, e.children[1].pos, "'/.' expects rules or lists of rules");
  }

  std::vector<Value> results;
  for (const auto& set : sets) {
    Environment overlay;
    for (const RuleValue* r : set) {
      if (!scope.find(r->name)) overlay.emplace(r->name, *r->rhs);
    }
    scope.overlays.push_back(&overlay);
    try {
      results.push_back(eval_in(e.children[0], scope));
    } catch (...) {
      scope.overlays.pop_back();
      throw;
    }
    scope.overlays.pop_back();
  }
  if (!mapped) return std::move(results.front());
  return Value::list(std::move(results));
}

Value Evaluator::solve(const Expr& e, Scope& scope) {
  if (e.children.size() != 2) throw Error(ErrorKind::domain, e.pos, "Solve expects 2 arguments");
  const Expr* var = &e.children[1];
  if (var->kind == Expr::Kind::list && var->children.size() == 1) var = &var->children[0];
  if (var->kind != Expr::Kind::identifier) {
    throw Error(ErrorKind::unsupported_equation, var->pos, "Solve variable must be a single identifier");
  }
  detail::Lookup lookup = [&](std::string_view name) { return scope.find(name); };
  detail::EvalConstant eval_constant = [&](const Expr& x) { return eval_in(x, scope); };
  detail::CheckNumber check = [&](const Expr& at, Number n) { return checked(at, std::move(n)); };
  return detail::solve(e.children[0], var->text, lookup, eval_constant, check);
}

Value Evaluator::call(const Expr& e, Scope& scope) {
  const std::string& head = e.text;
  if (head == "Solve") return solve(e, scope);

  std::vector<Value> args;
  args.reserve(e.children.size());
  for (const auto& c : e.children) args.push_back(eval_in(c, scope));

  auto require_arity = [&](std::size_t n) {
    if (args.size() != n) {
      throw Error(ErrorKind::domain, e.pos, head + " expects " + std::to_string(n) + " argument(s), got " +
                                                std::to_string(args.size()));
    }
  };
  // Listable unary numeric functions thread over lists.
  auto map_numeric = [&](const auto& fn) {
    require_arity(1);
    std::function<Value(const Value&)> go = [&](const Value& v) -> Value {
      if (v.is_number()) return Value(checked(e, fn(v.number())));
      if (v.is_list()) {
        std::vector<Value> out;
        for (const auto& x : v.items()) out.push_back(go(x));
        return Value::list(std::move(out));
      }
      throw Error(ErrorKind::domain, e.pos, head + " expects a number");
    };
    return go(args[0]);
  };
  auto to_exact_integer = [&](double d, auto rounding) -> Number {
    if (!std::isfinite(d)) throw Error(ErrorKind::domain, e.pos, head + " of a non-finite value");
    return Number(Rational(BigInt(rounding(d))));
  };

  if (head == "N") {
    return map_numeric([](const Number& n) { return Number(n.to_double()); });
  }
  if (head == "Sqrt") {
    return map_numeric([&](const Number& n) {
      if (n.sign() < 0) throw Error(ErrorKind::domain, e.pos, "Sqrt of a negative number has no real value");
      if (n.is_exact()) {
        if (auto r = detail::exact_sqrt(n.exact())) return Number(*r);
      }
      return Number(std::sqrt(n.to_double()));
    });
  }
  if (head == "Floor") {
    return map_numeric([&](const Number& n) {
      return n.is_exact() ? Number(Rational(floor_div(n.exact())))
                          : to_exact_integer(n.real(), [](double d) { return std::floor(d); });
    });
  }
  if (head == "Ceiling") {
    return map_numeric([&](const Number& n) {
      return n.is_exact() ? Number(Rational(-floor_div(Rational(-n.exact()))))
                          : to_exact_integer(n.real(), [](double d) { return std::ceil(d); });
    });
  }
  if (head == "Round") {
    return map_numeric([&](const Number& n) {
      return n.is_exact() ? Number(round_half_even(n.exact()))
                          : to_exact_integer(n.real(), [](double d) { return std::nearbyint(d); });
    });
  }
  if (head == "Abs") {
    return map_numeric([](const Number& n) { return n.sign() < 0 ? -n : n; });
  }
  if (head == "Max" || head == "Min") {
    std::vector<const Number*> flat;
    std::function<void(const Value&)> collect = [&](const Value& v) {
      if (v.is_number()) {
        flat.push_back(&v.number());
      } else if (v.is_list()) {
        for (const auto& x : v.items()) collect(x);
      } else {
        throw Error(ErrorKind::domain, e.pos, head + " expects numbers");
      }
    };
    for (const auto& a : args) collect(a);
    if (flat.empty()) throw Error(ErrorKind::domain, e.pos, head + " needs at least one number");
    const Number* best = flat.front();
    for (const Number* n : flat) {
      const int c = compare(*n, *best);
      if (head == "Max" ? c > 0 : c < 0) best = n;
    }
    return Value(*best);
  }
  if (head == "Total") {
    require_arity(1);
    if (!args[0].is_list()) throw Error(ErrorKind::domain, e.pos, "Total expects a list");
    const auto& items = args[0].items();
    if (items.empty()) return Value(Number::integer(0));
    Value sum = items.front();
    for (std::size_t i = 1; i < items.size(); ++i) sum = arith(e, '+', sum, items[i]);
    return sum;
  }
  if (head == "Length") {
    require_arity(1);
    return Value(Number::integer(args[0].is_list() ? static_cast<long long>(args[0].items().size()) : 0));
  }
  throw Error(ErrorKind::unsupported_function, e.pos, "function '" + head + "' is not supported");
}

EvalResult evaluate(std::string_view source, const EvalLimits& limits) {
  return evaluate(parse(source), limits);
}

EvalResult evaluate(const Expr& program, const EvalLimits& limits) {
  Evaluator ev(limits);
  return ev.run(program);
}

std::optional<Value> final_answer(const EvalResult& result) {
  if (auto it = result.env.find("answer"); it != result.env.end()) return it->second;
  return result.last;
}

Value solve_equation(const Expr& equation, const std::string& var, const Environment& env,
                     const std::function<Value(const Expr&)>& eval_constant) {
  detail::Lookup lookup = [&](std::string_view name) -> const Value* {
    auto it = env.find(name);
    return it == env.end() ? nullptr : &it->second;
  };
  detail::CheckNumber check = [](const Expr&, Number n) { return n; };
  return detail::solve(equation, var, lookup, eval_constant, check);
}

Value solve_equation(const Expr& equation, const std::string& var, const Environment& env,
                     const EvalLimits& limits) {
  Evaluator ev(limits);
  return solve_equation(equation, var, env, [&](const Expr& x) { return ev.eval(x, env); });
}

}  // namespace cotforge::wolfram
