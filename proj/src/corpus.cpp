#include "cotforge/corpus.hpp"

#include <algorithm>
#include <cctype>
#include <charconv>
#include <cmath>
#include <limits>
#include <set>

#include "cotforge/text.hpp"

namespace cotforge {

Answer Answer::Numeric(double value) {
  if (!std::isfinite(value)) throw InvalidInput("numeric answer must be finite");
  Answer a;
  a.variant_ = Variant::numeric;
  a.value_ = value == 0.0 ? 0.0 : value;  // fold -0
  return a;
}

Answer Answer::Choice(char letter, char max_letter) {
  if (letter < 'A' || letter > max_letter) {
    throw InvalidInput(std::string("choice letter out of range: ") + letter);
  }
  Answer a;
  a.variant_ = Variant::choice;
  a.letter_ = letter;
  return a;
}

double Answer::value() const {
  if (variant_ != Variant::numeric) throw std::logic_error("answer is not numeric");
  return value_;
}

char Answer::letter() const {
  if (variant_ != Variant::choice) throw std::logic_error("answer is not a choice");
  return letter_;
}

void PipelineConfig::validate() const {
  if (!(tolerance > 0.0) || !std::isfinite(tolerance)) throw InvalidInput("tolerance must be > 0");
  if (retrieval_k < 1) throw InvalidInput("retrieval_k must be >= 1");
  if (max_rounds < 1) throw InvalidInput("max_rounds must be >= 1");
  if (samples_per_question < 1) throw InvalidInput("samples_per_question must be >= 1");
  if (exec_timeout_ms < 1) throw InvalidInput("exec_timeout_ms must be >= 1");
  if (parallelism < 1) throw InvalidInput("parallelism must be >= 1");
  if (max_choice_letter < 'A' || max_choice_letter > 'Z') {
    throw InvalidInput("max_choice_letter must be in A..Z");
  }
}

std::string_view to_string(AnswerFormat f) {
  return f == AnswerFormat::numeric ? "numeric" : "choice";
}

std::string_view to_string(CoTKind k) {
  switch (k) {
    case CoTKind::nl: return "nl";
    case CoTKind::sdp: return "sdp";
    case CoTKind::cdp: return "cdp";
    case CoTKind::ndp: return "ndp";
  }
  return "?";
}

std::string_view to_string(Dialect d) {
  switch (d) {
    case Dialect::none: return "none";
    case Dialect::py: return "py";
    case Dialect::wolfram: return "wolfram";
  }
  return "?";
}

std::string to_string(const Origin& o) {
  switch (o.kind) {
    case Origin::Kind::seed_manual: return "seed_manual";
    case Origin::Kind::llm_round: return "llm_round(" + std::to_string(o.round) + ")";
    case Origin::Kind::manual_fixup: return "manual_fixup";
    case Origin::Kind::sampled: return "sampled";
  }
  return "?";
}

std::string_view to_string(Answer::Variant v) {
  switch (v) {
    case Answer::Variant::numeric: return "numeric";
    case Answer::Variant::choice: return "choice";
    case Answer::Variant::null_result: return "null";
  }
  return "?";
}

std::optional<AnswerFormat> parse_answer_format(std::string_view s) {
  if (s == "numeric") return AnswerFormat::numeric;
  if (s == "choice") return AnswerFormat::choice;
  return std::nullopt;
}

std::optional<CoTKind> parse_kind(std::string_view s) {
  if (s == "nl") return CoTKind::nl;
  if (s == "sdp") return CoTKind::sdp;
  if (s == "cdp") return CoTKind::cdp;
  if (s == "ndp") return CoTKind::ndp;
  return std::nullopt;
}

std::optional<Dialect> parse_dialect(std::string_view s) {
  if (s == "none") return Dialect::none;
  if (s == "py") return Dialect::py;
  if (s == "wolfram") return Dialect::wolfram;
  return std::nullopt;
}

std::optional<Origin> parse_origin(std::string_view s) {
  if (s == "seed_manual") return Origin{Origin::Kind::seed_manual, 0};
  if (s == "manual_fixup") return Origin{Origin::Kind::manual_fixup, 0};
  if (s == "sampled") return Origin{Origin::Kind::sampled, 0};
  constexpr std::string_view prefix = "llm_round(";
  if (s.starts_with(prefix) && s.ends_with(")")) {
    auto digits = s.substr(prefix.size(), s.size() - prefix.size() - 1);
    int n = 0;
    auto [ptr, ec] = std::from_chars(digits.data(), digits.data() + digits.size(), n);
    if (ec == std::errc() && ptr == digits.data() + digits.size() && n >= 1 && !digits.empty()) {
      return Origin{Origin::Kind::llm_round, n};
    }
  }
  return std::nullopt;
}

namespace {

constexpr std::string_view kCurrency[] = {"$", "\xE2\x82\xAC" /* euro */, "\xC2\xA3" /* pound */,
                                          "\xC2\xA5" /* yen */};

bool strip_prefix_currency(std::string_view& s) {
  for (auto c : kCurrency) {
    if (s.starts_with(c)) {
      s.remove_prefix(c.size());
      return true;
    }
  }
  return false;
}

bool strip_suffix_currency(std::string_view& s) {
  for (auto c : kCurrency) {
    if (s.ends_with(c)) {
      s.remove_suffix(c.size());
      return true;
    }
  }
  return false;
}

// [sign] (digits [. digits*] | . digits) [(e|E) [sign] digits]
bool is_decimal_literal(std::string_view s) {
  std::size_t i = 0;
  if (i < s.size() && (s[i] == '+' || s[i] == '-')) ++i;
  std::size_t int_digits = 0, frac_digits = 0;
  while (i < s.size() && std::isdigit(static_cast<unsigned char>(s[i]))) ++i, ++int_digits;
  if (i < s.size() && s[i] == '.') {
    ++i;
    while (i < s.size() && std::isdigit(static_cast<unsigned char>(s[i]))) ++i, ++frac_digits;
  }
  if (int_digits + frac_digits == 0) return false;
  if (i < s.size() && (s[i] == 'e' || s[i] == 'E')) {
    ++i;
    if (i < s.size() && (s[i] == '+' || s[i] == '-')) ++i;
    std::size_t exp_digits = 0;
    while (i < s.size() && std::isdigit(static_cast<unsigned char>(s[i]))) ++i, ++exp_digits;
    if (exp_digits == 0) return false;
  }
  return i == s.size();
}

std::optional<double> decimal_value(std::string_view s) {
  if (!is_decimal_literal(s)) return std::nullopt;
  std::string buf(s);
  if (buf.front() == '+') buf.erase(0, 1);
  // from_chars rejects a bare leading '.'
  if (buf.front() == '.') buf.insert(0, "0");
  if (buf.size() > 1 && buf[0] == '-' && buf[1] == '.') buf.insert(1, "0");
  double v = 0.0;
  auto [ptr, ec] = std::from_chars(buf.data(), buf.data() + buf.size(), v);
  if (ec != std::errc() || ptr != buf.data() + buf.size() || !std::isfinite(v)) return std::nullopt;
  return v;
}

std::optional<double> parse_number(std::string_view s) {
  s = trim(s);
  bool negative = false;
  if (!s.empty() && (s.front() == '-' || s.front() == '+')) {
    // "-$5" style: sign ahead of the currency symbol
    std::string_view rest = s.substr(1);
    if (strip_prefix_currency(rest)) {
      negative = s.front() == '-';
      s = rest;
    }
  }
  strip_prefix_currency(s);
  s = trim(s);
  if (!s.empty() && s.back() == '%') s.remove_suffix(1);
  strip_suffix_currency(s);
  s = trim(s);

  std::string cleaned;
  cleaned.reserve(s.size());
  for (char c : s) {
    if (c != ',') cleaned.push_back(c);
  }
  if (cleaned.empty()) return std::nullopt;

  std::optional<double> v;
  if (auto slash = cleaned.find('/'); slash != std::string::npos) {
    auto num = decimal_value(std::string_view(cleaned).substr(0, slash));
    auto den = decimal_value(std::string_view(cleaned).substr(slash + 1));
    if (!num || !den || *den == 0.0) return std::nullopt;
    v = *num / *den;
  } else {
    v = decimal_value(cleaned);
  }
  if (!v || !std::isfinite(*v)) return std::nullopt;
  return negative ? -*v : *v;
}

}  // namespace

Answer parse_answer(std::string_view raw, AnswerFormat format, char max_letter) {
  if (format == AnswerFormat::numeric) {
    auto v = parse_number(raw);
    return v ? Answer::Numeric(*v) : Answer::Null();
  }
  std::string_view s = trim(raw);
  if (!s.empty() && s.back() == '.') s = trim(s.substr(0, s.size() - 1));
  if (s.size() == 3 && s.front() == '(' && s.back() == ')') s = s.substr(1, 1);
  if (s.size() != 1) return Answer::Null();
  char c = static_cast<char>(std::toupper(static_cast<unsigned char>(s[0])));
  if (c < 'A' || c > max_letter) return Answer::Null();
  return Answer::Choice(c, max_letter);
}

std::string render_answer(const Answer& a) {
  switch (a.variant()) {
    case Answer::Variant::numeric: return format_double(a.value());
    case Answer::Variant::choice: return std::string(1, a.letter());
    case Answer::Variant::null_result: return "null";
  }
  return "null";
}

bool within_tolerance(double a, double b, double tolerance) {
  const double diff = std::fabs(a - b);
  constexpr double eps = std::numeric_limits<double>::epsilon();
  const double slack = 2.0 * eps * std::max(std::fabs(a), std::fabs(b)) + eps * tolerance;
  return diff <= tolerance + slack;
}

bool answers_equal(const Answer& a, const Answer& b, const PipelineConfig& cfg) {
  if (a.is_numeric() && b.is_numeric()) return within_tolerance(a.value(), b.value(), cfg.tolerance);
  if (a.is_choice() && b.is_choice()) return a.letter() == b.letter();
  return false;
}

Answer match_option(double value, const std::vector<AnswerOption>& options,
                    const PipelineConfig& cfg) {
  std::optional<char> best;
  double best_distance = 0.0;
  bool tied = false;
  for (const auto& opt : options) {
    if (!opt.numeric || !within_tolerance(value, *opt.numeric, cfg.tolerance)) continue;
    const double d = std::fabs(value - *opt.numeric);
    if (!best || d < best_distance) {
      best = opt.letter;
      best_distance = d;
      tied = false;
    } else if (d == best_distance) {
      tied = true;
    }
  }
  if (!best || tied) return Answer::Null();
  return Answer::Choice(*best, cfg.max_choice_letter);
}

namespace {

std::string strip_py_comments(std::string_view text) {
  std::string out;
  out.reserve(text.size());
  std::size_t i = 0;
  char quote = 0;
  bool triple = false;
  while (i < text.size()) {
    const char c = text[i];
    if (quote) {
      out.push_back(c);
      if (c == '\\' && i + 1 < text.size()) {
        out.push_back(text[i + 1]);
        i += 2;
        continue;
      }
      if (c == quote) {
        if (!triple) {
          quote = 0;
        } else if (i + 2 < text.size() && text[i + 1] == quote && text[i + 2] == quote) {
          out.push_back(quote);
          out.push_back(quote);
          i += 3;
          quote = 0;
          triple = false;
          continue;
        }
      } else if (c == '\n' && !triple) {
        quote = 0;  // unterminated single-line string; resync at newline
      }
      ++i;
      continue;
    }
    if (c == '\'' || c == '"') {
      quote = c;
      triple = i + 2 < text.size() && text[i + 1] == c && text[i + 2] == c;
      out.append(text.substr(i, triple ? 3 : 1));
      i += triple ? 3 : 1;
      continue;
    }
    if (c == '#') {
      while (!out.empty() && (out.back() == ' ' || out.back() == '\t')) out.pop_back();
      while (i < text.size() && text[i] != '\n') ++i;
      continue;
    }
    out.push_back(c);
    ++i;
  }
  return out;
}

std::string strip_wolfram_comments(std::string_view text) {
  std::string out;
  out.reserve(text.size());
  std::size_t i = 0;
  while (i < text.size()) {
    if (text.compare(i, 2, "(*") == 0) {
      auto end = text.find("*)", i + 2);
      if (end == std::string_view::npos) {
        // unterminated: leave the tail for the lexer to report
        out.append(text.substr(i));
        break;
      }
      // keep line structure so newline-separated statements stay separate
      for (std::size_t j = i; j < end; ++j) {
        if (text[j] == '\n') out.push_back('\n');
      }
      i = end + 2;
      // trailing comment: trim the whitespace that preceded it
      if (i >= text.size() || text[i] == '\n' || text[i] == '\r') {
        while (!out.empty() && (out.back() == ' ' || out.back() == '\t')) out.pop_back();
      }
      continue;
    }
    out.push_back(text[i]);
    ++i;
  }
  return out;
}

}  // namespace

std::string strip_comments(std::string_view text, Dialect dialect) {
  std::string stripped;
  switch (dialect) {
    case Dialect::py: stripped = strip_py_comments(text); break;
    case Dialect::wolfram: stripped = strip_wolfram_comments(text); break;
    case Dialect::none: return std::string(text);
  }
  std::string out;
  for (auto line : split_lines(stripped)) {
    if (trim(line).empty()) continue;
    if (!out.empty()) out.push_back('\n');
    out.append(line);
  }
  return out;
}

CoTRecord strip_to_ndp(const CoTRecord& record) {
  if (record.kind != CoTKind::cdp) {
    throw InvalidInput("strip_to_ndp expects a cdp record, got " + std::string(to_string(record.kind)));
  }
  CoTRecord out = record;
  out.kind = CoTKind::ndp;
  out.text = strip_comments(record.text, record.dialect);
  return out;
}

std::vector<Violation> validate_record(const CoTRecord& record) {
  std::vector<Violation> v;
  if (record.id.empty()) v.push_back({"id", "id empty"});
  if (record.question_id.empty()) v.push_back({"question_id", "question_id empty"});
  const bool is_nl = record.kind == CoTKind::nl;
  if (is_nl != (record.dialect == Dialect::none)) {
    v.push_back({"kind/dialect", "kind/dialect mismatch: nl iff dialect none"});
  }
  if (trim(record.text).empty()) v.push_back({"text", "text empty"});
  if (record.origin.kind == Origin::Kind::llm_round && record.origin.round < 1) {
    v.push_back({"origin", "llm_round index must be >= 1"});
  }
  return v;
}

std::vector<Violation> validate_question(const MathQuestion& q) {
  std::vector<Violation> v;
  if (q.id.empty()) v.push_back({"id", "id empty"});
  if (q.answer_format == AnswerFormat::choice) {
    if (q.options.empty()) v.push_back({"options", "choice question needs options"});
    if (!q.gold.is_choice()) {
      v.push_back({"gold", "choice question gold must be a letter"});
    } else {
      const bool listed = std::any_of(q.options.begin(), q.options.end(),
                                      [&](const AnswerOption& o) { return o.letter == q.gold.letter(); });
      if (!listed) v.push_back({"gold", "gold letter is not one of the options"});
    }
    std::set<char> seen;
    for (const auto& o : q.options) {
      if (!seen.insert(o.letter).second) v.push_back({"options", "duplicate option letter"});
    }
  } else {
    if (!q.gold.is_numeric()) v.push_back({"gold", "numeric question gold must parse as a finite number"});
    if (!q.options.empty()) v.push_back({"options", "options present on a numeric question"});
  }
  return v;
}

}  // namespace cotforge
