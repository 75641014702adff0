#pragma once

// Typed corpus model: questions, chain-of-thought records, answers and the
// comparison rules used to verify them.

#include <cstdint>
#include <functional>
#include <optional>
#include <stdexcept>
#include <string>
#include <string_view>
#include <vector>

namespace cotforge {

class InvalidInput : public std::invalid_argument {
 public:
  using std::invalid_argument::invalid_argument;
};

enum class AnswerFormat { numeric, choice };

// Tri-state extracted result. Numeric values are always finite.
class Answer {
 public:
  enum class Variant { numeric, choice, null_result };

  Answer() = default;  // null_result

  static Answer Numeric(double value);
  static Answer Choice(char letter, char max_letter = 'E');
  static Answer Null() { return Answer(); }

  Variant variant() const { return variant_; }
  bool is_null() const { return variant_ == Variant::null_result; }
  bool is_numeric() const { return variant_ == Variant::numeric; }
  bool is_choice() const { return variant_ == Variant::choice; }
  double value() const;
  char letter() const;

  // Structural identity (not the tolerance comparison; see answers_equal).
  friend bool operator==(const Answer&, const Answer&) = default;

 private:
  Variant variant_ = Variant::null_result;
  double value_ = 0.0;
  char letter_ = 0;
};

struct AnswerOption {
  char letter = 'A';
  std::string text;
  std::optional<double> numeric;  // set when text parses as a number
};

struct MathQuestion {
  std::string id;
  std::string text;
  Answer gold;
  AnswerFormat answer_format = AnswerFormat::numeric;
  std::vector<AnswerOption> options;  // sorted by letter, choice format only
  std::string dataset;
};

enum class CoTKind { nl, sdp, cdp, ndp };
enum class Dialect { none, py, wolfram };

struct Origin {
  enum class Kind { seed_manual, llm_round, manual_fixup, sampled };
  Kind kind = Kind::sampled;
  int round = 0;  // llm_round only

  friend bool operator==(const Origin&, const Origin&) = default;
};

struct CoTRecord {
  std::string id;
  std::string question_id;
  CoTKind kind = CoTKind::nl;
  Dialect dialect = Dialect::none;
  std::string text;
  Origin origin;
};

struct PipelineConfig {
  double tolerance = 1e-3;
  int retrieval_k = 5;
  int max_rounds = 5;
  int samples_per_question = 100;
  double sampling_temperature = 1.0;  // recorded only; sampling happens elsewhere
  std::int64_t exec_timeout_ms = 10'000;
  int parallelism = 4;
  char max_choice_letter = 'E';

  // Throws InvalidInput naming the first offending field.
  void validate() const;
};

struct Violation {
  std::string field;
  std::string rule;
  friend bool operator==(const Violation&, const Violation&) = default;
};

std::string_view to_string(AnswerFormat f);
std::string_view to_string(CoTKind k);
std::string_view to_string(Dialect d);
std::string to_string(const Origin& o);
std::string_view to_string(Answer::Variant v);

std::optional<AnswerFormat> parse_answer_format(std::string_view s);
std::optional<CoTKind> parse_kind(std::string_view s);
std::optional<Dialect> parse_dialect(std::string_view s);
std::optional<Origin> parse_origin(std::string_view s);

// Lenient parse of a raw answer string. Never throws: anything that does not
// normalize to the requested format yields null_result.
//
// Numeric: surrounding whitespace, thousands separators, a leading or trailing
// currency symbol and a trailing '%' are stripped; plain decimals, exponents
// and simple fractions ("7/2") are accepted.
// Choice: trimmed, upper-cased, optional enclosing parentheses and a trailing
// '.' removed; must then be a single letter in A..max_letter.
Answer parse_answer(std::string_view raw, AnswerFormat format, char max_letter = 'E');

// Canonical text form; parse_answer(render_answer(a)) round-trips.
std::string render_answer(const Answer& a);

// |a - b| <= tolerance, inclusive. The bound is widened only by the rounding
// error of the subtraction itself so that decimal inputs exactly on the
// boundary (3.0 vs 3.001) compare equal.
bool within_tolerance(double a, double b, double tolerance);

// Numeric vs numeric by tolerance; choice vs choice by letter; null_result and
// mismatched variants never compare equal.
bool answers_equal(const Answer& a, const Answer& b, const PipelineConfig& cfg);

// Maps a program's numeric result onto a choice letter: the nearest option
// within tolerance wins; an exact distance tie or no option in range gives
// null_result. Options without a numeric value are skipped.
Answer match_option(double value, const std::vector<AnswerOption>& options,
                    const PipelineConfig& cfg);

// Removes comments from a CDP record to obtain its NDP form. Throws
// InvalidInput unless record.kind == cdp.
CoTRecord strip_to_ndp(const CoTRecord& record);

// Comment removal for one dialect ('#' for py, non-nesting "(* *)" for
// wolfram). Lines left blank are dropped; trailing whitespace before a
// removed comment is trimmed.
std::string strip_comments(std::string_view text, Dialect dialect);

std::vector<Violation> validate_record(const CoTRecord& record);
std::vector<Violation> validate_question(const MathQuestion& q);

}  // namespace cotforge
