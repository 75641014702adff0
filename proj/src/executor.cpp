#include "cotforge/executor.hpp"

#include <unistd.h>

#include <chrono>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <regex>

#include "cotforge/parallel.hpp"
#include "cotforge/subprocess.hpp"
#include "cotforge/text.hpp"
#include "cotforge/wolfram/evaluator.hpp"

namespace cotforge {

std::string_view to_string(ExecStatus s) {
  switch (s) {
    case ExecStatus::ok: return "ok";
    case ExecStatus::syntax_error: return "syntax_error";
    case ExecStatus::runtime_error: return "runtime_error";
    case ExecStatus::timeout: return "timeout";
    case ExecStatus::extraction_failed: return "extraction_failed";
  }
  return "?";
}

std::optional<ExecStatus> parse_exec_status(std::string_view s) {
  for (auto st : {ExecStatus::ok, ExecStatus::syntax_error, ExecStatus::runtime_error, ExecStatus::timeout,
                  ExecStatus::extraction_failed}) {
    if (to_string(st) == s) return st;
  }
  return std::nullopt;
}

namespace {

using clock = std::chrono::steady_clock;

std::int64_t elapsed_ms(clock::time_point start) {
  return std::chrono::duration_cast<std::chrono::milliseconds>(clock::now() - start).count();
}

struct Interpreted {
  ExecStatus status;
  Answer answer;
  std::string diagnostics;
};

Interpreted interpret_number(double value, const MathQuestion& q, const PipelineConfig& cfg) {
  if (!std::isfinite(value)) return {ExecStatus::extraction_failed, Answer::Null(), "result is not finite"};
  if (q.answer_format == AnswerFormat::numeric) return {ExecStatus::ok, Answer::Numeric(value), ""};
  Answer a = match_option(value, q.options, cfg);
  return {ExecStatus::ok, a, a.is_null() ? "no option within tolerance of " + format_double(value) : ""};
}

// Raw answer text: a letter is taken as-is on choice questions, anything
// numeric goes through option matching.
Interpreted interpret_text(std::string_view raw, const MathQuestion& q, const PipelineConfig& cfg) {
  if (q.answer_format == AnswerFormat::choice) {
    Answer letter = parse_answer(raw, AnswerFormat::choice, cfg.max_choice_letter);
    if (letter.is_choice()) return {ExecStatus::ok, letter, ""};
  }
  Answer num = parse_answer(raw, AnswerFormat::numeric);
  if (num.is_numeric()) return interpret_number(num.value(), q, cfg);
  return {ExecStatus::extraction_failed, Answer::Null(), "cannot interpret answer '" + std::string(raw) + "'"};
}

std::string strip_answer_punctuation(std::string_view s) {
  s = trim(s);
  while (!s.empty() && std::string_view(".,;:!)").find(s.back()) != std::string_view::npos) s.remove_suffix(1);
  while (!s.empty() && s.front() == '(') s.remove_prefix(1);
  return std::string(trim(s));
}

// Candidate answer strings for the text after an NL marker, best first.
std::vector<std::string> nl_candidates(std::string_view rest) {
  std::vector<std::string> out;
  std::string_view whole = trim(rest);
  if (!whole.empty() && whole.back() == '.') whole = trim(whole.substr(0, whole.size() - 1));
  out.emplace_back(whole);
  auto first_space = whole.find_first_of(" \t");
  if (first_space != std::string_view::npos) out.push_back(strip_answer_punctuation(whole.substr(0, first_space)));
  out.push_back(strip_answer_punctuation(whole));
  return out;
}

const wolfram::Value* unwrap(const wolfram::Value& v) {
  const wolfram::Value* cur = &v;
  while (true) {
    if (cur->is_list() && cur->items().size() == 1) {
      cur = &cur->items().front();
    } else if (cur->is_rule()) {
      cur = cur->rule().rhs.get();
    } else {
      return cur;
    }
  }
}

ExecutionOutcome run_wolfram(const CoTRecord& record, const MathQuestion& q, const ExecOptions& opts) {
  ExecutionOutcome o{record.id, ExecStatus::ok, Answer::Null(), 0, ""};
  const auto start = clock::now();
  wolfram::EvalLimits limits;
  limits.deadline = start + std::chrono::milliseconds(opts.pipeline.exec_timeout_ms);
  try {
    auto result = wolfram::evaluate(record.text, limits);
    auto value = wolfram::final_answer(result);
    o.wall_ms = elapsed_ms(start);
    if (!value) {
      o.status = ExecStatus::extraction_failed;
      o.diagnostics = "program produced no value";
      return o;
    }
    const wolfram::Value* v = unwrap(*value);
    if (!v->is_number()) {
      o.status = ExecStatus::extraction_failed;
      o.diagnostics = "final value is not a number: " + value->to_string();
      return o;
    }
    auto interp = interpret_number(v->number().to_double(), q, opts.pipeline);
    o.status = interp.status;
    o.answer = interp.answer;
    o.diagnostics = interp.diagnostics;
  } catch (const wolfram::Error& e) {
    o.wall_ms = elapsed_ms(start);
    if (e.kind() == wolfram::ErrorKind::timeout) {
      o.status = ExecStatus::timeout;
      o.wall_ms = std::max<std::int64_t>(o.wall_ms, opts.pipeline.exec_timeout_ms);
    } else {
      o.status = e.is_lex_or_syntax() ? ExecStatus::syntax_error : ExecStatus::runtime_error;
    }
    o.diagnostics = e.what();
  }
  return o;
}

class TempProgram {
 public:
  explicit TempProgram(const std::string& text) {
    std::string pattern = (std::filesystem::temp_directory_path() / "cotforge-XXXXXX.py").string();
    const int fd = ::mkstemps(pattern.data(), 3);
    if (fd < 0) throw std::runtime_error("cannot create temporary program file");
    ::close(fd);
    path_ = pattern;
    std::ofstream out(path_, std::ios::binary | std::ios::trunc);
    out << text;
  }
  ~TempProgram() {
    std::error_code ec;
    std::filesystem::remove(path_, ec);
  }
  TempProgram(const TempProgram&) = delete;
  TempProgram& operator=(const TempProgram&) = delete;
  const std::filesystem::path& path() const { return path_; }

 private:
  std::filesystem::path path_;
};

std::string last_nonblank_line(const std::string& s) {
  auto lines = split_lines(s);
  for (auto it = lines.rbegin(); it != lines.rend(); ++it) {
    if (!trim(*it).empty()) return std::string(trim(*it));
  }
  return {};
}

ExecutionOutcome run_py(const CoTRecord& record, const MathQuestion& q, const ExecOptions& opts) {
  ExecutionOutcome o{record.id, ExecStatus::runtime_error, Answer::Null(), 0, ""};
  std::optional<TempProgram> program;
  try {
    program.emplace(record.text);
  } catch (const std::exception& e) {
    o.diagnostics = e.what();
    return o;
  }
  std::vector<std::string> argv = opts.shim.command;
  argv.push_back(program->path().string());
  std::string allow;
  for (const auto& m : opts.shim.allowlist) allow += (allow.empty() ? "" : ",") + m;
  argv.push_back("--allow");
  argv.push_back(allow);

  const auto timeout = std::chrono::milliseconds(opts.pipeline.exec_timeout_ms);
  ProcessResult pr = run_process(argv, timeout);
  o.wall_ms = pr.wall_ms;
  if (pr.spawn_failed) {
    o.diagnostics = pr.err;
    return o;
  }
  if (pr.timed_out) {
    o.status = ExecStatus::timeout;
    o.wall_ms = std::max<std::int64_t>(o.wall_ms, opts.pipeline.exec_timeout_ms);
    o.diagnostics = "killed after " + std::to_string(opts.pipeline.exec_timeout_ms) + " ms";
    return o;
  }
  const std::string line = last_nonblank_line(pr.out);
  json shim;
  try {
    shim = json::parse(line);
  } catch (const json::parse_error&) {
    o.diagnostics = "shim produced no result line (exit " + std::to_string(pr.exit_code) + "): " +
                    std::string(trim(pr.err)).substr(0, 512);
    return o;
  }
  const std::string status = shim.value("status", "");
  const std::string error = shim.contains("error") && shim["error"].is_string() ? shim["error"].get<std::string>() : "";
  if (status == "ok") {
    if (!shim.contains("answer") || !shim["answer"].is_string()) {
      o.status = ExecStatus::extraction_failed;
      o.diagnostics = "shim reported ok without an answer";
      return o;
    }
    auto interp = interpret_text(shim["answer"].get<std::string>(), q, opts.pipeline);
    o.status = interp.status;
    o.answer = interp.answer;
    o.diagnostics = interp.diagnostics;
  } else if (status == "syntax_error") {
    o.status = ExecStatus::syntax_error;
    o.diagnostics = error;
  } else if (status == "runtime_error") {
    o.diagnostics = error;
  } else if (status == "blocked_import") {
    o.diagnostics = "blocked_import: " + error;
  } else {
    o.diagnostics = "shim returned unknown status '" + status + "'";
  }
  return o;
}

ExecutionOutcome run_nl(const CoTRecord& record, const MathQuestion& q, const ExecOptions& opts) {
  ExecutionOutcome o{record.id, ExecStatus::extraction_failed, Answer::Null(), 0, ""};
  const auto start = clock::now();
  auto rest = find_nl_answer_text(record.text);
  if (!rest) {
    o.diagnostics = "no 'Therefore, the answer is' marker";
  } else {
    Interpreted best{ExecStatus::extraction_failed, Answer::Null(), "cannot interpret answer '" + *rest + "'"};
    for (const auto& cand : nl_candidates(*rest)) {
      auto interp = interpret_text(cand, q, opts.pipeline);
      if (interp.status == ExecStatus::ok) {
        best = interp;
        break;
      }
    }
    o.status = best.status;
    o.answer = best.answer;
    o.diagnostics = best.diagnostics;
  }
  o.wall_ms = elapsed_ms(start);
  return o;
}

}  // namespace

std::optional<std::string> find_nl_answer_text(std::string_view text) {
  static const std::regex marker(R"(therefore,?\s+the\s+answer\s+is:?)", std::regex::icase | std::regex::ECMAScript);
  std::optional<std::string> rest;
  const std::string s(text);
  for (auto it = std::sregex_iterator(s.begin(), s.end(), marker); it != std::sregex_iterator(); ++it) {
    const auto end = static_cast<std::size_t>(it->position(0) + it->length(0));
    auto nl = s.find('\n', end);
    rest = s.substr(end, nl == std::string::npos ? std::string::npos : nl - end);
  }
  return rest;
}

Answer extract_nl_answer(std::string_view text, AnswerFormat format, char max_letter) {
  auto rest = find_nl_answer_text(text);
  if (!rest) return Answer::Null();
  for (const auto& cand : nl_candidates(*rest)) {
    Answer a = parse_answer(cand, format, max_letter);
    if (!a.is_null()) return a;
  }
  return Answer::Null();
}

ExecutionOutcome execute(const CoTRecord& record, const MathQuestion& question, const ExecOptions& opts) {
  if (record.question_id != question.id) {
    return {record.id, ExecStatus::extraction_failed, Answer::Null(), 0,
            "record belongs to question '" + record.question_id + "', not '" + question.id + "'"};
  }
  try {
    if (record.kind == CoTKind::nl) return run_nl(record, question, opts);
    switch (record.dialect) {
      case Dialect::wolfram: return run_wolfram(record, question, opts);
      case Dialect::py: return run_py(record, question, opts);
      case Dialect::none: break;
    }
    return {record.id, ExecStatus::extraction_failed, Answer::Null(), 0, "program record has no dialect"};
  } catch (const std::exception& e) {
    return {record.id, ExecStatus::runtime_error, Answer::Null(), 0, std::string("internal error: ") + e.what()};
  }
}

std::vector<ExecutionOutcome> execute_batch(const std::vector<CoTRecord>& records,
                                            const std::map<std::string, const MathQuestion*>& questions,
                                            const ExecOptions& opts) {
  std::vector<ExecutionOutcome> out(records.size());
  parallel_for(records.size(), opts.pipeline.parallelism, [&](std::size_t i) {
    const auto& r = records[i];
    auto it = questions.find(r.question_id);
    if (it == questions.end()) {
      out[i] = {r.id, ExecStatus::extraction_failed, Answer::Null(), 0, "unknown question '" + r.question_id + "'"};
      return;
    }
    out[i] = execute(r, *it->second, opts);
  });
  return out;
}

json to_json(const ExecutionOutcome& o) {
  return json{{"cot_id", o.cot_id},
              {"status", std::string(to_string(o.status))},
              {"answer", to_json(o.answer)},
              {"wall_ms", o.wall_ms},
              {"diagnostics", o.diagnostics}};
}

ExecutionOutcome outcome_from_json(const json& j, char max_letter) {
  ExecutionOutcome o;
  o.cot_id = j.at("cot_id").get<std::string>();
  auto status = parse_exec_status(j.at("status").get<std::string>());
  if (!status) throw InvalidInput("unknown outcome status");
  o.status = *status;
  o.answer = answer_from_json(j.at("answer"), max_letter);
  o.wall_ms = j.value("wall_ms", std::int64_t{0});
  o.diagnostics = j.value("diagnostics", std::string());
  return o;
}

std::vector<ExecutionOutcome> read_outcomes(const std::filesystem::path& path, char max_letter) {
  std::vector<ExecutionOutcome> out;
  for_each_jsonl(path, [&](const json& j, std::size_t) { out.push_back(outcome_from_json(j, max_letter)); });
  return out;
}

void write_outcomes(const std::filesystem::path& path, const std::vector<ExecutionOutcome>& outcomes) {
  std::vector<json> rows;
  rows.reserve(outcomes.size());
  for (const auto& o : outcomes) rows.push_back(to_json(o));
  write_jsonl(path, rows);
}

}  // namespace cotforge
