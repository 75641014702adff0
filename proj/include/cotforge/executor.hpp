#pragma once

// Runs or extracts each CoT and normalizes the result into an
// ExecutionOutcome. Failures are statuses, never exceptions.
//
//   wolfram programs -> in-process wolfram-mini interpreter
//   py programs      -> external shim process under a wall-clock timeout
//   nl               -> "Therefore[,] the answer is[:]" marker extraction

#include <cstdint>
#include <map>
#include <optional>
#include <string>
#include <vector>

#include "cotforge/corpus.hpp"
#include "cotforge/jsonl.hpp"

namespace cotforge {

enum class ExecStatus { ok, syntax_error, runtime_error, timeout, extraction_failed };

std::string_view to_string(ExecStatus s);
std::optional<ExecStatus> parse_exec_status(std::string_view s);

struct ExecutionOutcome {
  std::string cot_id;
  ExecStatus status = ExecStatus::extraction_failed;
  Answer answer;  // may be null_result even when status == ok
  std::int64_t wall_ms = 0;
  std::string diagnostics;

  // Ran (or extracted) cleanly; the answer may still be null_result.
  bool executed() const { return status == ExecStatus::ok; }
  // Ran cleanly and produced a usable answer.
  bool valid() const { return status == ExecStatus::ok && !answer.is_null(); }
};

// How py-dialect programs reach their interpreter: the command is invoked as
// `command... <program-file> --allow a,b` and must print a ShimResult JSON
// object {status, answer, error, stdout} as its last stdout line.
struct ShimOptions {
  std::vector<std::string> command{"cotforge-shim"};
  std::vector<std::string> allowlist{"sympy", "math"};
};

struct ExecOptions {
  PipelineConfig pipeline;
  ShimOptions shim;
};

ExecutionOutcome execute(const CoTRecord& record, const MathQuestion& question, const ExecOptions& opts);

// Finds the last "Therefore[,] the answer is[:]" marker (case-insensitive)
// and parses what follows it; no marker yields null_result.
Answer extract_nl_answer(std::string_view text, AnswerFormat format, char max_letter = 'E');

// Text following the last marker, up to the end of that line.
std::optional<std::string> find_nl_answer_text(std::string_view text);

// Outcomes come back in input order. Records whose question_id is missing
// from `questions` get extraction_failed.
std::vector<ExecutionOutcome> execute_batch(const std::vector<CoTRecord>& records,
                                            const std::map<std::string, const MathQuestion*>& questions,
                                            const ExecOptions& opts);

// JSONL schema: {cot_id, status, answer: {variant, value?}, wall_ms, diagnostics}
json to_json(const ExecutionOutcome& o);
ExecutionOutcome outcome_from_json(const json& j, char max_letter = 'E');
std::vector<ExecutionOutcome> read_outcomes(const std::filesystem::path& path, char max_letter = 'E');
void write_outcomes(const std::filesystem::path& path, const std::vector<ExecutionOutcome>& outcomes);

}  // namespace cotforge
