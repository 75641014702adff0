#pragma once

// Answer selection over sampled candidates: majority voting, reward-model
// reranking and reward-weighted voting, plus pooling of several CoT types
// and reward-model label construction.

#include <filesystem>
#include <map>
#include <optional>
#include <string>
#include <vector>

#include "cotforge/corpus.hpp"
#include "cotforge/executor.hpp"
#include "cotforge/jsonl.hpp"

namespace cotforge {

struct Candidate {
  CoTRecord record;
  ExecutionOutcome outcome;
  std::optional<double> rm_score;  // probability the solution is correct

  // The outcome's answer when it ran cleanly, null_result otherwise.
  Answer answer() const;
};

struct CandidateSet {
  std::string question_id;
  std::vector<Candidate> candidates;  // sampling order
};

enum class SelectMethod { vote, rerank, weighted };

std::string_view to_string(SelectMethod m);
std::optional<SelectMethod> parse_select_method(std::string_view s);

struct SelectionResult {
  std::string question_id;
  SelectMethod method = SelectMethod::vote;
  std::optional<std::size_t> chosen;  // index into the candidate set; empty = abstention
  std::string chosen_cot_id;
  Answer answer;
  // Group key -> count (vote), summed score (weighted) or best score (rerank).
  std::map<std::string, double> tally;

  bool abstained() const { return !chosen.has_value(); }
};

// Grouping key for voting. Numeric answers are rounded to the tolerance grid,
// so 2.0004 and 1.9996 share a key at 1e-3 while 2.0004 and 2.0006 do not.
// Choice answers group by letter; null_result is its own group "null".
std::string answer_key(const Answer& a, double tolerance);

SelectionResult majority_vote(const CandidateSet& set, bool filter_null, const PipelineConfig& cfg = {});

// Throws InvalidInput naming the first surviving candidate without a score.
SelectionResult rerank(const CandidateSet& set, bool filter_null, const PipelineConfig& cfg = {});
SelectionResult weighted_vote(const CandidateSet& set, bool filter_null, const PipelineConfig& cfg = {});

SelectionResult select(SelectMethod method, const CandidateSet& set, bool filter_null, const PipelineConfig& cfg = {});

// Concatenates sets for one question, keeping set order then in-set order.
CandidateSet pool(const std::vector<CandidateSet>& sets);

struct LabeledCandidate {
  const Candidate* candidate = nullptr;
  bool correct = false;
};

struct LabeledGroup {
  std::string question_id;
  std::vector<LabeledCandidate> items;
};

// Keeps only questions with at least one correct and one incorrect
// candidate. Sets whose question is missing from `gold` are skipped.
std::vector<LabeledGroup> build_rm_labels(const std::vector<CandidateSet>& sets,
                                          const std::map<std::string, Answer>& gold, const PipelineConfig& cfg = {});

// {question_id, method, answer, chosen_cot_id?, tally}
json to_json(const SelectionResult& r);

// Scores file: {cot_id, rm_score}, scores in [0, 1], ids unique.
std::map<std::string, double> read_scores(const std::filesystem::path& path);

// {question_id, cot_id, kind, dialect, text, label}
std::vector<json> rm_label_rows(const std::vector<LabeledGroup>& groups);

}  // namespace cotforge
