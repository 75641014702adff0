#pragma once

// Sampling statistics over executed candidates: precision, execution rate,
// correct@k, voting curves, null-result analysis and cross-type comparisons.

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "cotforge/ensemble.hpp"

namespace cotforge {

struct QuestionEval {
  std::string question_id;
  std::vector<bool> correct;
  std::vector<bool> executable;  // status ok
  std::vector<bool> null;        // status ok but no usable answer

  std::size_t size() const { return correct.size(); }
};

QuestionEval make_eval(const CandidateSet& set, const Answer& gold, const PipelineConfig& cfg = {});

// Micro-averaged over all samples. Empty input throws InvalidInput.
double precision(const std::vector<QuestionEval>& evals);
double execution_rate(const std::vector<QuestionEval>& evals);
// Executable and non-null.
double valid_rate(const std::vector<QuestionEval>& evals);

// 1 - C(n-c, k) / C(n, k) for one question.
double correct_at_k(std::size_t n, std::size_t c, std::size_t k);
// Mean over questions; requires 1 <= k <= n for every question.
double correct_at_k(const std::vector<QuestionEval>& evals, std::size_t k);

struct CurvePoint {
  std::size_t k = 0;
  double accuracy = 0.0;
  double stderr_ = 0.0;  // across trials
  std::size_t trials = 0;
  std::size_t questions = 0;
};

// Bounded draw in [0, bound) from a 64-bit generator by rejection, so the
// sequence does not depend on the standard library's distributions.
std::uint64_t uniform_below(std::uint64_t bound, std::uint64_t (*next)(void*), void* state);

// For each k, the mean over `trials` random k-subsets (sorted back into
// sampling order) of majority-vote accuracy. Questions with k == n are voted
// once on the full set. Deterministic for a given seed.
std::vector<CurvePoint> vote_accuracy_curve(const std::vector<CandidateSet>& sets,
                                            const std::map<std::string, Answer>& gold,
                                            const std::vector<std::size_t>& ks, std::size_t trials,
                                            std::uint64_t seed, bool filter_null, const PipelineConfig& cfg = {});

struct NullBucket {
  double lo = 0.0;
  double hi = 0.0;
  std::size_t n = 0;                // questions in the bucket
  std::optional<double> accuracy;   // empty when n == 0
};

struct NullStats {
  std::size_t null_samples = 0;
  std::size_t total_samples = 0;
  double null_percent = 0.0;
  std::vector<NullBucket> buckets;
};

std::vector<double> default_null_buckets();

// Buckets questions by their null-result percentage; bucket i holds rates in
// [edge[i], edge[i+1]) and the last bucket also includes 100. `method_correct`
// is aligned with `evals`. Edges must be strictly ascending from 0 to 100.
NullStats null_stats(const std::vector<QuestionEval>& evals, const std::vector<double>& edges,
                     const std::vector<bool>& method_correct);

// rows = questions, columns = CoT types. Fraction of rows with any true cell.
double union_upper_bound(const std::vector<std::vector<bool>>& table);

// Per-type selection correctness keyed by question id.
struct TypeCorrectness {
  std::string type;
  std::map<std::string, bool> by_question;
};

// Aligns per-type maps into a question x type table; ids must match exactly.
std::vector<std::vector<bool>> align_types(const std::vector<TypeCorrectness>& types);

// (i, j) = |fail(i) and correct(j)| / |fail(i)|; empty when fail(i) is empty.
std::vector<std::vector<std::optional<double>>> failure_recovery_matrix(const std::vector<std::vector<bool>>& table);

}  // namespace cotforge
