#pragma once

// Semi-automatic annotation loop. A small verified seed set bootstraps
// few-shot prompts for the rest of a dataset; responses that execute to the
// gold answer migrate from the working set to the completion set, round by
// round, until nothing is left or nothing changes.

#include <cstddef>
#include <map>
#include <optional>
#include <set>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "cotforge/corpus.hpp"
#include "cotforge/executor.hpp"
#include "cotforge/provider.hpp"

namespace cotforge {

// Unit-norm embeddings keyed by question id. Rows are stored contiguously so
// a query against the whole index is one dot_rows call.
class EmbeddingIndex {
 public:
  EmbeddingIndex() = default;
  explicit EmbeddingIndex(std::size_t dim) : dim_(dim) {}

  // Normalizes and stores the vector. A zero vector is kept as zero (its
  // similarity to everything is 0). Throws InvalidInput on a dimension
  // mismatch or a duplicate id.
  void add(const std::string& id, std::span<const double> v);

  bool contains(const std::string& id) const { return row_of_.count(id) != 0; }
  std::span<const double> vector(const std::string& id) const;
  std::size_t dim() const { return dim_; }
  std::size_t size() const { return ids_.size(); }
  const std::vector<std::string>& ids() const { return ids_; }
  std::span<const double> rows() const { return rows_; }

 private:
  std::size_t dim_ = 0;
  std::vector<std::string> ids_;
  std::vector<double> rows_;
  std::map<std::string, std::size_t> row_of_;
};

struct Neighbor {
  std::string question_id;
  double similarity = 0.0;
};

// Completion-set members ranked by cosine similarity to the query, highest
// first, ties by question id. At most k results. Throws InvalidInput when the
// completion set is empty, k < 1 or an id is missing from the index.
std::vector<Neighbor> top_k_similar(const std::string& query_id, const EmbeddingIndex& index,
                                    const std::set<std::string>& completion_ids, int k);

struct PromptExample {
  std::string question_text;
  CoTRecord cot;
};

// Few-shot prompt. `examples` are given most-similar first; the prompt lists
// them in reverse so the closest one sits right above the target:
//
//   <instruction line>
//
//   Question: <example question>
//   Answer:
//   <example cot>
//
//   Question: <target question>
//   Answer:
//
// Throws InvalidInput if an example has a different kind or dialect.
std::string build_prompt(const std::vector<PromptExample>& examples, const MathQuestion& target, CoTKind kind,
                         Dialect dialect);

// Text of the last question block in a prompt built by build_prompt.
std::optional<std::string> prompt_target_question(std::string_view prompt);

// Response cleanup before execution. For program kinds the contents of the
// first fenced code block are taken if there is one, then everything after
// the first blank line is dropped. NL responses are only trimmed.
std::string clean_response(std::string_view response, CoTKind kind);

struct RoundStats {
  int round = 0;
  int attempted = 0;
  int verified = 0;
  int failed = 0;
  int provider_errors = 0;  // subset of failed
};

struct AnnotationState {
  std::map<std::string, CoTRecord> completion_set;  // question id -> verified record
  std::set<std::string> working_set;
  int round = 0;
  std::vector<RoundStats> history;
};

struct AnnotationOptions {
  ExecOptions exec;  // exec.pipeline carries retrieval_k, max_rounds, tolerance
  CoTKind kind = CoTKind::cdp;
  Dialect dialect = Dialect::wolfram;
};

struct AnnotationContext {
  const std::vector<MathQuestion>* questions = nullptr;
  const EmbeddingIndex* index = nullptr;
  ProviderPort* provider = nullptr;
  AnnotationOptions options;
  std::vector<TranscriptEntry>* transcript = nullptr;  // appended in question-id order
};

// Id given to a record generated for a question.
std::string generated_cot_id(const std::string& question_id, CoTKind kind, Dialect dialect);

// One round over the whole working set. Provider calls run concurrently up to
// the provider's max_concurrency; the state is only updated after all of
// them finish. Provider failures count as failed attempts for the round.
AnnotationState run_annotation_round(const AnnotationState& state, const AnnotationContext& ctx);

struct AnnotationResult {
  AnnotationState state;
  std::vector<CoTRecord> residual;   // manual_fixup queue, empty text
  std::vector<std::string> audit_failures;  // completion records that no longer verify
  std::vector<TranscriptEntry> transcript;
  bool provider_failure = false;  // a round where every attempt was a provider error
};

// Embeds every question, verifies the seeds and runs rounds until the working
// set is empty, a round verifies nothing, or max_rounds is reached. Seeds must
// share options.kind/dialect and execute to their gold answer; otherwise
// InvalidInput lists the offending seed ids.
AnnotationResult run_annotation_loop(const std::vector<MathQuestion>& questions, const std::vector<CoTRecord>& seeds,
                                     ProviderPort& provider, const AnnotationOptions& options);

// Builds the embedding index for `questions` with one provider call. Each
// text/vector pair is appended to `transcript` when given.
EmbeddingIndex build_index(const std::vector<MathQuestion>& questions, ProviderPort& provider,
                           std::vector<TranscriptEntry>* transcript = nullptr);

// Ids of completion-set records that fail to re-verify against gold.
std::vector<std::string> audit_completion_set(const AnnotationState& state, const std::vector<MathQuestion>& questions,
                                              const ExecOptions& exec);

}  // namespace cotforge
