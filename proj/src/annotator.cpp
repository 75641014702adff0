#include "cotforge/annotator.hpp"

#include <algorithm>
#include <cmath>

#include "cotforge/kernels/dot.hpp"
#include "cotforge/parallel.hpp"
#include "cotforge/text.hpp"

namespace cotforge {

void EmbeddingIndex::add(const std::string& id, std::span<const double> v) {
  if (ids_.empty() && dim_ == 0) dim_ = v.size();
  if (v.size() != dim_ || dim_ == 0) {
    throw InvalidInput("embedding for '" + id + "' has dimension " + std::to_string(v.size()) + ", index expects " +
                       std::to_string(dim_));
  }
  if (!row_of_.emplace(id, ids_.size()).second) throw InvalidInput("duplicate embedding id '" + id + "'");
  ids_.push_back(id);
  const double norm = std::sqrt(kernels::dot(v, v));
  for (double x : v) rows_.push_back(norm > 0.0 ? x / norm : 0.0);
}

std::span<const double> EmbeddingIndex::vector(const std::string& id) const {
  auto it = row_of_.find(id);
  if (it == row_of_.end()) throw InvalidInput("no embedding for '" + id + "'");
  return std::span<const double>(rows_).subspan(it->second * dim_, dim_);
}

std::vector<Neighbor> top_k_similar(const std::string& query_id, const EmbeddingIndex& index,
                                    const std::set<std::string>& completion_ids, int k) {
  if (completion_ids.empty()) throw InvalidInput("completion set is empty");
  if (k < 1) throw InvalidInput("k must be >= 1");
  const auto query = index.vector(query_id);

  std::vector<double> sims(index.size());
  kernels::dot_rows(query, index.rows(), sims);

  std::vector<Neighbor> ranked;
  ranked.reserve(completion_ids.size());
  for (const auto& id : completion_ids) {
    if (!index.contains(id)) throw InvalidInput("no embedding for '" + id + "'");
    const auto row = static_cast<std::size_t>(index.vector(id).data() - index.rows().data()) / index.dim();
    ranked.push_back({id, sims[row]});
  }
  const auto n = std::min<std::size_t>(static_cast<std::size_t>(k), ranked.size());
  std::partial_sort(ranked.begin(), ranked.begin() + static_cast<std::ptrdiff_t>(n), ranked.end(),
                    [](const Neighbor& a, const Neighbor& b) {
                      if (a.similarity != b.similarity) return a.similarity > b.similarity;
                      return a.question_id < b.question_id;
                    });
  ranked.resize(n);
  return ranked;
}

namespace {

constexpr std::string_view kQuestionTag = "Question: ";
constexpr std::string_view kAnswerCue = "Answer:";

std::string describe(CoTKind kind, Dialect dialect) {
  const std::string lang = dialect == Dialect::wolfram ? "Wolfram" : "Python";
  switch (kind) {
    case CoTKind::nl:
      return "Solve each question step by step and finish with \"Therefore, the answer is X.\"";
    case CoTKind::sdp:
      return "Solve each question with a " + lang + " program whose variable names come from the question.";
    case CoTKind::cdp:
      return "Solve each question with a " + lang + " program using variables v1, v2, ... and a comment per step.";
    case CoTKind::ndp:
      return "Solve each question with a " + lang + " program using variables v1, v2, ...";
  }
  return {};
}

}  // namespace

std::string build_prompt(const std::vector<PromptExample>& examples, const MathQuestion& target, CoTKind kind,
                         Dialect dialect) {
  for (const auto& ex : examples) {
    if (ex.cot.kind != kind || ex.cot.dialect != dialect) {
      throw InvalidInput("example '" + ex.cot.id + "' is " + std::string(to_string(ex.cot.kind)) + "/" +
                         std::string(to_string(ex.cot.dialect)) + ", prompt wants " + std::string(to_string(kind)) +
                         "/" + std::string(to_string(dialect)));
    }
  }
  std::string p = describe(kind, dialect);
  p += "\n\n";
  for (auto it = examples.rbegin(); it != examples.rend(); ++it) {
    p += kQuestionTag;
    p += it->question_text;
    p += '\n';
    p += kAnswerCue;
    p += '\n';
    p += trim(it->cot.text);
    p += "\n\n";
  }
  p += kQuestionTag;
  p += target.text;
  p += '\n';
  p += kAnswerCue;
  p += '\n';
  return p;
}

std::optional<std::string> prompt_target_question(std::string_view prompt) {
  std::size_t at = std::string_view::npos;
  for (std::size_t pos = prompt.find(kQuestionTag); pos != std::string_view::npos;
       pos = prompt.find(kQuestionTag, pos + 1)) {
    if (pos == 0 || prompt[pos - 1] == '\n') at = pos;
  }
  if (at == std::string_view::npos) return std::nullopt;
  const auto body = prompt.substr(at + kQuestionTag.size());
  const auto end = body.rfind(std::string("\n") + std::string(kAnswerCue));
  if (end == std::string_view::npos) return std::nullopt;
  return std::string(body.substr(0, end));
}

std::string clean_response(std::string_view response, CoTKind kind) {
  if (kind == CoTKind::nl) return std::string(trim(response));
  std::string_view body = response;
  if (auto open = body.find("```"); open != std::string_view::npos) {
    auto start = body.find('\n', open);
    if (start != std::string_view::npos) {
      auto close = body.find("```", start + 1);
      body = body.substr(start + 1, close == std::string_view::npos ? std::string_view::npos : close - start - 1);
    }
  }
  std::string out;
  bool started = false;
  for (auto line : split_lines(body)) {
    const bool blank = trim(line).empty();
    if (blank && started) break;
    if (blank) continue;
    started = true;
    out.append(line);
    out.push_back('\n');
  }
  while (!out.empty() && (out.back() == '\n' || out.back() == ' ' || out.back() == '\t' || out.back() == '\r')) {
    out.pop_back();
  }
  return out;
}

std::string generated_cot_id(const std::string& question_id, CoTKind kind, Dialect dialect) {
  return question_id + "-" + std::string(to_string(kind)) + "-" + std::string(to_string(dialect));
}

namespace {

struct Attempt {
  std::string prompt;
  std::string response;
  bool responded = false;
  bool provider_error = false;
  bool verified = false;
  CoTRecord record;
};

const MathQuestion& find_question(const std::map<std::string, const MathQuestion*>& by_id, const std::string& id) {
  auto it = by_id.find(id);
  if (it == by_id.end()) throw InvalidInput("unknown question '" + id + "'");
  return *it->second;
}

bool verifies(const CoTRecord& r, const MathQuestion& q, const ExecOptions& exec) {
  const auto outcome = execute(r, q, exec);
  return outcome.valid() && answers_equal(outcome.answer, q.gold, exec.pipeline);
}

}  // namespace

AnnotationState run_annotation_round(const AnnotationState& state, const AnnotationContext& ctx) {
  AnnotationState next = state;
  next.round = state.round + 1;
  RoundStats stats;
  stats.round = next.round;
  if (state.working_set.empty()) {
    next.history.push_back(stats);
    return next;
  }
  if (state.completion_set.empty()) throw InvalidInput("completion set is empty");

  const auto& opts = ctx.options;
  const auto by_id = index_questions(*ctx.questions);
  std::set<std::string> completion_ids;
  for (const auto& [id, rec] : state.completion_set) completion_ids.insert(id);

  const std::vector<std::string> targets(state.working_set.begin(), state.working_set.end());
  std::vector<Attempt> attempts(targets.size());

  // Prompts depend only on the state at the start of the round.
  for (std::size_t i = 0; i < targets.size(); ++i) {
    const auto& target = find_question(by_id, targets[i]);
    std::vector<PromptExample> examples;
    for (const auto& n : top_k_similar(targets[i], *ctx.index, completion_ids, opts.exec.pipeline.retrieval_k)) {
      examples.push_back({find_question(by_id, n.question_id).text, state.completion_set.at(n.question_id)});
    }
    attempts[i].prompt = build_prompt(examples, target, opts.kind, opts.dialect);
  }

  const int concurrency = std::max(1, ctx.provider->retry_policy().max_concurrency);
  parallel_for(targets.size(), concurrency, [&](std::size_t i) {
    auto& a = attempts[i];
    try {
      a.response = complete_with_retry(*ctx.provider, a.prompt);
      a.responded = true;
    } catch (const std::exception&) {
      a.provider_error = true;
      return;
    }
    const auto& q = find_question(by_id, targets[i]);
    a.record = CoTRecord{generated_cot_id(q.id, opts.kind, opts.dialect), q.id, opts.kind, opts.dialect,
                         clean_response(a.response, opts.kind), Origin{Origin::Kind::llm_round, next.round}};
    if (!validate_record(a.record).empty()) return;
    a.verified = verifies(a.record, q, opts.exec);
  });

  for (std::size_t i = 0; i < targets.size(); ++i) {
    auto& a = attempts[i];
    ++stats.attempted;
    if (a.responded && ctx.transcript) ctx.transcript->push_back(make_transcript_entry(a.prompt, a.response));
    if (a.verified) {
      ++stats.verified;
      next.working_set.erase(targets[i]);
      next.completion_set.emplace(targets[i], std::move(a.record));
    } else {
      ++stats.failed;
      if (a.provider_error) ++stats.provider_errors;
    }
  }
  next.history.push_back(stats);
  return next;
}

EmbeddingIndex build_index(const std::vector<MathQuestion>& questions, ProviderPort& provider,
                           std::vector<TranscriptEntry>* transcript) {
  std::vector<std::string> texts;
  texts.reserve(questions.size());
  for (const auto& q : questions) texts.push_back(q.text);
  const auto vectors = embed_with_retry(provider, texts);
  EmbeddingIndex index;
  for (std::size_t i = 0; i < questions.size(); ++i) {
    index.add(questions[i].id, vectors[i]);
    if (transcript) transcript->push_back(make_transcript_entry(embed_prompt(texts[i]), json(vectors[i]).dump()));
  }
  return index;
}

std::vector<std::string> audit_completion_set(const AnnotationState& state, const std::vector<MathQuestion>& questions,
                                              const ExecOptions& exec) {
  const auto by_id = index_questions(questions);
  std::vector<const CoTRecord*> records;
  for (const auto& [id, rec] : state.completion_set) records.push_back(&rec);
  std::vector<char> ok(records.size(), 0);
  parallel_for(records.size(), exec.pipeline.parallelism, [&](std::size_t i) {
    ok[i] = verifies(*records[i], find_question(by_id, records[i]->question_id), exec) ? 1 : 0;
  });
  std::vector<std::string> failures;
  for (std::size_t i = 0; i < records.size(); ++i) {
    if (!ok[i]) failures.push_back(records[i]->question_id);
  }
  return failures;
}

AnnotationResult run_annotation_loop(const std::vector<MathQuestion>& questions, const std::vector<CoTRecord>& seeds,
                                     ProviderPort& provider, const AnnotationOptions& options) {
  options.exec.pipeline.validate();
  if (seeds.empty()) throw InvalidInput("no seed records");
  const auto by_id = index_questions(questions);

  AnnotationResult result;
  auto& state = result.state;
  std::vector<std::string> bad;
  for (const auto& s : seeds) {
    auto it = by_id.find(s.question_id);
    const bool known = it != by_id.end();
    const bool typed = s.kind == options.kind && s.dialect == options.dialect;
    const bool fresh = !state.completion_set.count(s.question_id);
    if (!known || !typed || !fresh || !verifies(s, *it->second, options.exec)) {
      bad.push_back(s.id);
      continue;
    }
    state.completion_set.emplace(s.question_id, s);
  }
  if (!bad.empty()) {
    std::string msg = "seeds failed verification:";
    for (const auto& id : bad) msg += " " + id;
    throw InvalidInput(msg);
  }
  for (const auto& q : questions) {
    if (!state.completion_set.count(q.id)) state.working_set.insert(q.id);
  }

  const auto index = build_index(questions, provider, &result.transcript);
  AnnotationContext ctx{&questions, &index, &provider, options, &result.transcript};
  while (!state.working_set.empty() && state.round < options.exec.pipeline.max_rounds) {
    state = run_annotation_round(state, ctx);
    const auto& last = state.history.back();
    if (last.attempted > 0 && last.provider_errors == last.attempted) result.provider_failure = true;
    if (last.verified == 0) break;
  }

  for (const auto& id : state.working_set) {
    result.residual.push_back(CoTRecord{generated_cot_id(id, options.kind, options.dialect), id, options.kind,
                                        options.dialect, "", Origin{Origin::Kind::manual_fixup, 0}});
  }
  result.audit_failures = audit_completion_set(state, questions, options.exec);
  return result;
}

}  // namespace cotforge
