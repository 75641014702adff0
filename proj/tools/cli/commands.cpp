#include "commands.hpp"

#include <chrono>
#include <cstdlib>
#include <ctime>
#include <fstream>
#include <iostream>
#include <memory>
#include <set>
#include <sstream>

#include "cotforge/annotator.hpp"
#include "cotforge/ensemble.hpp"
#include "cotforge/metrics.hpp"
#include "cotforge/provider.hpp"
#include "cotforge/report.hpp"
#include "cotforge/text.hpp"
#include "cotforge/wolfram/evaluator.hpp"

namespace cotforge::cli {

namespace fs = std::filesystem;

namespace {

std::string utc_timestamp(std::chrono::system_clock::time_point t) {
  const std::time_t tt = std::chrono::system_clock::to_time_t(t);
  std::tm tm{};
  gmtime_r(&tt, &tm);
  char buf[32];
  std::strftime(buf, sizeof buf, "%Y-%m-%dT%H:%M:%SZ", &tm);
  return buf;
}

// Timestamps and measured timings live in <output_dir>/<command>.meta.json so
// the data files themselves stay byte-identical across reruns.
class MetaSidecar {
 public:
  MetaSidecar(std::string command, const RunConfig& cfg)
      : command_(std::move(command)), cfg_(cfg), started_(std::chrono::system_clock::now()) {}

  json& extra() { return extra_; }
  void add_output(const fs::path& p) { outputs_.push_back(p.string()); }

  void write() const {
    const auto finished = std::chrono::system_clock::now();
    json j;
    j["command"] = command_;
    j["seed"] = cfg_.seed;
    j["started_at"] = utc_timestamp(started_);
    j["finished_at"] = utc_timestamp(finished);
    j["wall_ms"] = std::chrono::duration_cast<std::chrono::milliseconds>(finished - started_).count();
    j["outputs"] = outputs_;
    if (!extra_.is_null()) j["details"] = extra_;
    const fs::path path = fs::path(cfg_.output_dir) / (command_ + ".meta.json");
    fs::create_directories(path.parent_path());
    std::ofstream(path) << j.dump(2) << '\n';
  }

 private:
  std::string command_;
  const RunConfig& cfg_;
  std::chrono::system_clock::time_point started_;
  std::vector<std::string> outputs_;
  json extra_;
};

void write_text(const fs::path& path, const std::string& text) {
  if (path.has_parent_path()) fs::create_directories(path.parent_path());
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) throw std::runtime_error("cannot write " + path.string());
  out << text;
}

std::string type_label(const CoTRecord& r) {
  if (r.kind == CoTKind::nl) return "nl";
  return std::string(to_string(r.kind)) + "-" + std::string(to_string(r.dialect));
}

std::vector<MathQuestion> load_questions(const RunConfig& cfg) {
  require_file("paths.questions", cfg.questions);
  return read_questions(cfg.questions, {}, cfg.pipeline.max_choice_letter);
}

// Candidates grouped by CoT type, each type holding one set per question in
// questions-file order. Types appear in the order first seen in the cots files.
struct Corpus {
  std::vector<MathQuestion> questions;
  std::map<std::string, const MathQuestion*> by_id;
  std::vector<std::string> types;
  std::map<std::string, std::vector<CandidateSet>> sets;  // type -> sets
  bool all_scored = true;
};

// paths.outcomes, defaulting to where exec writes them.
std::vector<std::string> outcome_paths(const RunConfig& cfg) {
  if (!cfg.outcomes.empty()) return cfg.outcomes;
  std::vector<std::string> out;
  for (const auto& c : cfg.cots) {
    out.push_back((fs::path(cfg.output_dir) / (fs::path(c).stem().string() + ".outcomes.jsonl")).string());
  }
  return out;
}

Corpus load_corpus(const RunConfig& cfg, bool need_scores) {
  Corpus c;
  c.questions = load_questions(cfg);
  c.by_id = index_questions(c.questions);
  if (cfg.cots.empty()) throw InvalidInput("no cots files given");

  std::map<std::string, ExecutionOutcome> outcomes;
  for (const auto& p : outcome_paths(cfg)) {
    require_file("paths.outcomes", p);
    for (auto& o : read_outcomes(p, cfg.pipeline.max_choice_letter)) {
      const auto id = o.cot_id;
      if (!outcomes.emplace(id, std::move(o)).second) throw InvalidInput("duplicate outcome for '" + id + "'");
    }
  }
  std::map<std::string, double> scores;
  for (const auto& p : cfg.scores) {
    require_file("paths.scores", p);
    for (const auto& [id, s] : read_scores(p)) {
      if (!scores.emplace(id, s).second) throw InvalidInput("duplicate score for '" + id + "'");
    }
  }
  if (need_scores && cfg.scores.empty()) throw InvalidInput("method needs a scores file (paths.scores / --scores)");

  std::map<std::string, std::map<std::string, CandidateSet>> by_type;
  std::set<std::string> used;
  for (const auto& p : cfg.cots) {
    require_file("paths.cots", p);
    for (auto& r : read_cots(p)) {
      if (!c.by_id.count(r.question_id)) {
        throw InvalidInput("cot '" + r.id + "' refers to unknown question '" + r.question_id + "'");
      }
      auto o = outcomes.find(r.id);
      if (o == outcomes.end()) throw InvalidInput("no outcome for cot '" + r.id + "'");
      used.insert(r.id);
      const auto type = type_label(r);
      if (!by_type.count(type)) c.types.push_back(type);
      Candidate cand{r, o->second, std::nullopt};
      if (auto s = scores.find(r.id); s != scores.end()) cand.rm_score = s->second;
      c.all_scored = c.all_scored && cand.rm_score.has_value();
      auto& set = by_type[type][r.question_id];
      set.question_id = r.question_id;
      set.candidates.push_back(std::move(cand));
    }
  }
  for (const auto& [id, o] : outcomes) {
    if (!used.count(id)) throw InvalidInput("outcome '" + id + "' matches no cot");
  }
  for (const auto& type : c.types) {
    auto& per_q = by_type[type];
    auto& out = c.sets[type];
    for (const auto& q : c.questions) {
      if (auto it = per_q.find(q.id); it != per_q.end()) out.push_back(std::move(it->second));
    }
  }
  return c;
}

bool filter_for(const RunConfig& cfg, const MathQuestion& q) {
  return cfg.filter_null.value_or(q.answer_format == AnswerFormat::choice);
}

std::map<std::string, Answer> gold_map(const std::vector<MathQuestion>& qs) {
  std::map<std::string, Answer> g;
  for (const auto& q : qs) g.emplace(q.id, q.gold);
  return g;
}

std::unique_ptr<ProviderPort> make_provider(const RunConfig& cfg, const std::vector<MathQuestion>& questions) {
  const auto& p = cfg.provider;
  RetryPolicy retry{p.max_attempts, std::chrono::milliseconds(p.backoff_ms), p.max_concurrency};
  if (p.name == "mock") {
    std::map<std::string, std::vector<std::string>> script;
    if (!p.script.empty()) {
      require_file("provider.script", p.script);
      std::ifstream in(p.script);
      json doc;
      try {
        doc = json::parse(in);
      } catch (const json::parse_error& e) {
        throw InvalidInput("provider.script: " + std::string(e.what()));
      }
      if (!doc.is_object()) throw InvalidInput("provider.script must map question ids to response lists");
      const auto by_id = index_questions(questions);
      for (const auto& [id, responses] : doc.items()) {
        auto q = by_id.find(id);
        if (q == by_id.end()) throw InvalidInput("provider.script names unknown question '" + id + "'");
        script[q->second->text] = responses.is_string() ? std::vector<std::string>{responses.get<std::string>()}
                                                        : responses.get<std::vector<std::string>>();
      }
    }
    return std::make_unique<MockProvider>(std::move(script), static_cast<std::size_t>(p.embedding_dim));
  }
  if (p.name == "replay") {
    require_file("provider.transcript", p.transcript);
    return std::make_unique<ReplayProvider>(read_transcript(p.transcript));
  }
  if (p.name == "http") {
    HttpProviderConfig h;
    h.endpoint = p.endpoint;
    h.model = p.model;
    h.embedding_model = p.embedding_model;
    h.temperature = p.temperature;
    h.retry = retry;
    if (const char* key = std::getenv("COTFORGE_PROVIDER_KEY")) h.api_key = key;
    return std::make_unique<HttpProvider>(std::move(h));
  }
  throw InvalidInput("provider.name must be mock, http or replay");
}

std::string fraction(std::size_t a, std::size_t b) { return std::to_string(a) + "/" + std::to_string(b); }

}  // namespace

int cmd_annotate(const RunConfig& cfg) {
  cfg.pipeline.validate();
  MetaSidecar meta("annotate", cfg);
  const auto questions = load_questions(cfg);
  require_file("paths.seeds", cfg.seeds);
  const auto seeds = read_cots(cfg.seeds);
  if (seeds.empty()) throw InvalidInput("seeds file is empty");
  AnnotationOptions opts;
  opts.exec = cfg.exec_options();
  opts.kind = seeds.front().kind;
  opts.dialect = seeds.front().dialect;
  for (const auto& s : seeds) {
    if (s.kind != opts.kind || s.dialect != opts.dialect) {
      throw InvalidInput("seeds mix CoT types: '" + s.id + "' is " + type_label(s) + ", expected " +
                         type_label(seeds.front()));
    }
  }
  auto provider = make_provider(cfg, questions);
  const auto result = run_annotation_loop(questions, seeds, *provider, opts);
  const auto& st = result.state;

  const fs::path out = cfg.output_dir;
  std::vector<CoTRecord> completed;
  for (const auto& [id, r] : st.completion_set) completed.push_back(r);
  write_cots(out / "completed.jsonl", completed);
  write_cots(out / "residual.jsonl", result.residual);
  write_transcript(out / "transcript.jsonl", result.transcript);

  Report history;
  history.title = "annotation rounds";
  history.meta = {{"seed", std::to_string(cfg.seed)}, {"type", type_label(seeds.front())}};
  history.scalars = {{"seeds", static_cast<double>(seeds.size()), seeds.size()},
                     {"completed", static_cast<double>(completed.size()), questions.size()},
                     {"residual", static_cast<double>(result.residual.size()), questions.size()},
                     {"audit_failures", static_cast<double>(result.audit_failures.size()), completed.size()}};
  ReportTable rounds{"rounds", {"round", "attempted", "verified", "failed", "provider_errors"}, {}};
  for (const auto& h : st.history) {
    rounds.rows.push_back({h.round, h.attempted, h.verified, h.failed, h.provider_errors});
  }
  history.tables.push_back(std::move(rounds));
  write_text(out / "history.json", to_json(history).dump(2) + "\n");
  write_text(out / "history.txt", render_text(history));
  for (const auto* f : {"completed.jsonl", "residual.jsonl", "transcript.jsonl", "history.json", "history.txt"}) {
    meta.add_output(out / f);
  }
  meta.write();

  std::cout << "rounds " << st.round << ", completed " << completed.size() << ", residual " << result.residual.size()
            << ", audit failures " << result.audit_failures.size() << "\n";
  for (const auto& id : result.audit_failures) std::cerr << "warning: completed record for '" << id << "' no longer verifies\n";
  if (result.provider_failure) {
    std::cerr << "error: every provider call in a round failed\n";
    return kExitProvider;
  }
  return result.residual.empty() ? kExitOk : kExitResidual;
}

int cmd_exec(const RunConfig& cfg) {
  cfg.pipeline.validate();
  MetaSidecar meta("exec", cfg);
  const auto questions = load_questions(cfg);
  const auto by_id = index_questions(questions);
  if (cfg.cots.empty()) throw InvalidInput("no cots files given");
  const auto outputs = outcome_paths(cfg);
  if (outputs.size() != cfg.cots.size()) throw InvalidInput("paths.outcomes must list one file per cots file");

  const auto opts = cfg.exec_options();
  std::size_t total = 0, ok = 0, timeouts = 0;
  json timings = json::object();
  for (std::size_t f = 0; f < cfg.cots.size(); ++f) {
    require_file("paths.cots", cfg.cots[f]);
    const auto records = read_cots(cfg.cots[f]);
    auto outcomes = execute_batch(records, by_id, opts);
    for (auto& o : outcomes) {
      ++total;
      ok += o.status == ExecStatus::ok ? 1 : 0;
      timeouts += o.status == ExecStatus::timeout ? 1 : 0;
      timings[o.cot_id] = o.wall_ms;
      if (!cfg.record_timing) o.wall_ms = o.status == ExecStatus::timeout ? cfg.pipeline.exec_timeout_ms : 0;
    }
    write_outcomes(outputs[f], outcomes);
    meta.add_output(outputs[f]);
  }
  meta.extra()["wall_ms"] = timings;
  meta.write();
  std::cout << "executed " << total << ", ok " << ok << ", timeout " << timeouts << "\n";
  return kExitOk;
}

int cmd_select(const RunConfig& cfg) {
  cfg.pipeline.validate();
  const auto method = parse_select_method(cfg.method);
  if (!method) throw InvalidInput("method must be vote, rerank or weighted");
  MetaSidecar meta("select", cfg);
  const auto corpus = load_corpus(cfg, *method != SelectMethod::vote);

  std::vector<CandidateSet> sets;
  if (cfg.pooled) {
    for (const auto& q : corpus.questions) {
      std::vector<CandidateSet> parts;
      for (const auto& t : corpus.types) {
        for (const auto& s : corpus.sets.at(t)) {
          if (s.question_id == q.id) parts.push_back(s);
        }
      }
      if (!parts.empty()) sets.push_back(pool(parts));
    }
  } else {
    if (corpus.types.size() > 1) {
      std::string list;
      for (const auto& t : corpus.types) list += (list.empty() ? "" : ", ") + t;
      throw InvalidInput("cots mix CoT types (" + list + "); use --pooled or select one type");
    }
    if (!corpus.types.empty()) sets = corpus.sets.at(corpus.types.front());
  }

  std::vector<json> rows;
  std::size_t correct = 0, abstained = 0;
  for (const auto& s : sets) {
    const auto& q = *corpus.by_id.at(s.question_id);
    const auto r = select(*method, s, filter_for(cfg, q), cfg.pipeline);
    correct += answers_equal(r.answer, q.gold, cfg.pipeline) ? 1 : 0;
    abstained += r.abstained() ? 1 : 0;
    rows.push_back(to_json(r));
  }
  const std::string name = "selections." + cfg.method + (cfg.pooled ? ".pooled" : "") + ".jsonl";
  const auto path = fs::path(cfg.output_dir) / name;
  write_jsonl(path, rows);
  meta.add_output(path);
  meta.write();
  const double acc = sets.empty() ? 0.0 : static_cast<double>(correct) / static_cast<double>(sets.size());
  std::cout << cfg.method << (cfg.pooled ? " (pooled)" : "") << ": accuracy " << format_fixed(acc, 4) << " ("
            << fraction(correct, sets.size()) << "), abstained " << abstained << "\n";
  return kExitOk;
}

int cmd_stats(const RunConfig& cfg) {
  cfg.pipeline.validate();
  MetaSidecar meta("stats", cfg);
  const auto corpus = load_corpus(cfg, false);
  if (corpus.types.empty()) throw InvalidInput("no candidates to analyse");
  const auto gold = gold_map(corpus.questions);

  Report rep;
  rep.title = "sampling statistics";
  rep.meta = {{"seed", std::to_string(cfg.seed)},
              {"trials", std::to_string(cfg.stats.trials)},
              {"tolerance", format_double(cfg.pipeline.tolerance)}};

  std::vector<TypeCorrectness> vote_correct;
  for (const auto& type : corpus.types) {
    const auto& sets = corpus.sets.at(type);
    std::vector<QuestionEval> evals;
    std::vector<bool> voted;
    TypeCorrectness tc{type, {}};
    std::size_t samples = 0, n_min = SIZE_MAX, rerank_ok = 0, weighted_ok = 0;
    bool filter_all = true, filter_any = false;
    for (const auto& s : sets) {
      const auto& q = *corpus.by_id.at(s.question_id);
      evals.push_back(make_eval(s, q.gold, cfg.pipeline));
      const bool filter = filter_for(cfg, q);
      filter_all = filter_all && filter;
      filter_any = filter_any || filter;
      const bool ok = answers_equal(majority_vote(s, filter, cfg.pipeline).answer, q.gold, cfg.pipeline);
      voted.push_back(ok);
      tc.by_question[s.question_id] = ok;
      samples += s.candidates.size();
      n_min = std::min(n_min, s.candidates.size());
      if (corpus.all_scored && !cfg.scores.empty()) {
        rerank_ok += answers_equal(rerank(s, filter, cfg.pipeline).answer, q.gold, cfg.pipeline) ? 1 : 0;
        weighted_ok += answers_equal(weighted_vote(s, filter, cfg.pipeline).answer, q.gold, cfg.pipeline) ? 1 : 0;
      }
    }
    if (filter_any != filter_all) {
      throw InvalidInput("type " + type + " mixes numeric and choice questions; set filter_null explicitly");
    }
    const auto nq = sets.size();
    const auto vote_hits = static_cast<std::size_t>(std::count(voted.begin(), voted.end(), true));
    rep.scalars.push_back({type + ".precision", precision(evals), samples});
    rep.scalars.push_back({type + ".execution_rate", execution_rate(evals), samples});
    rep.scalars.push_back({type + ".valid_rate", valid_rate(evals), samples});
    rep.scalars.push_back({type + ".correct@1", correct_at_k(evals, 1), nq});
    rep.scalars.push_back({type + ".correct@" + std::to_string(n_min), correct_at_k(evals, n_min), nq});
    rep.scalars.push_back({type + ".vote_accuracy", static_cast<double>(vote_hits) / static_cast<double>(nq), nq});
    if (corpus.all_scored && !cfg.scores.empty()) {
      rep.scalars.push_back({type + ".rerank_accuracy", static_cast<double>(rerank_ok) / static_cast<double>(nq), nq});
      rep.scalars.push_back(
          {type + ".weighted_accuracy", static_cast<double>(weighted_ok) / static_cast<double>(nq), nq});
    }

    const auto ns = null_stats(evals, cfg.stats.buckets, voted);
    rep.scalars.push_back({type + ".null_percent", ns.null_percent, ns.total_samples});
    ReportTable buckets{type + " null-rate buckets", {"null_rate_percent", "questions", "vote_accuracy"}, {}};
    for (const auto& b : ns.buckets) {
      buckets.rows.push_back({format_double(b.lo) + "-" + format_double(b.hi), b.n,
                              b.accuracy ? json(*b.accuracy) : json(nullptr)});
    }
    rep.tables.push_back(std::move(buckets));

    std::vector<std::size_t> ks = cfg.stats.ks;
    if (ks.empty()) {
      for (std::size_t k = 1; k < n_min; k *= 2) ks.push_back(k);
      ks.push_back(n_min);
    }
    rep.curves.push_back({type, vote_accuracy_curve(sets, gold, ks, cfg.stats.trials, cfg.seed, filter_all,
                                                    cfg.pipeline)});
    vote_correct.push_back(std::move(tc));
  }

  const auto table = align_types(vote_correct);
  rep.scalars.push_back({"union_upper_bound", union_upper_bound(table), table.size()});
  const auto matrix = failure_recovery_matrix(table);
  ReportTable recovery{"failure recovery (row failed, column correct)", {"failed"}, {}};
  for (const auto& t : corpus.types) recovery.columns.push_back(t);
  for (std::size_t i = 0; i < matrix.size(); ++i) {
    std::vector<json> row{corpus.types[i]};
    for (const auto& cell : matrix[i]) row.push_back(cell ? json(*cell) : json(nullptr));
    recovery.rows.push_back(std::move(row));
  }
  rep.tables.push_back(std::move(recovery));

  const fs::path out = cfg.output_dir;
  write_text(out / "report.json", to_json(rep).dump(2) + "\n");
  write_text(out / "report.txt", render_text(rep));
  write_text(out / "curves.csv", render_curves_csv(rep));
  for (const auto* f : {"report.json", "report.txt", "curves.csv"}) meta.add_output(out / f);
  meta.write();
  std::cout << render_text(rep);
  return kExitOk;
}

int cmd_rm_labels(const RunConfig& cfg) {
  cfg.pipeline.validate();
  MetaSidecar meta("rm-labels", cfg);
  const auto corpus = load_corpus(cfg, false);
  std::vector<CandidateSet> all;
  for (const auto& t : corpus.types) {
    const auto& sets = corpus.sets.at(t);
    all.insert(all.end(), sets.begin(), sets.end());
  }
  const auto groups = build_rm_labels(all, gold_map(corpus.questions), cfg.pipeline);
  const auto rows = rm_label_rows(groups);
  const auto path = fs::path(cfg.output_dir) / "rm_labels.jsonl";
  write_jsonl(path, rows);
  meta.add_output(path);
  meta.write();
  std::cout << "kept " << groups.size() << " of " << all.size() << " candidate sets, " << rows.size()
            << " labeled candidates\n";
  return kExitOk;
}

int cmd_repl(const ReplOptions& opts) {
  using namespace cotforge::wolfram;
  std::stringstream ss;
  if (opts.file) {
    std::ifstream in(*opts.file);
    if (!in) throw InvalidInput("cannot open " + *opts.file);
    ss << in.rdbuf();
  } else {
    ss << std::cin.rdbuf();
  }
  const std::string source = ss.str();
  try {
    if (opts.tokens) {
      for (const auto& t : tokenize(source)) std::cout << t.pos.line << ":" << t.pos.column << " " << t.lexeme << "\n";
    }
    const auto program = parse(source);
    if (opts.ast) std::cout << to_sexpr(program) << "\n";
    EvalLimits limits;
    limits.deadline = std::chrono::steady_clock::now() + std::chrono::milliseconds(opts.timeout_ms);
    const auto result = evaluate(program, limits);
    json env = json::object();
    for (const auto& [name, value] : result.env) env[name] = value.to_string();
    json out{{"env", env}};
    const auto answer = final_answer(result);
    out["answer"] = answer ? json(answer->to_string()) : json(nullptr);
    std::cout << out.dump() << "\n";
    return kExitOk;
  } catch (const Error& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kExitUsage;
  }
}

}  // namespace cotforge::cli
