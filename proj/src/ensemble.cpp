#include "cotforge/ensemble.hpp"

#include <cmath>
#include <limits>
#include <set>

#include "cotforge/text.hpp"

namespace cotforge {

Answer Candidate::answer() const { return outcome.executed() ? outcome.answer : Answer::Null(); }

std::string_view to_string(SelectMethod m) {
  switch (m) {
    case SelectMethod::vote: return "vote";
    case SelectMethod::rerank: return "rerank";
    case SelectMethod::weighted: return "weighted";
  }
  return "?";
}

std::optional<SelectMethod> parse_select_method(std::string_view s) {
  if (s == "vote") return SelectMethod::vote;
  if (s == "rerank") return SelectMethod::rerank;
  if (s == "weighted") return SelectMethod::weighted;
  return std::nullopt;
}

std::string answer_key(const Answer& a, double tolerance) {
  if (a.is_null()) return "null";
  if (a.is_choice()) return std::string(1, a.letter());
  const double v = a.value();
  if (!(tolerance > 0.0)) return format_double(v);
  const double steps = std::round(v / tolerance);
  if (std::abs(steps) > 9e15) return format_double(v);
  const int digits = std::max(0, static_cast<int>(std::ceil(-std::log10(tolerance) - 1e-9)));
  std::string s = format_fixed(steps * tolerance, digits);
  if (s.find('.') != std::string::npos) {
    while (s.back() == '0') s.pop_back();
    if (s.back() == '.') s.pop_back();
  }
  if (s == "-0") s = "0";
  return s;
}

namespace {

struct Group {
  std::size_t first = 0;  // earliest supporting candidate
  double weight = 0.0;
};

std::vector<std::size_t> survivors(const CandidateSet& set, bool filter_null) {
  std::vector<std::size_t> idx;
  for (std::size_t i = 0; i < set.candidates.size(); ++i) {
    if (filter_null && set.candidates[i].answer().is_null()) continue;
    idx.push_back(i);
  }
  return idx;
}

void require_scores(const CandidateSet& set, const std::vector<std::size_t>& idx) {
  for (auto i : idx) {
    if (!set.candidates[i].rm_score) {
      throw InvalidInput("candidate '" + set.candidates[i].record.id + "' has no rm_score");
    }
  }
}

SelectionResult finish(const CandidateSet& set, SelectMethod method, std::optional<std::size_t> chosen,
                       std::map<std::string, double> tally) {
  SelectionResult r;
  r.question_id = set.question_id;
  r.method = method;
  r.tally = std::move(tally);
  if (chosen) {
    r.chosen = chosen;
    r.chosen_cot_id = set.candidates[*chosen].record.id;
    r.answer = set.candidates[*chosen].answer();
  }
  return r;
}

// Groups survivors by key; each member adds weight_of(candidate). The
// heaviest group wins, ties going to the group seen first.
template <class WeightFn>
SelectionResult grouped(const CandidateSet& set, bool filter_null, const PipelineConfig& cfg, SelectMethod method,
                        WeightFn weight_of) {
  std::map<std::string, Group> groups;
  for (auto i : survivors(set, filter_null)) {
    const auto key = answer_key(set.candidates[i].answer(), cfg.tolerance);
    auto [it, inserted] = groups.try_emplace(key, Group{i, 0.0});
    it->second.weight += weight_of(set.candidates[i]);
  }
  std::optional<std::size_t> chosen;
  double best = -std::numeric_limits<double>::infinity();
  std::map<std::string, double> tally;
  for (const auto& [key, g] : groups) {
    tally[key] = g.weight;
    if (g.weight > best || (g.weight == best && g.first < *chosen)) {
      best = g.weight;
      chosen = g.first;
    }
  }
  return finish(set, method, chosen, std::move(tally));
}

}  // namespace

SelectionResult majority_vote(const CandidateSet& set, bool filter_null, const PipelineConfig& cfg) {
  return grouped(set, filter_null, cfg, SelectMethod::vote, [](const Candidate&) { return 1.0; });
}

SelectionResult weighted_vote(const CandidateSet& set, bool filter_null, const PipelineConfig& cfg) {
  require_scores(set, survivors(set, filter_null));
  return grouped(set, filter_null, cfg, SelectMethod::weighted, [](const Candidate& c) { return *c.rm_score; });
}

SelectionResult rerank(const CandidateSet& set, bool filter_null, const PipelineConfig& cfg) {
  const auto idx = survivors(set, filter_null);
  require_scores(set, idx);
  std::optional<std::size_t> chosen;
  std::map<std::string, double> tally;
  for (auto i : idx) {
    const double s = *set.candidates[i].rm_score;
    if (!chosen || s > *set.candidates[*chosen].rm_score) chosen = i;
    const auto key = answer_key(set.candidates[i].answer(), cfg.tolerance);
    auto [it, inserted] = tally.try_emplace(key, s);
    if (!inserted) it->second = std::max(it->second, s);
  }
  return finish(set, SelectMethod::rerank, chosen, std::move(tally));
}

SelectionResult select(SelectMethod method, const CandidateSet& set, bool filter_null, const PipelineConfig& cfg) {
  switch (method) {
    case SelectMethod::vote: return majority_vote(set, filter_null, cfg);
    case SelectMethod::rerank: return rerank(set, filter_null, cfg);
    case SelectMethod::weighted: return weighted_vote(set, filter_null, cfg);
  }
  throw InvalidInput("unknown selection method");
}

CandidateSet pool(const std::vector<CandidateSet>& sets) {
  if (sets.empty()) throw InvalidInput("nothing to pool");
  CandidateSet out;
  out.question_id = sets.front().question_id;
  for (const auto& s : sets) {
    if (s.question_id != out.question_id) {
      throw InvalidInput("cannot pool question '" + s.question_id + "' with '" + out.question_id + "'");
    }
    out.candidates.insert(out.candidates.end(), s.candidates.begin(), s.candidates.end());
  }
  return out;
}

std::vector<LabeledGroup> build_rm_labels(const std::vector<CandidateSet>& sets,
                                          const std::map<std::string, Answer>& gold, const PipelineConfig& cfg) {
  std::vector<LabeledGroup> out;
  for (const auto& set : sets) {
    auto g = gold.find(set.question_id);
    if (g == gold.end()) continue;
    LabeledGroup group{set.question_id, {}};
    std::size_t correct = 0;
    for (const auto& c : set.candidates) {
      const bool ok = answers_equal(c.answer(), g->second, cfg);
      correct += ok ? 1 : 0;
      group.items.push_back({&c, ok});
    }
    if (correct == 0 || correct == group.items.size()) continue;
    out.push_back(std::move(group));
  }
  return out;
}

json to_json(const SelectionResult& r) {
  json j;
  j["question_id"] = r.question_id;
  j["method"] = std::string(to_string(r.method));
  j["answer"] = to_json(r.answer);
  if (r.chosen) j["chosen_cot_id"] = r.chosen_cot_id;
  json tally = json::object();
  for (const auto& [key, w] : r.tally) {
    if (r.method == SelectMethod::vote) {
      tally[key] = static_cast<long long>(w);
    } else {
      tally[key] = w;
    }
  }
  j["tally"] = tally;
  return j;
}

std::map<std::string, double> read_scores(const std::filesystem::path& path) {
  std::map<std::string, double> out;
  for_each_jsonl(path, [&](const json& j, std::size_t) {
    const auto id = j.at("cot_id").get<std::string>();
    const auto& s = j.at("rm_score");
    if (!s.is_number()) throw InvalidInput("rm_score must be a number");
    const double v = s.get<double>();
    if (!(v >= 0.0 && v <= 1.0)) throw InvalidInput("rm_score for '" + id + "' is outside [0, 1]");
    if (!out.emplace(id, v).second) throw InvalidInput("duplicate score for '" + id + "'");
  });
  return out;
}

std::vector<json> rm_label_rows(const std::vector<LabeledGroup>& groups) {
  std::vector<json> rows;
  for (const auto& g : groups) {
    for (const auto& item : g.items) {
      const auto& r = item.candidate->record;
      rows.push_back(json{{"question_id", g.question_id},
                          {"cot_id", r.id},
                          {"kind", std::string(to_string(r.kind))},
                          {"dialect", std::string(to_string(r.dialect))},
                          {"text", r.text},
                          {"label", item.correct ? 1 : 0}});
    }
  }
  return rows;
}

}  // namespace cotforge
