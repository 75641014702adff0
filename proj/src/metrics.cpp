#include "cotforge/metrics.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <random>

namespace cotforge {

QuestionEval make_eval(const CandidateSet& set, const Answer& gold, const PipelineConfig& cfg) {
  QuestionEval e;
  e.question_id = set.question_id;
  for (const auto& c : set.candidates) {
    const auto a = c.answer();
    e.correct.push_back(answers_equal(a, gold, cfg));
    e.executable.push_back(c.outcome.executed());
    e.null.push_back(c.outcome.executed() && a.is_null());
  }
  return e;
}

namespace {

template <class Bits>
double micro(const std::vector<QuestionEval>& evals, Bits bits) {
  if (evals.empty()) throw InvalidInput("no questions to evaluate");
  std::size_t hit = 0, total = 0;
  for (const auto& e : evals) {
    for (std::size_t i = 0; i < e.size(); ++i) hit += bits(e, i) ? 1 : 0;
    total += e.size();
  }
  if (total == 0) throw InvalidInput("no samples to evaluate");
  return static_cast<double>(hit) / static_cast<double>(total);
}

}  // namespace

double precision(const std::vector<QuestionEval>& evals) {
  return micro(evals, [](const QuestionEval& e, std::size_t i) { return e.correct[i]; });
}

double execution_rate(const std::vector<QuestionEval>& evals) {
  return micro(evals, [](const QuestionEval& e, std::size_t i) { return e.executable[i]; });
}

double valid_rate(const std::vector<QuestionEval>& evals) {
  return micro(evals, [](const QuestionEval& e, std::size_t i) { return e.executable[i] && !e.null[i]; });
}

double correct_at_k(std::size_t n, std::size_t c, std::size_t k) {
  if (k < 1 || k > n) throw InvalidInput("k=" + std::to_string(k) + " outside [1, " + std::to_string(n) + "]");
  if (c > n) throw InvalidInput("more correct samples than samples");
  if (n - c < k) return 1.0;
  // C(n-c, k) / C(n, k) = prod_{i<k} (n-c-i) / (n-i)
  double miss = 1.0;
  for (std::size_t i = 0; i < k; ++i) miss *= static_cast<double>(n - c - i) / static_cast<double>(n - i);
  return 1.0 - miss;
}

double correct_at_k(const std::vector<QuestionEval>& evals, std::size_t k) {
  if (evals.empty()) throw InvalidInput("no questions to evaluate");
  double sum = 0.0;
  for (const auto& e : evals) {
    const auto c = static_cast<std::size_t>(std::count(e.correct.begin(), e.correct.end(), true));
    sum += correct_at_k(e.size(), c, k);
  }
  return sum / static_cast<double>(evals.size());
}

std::uint64_t uniform_below(std::uint64_t bound, std::uint64_t (*next)(void*), void* state) {
  if (bound == 0) throw InvalidInput("empty range");
  const std::uint64_t limit = -bound % bound;  // 2^64 mod bound
  while (true) {
    const std::uint64_t x = next(state);
    if (x >= limit) return x % bound;
  }
}

std::vector<CurvePoint> vote_accuracy_curve(const std::vector<CandidateSet>& sets,
                                            const std::map<std::string, Answer>& gold,
                                            const std::vector<std::size_t>& ks, std::size_t trials,
                                            std::uint64_t seed, bool filter_null, const PipelineConfig& cfg) {
  if (trials == 0) throw InvalidInput("trials must be >= 1");
  for (const auto& s : sets) {
    if (!gold.count(s.question_id)) throw InvalidInput("no gold answer for '" + s.question_id + "'");
    for (auto k : ks) {
      if (k < 1 || k > s.candidates.size()) {
        throw InvalidInput("k=" + std::to_string(k) + " outside [1, " + std::to_string(s.candidates.size()) +
                           "] for question '" + s.question_id + "'");
      }
    }
  }
  auto is_correct = [&](const CandidateSet& s) {
    const auto r = majority_vote(s, filter_null, cfg);
    return answers_equal(r.answer, gold.at(s.question_id), cfg);
  };
  std::vector<double> full(sets.size());
  for (std::size_t q = 0; q < sets.size(); ++q) full[q] = is_correct(sets[q]) ? 1.0 : 0.0;

  std::mt19937_64 rng(seed);
  auto next = [](void* p) -> std::uint64_t { return (*static_cast<std::mt19937_64*>(p))(); };

  std::vector<CurvePoint> curve;
  for (auto k : ks) {
    const bool exact = std::all_of(sets.begin(), sets.end(), [&](const CandidateSet& s) { return s.candidates.size() == k; });
    const std::size_t runs = exact ? 1 : trials;
    std::vector<double> acc(runs, 0.0);
    for (std::size_t t = 0; t < runs; ++t) {
      double hits = 0.0;
      for (std::size_t q = 0; q < sets.size(); ++q) {
        const auto& s = sets[q];
        const auto n = s.candidates.size();
        if (n == k) {
          hits += full[q];
          continue;
        }
        std::vector<std::size_t> idx(n);
        std::iota(idx.begin(), idx.end(), 0);
        for (std::size_t i = 0; i < k; ++i) {
          const auto j = i + static_cast<std::size_t>(uniform_below(n - i, next, &rng));
          std::swap(idx[i], idx[j]);
        }
        idx.resize(k);
        std::sort(idx.begin(), idx.end());
        CandidateSet sub{s.question_id, {}};
        for (auto i : idx) sub.candidates.push_back(s.candidates[i]);
        hits += is_correct(sub) ? 1.0 : 0.0;
      }
      acc[t] = sets.empty() ? 0.0 : hits / static_cast<double>(sets.size());
    }
    CurvePoint p;
    p.k = k;
    p.trials = runs;
    p.questions = sets.size();
    p.accuracy = std::accumulate(acc.begin(), acc.end(), 0.0) / static_cast<double>(runs);
    if (runs > 1) {
      double ss = 0.0;
      for (double a : acc) ss += (a - p.accuracy) * (a - p.accuracy);
      p.stderr_ = std::sqrt(ss / static_cast<double>(runs - 1)) / std::sqrt(static_cast<double>(runs));
    }
    curve.push_back(p);
  }
  return curve;
}

std::vector<double> default_null_buckets() { return {0, 20, 40, 60, 80, 100}; }

NullStats null_stats(const std::vector<QuestionEval>& evals, const std::vector<double>& edges,
                     const std::vector<bool>& method_correct) {
  if (edges.size() < 2 || edges.front() != 0.0 || edges.back() != 100.0) {
    throw InvalidInput("null buckets must start at 0 and end at 100");
  }
  for (std::size_t i = 1; i < edges.size(); ++i) {
    if (!(edges[i] > edges[i - 1])) throw InvalidInput("null bucket edges must be strictly ascending");
  }
  if (method_correct.size() != evals.size()) throw InvalidInput("method correctness is not aligned with questions");

  NullStats st;
  std::vector<std::size_t> hits(edges.size() - 1, 0);
  for (std::size_t i = 0; i + 1 < edges.size(); ++i) st.buckets.push_back({edges[i], edges[i + 1], 0, std::nullopt});
  for (std::size_t q = 0; q < evals.size(); ++q) {
    const auto& e = evals[q];
    const auto nulls = static_cast<std::size_t>(std::count(e.null.begin(), e.null.end(), true));
    st.null_samples += nulls;
    st.total_samples += e.size();
    if (e.size() == 0) continue;
    const double rate = 100.0 * static_cast<double>(nulls) / static_cast<double>(e.size());
    std::size_t b = 0;
    while (b + 1 < st.buckets.size() && rate >= st.buckets[b].hi) ++b;
    ++st.buckets[b].n;
    hits[b] += method_correct[q] ? 1 : 0;
  }
  st.null_percent = st.total_samples == 0 ? 0.0
                                          : 100.0 * static_cast<double>(st.null_samples) /
                                                static_cast<double>(st.total_samples);
  for (std::size_t b = 0; b < st.buckets.size(); ++b) {
    if (st.buckets[b].n > 0) st.buckets[b].accuracy = static_cast<double>(hits[b]) / static_cast<double>(st.buckets[b].n);
  }
  return st;
}

double union_upper_bound(const std::vector<std::vector<bool>>& table) {
  if (table.empty()) throw InvalidInput("no questions");
  std::size_t any = 0;
  for (const auto& row : table) any += std::find(row.begin(), row.end(), true) != row.end() ? 1 : 0;
  return static_cast<double>(any) / static_cast<double>(table.size());
}

std::vector<std::vector<bool>> align_types(const std::vector<TypeCorrectness>& types) {
  if (types.empty()) throw InvalidInput("no CoT types");
  const auto& ref = types.front().by_question;
  std::vector<std::vector<bool>> table;
  table.reserve(ref.size());
  for (const auto& t : types) {
    if (t.by_question.size() != ref.size() ||
        !std::equal(ref.begin(), ref.end(), t.by_question.begin(),
                    [](const auto& a, const auto& b) { return a.first == b.first; })) {
      throw InvalidInput("question ids of '" + t.type + "' do not match '" + types.front().type + "'");
    }
  }
  for (const auto& [id, unused] : ref) {
    std::vector<bool> row;
    for (const auto& t : types) row.push_back(t.by_question.at(id));
    table.push_back(std::move(row));
  }
  return table;
}

std::vector<std::vector<std::optional<double>>> failure_recovery_matrix(const std::vector<std::vector<bool>>& table) {
  const std::size_t m = table.empty() ? 0 : table.front().size();
  for (const auto& row : table) {
    if (row.size() != m) throw InvalidInput("ragged correctness table");
  }
  std::vector<std::vector<std::optional<double>>> out(m, std::vector<std::optional<double>>(m));
  for (std::size_t i = 0; i < m; ++i) {
    std::size_t fails = 0;
    std::vector<std::size_t> recovered(m, 0);
    for (const auto& row : table) {
      if (row[i]) continue;
      ++fails;
      for (std::size_t j = 0; j < m; ++j) recovered[j] += row[j] ? 1 : 0;
    }
    if (fails == 0) continue;
    for (std::size_t j = 0; j < m; ++j) out[i][j] = static_cast<double>(recovered[j]) / static_cast<double>(fails);
  }
  return out;
}

}  // namespace cotforge
