#include "oracles.hpp"

#include <algorithm>

namespace oracle {

VoteRef brute_vote(const std::string& answers, bool filter_null) {
  VoteRef r;
  std::vector<char> symbols;
  for (char c : answers) {
    if (c == '-' && filter_null) continue;
    bool seen = false;
    for (auto& [s, n] : r.counts) {
      if (s == c) {
        ++n;
        seen = true;
      }
    }
    if (!seen) {
      r.counts.emplace_back(c, 1);
      symbols.push_back(c);
    }
  }
  // counts is in first-appearance order here, so the first maximum is the
  // earliest-supported one.
  int best = 0;
  for (const auto& [s, n] : r.counts) {
    if (n > best) {
      best = n;
      r.winner = s;
    }
  }
  std::sort(r.counts.begin(), r.counts.end());
  return r;
}

double enumerate_correct_at_k(const std::vector<bool>& pattern, std::size_t k) {
  const std::size_t n = pattern.size();
  std::uint64_t subsets = 0, hits = 0;
  for (std::uint32_t mask = 0; mask < (1u << n); ++mask) {
    if (static_cast<std::size_t>(__builtin_popcount(mask)) != k) continue;
    ++subsets;
    for (std::size_t i = 0; i < n; ++i) {
      if ((mask >> i & 1u) && pattern[i]) {
        ++hits;
        break;
      }
    }
  }
  return static_cast<double>(hits) / static_cast<double>(subsets);
}

}  // namespace oracle
