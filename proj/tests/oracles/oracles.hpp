#pragma once

// Independent reference implementations used to cross-check the library.
// Nothing here calls into the code under test except to build inputs.

#include <gmpxx.h>

#include <cstdint>
#include <optional>
#include <random>
#include <string>
#include <vector>

namespace oracle {

// Straight-line arithmetic programs over v1..vN.
struct Node {
  char op = 'n';  // 'n' literal, 'v' variable, '~' negation, or one of + - * /
  long literal = 0;
  int var = 0;  // 1-based
  std::vector<Node> kids;
};

struct Program {
  std::vector<Node> statements;  // statement i assigns v(i+1)
  bool assign_answer = false;    // append "answer = vN"
};

struct RenderStyle {
  bool semicolons = false;
  bool comments = false;
  bool extra_parens = false;
};

Program random_program(std::mt19937_64& rng, int max_statements = 20, int max_depth = 3);
std::string render(const Program& p, const RenderStyle& style, std::mt19937_64& rng);

enum class RefError { none, division_by_zero, magnitude_limit };

struct RefResult {
  RefError error = RefError::none;
  std::vector<mpq_class> values;  // v1..vK, up to the failing statement
};

// Exact evaluation with GMP rationals. Every literal and every arithmetic
// result must keep |numerator| and denominator within `bound`.
RefResult reference_eval(const Program& p, double bound = 1e100);

// Majority vote over letters 'A'..; '-' marks a null result. Returns the
// winning symbol ('-' allowed when nulls are kept) or nullopt on abstention.
struct VoteRef {
  std::optional<char> winner;
  std::vector<std::pair<char, int>> counts;  // sorted by symbol
};
VoteRef brute_vote(const std::string& answers, bool filter_null);

// Probability that a uniformly random k-subset of the pattern holds a set
// bit, by enumerating every k-subset.
double enumerate_correct_at_k(const std::vector<bool>& pattern, std::size_t k);

}  // namespace oracle
