#pragma once

#include <filesystem>
#include <map>
#include <string>
#include <vector>

#include "cotforge/corpus.hpp"
#include "cotforge/executor.hpp"

namespace testing {

namespace fs = std::filesystem;

// Fresh directory under the system temp dir, removed on destruction.
class TempDir {
 public:
  TempDir();
  ~TempDir();
  TempDir(const TempDir&) = delete;
  TempDir& operator=(const TempDir&) = delete;
  const fs::path& path() const { return path_; }
  fs::path operator/(const std::string& name) const { return path_ / name; }

 private:
  fs::path path_;
};

std::string read_file(const fs::path& p);
void write_file(const fs::path& p, const std::string& text);

struct CliResult {
  int exit_code = -1;
  std::string out;
  std::string err;
};

// Runs the cotforge binary with `args`.
CliResult run_cli(const std::vector<std::string>& args, int timeout_ms = 60'000);

fs::path fixtures();
fs::path golden();

cotforge::MathQuestion numeric_question(const std::string& id, double gold, const std::string& text = "q");
cotforge::MathQuestion choice_question(const std::string& id, char gold,
                                       const std::vector<std::pair<char, double>>& options);
cotforge::CoTRecord wolfram_cot(const std::string& id, const std::string& qid, const std::string& text,
                                cotforge::CoTKind kind = cotforge::CoTKind::sdp);
cotforge::CoTRecord nl_cot(const std::string& id, const std::string& qid, const std::string& text);

// Scripted annotation run: `seed_count` verified seeds plus a 100-question
// working set whose mock responses verify 50, 25 and 12 questions in rounds
// 1, 2 and 3; the last 13 never verify.
struct AnnotationScenario {
  std::vector<cotforge::MathQuestion> questions;  // seeds first
  std::vector<cotforge::CoTRecord> seeds;
  std::map<std::string, std::vector<std::string>> script;  // question id -> responses
  std::map<std::string, std::vector<std::string>> script_by_text() const;
};

AnnotationScenario annotation_scenario(int seed_count = 4);

// Writes questions.jsonl, seeds.jsonl, script.json and config.json (mock
// provider, output_dir = <dir>/out) and returns the config path.
fs::path write_annotation_scenario(const AnnotationScenario& s, const fs::path& dir);

}  // namespace testing
