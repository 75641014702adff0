#pragma once

#include <cstdint>
#include <filesystem>
#include <optional>
#include <string>
#include <vector>

#include "cotforge/corpus.hpp"
#include "cotforge/executor.hpp"
#include "cotforge/jsonl.hpp"

namespace cotforge::cli {

// Exit codes shared by every subcommand.
inline constexpr int kExitOk = 0;
inline constexpr int kExitUsage = 2;
inline constexpr int kExitResidual = 3;
inline constexpr int kExitProvider = 4;

struct ProviderBlock {
  std::string name = "mock";  // mock | http | replay
  std::string endpoint;
  std::string model;
  std::string embedding_model;
  double temperature = 0.0;
  std::string script;      // mock: JSON object question_id -> [responses]
  std::string transcript;  // replay: transcript JSONL
  int max_attempts = 3;
  std::int64_t backoff_ms = 500;
  int max_concurrency = 4;
  int embedding_dim = 256;  // mock only
};

struct StatsBlock {
  std::vector<std::size_t> ks;  // empty: 1, 2, 4, ... up to the smallest n, plus n
  std::size_t trials = 50;
  std::vector<double> buckets{0, 20, 40, 60, 80, 100};
};

struct RunConfig {
  PipelineConfig pipeline;
  std::string questions;
  std::string seeds;
  std::vector<std::string> cots;
  std::vector<std::string> outcomes;
  std::vector<std::string> scores;
  std::string output_dir = ".";
  ProviderBlock provider;
  std::optional<bool> filter_null;  // unset: on for choice questions, off for numeric
  std::vector<std::string> allowlist{"sympy", "math"};
  std::vector<std::string> shim_command{"cotforge-shim"};
  std::uint64_t seed = 0;
  std::string method = "vote";
  bool pooled = false;
  bool record_timing = false;
  StatsBlock stats;

  ExecOptions exec_options() const;
};

// Every key the config file may contain, as "section.key" paths with a short
// description. Unknown keys are rejected.
struct KeyDoc {
  std::string key;
  std::string help;
};
const std::vector<KeyDoc>& config_keys();

// Footer for a subcommand's --help listing the keys it reads.
std::string keys_help(const std::vector<std::string>& keys);

// Throws InvalidInput on unknown keys or wrongly typed values.
void apply_config(RunConfig& cfg, const json& doc);
RunConfig load_config(const std::filesystem::path& path);

// Throws InvalidInput naming the first missing input file.
void require_file(const std::string& what, const std::string& path);

}  // namespace cotforge::cli
