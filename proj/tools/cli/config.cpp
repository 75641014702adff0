#include "config.hpp"

#include <fstream>
#include <map>
#include <set>

namespace cotforge::cli {

ExecOptions RunConfig::exec_options() const {
  ExecOptions o;
  o.pipeline = pipeline;
  o.shim.command = shim_command;
  o.shim.allowlist = allowlist;
  return o;
}

const std::vector<KeyDoc>& config_keys() {
  static const std::vector<KeyDoc> keys{
      {"pipeline.tolerance", "absolute tolerance for numeric answers (default 0.001)"},
      {"pipeline.retrieval_k", "few-shot examples per prompt (default 5)"},
      {"pipeline.max_rounds", "annotation rounds before giving up (default 5)"},
      {"pipeline.samples_per_question", "expected samples per question (default 100)"},
      {"pipeline.sampling_temperature", "temperature the samples were drawn at, recorded only (default 1.0)"},
      {"pipeline.exec_timeout_ms", "per-program wall-clock limit (default 10000)"},
      {"pipeline.parallelism", "worker threads (default 4)"},
      {"pipeline.max_choice_letter", "last valid option letter (default \"E\")"},
      {"paths.questions", "questions JSONL"},
      {"paths.seeds", "verified seed CoTs JSONL"},
      {"paths.cots", "CoTs JSONL, a path or a list of paths"},
      {"paths.outcomes", "outcomes JSONL aligned with paths.cots (default <output_dir>/<cots stem>.outcomes.jsonl)"},
      {"paths.scores", "reward scores JSONL, a path or a list"},
      {"paths.output_dir", "directory for generated files (default \".\")"},
      {"provider.name", "mock | http | replay"},
      {"provider.endpoint", "base URL of an OpenAI-compatible API"},
      {"provider.model", "chat model name"},
      {"provider.embedding_model", "embedding model name"},
      {"provider.temperature", "generation temperature (default 0)"},
      {"provider.script", "mock responses: JSON object question_id -> [response, ...]"},
      {"provider.transcript", "replay source transcript JSONL"},
      {"provider.max_attempts", "attempts per request (default 3)"},
      {"provider.backoff_ms", "initial retry delay, doubled per attempt (default 500)"},
      {"provider.max_concurrency", "concurrent requests per round (default 4)"},
      {"provider.embedding_dim", "mock embedding size (default 256)"},
      {"filter_null", "drop null results before selection (default: on for choice questions)"},
      {"allowlist", "modules py programs may import (default [\"sympy\", \"math\"])"},
      {"shim_command", "command running py programs (default [\"cotforge-shim\"])"},
      {"seed", "random seed, recorded in every output (default 0)"},
      {"record_timing", "write measured wall_ms into outcomes (default false)"},
      {"select.method", "vote | rerank | weighted (default vote)"},
      {"select.pooled", "pool all CoT types per question (default false)"},
      {"stats.ks", "sample sizes for the voting curve"},
      {"stats.trials", "random subsets per k (default 50)"},
      {"stats.buckets", "null-rate bucket edges in percent (default [0,20,40,60,80,100])"},
  };
  return keys;
}

std::string keys_help(const std::vector<std::string>& keys) {
  std::map<std::string, std::string> docs;
  for (const auto& k : config_keys()) docs[k.key] = k.help;
  std::size_t width = 0;
  for (const auto& k : keys) width = std::max(width, k.size());
  std::string out = "Config keys read:\n";
  for (const auto& k : keys) out += "  " + k + std::string(width - k.size() + 2, ' ') + docs[k] + "\n";
  return out;
}

namespace {

template <class T>
T get_as(const json& v, const std::string& key) {
  try {
    return v.get<T>();
  } catch (const json::exception&) {
    throw InvalidInput("config key '" + key + "' has the wrong type");
  }
}

std::vector<std::string> path_list(const json& v, const std::string& key) {
  if (v.is_string()) return {v.get<std::string>()};
  return get_as<std::vector<std::string>>(v, key);
}

void apply_key(RunConfig& cfg, const std::string& key, const json& v) {
  auto& p = cfg.pipeline;
  if (key == "pipeline.tolerance") p.tolerance = get_as<double>(v, key);
  else if (key == "pipeline.retrieval_k") p.retrieval_k = get_as<int>(v, key);
  else if (key == "pipeline.max_rounds") p.max_rounds = get_as<int>(v, key);
  else if (key == "pipeline.samples_per_question") p.samples_per_question = get_as<int>(v, key);
  else if (key == "pipeline.sampling_temperature") p.sampling_temperature = get_as<double>(v, key);
  else if (key == "pipeline.exec_timeout_ms") p.exec_timeout_ms = get_as<std::int64_t>(v, key);
  else if (key == "pipeline.parallelism") p.parallelism = get_as<int>(v, key);
  else if (key == "pipeline.max_choice_letter") {
    const auto s = get_as<std::string>(v, key);
    if (s.size() != 1) throw InvalidInput("pipeline.max_choice_letter must be one letter");
    p.max_choice_letter = s[0];
  }
  else if (key == "paths.questions") cfg.questions = get_as<std::string>(v, key);
  else if (key == "paths.seeds") cfg.seeds = get_as<std::string>(v, key);
  else if (key == "paths.cots") cfg.cots = path_list(v, key);
  else if (key == "paths.outcomes") cfg.outcomes = path_list(v, key);
  else if (key == "paths.scores") cfg.scores = path_list(v, key);
  else if (key == "paths.output_dir") cfg.output_dir = get_as<std::string>(v, key);
  else if (key == "provider.name") cfg.provider.name = get_as<std::string>(v, key);
  else if (key == "provider.endpoint") cfg.provider.endpoint = get_as<std::string>(v, key);
  else if (key == "provider.model") cfg.provider.model = get_as<std::string>(v, key);
  else if (key == "provider.embedding_model") cfg.provider.embedding_model = get_as<std::string>(v, key);
  else if (key == "provider.temperature") cfg.provider.temperature = get_as<double>(v, key);
  else if (key == "provider.script") cfg.provider.script = get_as<std::string>(v, key);
  else if (key == "provider.transcript") cfg.provider.transcript = get_as<std::string>(v, key);
  else if (key == "provider.max_attempts") cfg.provider.max_attempts = get_as<int>(v, key);
  else if (key == "provider.backoff_ms") cfg.provider.backoff_ms = get_as<std::int64_t>(v, key);
  else if (key == "provider.max_concurrency") cfg.provider.max_concurrency = get_as<int>(v, key);
  else if (key == "provider.embedding_dim") cfg.provider.embedding_dim = get_as<int>(v, key);
  else if (key == "filter_null") cfg.filter_null = get_as<bool>(v, key);
  else if (key == "allowlist") cfg.allowlist = get_as<std::vector<std::string>>(v, key);
  else if (key == "shim_command") cfg.shim_command = get_as<std::vector<std::string>>(v, key);
  else if (key == "seed") cfg.seed = get_as<std::uint64_t>(v, key);
  else if (key == "record_timing") cfg.record_timing = get_as<bool>(v, key);
  else if (key == "select.method") cfg.method = get_as<std::string>(v, key);
  else if (key == "select.pooled") cfg.pooled = get_as<bool>(v, key);
  else if (key == "stats.ks") cfg.stats.ks = get_as<std::vector<std::size_t>>(v, key);
  else if (key == "stats.trials") cfg.stats.trials = get_as<std::size_t>(v, key);
  else if (key == "stats.buckets") cfg.stats.buckets = get_as<std::vector<double>>(v, key);
  else throw InvalidInput("unknown config key '" + key + "'");
}

}  // namespace

void apply_config(RunConfig& cfg, const json& doc) {
  if (!doc.is_object()) throw InvalidInput("config must be a JSON object");
  std::set<std::string> sections;
  for (const auto& k : config_keys()) {
    if (auto dot = k.key.find('.'); dot != std::string::npos) sections.insert(k.key.substr(0, dot));
  }
  for (const auto& [name, value] : doc.items()) {
    if (sections.count(name)) {
      if (!value.is_object()) throw InvalidInput("config section '" + name + "' must be an object");
      for (const auto& [sub, v] : value.items()) apply_key(cfg, name + "." + sub, v);
    } else {
      apply_key(cfg, name, value);
    }
  }
}

RunConfig load_config(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw InvalidInput("cannot open config " + path.string());
  json doc;
  try {
    doc = json::parse(in);
  } catch (const json::parse_error& e) {
    throw InvalidInput("config " + path.string() + ": " + e.what());
  }
  RunConfig cfg;
  apply_config(cfg, doc);
  // Relative paths in a config file are relative to the file itself.
  const auto base = path.parent_path();
  auto rebase = [&](std::string& p) {
    if (!p.empty() && std::filesystem::path(p).is_relative()) p = (base / p).lexically_normal().string();
  };
  for (auto* p : {&cfg.questions, &cfg.seeds, &cfg.provider.script, &cfg.provider.transcript}) rebase(*p);
  if (doc.contains("paths") && doc["paths"].contains("output_dir")) rebase(cfg.output_dir);
  for (auto* list : {&cfg.cots, &cfg.outcomes, &cfg.scores}) {
    for (auto& p : *list) rebase(p);
  }
  return cfg;
}

void require_file(const std::string& what, const std::string& path) {
  if (path.empty()) throw InvalidInput(what + " not given");
  if (!std::filesystem::is_regular_file(path)) throw InvalidInput(what + " '" + path + "' does not exist");
}

}  // namespace cotforge::cli
