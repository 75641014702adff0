#pragma once

// Embedding and completion providers used by the annotation loop. Providers
// never see loop state; they map texts to vectors and prompts to responses.

#include <chrono>
#include <filesystem>
#include <map>
#include <mutex>
#include <stdexcept>
#include <string>
#include <vector>

#include "cotforge/jsonl.hpp"

namespace cotforge {

class ProviderError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

struct RetryPolicy {
  int max_attempts = 3;
  std::chrono::milliseconds backoff{500};  // doubled after each failed attempt
  int max_concurrency = 4;                 // in-flight requests per round
};

class ProviderPort {
 public:
  virtual ~ProviderPort() = default;
  virtual std::vector<std::vector<double>> embed(const std::vector<std::string>& texts) = 0;
  virtual std::string complete(const std::string& prompt) = 0;
  virtual RetryPolicy retry_policy() const { return {}; }
  virtual std::string name() const = 0;
};

// Deterministic offline embedder: hashed word unigrams and bigrams into a
// fixed number of buckets. Good enough to make lexically similar questions
// neighbours.
std::vector<double> hashed_embedding(const std::string& text, std::size_t dim = 256);

// Scripted provider for tests and offline runs. `responses` maps a target
// question text to the completion returned on its 1st, 2nd, ... request; the
// last entry repeats once the list is exhausted. Unknown questions raise
// ProviderError.
class MockProvider final : public ProviderPort {
 public:
  explicit MockProvider(std::map<std::string, std::vector<std::string>> responses, std::size_t dim = 256);

  std::vector<std::vector<double>> embed(const std::vector<std::string>& texts) override;
  std::string complete(const std::string& prompt) override;
  RetryPolicy retry_policy() const override { return {1, std::chrono::milliseconds(0), 8}; }
  std::string name() const override { return "mock"; }

  // Number of complete() calls seen for a question text.
  int attempts(const std::string& question_text) const;

 private:
  std::map<std::string, std::vector<std::string>> responses_;
  std::map<std::string, int> attempts_;
  mutable std::mutex mu_;
  std::size_t dim_;
};

struct HttpProviderConfig {
  std::string endpoint;  // e.g. https://api.openai.com
  std::string model;     // chat model
  std::string embedding_model;
  std::string api_key;
  double temperature = 0.0;
  RetryPolicy retry;
};

// OpenAI-compatible REST provider (/v1/embeddings, /v1/chat/completions).
class HttpProvider final : public ProviderPort {
 public:
  explicit HttpProvider(HttpProviderConfig cfg);

  std::vector<std::vector<double>> embed(const std::vector<std::string>& texts) override;
  std::string complete(const std::string& prompt) override;
  RetryPolicy retry_policy() const override { return cfg_.retry; }
  std::string name() const override { return "http"; }

 private:
  json post(const std::string& path, const json& body);
  HttpProviderConfig cfg_;
};

// Hex SHA-256 of a request payload; the key used in transcripts.
std::string request_hash(const std::string& payload);

struct TranscriptEntry {
  std::string request_hash;
  std::string prompt;
  std::string response;
  std::string ts;  // ISO-8601 UTC
};

json to_json(const TranscriptEntry& e);
TranscriptEntry transcript_entry_from_json(const json& j);

std::vector<TranscriptEntry> read_transcript(const std::filesystem::path& path);
void write_transcript(const std::filesystem::path& path, const std::vector<TranscriptEntry>& entries);

// Prompt text used for an embedding request in transcripts.
std::string embed_prompt(const std::string& text);

// Entry stamped with the current UTC time.
TranscriptEntry make_transcript_entry(const std::string& prompt, const std::string& response);

// Answers from a recorded transcript. Entries sharing a request hash are
// served in file order; the last one repeats. Embedding requests are recorded
// with embed_prompt(text) and a JSON array response.
class ReplayProvider final : public ProviderPort {
 public:
  explicit ReplayProvider(const std::vector<TranscriptEntry>& entries);

  std::vector<std::vector<double>> embed(const std::vector<std::string>& texts) override;
  std::string complete(const std::string& prompt) override;
  RetryPolicy retry_policy() const override { return {1, std::chrono::milliseconds(0), 8}; }
  std::string name() const override { return "replay"; }

 private:
  std::string lookup(const std::string& prompt);

  std::map<std::string, std::vector<std::string>> responses_;
  std::map<std::string, std::size_t> served_;
  std::mutex mu_;
};

// Calls the provider under its retry policy. The last error is rethrown as
// ProviderError once attempts run out.
std::string complete_with_retry(ProviderPort& provider, const std::string& prompt);
std::vector<std::vector<double>> embed_with_retry(ProviderPort& provider, const std::vector<std::string>& texts);

}  // namespace cotforge
