#include "cotforge/provider.hpp"

#include <openssl/evp.h>

#include <cctype>
#include <cmath>
#include <cstdint>
#include <ctime>
#include <thread>

#include "httplib.h"

#include "cotforge/annotator.hpp"

namespace cotforge {

namespace {

std::uint64_t fnv1a(std::string_view s) {
  std::uint64_t h = 1469598103934665603ull;
  for (unsigned char c : s) {
    h ^= c;
    h *= 1099511628211ull;
  }
  return h;
}

std::vector<std::string> words(const std::string& text) {
  std::vector<std::string> out;
  std::string cur;
  for (unsigned char c : text) {
    if (std::isalnum(c)) {
      cur.push_back(static_cast<char>(std::tolower(c)));
    } else if (!cur.empty()) {
      out.push_back(std::move(cur));
      cur.clear();
    }
  }
  if (!cur.empty()) out.push_back(std::move(cur));
  return out;
}

std::string utc_now() {
  const std::time_t t = std::time(nullptr);
  std::tm tm{};
  gmtime_r(&t, &tm);
  char buf[32];
  std::strftime(buf, sizeof buf, "%Y-%m-%dT%H:%M:%SZ", &tm);
  return buf;
}

}  // namespace

std::vector<double> hashed_embedding(const std::string& text, std::size_t dim) {
  std::vector<double> v(dim, 0.0);
  if (dim == 0) return v;
  const auto ws = words(text);
  auto bump = [&](const std::string& feature, double weight) {
    const auto h = fnv1a(feature);
    v[h % dim] += (h >> 63) ? -weight : weight;
  };
  for (std::size_t i = 0; i < ws.size(); ++i) {
    bump(ws[i], 1.0);
    if (i + 1 < ws.size()) bump(ws[i] + ' ' + ws[i + 1], 0.5);
  }
  return v;
}

MockProvider::MockProvider(std::map<std::string, std::vector<std::string>> responses, std::size_t dim)
    : responses_(std::move(responses)), dim_(dim) {}

std::vector<std::vector<double>> MockProvider::embed(const std::vector<std::string>& texts) {
  std::vector<std::vector<double>> out;
  out.reserve(texts.size());
  for (const auto& t : texts) out.push_back(hashed_embedding(t, dim_));
  return out;
}

std::string MockProvider::complete(const std::string& prompt) {
  auto target = prompt_target_question(prompt);
  if (!target) throw ProviderError("mock: prompt has no target question");
  auto it = responses_.find(*target);
  if (it == responses_.end() || it->second.empty()) throw ProviderError("mock: no scripted response for '" + *target + "'");
  int attempt;
  {
    std::lock_guard lock(mu_);
    attempt = attempts_[*target]++;
  }
  const auto& script = it->second;
  return script[std::min<std::size_t>(static_cast<std::size_t>(attempt), script.size() - 1)];
}

int MockProvider::attempts(const std::string& question_text) const {
  std::lock_guard lock(mu_);
  auto it = attempts_.find(question_text);
  return it == attempts_.end() ? 0 : it->second;
}

HttpProvider::HttpProvider(HttpProviderConfig cfg) : cfg_(std::move(cfg)) {
  if (cfg_.endpoint.empty()) throw InvalidInput("provider endpoint is empty");
  if (cfg_.model.empty()) throw InvalidInput("provider model is empty");
  if (cfg_.embedding_model.empty()) throw InvalidInput("provider embedding_model is empty");
}

json HttpProvider::post(const std::string& path, const json& body) {
  httplib::Client client(cfg_.endpoint);
  client.set_connection_timeout(10);
  client.set_read_timeout(120);
  httplib::Headers headers;
  if (!cfg_.api_key.empty()) headers.emplace("Authorization", "Bearer " + cfg_.api_key);
  auto res = client.Post(path, headers, body.dump(), "application/json");
  if (!res) throw ProviderError(cfg_.endpoint + path + ": " + httplib::to_string(res.error()));
  if (res->status != 200) {
    throw ProviderError(cfg_.endpoint + path + ": HTTP " + std::to_string(res->status) + ": " + res->body.substr(0, 200));
  }
  try {
    return json::parse(res->body);
  } catch (const json::exception& e) {
    throw ProviderError(cfg_.endpoint + path + ": malformed response: " + e.what());
  }
}

std::vector<std::vector<double>> HttpProvider::embed(const std::vector<std::string>& texts) {
  if (texts.empty()) return {};
  const json reply = post("/v1/embeddings", json{{"model", cfg_.embedding_model}, {"input", texts}});
  std::vector<std::vector<double>> out(texts.size());
  try {
    const auto& data = reply.at("data");
    if (data.size() != texts.size()) throw ProviderError("embeddings: expected " + std::to_string(texts.size()) + " vectors");
    for (std::size_t i = 0; i < data.size(); ++i) {
      const auto idx = data[i].value("index", i);
      if (idx >= out.size()) throw ProviderError("embeddings: index out of range");
      out[idx] = data[i].at("embedding").get<std::vector<double>>();
    }
  } catch (const json::exception& e) {
    throw ProviderError(std::string("embeddings: unexpected response shape: ") + e.what());
  }
  return out;
}

std::string HttpProvider::complete(const std::string& prompt) {
  const json body{{"model", cfg_.model},
                  {"temperature", cfg_.temperature},
                  {"messages", json::array({json{{"role", "user"}, {"content", prompt}}})}};
  const json reply = post("/v1/chat/completions", body);
  try {
    return reply.at("choices").at(0).at("message").at("content").get<std::string>();
  } catch (const json::exception& e) {
    throw ProviderError(std::string("chat: unexpected response shape: ") + e.what());
  }
}

std::string request_hash(const std::string& payload) {
  unsigned char md[EVP_MAX_MD_SIZE];
  unsigned int len = 0;
  if (EVP_Digest(payload.data(), payload.size(), md, &len, EVP_sha256(), nullptr) != 1) {
    throw std::runtime_error("sha256 failed");
  }
  static constexpr char hex[] = "0123456789abcdef";
  std::string out;
  out.reserve(len * 2);
  for (unsigned int i = 0; i < len; ++i) {
    out.push_back(hex[md[i] >> 4]);
    out.push_back(hex[md[i] & 0xf]);
  }
  return out;
}

json to_json(const TranscriptEntry& e) {
  return json{{"request_hash", e.request_hash}, {"prompt", e.prompt}, {"response", e.response}, {"ts", e.ts}};
}

TranscriptEntry transcript_entry_from_json(const json& j) {
  TranscriptEntry e;
  e.prompt = j.at("prompt").get<std::string>();
  e.response = j.at("response").get<std::string>();
  e.request_hash = j.value("request_hash", request_hash(e.prompt));
  e.ts = j.value("ts", "");
  return e;
}

std::vector<TranscriptEntry> read_transcript(const std::filesystem::path& path) {
  std::vector<TranscriptEntry> out;
  for_each_jsonl(path, [&](const json& j, std::size_t) { out.push_back(transcript_entry_from_json(j)); });
  return out;
}

void write_transcript(const std::filesystem::path& path, const std::vector<TranscriptEntry>& entries) {
  std::vector<json> rows;
  rows.reserve(entries.size());
  for (const auto& e : entries) rows.push_back(to_json(e));
  write_jsonl(path, rows);
}

std::string embed_prompt(const std::string& text) { return "embed:" + text; }

ReplayProvider::ReplayProvider(const std::vector<TranscriptEntry>& entries) {
  for (const auto& e : entries) responses_[e.request_hash].push_back(e.response);
}

std::string ReplayProvider::lookup(const std::string& prompt) {
  const auto h = request_hash(prompt);
  std::lock_guard lock(mu_);
  auto it = responses_.find(h);
  if (it == responses_.end()) throw ProviderError("replay: no recorded response for request " + h.substr(0, 12));
  auto& n = served_[h];
  const auto& r = it->second[std::min(n, it->second.size() - 1)];
  ++n;
  return r;
}

std::vector<std::vector<double>> ReplayProvider::embed(const std::vector<std::string>& texts) {
  std::vector<std::vector<double>> out;
  out.reserve(texts.size());
  for (const auto& t : texts) {
    try {
      out.push_back(json::parse(lookup(embed_prompt(t))).get<std::vector<double>>());
    } catch (const json::exception& e) {
      throw ProviderError(std::string("replay: malformed embedding: ") + e.what());
    }
  }
  return out;
}

std::string ReplayProvider::complete(const std::string& prompt) { return lookup(prompt); }

namespace {

template <class Fn>
auto retrying(ProviderPort& provider, Fn&& fn) {
  const auto policy = provider.retry_policy();
  const int attempts = std::max(policy.max_attempts, 1);
  auto backoff = policy.backoff;
  std::string last;
  for (int i = 0; i < attempts; ++i) {
    try {
      return fn();
    } catch (const InvalidInput&) {
      throw;
    } catch (const std::exception& e) {
      last = e.what();
    }
    if (i + 1 < attempts && backoff.count() > 0) {
      std::this_thread::sleep_for(backoff);
      backoff *= 2;
    }
  }
  throw ProviderError(provider.name() + ": " + last + " (after " + std::to_string(attempts) + " attempt" +
                      (attempts == 1 ? "" : "s") + ")");
}

}  // namespace

std::string complete_with_retry(ProviderPort& provider, const std::string& prompt) {
  return retrying(provider, [&] { return provider.complete(prompt); });
}

std::vector<std::vector<double>> embed_with_retry(ProviderPort& provider, const std::vector<std::string>& texts) {
  auto out = retrying(provider, [&] { return provider.embed(texts); });
  if (out.size() != texts.size()) throw ProviderError(provider.name() + ": embedding count mismatch");
  return out;
}

TranscriptEntry make_transcript_entry(const std::string& prompt, const std::string& response) {
  return TranscriptEntry{request_hash(prompt), prompt, response, utc_now()};
}

}  // namespace cotforge
