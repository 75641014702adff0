#include "doctest.h"

#include <atomic>
#include <cmath>
#include <thread>

#include "httplib.h"

#include "test_support.hpp"

#include "cotforge/annotator.hpp"
#include "cotforge/provider.hpp"

using namespace cotforge;

namespace {

// OpenAI-compatible stub on an ephemeral port. The first `fail_first`
// requests get HTTP 503.
class StubServer {
 public:
  explicit StubServer(int fail_first = 0) : fail_first_(fail_first) {
    server_.Post("/v1/chat/completions", [this](const httplib::Request& req, httplib::Response& res) {
      if (gate(res)) return;
      last_auth = req.get_header_value("Authorization");
      const auto body = json::parse(req.body);
      const auto prompt = body["messages"][0]["content"].get<std::string>();
      json reply{{"choices", json::array({json{{"message", {{"role", "assistant"}, {"content", "echo:" + prompt}}}}})}};
      res.set_content(reply.dump(), "application/json");
    });
    server_.Post("/v1/embeddings", [this](const httplib::Request& req, httplib::Response& res) {
      if (gate(res)) return;
      const auto body = json::parse(req.body);
      json data = json::array();
      // Reversed order with explicit indices, as some servers do.
      const auto& input = body["input"];
      for (std::size_t i = input.size(); i-- > 0;) {
        const double len = static_cast<double>(input[i].get<std::string>().size());
        data.push_back({{"index", i}, {"embedding", {len, 1.0}}});
      }
      res.set_content(json{{"data", data}}.dump(), "application/json");
    });
    port_ = server_.bind_to_any_port("127.0.0.1");
    thread_ = std::thread([this] { server_.listen_after_bind(); });
    server_.wait_until_ready();
  }
  ~StubServer() {
    server_.stop();
    thread_.join();
  }
  std::string endpoint() const { return "http://127.0.0.1:" + std::to_string(port_); }
  int requests() const { return requests_; }

  std::string last_auth;

 private:
  bool gate(httplib::Response& res) {
    if (requests_++ < fail_first_) {
      res.status = 503;
      res.set_content("busy", "text/plain");
      return true;
    }
    return false;
  }

  httplib::Server server_;
  std::thread thread_;
  int port_ = 0;
  int fail_first_;
  std::atomic<int> requests_{0};
};

HttpProviderConfig http_config(const std::string& endpoint) {
  HttpProviderConfig c;
  c.endpoint = endpoint;
  c.model = "m";
  c.embedding_model = "e";
  c.api_key = "sk-test";
  c.retry = {3, std::chrono::milliseconds(1), 2};
  return c;
}

}  // namespace

TEST_CASE("http provider speaks the chat and embeddings protocol") {
  StubServer server;
  HttpProvider p(http_config(server.endpoint()));
  CHECK(p.complete("hi") == "echo:hi");
  CHECK(server.last_auth == "Bearer sk-test");
  const auto v = p.embed({"a", "abc"});
  REQUIRE(v.size() == 2);
  CHECK(v[0] == std::vector<double>{1, 1});
  CHECK(v[1] == std::vector<double>{3, 1});
}

TEST_CASE("retries transient failures then gives up") {
  {
    StubServer server(2);
    HttpProvider p(http_config(server.endpoint()));
    CHECK(complete_with_retry(p, "x") == "echo:x");
    CHECK(server.requests() == 3);
  }
  {
    StubServer server(10);
    HttpProvider p(http_config(server.endpoint()));
    try {
      complete_with_retry(p, "x");
      FAIL("expected ProviderError");
    } catch (const ProviderError& e) {
      CHECK(std::string(e.what()).find("after 3 attempts") != std::string::npos);
      CHECK(std::string(e.what()).find("HTTP 503") != std::string::npos);
    }
    CHECK(server.requests() == 3);
  }
}

TEST_CASE("unreachable endpoint is a provider error") {
  auto cfg = http_config("http://127.0.0.1:1");
  cfg.retry.max_attempts = 1;
  HttpProvider p(cfg);
  CHECK_THROWS_AS(complete_with_retry(p, "x"), ProviderError);
  CHECK_THROWS_AS(HttpProvider(HttpProviderConfig{}), InvalidInput);
}

TEST_CASE("request hash is SHA-256") {
  CHECK(request_hash("") == "e3b0c44298fc1c149afbf4c8996fb92427ae41e4649b934ca495991b7852b855");
  CHECK(request_hash("abc") == "ba7816bf8f01cfea414140de5dae2223b00361a396177a9cb410ff61f20015ad");
}

TEST_CASE("hashed embedding is deterministic and lexical") {
  const auto a = hashed_embedding("The bakery sells 12 cakes");
  CHECK(a == hashed_embedding("the BAKERY sells 12 cakes!"));
  CHECK(a.size() == 256);
  auto cos = [](const std::vector<double>& x, const std::vector<double>& y) {
    double d = 0, nx = 0, ny = 0;
    for (std::size_t i = 0; i < x.size(); ++i) {
      d += x[i] * y[i];
      nx += x[i] * x[i];
      ny += y[i] * y[i];
    }
    return d / std::sqrt(nx * ny);
  };
  CHECK(cos(a, hashed_embedding("The bakery sells 15 cakes")) >
        cos(a, hashed_embedding("A train leaves the station at noon")));
}

TEST_CASE("mock provider scripts by target question") {
  MockProvider p({{"Q one", {"r1", "r2"}}});
  const auto target = testing::numeric_question("q1", 1, "Q one");
  const auto prompt = build_prompt({}, target, CoTKind::cdp, Dialect::wolfram);
  CHECK(p.complete(prompt) == "r1");
  CHECK(p.complete(prompt) == "r2");
  CHECK(p.complete(prompt) == "r2");
  CHECK(p.attempts("Q one") == 3);
  CHECK_THROWS_AS(p.complete(build_prompt({}, testing::numeric_question("q2", 1, "Q two"), CoTKind::cdp,
                                          Dialect::wolfram)),
                  ProviderError);
}

TEST_CASE("transcript round-trip and replay") {
  testing::TempDir dir;
  std::vector<TranscriptEntry> entries{make_transcript_entry("p1", "a"), make_transcript_entry("p1", "b"),
                                       make_transcript_entry(embed_prompt("t"), "[0.5, 2]")};
  CHECK(entries[0].request_hash == request_hash("p1"));
  CHECK(entries[0].ts.size() == 20);  // YYYY-MM-DDTHH:MM:SSZ
  write_transcript(dir / "t.jsonl", entries);
  const auto back = read_transcript(dir / "t.jsonl");
  REQUIRE(back.size() == 3);
  ReplayProvider r(back);
  CHECK(r.complete("p1") == "a");
  CHECK(r.complete("p1") == "b");
  CHECK(r.complete("p1") == "b");
  CHECK(r.embed({"t"}) == std::vector<std::vector<double>>{{0.5, 2}});
  CHECK_THROWS_AS(r.complete("p2"), ProviderError);
}
