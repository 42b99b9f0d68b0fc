#include <doctest.h>

#include <algorithm>
#include <fstream>
#include <thread>

#include "debate_forum/errors.hpp"
#include "debate_forum/remote.hpp"
#include "oracles.hpp"
#include "stub_server.hpp"
#include "test_support.hpp"

using namespace debate_forum;
using namespace std::chrono_literals;

namespace {

RemoteBackendConfig stub_config(const testing::StubServer& server) {
  RemoteBackendConfig c;
  c.base_url = server.base_url();
  c.api_key = "sk-test-secret-123";
  c.backoff_base = 5ms;
  c.timeout = 5s;
  return c;
}

ChatRequest sample_request() {
  ChatRequest r;
  r.system_prompt = "You are Debater-1.";
  r.messages = {{"user", "Question: Why?\n\nOptions:\nA) x\nB) y"}, {"Debater-0", "I pick A."}};
  r.temperature = 0.2;
  r.max_reply_tokens = 64;
  return r;
}

nlohmann::json load_json(const std::string& path) {
  std::ifstream in(path);
  return nlohmann::json::parse(in);
}

}  // namespace

TEST_CASE("stubbed endpoint echo") {
  testing::StubServer server([](std::size_t, const std::string&) {
    return testing::StubServer::Reply{200, testing::StubServer::completion("ANSWER: A")};
  });
  const ChatResponse r = respond_remote(sample_request(), stub_config(server));
  CHECK(r.text == "ANSWER: A");
  CHECK(r.attempt_count == 1);
  CHECK(r.backend_label == "remote:gpt-4o-mini");
  REQUIRE(server.auth_headers().size() == 1);
  CHECK(server.auth_headers()[0] == "Bearer sk-test-secret-123");
}

TEST_CASE("request bodies follow the chat-completions schema") {
  testing::StubServer server([](std::size_t, const std::string&) {
    return testing::StubServer::Reply{200, testing::StubServer::completion("ok")};
  });
  respond_remote(sample_request(), stub_config(server));
  const auto schema = load_json(testing::fixture("chat_completions_request.schema.json"));
  const auto body = nlohmann::json::parse(server.bodies().at(0));
  CHECK(oracle::validate_schema(body, schema) == "");
  CHECK(body["model"] == "gpt-4o-mini");
  CHECK(body["messages"][0]["role"] == "system");
  CHECK(body["messages"][2]["content"] == "Debater-0: I pick A.");
  CHECK(body["max_tokens"] == 64);

  // the recorded fixture validates, and the validator does reject bad bodies
  CHECK(oracle::validate_schema(load_json(testing::fixture("chat_completions_request.recorded.json")), schema) == "");
  auto bad = body;
  bad["messages"][0]["role"] = "wizard";
  CHECK(oracle::validate_schema(bad, schema) != "");
  bad = body;
  bad.erase("model");
  CHECK(oracle::validate_schema(bad, schema) != "");
}

TEST_CASE("429 twice then success") {
  testing::StubServer server([](std::size_t i, const std::string&) {
    if (i < 2) return testing::StubServer::Reply{429, R"({"error":"slow down"})"};
    return testing::StubServer::Reply{200, testing::StubServer::completion("ANSWER: B")};
  });
  const ChatResponse r = respond_remote(sample_request(), stub_config(server));
  CHECK(r.attempt_count == 3);
  CHECK(r.text == "ANSWER: B");
}

TEST_CASE("persistent 500 exhausts retries") {
  testing::StubServer server([](std::size_t, const std::string&) {
    return testing::StubServer::Reply{500, "boom"};
  });
  auto config = stub_config(server);
  config.max_attempts = 3;
  try {
    respond_remote(sample_request(), config);
    FAIL("expected BackendError");
  } catch (const BackendError& e) {
    CHECK(e.kind() == BackendError::Kind::Unavailable);
    CHECK(std::string(e.what()).find("sk-test-secret") == std::string::npos);
  }
  CHECK(server.bodies().size() == 3);
}

TEST_CASE("other 4xx is rejected immediately with a body excerpt") {
  testing::StubServer server([](std::size_t, const std::string&) {
    return testing::StubServer::Reply{401, R"({"error":"invalid api key"})"};
  });
  try {
    respond_remote(sample_request(), stub_config(server));
    FAIL("expected BackendError");
  } catch (const BackendError& e) {
    CHECK(e.kind() == BackendError::Kind::Rejected);
    CHECK(std::string(e.what()).find("invalid api key") != std::string::npos);
    CHECK(std::string(e.what()).find("sk-test-secret") == std::string::npos);
  }
  CHECK(server.bodies().size() == 1);
}

TEST_CASE("malformed success bodies are retried") {
  testing::StubServer server([](std::size_t i, const std::string&) {
    if (i == 0) return testing::StubServer::Reply{200, "not json"};
    return testing::StubServer::Reply{200, testing::StubServer::completion("ANSWER: C")};
  });
  CHECK(respond_remote(sample_request(), stub_config(server)).attempt_count == 2);
}

TEST_CASE("unreachable endpoint is unavailable") {
  RemoteBackendConfig c;
  c.base_url = "http://127.0.0.1:1/v1";
  c.api_key = "k";
  c.backoff_base = 1ms;
  c.timeout = 1s;
  CHECK_THROWS_AS(respond_remote(sample_request(), c), BackendError);
}

TEST_CASE("config validation") {
  RemoteBackendConfig c;
  CHECK_THROWS_AS(c.validate(), ConfigError);  // no key
  c.api_key = "k";
  c.max_attempts = 0;
  CHECK_THROWS_AS(c.validate(), ConfigError);
  c.max_attempts = 1;
  c.requests_per_minute = 0;
  CHECK_THROWS_AS(c.validate(), ConfigError);
  CHECK(split_base_url("https://api.openai.com/v1/").origin == "https://api.openai.com");
  CHECK(split_base_url("https://api.openai.com/v1/").path == "/v1");
  CHECK(split_base_url("http://localhost:8080").path.empty());
  CHECK_THROWS_AS(split_base_url("localhost"), ConfigError);
}

TEST_CASE("rate limiter: no window ever holds more than the cap") {
  constexpr std::size_t cap = 20;
  const auto window = 300ms;
  RateLimiter limiter(cap, window);
  std::vector<RateLimiter::Clock::time_point> grants(100);
  {
    std::vector<std::jthread> threads;
    for (std::size_t i = 0; i < grants.size(); ++i) {
      threads.emplace_back([&, i] { grants[i] = limiter.acquire(); });
    }
  }
  std::sort(grants.begin(), grants.end());
  for (std::size_t i = 0; i + cap < grants.size(); ++i) {
    REQUIRE(grants[i + cap] - grants[i] >= window);
  }
  // and it is not needlessly slow: 100 grants at 20 per window need 4 windows
  CHECK(grants.back() - grants.front() < 4 * window + 200ms);
}

TEST_CASE("rate cap holds across 100 concurrent remote calls") {
  testing::StubServer server([](std::size_t, const std::string&) {
    return testing::StubServer::Reply{200, testing::StubServer::completion("ANSWER: A")};
  });
  auto config = stub_config(server);
  config.requests_per_minute = 25;
  config.rate_window = 400ms;
  RemoteClient client(config);
  {
    std::vector<std::jthread> threads;
    for (int i = 0; i < 100; ++i) {
      threads.emplace_back([&] { client.respond(sample_request()); });
    }
  }
  auto arrivals = server.arrivals();
  REQUIRE(arrivals.size() == 100);
  std::sort(arrivals.begin(), arrivals.end());
  // arrivals lag grants by network jitter, so allow 50 ms of slack here;
  // the limiter itself is checked exactly above.
  for (std::size_t i = 0; i + 25 < arrivals.size(); ++i) {
    REQUIRE(arrivals[i + 25] - arrivals[i] >= config.rate_window - 50ms);
  }
}
