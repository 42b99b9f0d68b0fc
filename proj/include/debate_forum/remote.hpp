#pragma once

#include <chrono>
#include <condition_variable>
#include <cstddef>
#include <deque>
#include <functional>
#include <mutex>
#include <string>

#include <nlohmann/json.hpp>

#include "debate_forum/chat.hpp"

namespace debate_forum {

inline constexpr const char* kApiKeyEnv = "DEBATE_FORUM_API_KEY";

struct RemoteBackendConfig {
  std::string base_url = "https://api.openai.com/v1";
  std::string model_name = "gpt-4o-mini";
  std::string api_key;  // never logged or echoed
  std::size_t max_attempts = 3;
  std::chrono::milliseconds backoff_base{1000};
  double backoff_jitter = 0.2;  // +/- fraction
  std::size_t requests_per_minute = 500;
  std::chrono::seconds timeout{60};
  // Sliding window for the rate cap; 60 s outside of tests.
  std::chrono::milliseconds rate_window{60'000};

  void validate() const;  // throws ConfigError
  // Copy of `base` with api_key taken from DEBATE_FORUM_API_KEY (empty if unset).
  static RemoteBackendConfig from_environment(RemoteBackendConfig base);
};

// Sliding-window limiter: at most `max_requests` grants in any window of
// length `window`. Safe for concurrent callers.
class RateLimiter {
 public:
  using Clock = std::chrono::steady_clock;

  RateLimiter(std::size_t max_requests, Clock::duration window);

  // Blocks until a slot is free; returns the grant time.
  Clock::time_point acquire();

  std::size_t max_requests() const { return max_requests_; }
  Clock::duration window() const { return window_; }

 private:
  std::size_t max_requests_;
  Clock::duration window_;
  std::mutex mu_;
  std::condition_variable cv_;
  std::deque<Clock::time_point> grants_;
};

// OpenAI-compatible chat-completions request body.
nlohmann::json build_chat_body(const ChatRequest& request, const std::string& model);
// Extracts choices[0].message.content; throws std::runtime_error on shape errors.
std::string extract_reply_text(const std::string& response_body);

struct SplitUrl {
  std::string origin;  // scheme://host[:port]
  std::string path;    // prefix without trailing slash, may be empty
};
SplitUrl split_base_url(const std::string& base_url);

// Shared HTTP client for all remote agents of an experiment; owns the rate
// limiter so the cap holds across concurrent debates.
class RemoteClient {
 public:
  explicit RemoteClient(RemoteBackendConfig config);

  ChatResponse respond(const ChatRequest& request);

  const RemoteBackendConfig& config() const { return config_; }
  RateLimiter& limiter() { return limiter_; }

 private:
  RemoteBackendConfig config_;
  SplitUrl url_;
  RateLimiter limiter_;
};

// One-shot call with a private limiter. Throws BackendError.
ChatResponse respond_remote(const ChatRequest& request, const RemoteBackendConfig& config);

}  // namespace debate_forum
