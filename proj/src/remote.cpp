#include "debate_forum/remote.hpp"

#include <cmath>
#include <cstdlib>
#include <random>
#include <thread>

#include <httplib.h>

#include "debate_forum/errors.hpp"

namespace debate_forum {

namespace {

std::string excerpt(const std::string& body, std::size_t limit = 300) {
  if (body.size() <= limit) {
    return body;
  }
  return body.substr(0, limit) + "...";
}

std::chrono::milliseconds backoff_delay(const RemoteBackendConfig& config, std::size_t attempt) {
  thread_local std::mt19937_64 jitter_engine{std::random_device{}()};
  std::uniform_real_distribution<double> jitter(-config.backoff_jitter, config.backoff_jitter);
  const double base = static_cast<double>(config.backoff_base.count()) * std::ldexp(1.0, static_cast<int>(attempt) - 1);
  return std::chrono::milliseconds(static_cast<long long>(std::llround(base * (1.0 + jitter(jitter_engine)))));
}

std::string wire_role(const std::string& speaker) {
  if (speaker == "system" || speaker == "assistant" || speaker == "user") {
    return speaker;
  }
  return "user";
}

ChatResponse post_with_retries(const ChatRequest& request, const RemoteBackendConfig& config,
                               const SplitUrl& url, RateLimiter& limiter) {
  const std::string body = build_chat_body(request, config.model_name).dump();
  const std::string path = url.path + "/chat/completions";
  const httplib::Headers headers = {{"Authorization", "Bearer " + config.api_key}};
  const auto started = std::chrono::steady_clock::now();

  std::string last_problem;
  for (std::size_t attempt = 1; attempt <= config.max_attempts; ++attempt) {
    if (attempt > 1) {
      std::this_thread::sleep_for(backoff_delay(config, attempt - 1));
    }
    limiter.acquire();

    httplib::Client client(url.origin);
    client.set_connection_timeout(config.timeout);
    client.set_read_timeout(config.timeout);
    client.set_write_timeout(config.timeout);
    client.set_tcp_nodelay(true);
    auto res = client.Post(path, headers, body, "application/json");

    if (!res) {
      last_problem = "transport error: " + httplib::to_string(res.error());
      continue;
    }
    if (res->status == 429 || res->status >= 500) {
      last_problem = "HTTP " + std::to_string(res->status);
      continue;
    }
    if (res->status < 200 || res->status >= 300) {
      throw BackendError(BackendError::Kind::Rejected,
                         "HTTP " + std::to_string(res->status) + ": " + excerpt(res->body));
    }
    std::string text;
    try {
      text = extract_reply_text(res->body);
    } catch (const std::exception& e) {
      last_problem = std::string("malformed response: ") + e.what();
      continue;
    }
    if (text.empty()) {
      last_problem = "empty reply";
      continue;
    }
    ChatResponse out;
    out.text = std::move(text);
    out.backend_label = "remote:" + config.model_name;
    out.latency = std::chrono::duration_cast<std::chrono::milliseconds>(std::chrono::steady_clock::now() - started);
    out.attempt_count = attempt;
    return out;
  }
  throw BackendError(BackendError::Kind::Unavailable,
                     "remote backend unavailable after " + std::to_string(config.max_attempts) +
                         " attempts (last: " + last_problem + ")");
}

}  // namespace

void RemoteBackendConfig::validate() const {
  if (max_attempts < 1) {
    throw ConfigError("max_attempts must be at least 1");
  }
  if (requests_per_minute < 1) {
    throw ConfigError("requests_per_minute must be positive");
  }
  if (rate_window.count() <= 0) {
    throw ConfigError("rate window must be positive");
  }
  if (base_url.empty()) {
    throw ConfigError("remote base URL is empty");
  }
  if (api_key.empty()) {
    throw ConfigError(std::string("remote backend needs an API key: set the ") + kApiKeyEnv +
                      " environment variable");
  }
}

RemoteBackendConfig RemoteBackendConfig::from_environment(RemoteBackendConfig base) {
  const char* key = std::getenv(kApiKeyEnv);
  base.api_key = key != nullptr ? key : "";
  return base;
}

RateLimiter::RateLimiter(std::size_t max_requests, Clock::duration window)
    : max_requests_(max_requests), window_(window) {
  if (max_requests_ == 0) {
    throw ConfigError("rate cap must be positive");
  }
}

RateLimiter::Clock::time_point RateLimiter::acquire() {
  std::unique_lock lock(mu_);
  for (;;) {
    const auto now = Clock::now();
    while (!grants_.empty() && grants_.front() + window_ <= now) {
      grants_.pop_front();
    }
    if (grants_.size() < max_requests_) {
      grants_.push_back(now);
      return now;
    }
    cv_.wait_until(lock, grants_.front() + window_);
  }
}

nlohmann::json build_chat_body(const ChatRequest& request, const std::string& model) {
  nlohmann::json messages = nlohmann::json::array();
  if (!request.system_prompt.empty()) {
    messages.push_back({{"role", "system"}, {"content", request.system_prompt}});
  }
  for (const auto& m : request.messages) {
    const std::string role = wire_role(m.speaker);
    const std::string content = role == m.speaker ? m.text : m.speaker + ": " + m.text;
    messages.push_back({{"role", role}, {"content", content}});
  }
  return {{"model", model},
          {"messages", std::move(messages)},
          {"temperature", request.temperature},
          {"max_tokens", request.max_reply_tokens}};
}

std::string extract_reply_text(const std::string& response_body) {
  const auto doc = nlohmann::json::parse(response_body);
  return doc.at("choices").at(0).at("message").at("content").get<std::string>();
}

SplitUrl split_base_url(const std::string& base_url) {
  const auto scheme_end = base_url.find("://");
  if (scheme_end == std::string::npos) {
    throw ConfigError("base URL must include a scheme: " + base_url);
  }
  const auto path_start = base_url.find('/', scheme_end + 3);
  SplitUrl out;
  if (path_start == std::string::npos) {
    out.origin = base_url;
  } else {
    out.origin = base_url.substr(0, path_start);
    out.path = base_url.substr(path_start);
  }
  while (!out.path.empty() && out.path.back() == '/') {
    out.path.pop_back();
  }
  return out;
}

RemoteClient::RemoteClient(RemoteBackendConfig config)
    : config_((config.validate(), std::move(config))),
      url_(split_base_url(config_.base_url)),
      limiter_(config_.requests_per_minute, config_.rate_window) {}

ChatResponse RemoteClient::respond(const ChatRequest& request) {
  if (request.system_prompt.empty() && request.messages.empty()) {
    throw ConfigError("empty chat request");
  }
  return post_with_retries(request, config_, url_, limiter_);
}

ChatResponse respond_remote(const ChatRequest& request, const RemoteBackendConfig& config) {
  RemoteClient client(config);
  return client.respond(request);
}

}  // namespace debate_forum
