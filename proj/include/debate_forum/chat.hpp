#pragma once

#include <chrono>
#include <cstddef>
#include <string>
#include <vector>

namespace debate_forum {

struct ChatMessage {
  std::string speaker;  // "user", "assistant", or a persona display name
  std::string text;
};

struct ChatRequest {
  std::string system_prompt;
  std::vector<ChatMessage> messages;
  double temperature = 0.7;
  std::size_t max_reply_tokens = 512;
};

struct ChatResponse {
  std::string text;
  std::string backend_label;
  std::chrono::milliseconds latency{0};
  std::size_t attempt_count = 1;
};

}  // namespace debate_forum
