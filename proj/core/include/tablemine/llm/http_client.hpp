#pragma once

#include <chrono>
#include <optional>
#include <string>

#include "tablemine/llm/chat.hpp"

namespace tablemine::llm {

struct RetryPolicy {
  int max_attempts = 5;
  std::chrono::milliseconds initial_backoff{1000};
  double multiplier = 2.0;
};

struct HttpConfig {
  // Any OpenAI-compatible server, e.g. "http://127.0.0.1:8089/v1".
  std::string base_url = "https://api.openai.com/v1";
  std::string api_key_env = "OPENAI_API_KEY";
  // Overrides the environment when set.
  std::optional<std::string> api_key;
  std::chrono::seconds timeout{180};
  RetryPolicy retry;
};

// POST {base_url}/chat/completions. Network errors, 429 and 5xx are retried
// with exponential backoff (a Retry-After header lengthens the wait); other
// statuses fail at once. Throws Error(LlmTransport).
class HttpChatClient : public ChatClient {
 public:
  explicit HttpChatClient(HttpConfig config, Sleeper sleeper = real_sleep);

  ChatResponse complete(const ChatRequest& request) override;

 private:
  HttpConfig config_;
  Sleeper sleeper_;
  std::string origin_;
  std::string path_prefix_;
  std::string api_key_;
};

}  // namespace tablemine::llm
