#pragma once

#include <atomic>
#include <chrono>
#include <cstdint>
#include <functional>
#include <mutex>
#include <string>
#include <string_view>
#include <vector>

#include <json.hpp>

#include "tablemine/cost.hpp"

namespace tablemine::llm {

enum class Role { System, User, Assistant };

std::string_view to_string(Role role);
Role role_from_string(std::string_view s);

struct Message {
  Role role = Role::User;
  std::string content;

  bool operator==(const Message&) const = default;
};

struct Usage {
  std::uint64_t input_tokens = 0;
  std::uint64_t output_tokens = 0;

  bool operator==(const Usage&) const = default;
};

struct ChatRequest {
  std::string model;
  std::vector<Message> messages;
  double temperature = 0.0;
  double frequency_penalty = 0.0;
  double presence_penalty = 0.0;

  bool operator==(const ChatRequest&) const = default;
};

struct ChatResponse {
  std::string content;
  // "stop", or "length" when the reply hit the output token cap.
  std::string finish_reason = "stop";
  Usage usage;
  std::string model;
};

struct ChatExchange {
  ChatRequest request;
  ChatResponse response;
};

// Chat-completions wire format.
nlohmann::json to_wire(const ChatRequest& request);
ChatRequest request_from_wire(const nlohmann::json& j);
nlohmann::json to_wire(const ChatResponse& response);
// Throws Error(LlmTransport) when the body lacks choices[0].message.content.
ChatResponse response_from_wire(const nlohmann::json& j);

// SHA-256 of the compact wire form of the request; keys are sorted, so equal
// requests share a digest.
std::string request_digest(const ChatRequest& request);

// Local stand-in for a tokenizer, used only by the offline mock: ceil(bytes/4).
std::uint64_t estimate_tokens(std::string_view text);

class ChatClient {
 public:
  virtual ~ChatClient() = default;
  virtual ChatResponse complete(const ChatRequest& request) = 0;
};

using Clock = std::function<std::string()>;

// UTC now, ISO-8601 with seconds.
std::string utc_timestamp();

// Appends one ledger entry per call: call_id = "<prefix>#NNN", counting from 1.
class MeteredClient : public ChatClient {
 public:
  MeteredClient(ChatClient& inner, cost::UsageLedger& ledger, cost::Phase phase, std::string call_prefix,
                Clock clock = utc_timestamp);

  ChatResponse complete(const ChatRequest& request) override;

  std::size_t calls() const { return seq_.load(); }

 private:
  ChatClient& inner_;
  cost::UsageLedger& ledger_;
  cost::Phase phase_;
  std::string prefix_;
  Clock clock_;
  std::atomic<std::size_t> seq_{0};
};

using Sleeper = std::function<void(std::chrono::milliseconds)>;

void real_sleep(std::chrono::milliseconds d);

// Caps the request rate across every client sharing it: at most
// `max_requests` starts in any sliding window of `window`. Zero disables it.
class RateLimiter {
 public:
  explicit RateLimiter(std::size_t max_requests = 0, std::chrono::milliseconds window = std::chrono::seconds(60),
                       Sleeper sleeper = real_sleep);

  void acquire();

 private:
  std::size_t max_requests_;
  std::chrono::milliseconds window_;
  Sleeper sleeper_;
  std::mutex mu_;
  std::vector<std::chrono::steady_clock::time_point> starts_;
};

class RateLimitedClient : public ChatClient {
 public:
  RateLimitedClient(ChatClient& inner, RateLimiter& limiter) : inner_(inner), limiter_(limiter) {}

  ChatResponse complete(const ChatRequest& request) override {
    limiter_.acquire();
    return inner_.complete(request);
  }

 private:
  ChatClient& inner_;
  RateLimiter& limiter_;
};

}  // namespace tablemine::llm
