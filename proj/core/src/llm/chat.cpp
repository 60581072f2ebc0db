#include "tablemine/llm/chat.hpp"

#include <cstdio>
#include <ctime>
#include <thread>

#include "tablemine/error.hpp"
#include "tablemine/io.hpp"

namespace tablemine::llm {

std::string_view to_string(Role role) {
  switch (role) {
    case Role::System: return "system";
    case Role::User: return "user";
    case Role::Assistant: return "assistant";
  }
  return "user";
}

Role role_from_string(std::string_view s) {
  if (s == "system") return Role::System;
  if (s == "user") return Role::User;
  if (s == "assistant") return Role::Assistant;
  throw Error(ErrorCode::InvalidInput, "unknown chat role: " + std::string(s));
}

nlohmann::json to_wire(const ChatRequest& request) {
  nlohmann::json messages = nlohmann::json::array();
  for (const auto& m : request.messages) messages.push_back({{"role", to_string(m.role)}, {"content", m.content}});
  return {{"model", request.model},
          {"messages", std::move(messages)},
          {"temperature", request.temperature},
          {"frequency_penalty", request.frequency_penalty},
          {"presence_penalty", request.presence_penalty}};
}

ChatRequest request_from_wire(const nlohmann::json& j) {
  try {
    ChatRequest r;
    r.model = j.at("model").get<std::string>();
    for (const auto& m : j.at("messages")) {
      r.messages.push_back({role_from_string(m.at("role").get<std::string>()), m.at("content").get<std::string>()});
    }
    r.temperature = j.value("temperature", 0.0);
    r.frequency_penalty = j.value("frequency_penalty", 0.0);
    r.presence_penalty = j.value("presence_penalty", 0.0);
    return r;
  } catch (const nlohmann::json::exception& e) {
    throw Error(ErrorCode::InvalidInput, std::string("chat request: ") + e.what());
  }
}

nlohmann::json to_wire(const ChatResponse& response) {
  return {{"object", "chat.completion"},
          {"model", response.model},
          {"choices",
           {{{"index", 0},
             {"message", {{"role", "assistant"}, {"content", response.content}}},
             {"finish_reason", response.finish_reason}}}},
          {"usage",
           {{"prompt_tokens", response.usage.input_tokens},
            {"completion_tokens", response.usage.output_tokens},
            {"total_tokens", response.usage.input_tokens + response.usage.output_tokens}}}};
}

ChatResponse response_from_wire(const nlohmann::json& j) {
  try {
    ChatResponse r;
    const auto& choice = j.at("choices").at(0);
    const auto& content = choice.at("message").at("content");
    r.content = content.is_null() ? std::string{} : content.get<std::string>();
    if (const auto it = choice.find("finish_reason"); it != choice.end() && it->is_string()) {
      r.finish_reason = it->get<std::string>();
    }
    if (const auto it = j.find("usage"); it != j.end() && it->is_object()) {
      r.usage.input_tokens = it->value("prompt_tokens", std::uint64_t{0});
      r.usage.output_tokens = it->value("completion_tokens", std::uint64_t{0});
    }
    r.model = j.value("model", std::string{});
    return r;
  } catch (const nlohmann::json::exception& e) {
    throw Error(ErrorCode::LlmTransport, std::string("malformed completion body: ") + e.what());
  }
}

std::string request_digest(const ChatRequest& request) { return io::sha256_hex(to_wire(request).dump()); }

std::uint64_t estimate_tokens(std::string_view text) { return (text.size() + 3) / 4; }

std::string utc_timestamp() {
  const std::time_t now = std::time(nullptr);
  std::tm tm{};
  gmtime_r(&now, &tm);
  char buf[32];
  std::strftime(buf, sizeof buf, "%Y-%m-%dT%H:%M:%SZ", &tm);
  return buf;
}

MeteredClient::MeteredClient(ChatClient& inner, cost::UsageLedger& ledger, cost::Phase phase,
                             std::string call_prefix, Clock clock)
    : inner_(inner), ledger_(ledger), phase_(phase), prefix_(std::move(call_prefix)), clock_(std::move(clock)) {}

ChatResponse MeteredClient::complete(const ChatRequest& request) {
  ChatResponse response = inner_.complete(request);
  const std::size_t n = ++seq_;
  char seq[16];
  std::snprintf(seq, sizeof seq, "#%03zu", n);
  ledger_.append({clock_(), request.model, phase_, response.usage.input_tokens, response.usage.output_tokens,
                  prefix_ + seq});
  return response;
}

void real_sleep(std::chrono::milliseconds d) { std::this_thread::sleep_for(d); }

RateLimiter::RateLimiter(std::size_t max_requests, std::chrono::milliseconds window, Sleeper sleeper)
    : max_requests_(max_requests), window_(window), sleeper_(std::move(sleeper)) {}

void RateLimiter::acquire() {
  if (max_requests_ == 0) return;
  std::unique_lock lock(mu_);
  for (;;) {
    const auto now = std::chrono::steady_clock::now();
    std::erase_if(starts_, [&](auto t) { return now - t >= window_; });
    if (starts_.size() < max_requests_) {
      starts_.push_back(now);
      return;
    }
    const auto wait = std::chrono::duration_cast<std::chrono::milliseconds>(starts_.front() + window_ - now);
    lock.unlock();
    sleeper_(std::max(wait, std::chrono::milliseconds(1)));
    lock.lock();
  }
}

}  // namespace tablemine::llm
