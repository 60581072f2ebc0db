#include "tablemine/llm/http_client.hpp"

#include <algorithm>
#include <cstdlib>

#include <httplib.h>

#include "tablemine/error.hpp"

namespace tablemine::llm {

namespace {

bool retryable(int status) { return status == 429 || status >= 500; }

std::optional<std::chrono::milliseconds> retry_after(const httplib::Result& res) {
  if (!res || !res->has_header("Retry-After")) return std::nullopt;
  const std::string v = res->get_header_value("Retry-After");
  char* end = nullptr;
  const double secs = std::strtod(v.c_str(), &end);
  if (end == v.c_str() || secs < 0) return std::nullopt;
  return std::chrono::milliseconds(static_cast<long long>(secs * 1000.0));
}

}  // namespace

HttpChatClient::HttpChatClient(HttpConfig config, Sleeper sleeper)
    : config_(std::move(config)), sleeper_(std::move(sleeper)) {
  const std::string& url = config_.base_url;
  const std::size_t scheme_end = url.find("://");
  if (scheme_end == std::string::npos) throw Error(ErrorCode::InvalidConfig, "base_url needs a scheme: " + url);
  const std::size_t path_start = url.find('/', scheme_end + 3);
  origin_ = url.substr(0, path_start);
  path_prefix_ = path_start == std::string::npos ? "" : url.substr(path_start);
  while (!path_prefix_.empty() && path_prefix_.back() == '/') path_prefix_.pop_back();

  if (config_.api_key) {
    api_key_ = *config_.api_key;
  } else if (const char* env = std::getenv(config_.api_key_env.c_str())) {
    api_key_ = env;
  }
  if (config_.retry.max_attempts < 1) throw Error(ErrorCode::InvalidConfig, "retry.max_attempts must be >= 1");
}

ChatResponse HttpChatClient::complete(const ChatRequest& request) {
  httplib::Client client(origin_);
  client.set_connection_timeout(std::chrono::seconds(10));
  client.set_read_timeout(config_.timeout);
  client.set_write_timeout(config_.timeout);
  httplib::Headers headers;
  if (!api_key_.empty()) headers.emplace("Authorization", "Bearer " + api_key_);

  const std::string body = to_wire(request).dump();
  const std::string path = path_prefix_ + "/chat/completions";
  auto backoff = config_.retry.initial_backoff;
  std::string last_error;

  for (int attempt = 1; attempt <= config_.retry.max_attempts; ++attempt) {
    auto res = client.Post(path, headers, body, "application/json");
    if (res && res->status >= 200 && res->status < 300) {
      nlohmann::json j;
      try {
        j = nlohmann::json::parse(res->body);
      } catch (const nlohmann::json::parse_error& e) {
        throw Error(ErrorCode::LlmTransport, std::string("completion body is not JSON: ") + e.what());
      }
      return response_from_wire(j);
    }
    if (res) {
      last_error = "HTTP " + std::to_string(res->status) + ": " + res->body.substr(0, 300);
      if (!retryable(res->status)) break;
    } else {
      last_error = httplib::to_string(res.error());
    }
    if (attempt == config_.retry.max_attempts) break;
    sleeper_(std::max(backoff, retry_after(res).value_or(std::chrono::milliseconds(0))));
    backoff = std::chrono::milliseconds(static_cast<long long>(static_cast<double>(backoff.count()) *
                                                               config_.retry.multiplier));
  }
  throw Error(ErrorCode::LlmTransport, origin_ + path + ": " + last_error);
}

}  // namespace tablemine::llm
