#pragma once

#include <filesystem>
#include <map>
#include <optional>
#include <string>
#include <vector>

#include "tablemine/llm/chat.hpp"

namespace tablemine::llm {

enum class DefaultReply {
  // Reply with the last user message.
  Echo,
  // Reply with FixtureConfig::fixed_reply.
  Fixed,
  // No reply: the caller sees Error(LlmTransport).
  Fail,
};

std::string_view to_string(DefaultReply r);
DefaultReply default_reply_from_string(std::string_view s);

// Canned reply chosen when every substring occurs in the last user message.
struct ReplyRule {
  std::vector<std::string> all_of;
  std::string reply;
  std::string finish_reason = "stop";
};

struct FixtureConfig {
  DefaultReply default_reply = DefaultReply::Echo;
  std::string fixed_reply = "{}";
};

// Answers chat requests offline. Lookup order: a "<digest>.json" fixture
// (returned verbatim), then rules.json in order, then the default reply.
// Synthetic replies report estimate_tokens() usage.
class FixtureResponder {
 public:
  FixtureResponder() = default;
  explicit FixtureResponder(const std::filesystem::path& dir, FixtureConfig config = {});

  void add_rule(ReplyRule rule) { rules_.push_back(std::move(rule)); }
  void add_fixture(const std::string& digest, std::string body) { fixtures_[digest] = std::move(body); }
  const std::vector<ReplyRule>& rules() const { return rules_; }

  // Wire-format response body; nullopt only when the default is Fail.
  std::optional<std::string> respond(const ChatRequest& request) const;

 private:
  std::map<std::string, std::string> fixtures_;
  std::vector<ReplyRule> rules_;
  FixtureConfig config_;
};

std::vector<ReplyRule> rules_from_json(const nlohmann::json& j);

class FixtureChatClient : public ChatClient {
 public:
  explicit FixtureChatClient(FixtureResponder responder) : responder_(std::move(responder)) {}

  ChatResponse complete(const ChatRequest& request) override;

 private:
  FixtureResponder responder_;
};

// Passes calls through and stores each response as "<digest>.json" in `dir`,
// the layout FixtureResponder replays.
class RecordingChatClient : public ChatClient {
 public:
  RecordingChatClient(ChatClient& inner, std::filesystem::path dir);

  ChatResponse complete(const ChatRequest& request) override;

 private:
  ChatClient& inner_;
  std::filesystem::path dir_;
};

}  // namespace tablemine::llm
