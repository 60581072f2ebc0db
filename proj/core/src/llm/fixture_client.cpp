#include "tablemine/llm/fixtures.hpp"

#include <algorithm>

#include "tablemine/error.hpp"
#include "tablemine/io.hpp"

namespace tablemine::llm {

std::string_view to_string(DefaultReply r) {
  switch (r) {
    case DefaultReply::Echo: return "echo";
    case DefaultReply::Fixed: return "fixed";
    case DefaultReply::Fail: return "fail";
  }
  return "echo";
}

DefaultReply default_reply_from_string(std::string_view s) {
  if (s == "echo") return DefaultReply::Echo;
  if (s == "fixed") return DefaultReply::Fixed;
  if (s == "fail") return DefaultReply::Fail;
  throw Error(ErrorCode::InvalidConfig, "unknown default reply mode: " + std::string(s));
}

std::vector<ReplyRule> rules_from_json(const nlohmann::json& j) {
  if (!j.is_array()) throw Error(ErrorCode::InvalidConfig, "rules must be a JSON array");
  std::vector<ReplyRule> rules;
  try {
    for (const auto& r : j) {
      ReplyRule rule;
      rule.all_of = r.at("all_of").get<std::vector<std::string>>();
      const auto& reply = r.at("reply");
      rule.reply = reply.is_string() ? reply.get<std::string>() : reply.dump();
      rule.finish_reason = r.value("finish_reason", std::string("stop"));
      rules.push_back(std::move(rule));
    }
  } catch (const nlohmann::json::exception& e) {
    throw Error(ErrorCode::InvalidConfig, std::string("reply rule: ") + e.what());
  }
  return rules;
}

FixtureResponder::FixtureResponder(const std::filesystem::path& dir, FixtureConfig config)
    : config_(std::move(config)) {
  if (dir.empty()) return;
  if (!std::filesystem::is_directory(dir)) throw Error(ErrorCode::Io, "fixture directory not found: " + dir.string());
  for (const auto& entry : std::filesystem::directory_iterator(dir)) {
    if (!entry.is_regular_file() || entry.path().extension() != ".json") continue;
    const std::string stem = entry.path().stem().string();
    if (stem == "rules") {
      try {
        rules_ = rules_from_json(nlohmann::json::parse(io::read_file(entry.path())));
      } catch (const nlohmann::json::parse_error& e) {
        throw Error(ErrorCode::InvalidConfig, entry.path().string() + ": " + e.what());
      }
    } else {
      fixtures_[stem] = io::read_file(entry.path());
    }
  }
}

std::optional<std::string> FixtureResponder::respond(const ChatRequest& request) const {
  if (const auto it = fixtures_.find(request_digest(request)); it != fixtures_.end()) return it->second;

  std::string last_user;
  for (auto it = request.messages.rbegin(); it != request.messages.rend(); ++it) {
    if (it->role == Role::User) {
      last_user = it->content;
      break;
    }
  }
  ChatResponse reply;
  reply.model = request.model;
  const auto rule = std::find_if(rules_.begin(), rules_.end(), [&](const ReplyRule& r) {
    return std::all_of(r.all_of.begin(), r.all_of.end(),
                       [&](const std::string& s) { return last_user.find(s) != std::string::npos; });
  });
  if (rule != rules_.end()) {
    reply.content = rule->reply;
    reply.finish_reason = rule->finish_reason;
  } else if (config_.default_reply == DefaultReply::Echo) {
    reply.content = last_user;
  } else if (config_.default_reply == DefaultReply::Fixed) {
    reply.content = config_.fixed_reply;
  } else {
    return std::nullopt;
  }
  for (const auto& m : request.messages) reply.usage.input_tokens += estimate_tokens(m.content);
  reply.usage.output_tokens = estimate_tokens(reply.content);
  return to_wire(reply).dump();
}

ChatResponse FixtureChatClient::complete(const ChatRequest& request) {
  const auto body = responder_.respond(request);
  if (!body) throw Error(ErrorCode::LlmTransport, "no fixture for request " + request_digest(request));
  try {
    return response_from_wire(nlohmann::json::parse(*body));
  } catch (const nlohmann::json::parse_error& e) {
    throw Error(ErrorCode::LlmTransport, std::string("fixture body is not JSON: ") + e.what());
  }
}

RecordingChatClient::RecordingChatClient(ChatClient& inner, std::filesystem::path dir)
    : inner_(inner), dir_(std::move(dir)) {
  std::filesystem::create_directories(dir_);
}

ChatResponse RecordingChatClient::complete(const ChatRequest& request) {
  ChatResponse response = inner_.complete(request);
  io::write_file_atomic(dir_ / (request_digest(request) + ".json"), to_wire(response).dump(2) + "\n");
  return response;
}

}  // namespace tablemine::llm
