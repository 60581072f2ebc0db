#include "tablemine/llm/extract.hpp"

#include <algorithm>
#include <sstream>

#include "tablemine/error.hpp"
#include "tablemine/text.hpp"

namespace tablemine::llm {

namespace {

ChatRequest make_request(const CallOptions& options, std::vector<Message> messages) {
  return {options.model, std::move(messages), options.temperature, options.frequency_penalty,
          options.presence_penalty};
}

ChatResponse ask(ChatClient& client, const CallOptions& options, const std::vector<Message>& messages) {
  ChatResponse r = client.complete(make_request(options, messages));
  if (r.finish_reason == "length") {
    throw Error(ErrorCode::TokenLimit, "reply truncated at the output token cap of " + options.model);
  }
  return r;
}

// Sends `messages`, parses the reply with `parse`; on failure re-asks once
// with a repair turn. The conversation keeps the accepted reply.
template <typename Parse>
auto ask_parsed(ChatClient& client, const CallOptions& options, std::vector<Message>& messages, Parse parse) {
  ChatResponse first = ask(client, options, messages);
  try {
    auto parsed = parse(first.content);
    messages.push_back({Role::Assistant, first.content});
    return parsed;
  } catch (const Error& e) {
    if (e.code() != ErrorCode::UnparseableOutput) throw;
  }
  messages.push_back({Role::Assistant, first.content});
  messages.push_back({Role::User, std::string(kRepairRequest)});
  ChatResponse second = ask(client, options, messages);
  auto parsed = parse(second.content);
  messages.push_back({Role::Assistant, second.content});
  return parsed;
}

std::string trimmed_lower(std::string_view s) {
  std::string t = text::to_lower_ascii(text::collapse_whitespace(s));
  while (!t.empty() && (t.back() == '.' || t.back() == '!')) t.pop_back();
  return t;
}

std::string scalar_text(const nlohmann::json& v) {
  if (v.is_string()) return text::collapse_whitespace(v.get<std::string>());
  if (v.is_number() || v.is_boolean()) return v.dump();
  return {};
}

}  // namespace

FineTuneExample make_example(const TrainingPair& pair, PromptVariant prompt) {
  if (const auto problems = validate(pair.gold); !problems.empty()) {
    throw Error(ErrorCode::InvalidGold, pair.gold.provenance.source_id + ": " + problems.front());
  }
  return {prompt_text(prompt), pair.input_doc, catalysts_to_json(pair.gold.catalysts).dump()};
}

std::string build_finetune_dataset(const std::vector<TrainingPair>& pairs, PromptVariant prompt) {
  std::string out;
  for (const auto& pair : pairs) {
    const FineTuneExample ex = make_example(pair, prompt);
    const nlohmann::json line{{"messages",
                               {{{"role", "system"}, {"content", ex.system}},
                                {{"role", "user"}, {"content", ex.user}},
                                {{"role", "assistant"}, {"content", ex.assistant}}}}};
    out += line.dump() + "\n";
  }
  return out;
}

std::vector<FineTuneExample> parse_finetune_dataset(std::string_view jsonl) {
  std::vector<FineTuneExample> out;
  std::istringstream in{std::string(jsonl)};
  std::string line;
  while (std::getline(in, line)) {
    if (line.empty()) continue;
    try {
      const auto j = nlohmann::json::parse(line);
      const auto& m = j.at("messages");
      if (m.size() != 3) throw Error(ErrorCode::InvalidInput, "fine-tune line needs three messages");
      out.push_back({m.at(0).at("content").get<std::string>(), m.at(1).at("content").get<std::string>(),
                     m.at(2).at("content").get<std::string>()});
    } catch (const nlohmann::json::exception& e) {
      throw Error(ErrorCode::InvalidInput, std::string("fine-tune line: ") + e.what());
    }
  }
  return out;
}

ExtractionRecord extract_fewshot(std::string_view input_doc, const std::vector<FineTuneExample>& shots,
                                 PromptVariant prompt, ChatClient& client, const CallOptions& options) {
  if (shots.empty()) throw Error(ErrorCode::InvalidInput, "few-shot extraction needs at least one shot");
  std::vector<Message> messages{{Role::System, prompt_text(prompt)}};
  for (const auto& shot : shots) {
    messages.push_back({Role::User, shot.user});
    messages.push_back({Role::Assistant, shot.assistant});
  }
  messages.push_back({Role::User, std::string(input_doc)});
  ExtractionRecord record;
  record.catalysts = ask_parsed(client, options, messages, parse_model_output);
  return record;
}

ExtractionRecord extract_finetuned(std::string_view input_doc, PromptVariant prompt, ChatClient& client,
                                   const CallOptions& options) {
  std::vector<Message> messages{{Role::System, prompt_text(prompt)}, {Role::User, std::string(input_doc)}};
  ExtractionRecord record;
  record.catalysts = ask_parsed(client, options, messages, parse_model_output);
  return record;
}

std::vector<std::string> parse_name_list(std::string_view reply) {
  const std::string lowered = trimmed_lower(reply);
  if (lowered == "none" || lowered == "\"none\"") return {};
  const std::size_t open = reply.find('[');
  const std::size_t close = reply.rfind(']');
  if (open == std::string_view::npos || close == std::string_view::npos || close < open) {
    throw Error(ErrorCode::UnparseableOutput, "expected a JSON array or none");
  }
  nlohmann::json j;
  try {
    j = nlohmann::json::parse(reply.substr(open, close - open + 1));
  } catch (const nlohmann::json::parse_error& e) {
    throw Error(ErrorCode::UnparseableOutput, e.what());
  }
  std::vector<std::string> names;
  for (const auto& item : j) {
    std::string name = scalar_text(item);
    if (name.empty() || trimmed_lower(name) == "none") continue;
    if (std::find(names.begin(), names.end(), name) == names.end()) names.push_back(std::move(name));
  }
  return names;
}

ExtractionRecord extract_zeroshot(std::string_view input_doc, const ZeroShotTemplate& tmpl, ChatClient& client,
                                  const CallOptions& options) {
  for (const auto& key : tmpl.property_keys) {
    if (!is_property_key(key)) throw Error(ErrorCode::InvalidInput, "template key outside the property set: " + key);
  }
  nlohmann::ordered_json blank = nlohmann::ordered_json::object();
  for (const auto& key : tmpl.property_keys) blank[key] = "";
  const std::string template_text = blank.dump(2);

  auto parse_properties = [&](std::string_view reply) {
    const std::size_t open = reply.find('{');
    const std::size_t close = reply.rfind('}');
    if (open == std::string_view::npos || close == std::string_view::npos || close < open) {
      throw Error(ErrorCode::UnparseableOutput, "expected the filled JSON template");
    }
    nlohmann::json j;
    try {
      j = nlohmann::json::parse(reply.substr(open, close - open + 1));
    } catch (const nlohmann::json::parse_error& e) {
      throw Error(ErrorCode::UnparseableOutput, e.what());
    }
    if (!j.is_object()) throw Error(ErrorCode::UnparseableOutput, "template reply is not an object");
    PropertyMap props;
    for (const auto& key : tmpl.property_keys) {
      const auto it = j.find(key);
      if (it == j.end()) continue;
      if (std::string value = scalar_text(*it); !value.empty()) props[key] = std::move(value);
    }
    return props;
  };

  std::vector<Message> messages{{Role::System, prompt_resource("zeroshot_system")},
                                {Role::User, fill_template(prompt_resource("zeroshot_catalysts"),
                                                           {{"table", std::string(input_doc)}})}};
  ExtractionRecord record;
  const auto catalysts = ask_parsed(client, options, messages, parse_name_list);
  for (const auto& catalyst : catalysts) {
    messages.push_back({Role::User, fill_template(prompt_resource("zeroshot_performances"), {{"catalyst", catalyst}})});
    const auto performances = ask_parsed(client, options, messages, parse_name_list);
    auto& perf_map = record.catalysts[catalyst];
    for (const auto& performance : performances) {
      messages.push_back({Role::User, fill_template(prompt_resource("zeroshot_properties"),
                                                    {{"catalyst", catalyst},
                                                     {"performance", performance},
                                                     {"template", template_text}})});
      perf_map[performance] = ask_parsed(client, options, messages, parse_properties);
    }
  }
  return record;
}

}  // namespace tablemine::llm
