#pragma once

#include <string>
#include <string_view>
#include <vector>

#include "tablemine/llm/chat.hpp"
#include "tablemine/llm/prompts.hpp"
#include "tablemine/record.hpp"

namespace tablemine::llm {

inline constexpr std::string_view kDefaultFinetunedModel = "gpt-3.5-turbo-1106";
inline constexpr std::string_view kDefaultFewshotModel = "gpt-4-1106-preview";
inline constexpr std::string_view kDefaultZeroshotModel = "gpt-4-1106-preview";
inline constexpr std::string_view kDefaultFollowupModel = "gpt-4-0125-preview";

inline constexpr std::string_view kRepairRequest = "Return valid JSON only.";

struct CallOptions {
  std::string model;
  double temperature = 0.0;
  double frequency_penalty = 0.0;
  double presence_penalty = 0.0;
};

struct FineTuneExample {
  std::string system;
  std::string user;
  // Bare catalyst hierarchy as compact JSON.
  std::string assistant;

  bool operator==(const FineTuneExample&) const = default;
};

struct TrainingPair {
  // Table in one of the three input formats.
  std::string input_doc;
  ExtractionRecord gold;
};

// Throws Error(InvalidGold) when the gold record is invalid.
FineTuneExample make_example(const TrainingPair& pair, PromptVariant prompt);

// One {"messages": [system, user, assistant]} line per pair, in input order.
std::string build_finetune_dataset(const std::vector<TrainingPair>& pairs, PromptVariant prompt);
std::vector<FineTuneExample> parse_finetune_dataset(std::string_view jsonl);

// System prompt, each shot as a user/assistant pair, then the target table.
// An unparseable reply gets one repair turn; a second failure throws
// Error(UnparseableOutput). A reply cut off at the output cap throws
// Error(TokenLimit). Throws Error(InvalidInput) when `shots` is empty.
ExtractionRecord extract_fewshot(std::string_view input_doc, const std::vector<FineTuneExample>& shots,
                                 PromptVariant prompt, ChatClient& client, const CallOptions& options);

// Fine-tuned inference: system prompt and target table only.
ExtractionRecord extract_finetuned(std::string_view input_doc, PromptVariant prompt, ChatClient& client,
                                   const CallOptions& options);

struct ZeroShotTemplate {
  // Subset of kPropertyKeys, in the order shown to the model.
  std::vector<std::string> property_keys{kPropertyKeys.begin(), kPropertyKeys.end()};
};

// One conversation: catalysts, then performances per catalyst, then the
// property template per performance. "none" at any step yields nothing for
// that step; unfilled and unknown property keys are dropped.
ExtractionRecord extract_zeroshot(std::string_view input_doc, const ZeroShotTemplate& tmpl, ChatClient& client,
                                  const CallOptions& options);

// Reads a reply that should be a JSON array of names, or "none". Throws
// Error(UnparseableOutput).
std::vector<std::string> parse_name_list(std::string_view reply);

}  // namespace tablemine::llm
