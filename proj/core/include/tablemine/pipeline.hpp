#pragma once

#include <cstddef>
#include <filesystem>
#include <map>
#include <optional>
#include <string>
#include <vector>

#include <json.hpp>

#include "tablemine/cost.hpp"
#include "tablemine/llm/chat.hpp"
#include "tablemine/llm/fixtures.hpp"
#include "tablemine/llm/hallucination.hpp"
#include "tablemine/llm/http_client.hpp"
#include "tablemine/llm/prompts.hpp"
#include "tablemine/represent.hpp"

namespace tablemine::pipeline {

enum class Method { FineTuned, FewShot, ZeroShot };

std::string_view to_string(Method m);
Method method_from_string(std::string_view s);

struct ModelNames {
  std::string finetuned{llm::kDefaultFinetunedModel};
  std::string fewshot{llm::kDefaultFewshotModel};
  std::string zeroshot{llm::kDefaultZeroshotModel};
  std::string followup{llm::kDefaultFollowupModel};
};

struct PipelineConfig {
  ModelNames models;
  Method method = Method::FewShot;
  llm::PromptVariant prompt = llm::PromptVariant::P3;
  represent::InputFormat input_format = represent::InputFormat::CustomTsv;
  bool split = true;
  bool detect_transposed = true;
  bool followup = false;
  llm::FilterMode followup_mode = llm::FilterMode::Deterministic;
  std::size_t parallelism = 1;
  double temperature = 0.0;
  double frequency_penalty = 0.0;
  double presence_penalty = 0.0;
  cost::PriceTable prices = cost::PriceTable::defaults();
  // Empty: built-in keyword groups.
  std::filesystem::path keyword_rules;
  // Fine-tune dataset JSONL whose lines serve as few-shot examples.
  std::filesystem::path shots;
  std::size_t max_shots = 10;

  // Offline mode: answers come from a FixtureResponder over `fixtures`, and
  // timestamps are fixed so repeated runs are byte-identical.
  bool mock = false;
  std::filesystem::path fixtures;
  llm::FixtureConfig mock_defaults;

  llm::HttpConfig http;
  std::size_t requests_per_minute = 0;
};

// Relative paths resolve against `base_dir`. Unknown keys are rejected.
// Throws Error(InvalidConfig).
PipelineConfig config_from_json(const nlohmann::json& j, const std::filesystem::path& base_dir = {});
PipelineConfig load_config(const std::filesystem::path& path);
nlohmann::json to_json(const PipelineConfig& config);

inline constexpr std::string_view kMockTimestamp = "1970-01-01T00:00:00Z";

struct QuarantineEntry {
  std::string key;
  std::string stage;
  std::string error;
};

struct RunReport {
  std::size_t tables_in = 0;
  std::map<std::string, std::size_t> categories;
  std::size_t transposed = 0;
  std::size_t units = 0;
  std::size_t records_out = 0;
  std::size_t cache_hits = 0;
  std::vector<QuarantineEntry> quarantined;
  cost::TokenTotals tokens;
  std::optional<double> cost_usd;

  int exit_code() const { return quarantined.empty() ? 0 : 1; }
};

nlohmann::json to_json(const RunReport& report);

// Run directory layout:
//   grids/<table>.json          normalized grid of every ingested table
//   inputs/<unit>.<ext>         model input per extraction unit
//   cache/<digest>.json         extraction result keyed by request content
//   records/<unit>.json         final ExtractionRecord
//   quarantine/<unit>.json      per-unit failure
//   ledger.jsonl, report.json
// A unit whose cache entry exists is not sent to the model again. Per-table
// failures are quarantined; configuration problems throw.
// `client` overrides the client the config would build.
RunReport run_pipeline(const PipelineConfig& config, const std::filesystem::path& corpus,
                       const std::filesystem::path& run_dir, llm::ChatClient* client = nullptr);

// Stable artifact key of a table: "<slug(source_id)>-tNN".
std::string table_key(const std::string& source_id, int table_index);

// Input text in the configured format; `raw_html` is used verbatim for HTML
// input when the grid was not split.
std::string render_input(const TableGrid& grid, represent::InputFormat format, const std::string* raw_html = nullptr);

}  // namespace tablemine::pipeline
