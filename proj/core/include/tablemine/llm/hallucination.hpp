#pragma once

#include <map>
#include <string>
#include <string_view>
#include <vector>

#include "tablemine/llm/chat.hpp"
#include "tablemine/llm/extract.hpp"
#include "tablemine/record.hpp"
#include "tablemine/represent.hpp"

namespace tablemine::llm {

enum class FilterMode { Deterministic, Llm };

std::string_view to_string(FilterMode mode);
FilterMode filter_mode_from_string(std::string_view s);

// Performance name -> other spellings that count as evidence for it.
const std::map<std::string, std::vector<std::string>>& default_performance_aliases();

struct FilterOptions {
  FilterMode mode = FilterMode::Deterministic;
  CallOptions call{std::string(kDefaultFollowupModel)};
  std::map<std::string, std::vector<std::string>> aliases = default_performance_aliases();
};

// The table text evidence is searched in: <merged> tags removed, markup
// stripped, script digits folded, whitespace collapsed, ASCII lowercased.
std::string evidence_text(const represent::CustomTsvDoc& tsv);

// Normalized containment, with the same normalization as evidence_text.
bool evidenced(std::string_view evidence, std::string_view needle);

// Catalysts are judged by name, performances by name or alias, properties by
// value; a key without evidence is dropped with its subtree. In Llm mode only
// keys without evidence are put to the model as yes/no questions, and "yes"
// keeps them. Throws Error(InvalidInput) in Llm mode without a client.
ExtractionRecord filter_hallucinations(const ExtractionRecord& record, const represent::CustomTsvDoc& tsv,
                                       ChatClient* client, const FilterOptions& options = {});

}  // namespace tablemine::llm
