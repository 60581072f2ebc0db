#pragma once

#include <filesystem>
#include <string>
#include <string_view>
#include <vector>

#include <json.hpp>

#include "tablemine/table.hpp"

namespace tablemine::classify {

enum class Label { Performance, Calculated, Characterization, Noise };

std::string_view to_string(Label label);

struct TableCategory {
  Label label = Label::Noise;
  std::vector<std::string> matched_keywords;
};

// Keyword groups, matched case-insensitively against title + caption + header.
struct KeywordRuleSet {
  std::vector<std::string> performance;
  std::vector<std::string> calculated;
  std::vector<std::string> characterization;

  bool empty() const { return performance.empty() && calculated.empty() && characterization.empty(); }

  static KeywordRuleSet defaults();
};

nlohmann::json to_json(const KeywordRuleSet& rules);
KeywordRuleSet rules_from_json(const nlohmann::json& j);
KeywordRuleSet load_rules(const std::filesystem::path& path);

// Whether `keyword` occurs in `haystack` as a word. Both sides go through
// text::normalize_for_match. Alphanumeric keyword edges must not touch an
// ASCII letter, except for a plural "s"/"es" suffix.
bool matches_keyword(std::string_view haystack, std::string_view keyword);

// Text the rules are matched against: title, caption, and header cells. A
// header-less grid contributes its first body row instead; a transposed grid
// (see split::detect_transposed) is read in its transposed orientation.
std::string classification_text(const TableGrid& grid);

// Precedence Performance > Calculated > Characterization > Noise.
// Throws Error(EmptyRuleSet).
TableCategory classify(const TableGrid& grid, const KeywordRuleSet& rules);

}  // namespace tablemine::classify
