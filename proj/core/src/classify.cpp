#include "tablemine/classify.hpp"

#include <cctype>

#include "tablemine/error.hpp"
#include "tablemine/io.hpp"
#include "tablemine/split.hpp"
#include "tablemine/text.hpp"

namespace tablemine::classify {

std::string_view to_string(Label label) {
  switch (label) {
    case Label::Performance: return "performance";
    case Label::Calculated: return "calculated";
    case Label::Characterization: return "characterization";
    case Label::Noise: return "noise";
  }
  return "noise";
}

KeywordRuleSet KeywordRuleSet::defaults() {
  KeywordRuleSet rules;
  rules.performance = {"overpotential", "η", "tafel", "current density", "onset potential", "exchange current",
                       "stability", "faradaic"};
  rules.calculated = {"dft", "adsorption energy", "gibbs", "formation energy", "band gap"};
  rules.characterization = {"xrd", "xps", "bet", "tem", "sem", "raman"};
  return rules;
}

nlohmann::json to_json(const KeywordRuleSet& rules) {
  return {{"performance", rules.performance},
          {"calculated", rules.calculated},
          {"characterization", rules.characterization}};
}

KeywordRuleSet rules_from_json(const nlohmann::json& j) {
  if (!j.is_object()) throw Error(ErrorCode::InvalidConfig, "keyword rules must be a JSON object");
  KeywordRuleSet rules;
  try {
    rules.performance = j.value("performance", std::vector<std::string>{});
    rules.calculated = j.value("calculated", std::vector<std::string>{});
    rules.characterization = j.value("characterization", std::vector<std::string>{});
  } catch (const nlohmann::json::exception& e) {
    throw Error(ErrorCode::InvalidConfig, std::string("keyword rules: ") + e.what());
  }
  return rules;
}

KeywordRuleSet load_rules(const std::filesystem::path& path) {
  try {
    return rules_from_json(nlohmann::json::parse(io::read_file(path)));
  } catch (const nlohmann::json::parse_error& e) {
    throw Error(ErrorCode::InvalidConfig, path.string() + ": " + e.what());
  }
}

namespace {

bool is_ascii_alnum(char c) { return std::isalnum(static_cast<unsigned char>(c)) != 0; }
bool is_ascii_alpha(char c) { return std::isalpha(static_cast<unsigned char>(c)) != 0; }

bool right_boundary_ok(std::string_view hay, std::size_t q) {
  if (q >= hay.size() || !is_ascii_alpha(hay[q])) return true;
  for (std::string_view suffix : {"s", "es"}) {
    if (hay.substr(q, suffix.size()) == suffix) {
      const std::size_t after = q + suffix.size();
      if (after >= hay.size() || !is_ascii_alpha(hay[after])) return true;
    }
  }
  return false;
}

}  // namespace

bool matches_keyword(std::string_view haystack, std::string_view keyword) {
  const std::string hay = text::normalize_for_match(haystack);
  const std::string kw = text::normalize_for_match(keyword);
  if (kw.empty()) return false;
  const bool check_left = is_ascii_alnum(kw.front());
  const bool check_right = is_ascii_alnum(kw.back());
  for (std::size_t p = hay.find(kw); p != std::string::npos; p = hay.find(kw, p + 1)) {
    if (check_left && p > 0 && is_ascii_alpha(hay[p - 1])) continue;
    if (check_right && !right_boundary_ok(hay, p + kw.size())) continue;
    return true;
  }
  return false;
}

namespace {

std::string header_text(const TableGrid& grid) {
  std::vector<std::string> parts{grid.title, grid.caption};
  const std::vector<Row>* rows = &grid.header;
  std::vector<Row> first_body;
  if (grid.header.empty() && !grid.body.empty()) {
    first_body.push_back(grid.body.front());
    rows = &first_body;
  }
  for (const auto& row : *rows) {
    for (const auto& cell : row) parts.push_back(cell.text);
  }
  return text::join(parts, " | ");
}

}  // namespace

std::string classification_text(const TableGrid& input) {
  // A transposed table carries its column labels in column 0.
  const bool transposed = split::detect_transposed(input);
  return transposed ? header_text(split::transpose(input)) : header_text(input);
}

TableCategory classify(const TableGrid& grid, const KeywordRuleSet& rules) {
  if (rules.empty()) throw Error(ErrorCode::EmptyRuleSet, "keyword rule set has no keywords");
  const std::string hay = classification_text(grid);
  const std::pair<Label, const std::vector<std::string>*> groups[] = {
      {Label::Performance, &rules.performance},
      {Label::Calculated, &rules.calculated},
      {Label::Characterization, &rules.characterization},
  };
  for (const auto& [label, keywords] : groups) {
    TableCategory category{label, {}};
    for (const auto& kw : *keywords) {
      if (matches_keyword(hay, kw)) category.matched_keywords.push_back(kw);
    }
    if (!category.matched_keywords.empty()) return category;
  }
  return {Label::Noise, {}};
}

}  // namespace tablemine::classify
