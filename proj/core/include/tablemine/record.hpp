#pragma once

#include <array>
#include <cstddef>
#include <map>
#include <string>
#include <string_view>
#include <vector>

#include <json.hpp>

namespace tablemine {

// catalyst -> performance -> property key -> value
using PropertyMap = std::map<std::string, std::string>;
using PerformanceMap = std::map<std::string, PropertyMap>;
using CatalystMap = std::map<std::string, PerformanceMap>;

struct Provenance {
  std::string source_id;
  int table_index = 0;
  int row = 0;

  bool operator==(const Provenance&) const = default;
};

struct ExtractionRecord {
  CatalystMap catalysts;
  Provenance provenance;

  bool empty() const { return catalysts.empty(); }
  bool operator==(const ExtractionRecord&) const = default;
};

// The closed set of property keys.
inline constexpr std::array<std::string_view, 8> kPropertyKeys{
    "electrolyte", "reaction_type", "value", "current_density", "overpotential", "potential", "substrate", "versus"};

bool is_property_key(std::string_view key);

// Problems that make a record invalid; empty when valid.
std::vector<std::string> validate(const ExtractionRecord& record);

// Bare catalyst hierarchy, the shape a model is asked to produce.
nlohmann::json catalysts_to_json(const CatalystMap& catalysts);
// {"source_id", "table_index", "row", "catalysts"}.
nlohmann::json to_json(const ExtractionRecord& record);
std::string to_canonical_text(const ExtractionRecord& record);

enum class ParseMode {
  // Any deviation from the schema throws Error(InvalidRecord).
  Strict,
  // Model output: numbers are stringified, empty/null values and unknown
  // property keys dropped, a list of property objects under one performance
  // becomes "name", "name (2)", ...
  Lenient,
};

// Accepts either the record document or the bare catalyst hierarchy (also
// wrapped as {"catalysts": {...}}). Keys and values are whitespace-collapsed.
ExtractionRecord record_from_json(const nlohmann::json& j, ParseMode mode);

// Pulls the first JSON object out of a model reply (code fences and prose
// around it tolerated) and parses it leniently. Throws Error(UnparseableOutput).
CatalystMap parse_model_output(std::string_view reply);

}  // namespace tablemine
