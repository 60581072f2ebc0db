#pragma once

#include <cstddef>
#include <filesystem>
#include <map>
#include <optional>
#include <set>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

#include <json.hpp>

#include "tablemine/record.hpp"

namespace tablemine::stats {

enum class ReactionType { OER, HER, Other };
enum class ElectrolyteClass { Acidic, Alkaline, Neutral, Unknown };

std::string_view to_string(ReactionType r);
std::string_view to_string(ElectrolyteClass e);

struct CatalystEntry {
  std::string name;
  std::set<std::string> elements;
  ReactionType reaction = ReactionType::Other;
  ElectrolyteClass electrolyte = ElectrolyteClass::Unknown;
  std::optional<double> overpotential_mv;
  std::optional<double> current_density;
};

const std::set<std::string>& element_symbols();
const std::vector<std::string>& default_decorations();

struct ElementOptions {
  bool include_oxygen_hydrogen = true;
  std::vector<std::string> decorations = default_decorations();
};

// Markup stripped, split on non-alphanumerics, decoration tokens dropped, then
// a greedy scan per token: an uppercase letter followed by a lowercase one is
// tried as a two-letter symbol before the one-letter symbol. Unknown letters
// are skipped.
std::set<std::string> parse_elements(std::string_view name, const ElementOptions& options = {});

// Substring rules checked in order after folding script digits; the first hit
// wins.
struct ElectrolyteRules {
  std::vector<std::pair<std::string, ElectrolyteClass>> patterns;

  static ElectrolyteRules defaults();
};

ElectrolyteClass classify_electrolyte(std::string_view text, const ElectrolyteRules& rules = ElectrolyteRules::defaults());
ReactionType classify_reaction(std::string_view text);

// "259", "259 mV", "0.259 V", "~300 mV". A number without unit is read as mV.
std::optional<double> parse_overpotential_mv(std::string_view text);
// mA cm^-2; "A cm-2" is scaled by 1000. A number without unit is read as mA.
std::optional<double> parse_current_density(std::string_view text);

struct EntrySet {
  std::vector<CatalystEntry> entries;
  // Overpotential performances whose value had no parseable number.
  std::size_t skipped_overpotentials = 0;
};

// One entry per (catalyst, overpotential performance). A catalyst without an
// overpotential performance still yields one entry with no overpotential.
EntrySet entries_from_records(const std::vector<ExtractionRecord>& records,
                              const ElectrolyteRules& rules = ElectrolyteRules::defaults(),
                              const ElementOptions& options = {});

// Directory of record files, a JSON array of record documents, or a single
// record / catalyst hierarchy.
std::vector<ExtractionRecord> load_database(const std::filesystem::path& path);

enum class Facet { Reaction, Electrolyte, CurrentDensity, ReactionElectrolyte, ReactionCurrentDensity };

std::string_view to_string(Facet f);
Facet facet_from_string(std::string_view s);
std::string facet_key(const CatalystEntry& entry, Facet facet);

struct Bin {
  double lower = 0.0;
  double upper = 0.0;
  std::size_t count = 0;
  double normalized = 0.0;
};

// Left-closed bins [k*w, (k+1)*w), non-empty bins only, normalized per facet.
// Entries without an overpotential are skipped; a facet whose entries were all
// skipped maps to an empty list. Throws Error(InvalidInput) if width <= 0.
std::map<std::string, std::vector<Bin>> histogram(const std::vector<CatalystEntry>& entries, double bin_width_mv,
                                                   Facet facet);

std::string histogram_csv(const std::map<std::string, std::vector<Bin>>& hist);

using ElementPair = std::pair<std::string, std::string>;  // first < second

struct CoUsageGraph {
  std::size_t entry_count = 0;
  std::map<std::string, std::size_t> nodes;
  std::map<ElementPair, std::size_t> edges;
};

// node(e) = entries containing e; edge(a, b) = entries containing both. Edges
// with edge / entry_count < min_support are pruned.
CoUsageGraph mine_associations(const std::vector<CatalystEntry>& entries, double min_support);

// Edges incident to `anchor` and the nodes they touch.
CoUsageGraph anchor_subgraph(const CoUsageGraph& graph, const std::string& anchor);

// Element occurrence counts per electrolyte class.
std::map<ElectrolyteClass, std::map<std::string, std::size_t>> element_frequencies(
    const std::vector<CatalystEntry>& entries);

nlohmann::json to_json(const CoUsageGraph& graph);
nlohmann::json to_json(const CatalystEntry& entry);

}  // namespace tablemine::stats
