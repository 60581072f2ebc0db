#include "tablemine/stats.hpp"

#include <algorithm>
#include <cctype>
#include <charconv>
#include <cmath>
#include <cstdio>

#include "tablemine/error.hpp"
#include "tablemine/eval.hpp"
#include "tablemine/io.hpp"
#include "tablemine/text.hpp"

namespace tablemine::stats {

namespace {

bool is_upper(char c) { return c >= 'A' && c <= 'Z'; }
bool is_lower(char c) { return c >= 'a' && c <= 'z'; }
bool is_alnum(char c) { return std::isalnum(static_cast<unsigned char>(c)) != 0; }

struct Number {
  double value = 0.0;
  std::size_t end = 0;
};

// First decimal number in `s` at or after `from`, with an optional leading
// minus sign.
std::optional<Number> find_number(std::string_view s, std::size_t from = 0) {
  for (std::size_t i = from; i < s.size(); ++i) {
    if (!std::isdigit(static_cast<unsigned char>(s[i]))) continue;
    std::size_t start = i;
    if (start > 0 && s[start - 1] == '-') --start;
    double v = 0.0;
    const auto [ptr, ec] = std::from_chars(s.data() + start, s.data() + s.size(), v);
    if (ec != std::errc()) continue;
    return Number{v, static_cast<std::size_t>(ptr - s.data())};
  }
  return std::nullopt;
}

std::string_view skip_spaces(std::string_view s) {
  while (!s.empty() && s.front() == ' ') s.remove_prefix(1);
  return s;
}

bool starts_with_unit(std::string_view rest, std::string_view unit) {
  if (rest.substr(0, unit.size()) != unit) return false;
  return rest.size() == unit.size() || !std::isalpha(static_cast<unsigned char>(rest[unit.size()]));
}

// Common cleanup for numeric property values: markup removed, script digits
// folded, approximation marks and Unicode minus normalized.
std::string clean_numeric(std::string_view raw) {
  std::string s = text::collapse_whitespace(text::fold_script_digits(text::strip_markup(raw)));
  std::string out;
  for (char32_t cp : text::decode_utf8(s)) {
    if (cp == U'~' || cp == U'≈' || cp == U'∼') continue;
    if (cp == U'−' || cp == U'–') cp = U'-';
    text::append_utf8(out, cp);
  }
  return out;
}

bool is_overpotential_name(std::string_view performance) {
  const std::string n = text::normalize_for_match(performance);
  return n.find("overpotential") != std::string::npos || n.find("\xCE\xB7") != std::string::npos;  // eta
}

std::string format_number(double v) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%g", v);
  return buf;
}

}  // namespace

std::string_view to_string(ReactionType r) {
  switch (r) {
    case ReactionType::OER: return "OER";
    case ReactionType::HER: return "HER";
    case ReactionType::Other: return "other";
  }
  return "other";
}

std::string_view to_string(ElectrolyteClass e) {
  switch (e) {
    case ElectrolyteClass::Acidic: return "acidic";
    case ElectrolyteClass::Alkaline: return "alkaline";
    case ElectrolyteClass::Neutral: return "neutral";
    case ElectrolyteClass::Unknown: return "unknown";
  }
  return "unknown";
}

const std::set<std::string>& element_symbols() {
  static const std::set<std::string> symbols{
      "H",  "He", "Li", "Be", "B",  "C",  "N",  "O",  "F",  "Ne", "Na", "Mg", "Al", "Si", "P",  "S",  "Cl",
      "Ar", "K",  "Ca", "Sc", "Ti", "V",  "Cr", "Mn", "Fe", "Co", "Ni", "Cu", "Zn", "Ga", "Ge", "As", "Se",
      "Br", "Kr", "Rb", "Sr", "Y",  "Zr", "Nb", "Mo", "Tc", "Ru", "Rh", "Pd", "Ag", "Cd", "In", "Sn", "Sb",
      "Te", "I",  "Xe", "Cs", "Ba", "La", "Ce", "Pr", "Nd", "Pm", "Sm", "Eu", "Gd", "Tb", "Dy", "Ho", "Er",
      "Tm", "Yb", "Lu", "Hf", "Ta", "W",  "Re", "Os", "Ir", "Pt", "Au", "Hg", "Tl", "Pb", "Bi", "Po", "At",
      "Rn", "Fr", "Ra", "Ac", "Th", "Pa", "U",  "Np", "Pu", "Am", "Cm", "Bk", "Cf", "Es", "Fm", "Md", "No",
      "Lr", "Rf", "Db", "Sg", "Bh", "Hs", "Mt", "Ds", "Rg", "Cn", "Nh", "Fl", "Mc", "Lv", "Ts", "Og"};
  return symbols;
}

const std::vector<std::string>& default_decorations() {
  static const std::vector<std::string> d{"LDH", "LDHs", "NAs", "NSs", "NPs", "NWs", "NRs", "NTs", "NCs", "CFP",
                                          "NF",  "CC",   "CP",  "GCE", "rGO", "CNT", "CNTs", "MOF", "QDs", "SACs"};
  return d;
}

std::set<std::string> parse_elements(std::string_view name, const ElementOptions& options) {
  const std::string plain = text::strip_markup(name);
  const auto& symbols = element_symbols();
  std::set<std::string> out;

  auto add = [&](std::string sym) {
    if (!options.include_oxygen_hydrogen && (sym == "O" || sym == "H")) return;
    out.insert(std::move(sym));
  };

  std::size_t i = 0;
  while (i < plain.size()) {
    if (!is_alnum(plain[i])) {
      ++i;
      continue;
    }
    std::size_t j = i;
    while (j < plain.size() && is_alnum(plain[j])) ++j;
    const std::string_view token(plain.data() + i, j - i);
    i = j;
    if (std::find(options.decorations.begin(), options.decorations.end(), token) != options.decorations.end()) {
      continue;
    }
    for (std::size_t k = 0; k < token.size();) {
      if (!is_upper(token[k])) {
        ++k;
        continue;
      }
      if (k + 1 < token.size() && is_lower(token[k + 1])) {
        std::string two(token.substr(k, 2));
        if (symbols.contains(two)) {
          add(std::move(two));
          k += 2;
          continue;
        }
      }
      std::string one(1, token[k]);
      if (symbols.contains(one)) add(std::move(one));
      ++k;
    }
  }
  return out;
}

ElectrolyteRules ElectrolyteRules::defaults() {
  return {{{"KOH", ElectrolyteClass::Alkaline},
           {"NaOH", ElectrolyteClass::Alkaline},
           {"H2SO4", ElectrolyteClass::Acidic},
           {"HClO4", ElectrolyteClass::Acidic},
           {"PBS", ElectrolyteClass::Neutral},
           {"phosphate", ElectrolyteClass::Neutral}}};
}

ElectrolyteClass classify_electrolyte(std::string_view raw, const ElectrolyteRules& rules) {
  const std::string s = text::fold_script_digits(text::strip_markup(raw));
  for (const auto& [pattern, cls] : rules.patterns) {
    if (s.find(text::fold_script_digits(pattern)) != std::string::npos) return cls;
  }
  return ElectrolyteClass::Unknown;
}

ReactionType classify_reaction(std::string_view raw) {
  const std::string s = text::normalize_for_match(raw);
  auto word = [&](std::string_view w) {
    for (std::size_t pos = s.find(w); pos != std::string::npos; pos = s.find(w, pos + 1)) {
      const bool left = pos == 0 || !std::isalpha(static_cast<unsigned char>(s[pos - 1]));
      const std::size_t end = pos + w.size();
      const bool right = end == s.size() || !std::isalpha(static_cast<unsigned char>(s[end]));
      if (left && right) return true;
    }
    return false;
  };
  if (word("oer") || s.find("oxygen evolution") != std::string::npos) return ReactionType::OER;
  if (word("her") || s.find("hydrogen evolution") != std::string::npos) return ReactionType::HER;
  return ReactionType::Other;
}

std::optional<double> parse_overpotential_mv(std::string_view raw) {
  const std::string s = clean_numeric(raw);
  std::optional<double> unitless;
  for (std::size_t from = 0;;) {
    const auto num = find_number(s, from);
    if (!num) break;
    const std::string_view rest = skip_spaces(std::string_view(s).substr(num->end));
    if (starts_with_unit(rest, "mV")) return num->value;
    if (starts_with_unit(rest, "V")) return num->value * 1000.0;
    if (!unitless) unitless = num->value;
    from = num->end;
  }
  return unitless;
}

std::optional<double> parse_current_density(std::string_view raw) {
  const std::string s = clean_numeric(raw);
  const auto num = find_number(s);
  if (!num) return std::nullopt;
  const std::string_view rest = skip_spaces(std::string_view(s).substr(num->end));
  if (rest.substr(0, 1) == "A") return num->value * 1000.0;
  return num->value;
}

EntrySet entries_from_records(const std::vector<ExtractionRecord>& records, const ElectrolyteRules& rules,
                              const ElementOptions& options) {
  EntrySet set;
  for (const auto& record : records) {
    for (const auto& [catalyst, performances] : record.catalysts) {
      CatalystEntry base;
      base.name = catalyst;
      base.elements = parse_elements(catalyst, options);
      bool emitted = false;
      for (const auto& [performance, props] : performances) {
        auto prop = [&](const char* key) -> std::string_view {
          const auto it = props.find(key);
          return it == props.end() ? std::string_view{} : std::string_view(it->second);
        };
        if (base.electrolyte == ElectrolyteClass::Unknown && !prop("electrolyte").empty()) {
          base.electrolyte = classify_electrolyte(prop("electrolyte"), rules);
        }
        if (base.reaction == ReactionType::Other) {
          base.reaction = classify_reaction(!prop("reaction_type").empty() ? prop("reaction_type") : performance);
        }
        const bool is_eta = is_overpotential_name(performance) || !prop("overpotential").empty();
        if (!is_eta) continue;
        CatalystEntry entry = base;
        if (!prop("reaction_type").empty()) entry.reaction = classify_reaction(prop("reaction_type"));
        if (!prop("electrolyte").empty()) entry.electrolyte = classify_electrolyte(prop("electrolyte"), rules);
        const std::string_view value = !prop("overpotential").empty() ? prop("overpotential") : prop("value");
        entry.overpotential_mv = parse_overpotential_mv(value);
        if (!entry.overpotential_mv) ++set.skipped_overpotentials;
        if (!prop("current_density").empty()) entry.current_density = parse_current_density(prop("current_density"));
        set.entries.push_back(std::move(entry));
        emitted = true;
      }
      if (!emitted) set.entries.push_back(std::move(base));
    }
  }
  return set;
}

std::vector<ExtractionRecord> load_database(const std::filesystem::path& path) {
  std::vector<ExtractionRecord> out;
  if (std::filesystem::is_directory(path)) {
    auto loaded = eval::load_record_dir(path, ParseMode::Lenient);
    for (auto& [name, record] : loaded.records) out.push_back(std::move(record));
    return out;
  }
  nlohmann::json j;
  try {
    j = nlohmann::json::parse(io::read_file(path));
  } catch (const nlohmann::json::parse_error& e) {
    throw Error(ErrorCode::InvalidInput, path.string() + ": " + e.what());
  }
  if (j.is_array()) {
    for (const auto& item : j) out.push_back(record_from_json(item, ParseMode::Lenient));
  } else {
    out.push_back(record_from_json(j, ParseMode::Lenient));
  }
  return out;
}

std::string_view to_string(Facet f) {
  switch (f) {
    case Facet::Reaction: return "reaction";
    case Facet::Electrolyte: return "electrolyte";
    case Facet::CurrentDensity: return "current_density";
    case Facet::ReactionElectrolyte: return "reaction+electrolyte";
    case Facet::ReactionCurrentDensity: return "reaction+current_density";
  }
  return "reaction";
}

Facet facet_from_string(std::string_view s) {
  for (Facet f : {Facet::Reaction, Facet::Electrolyte, Facet::CurrentDensity, Facet::ReactionElectrolyte,
                  Facet::ReactionCurrentDensity}) {
    if (to_string(f) == s) return f;
  }
  throw Error(ErrorCode::InvalidInput, "unknown facet: " + std::string(s));
}

std::string facet_key(const CatalystEntry& e, Facet facet) {
  const std::string reaction(to_string(e.reaction));
  const std::string electrolyte(to_string(e.electrolyte));
  const std::string density = e.current_density ? format_number(*e.current_density) : "unknown";
  switch (facet) {
    case Facet::Reaction: return reaction;
    case Facet::Electrolyte: return electrolyte;
    case Facet::CurrentDensity: return density;
    case Facet::ReactionElectrolyte: return reaction + "|" + electrolyte;
    case Facet::ReactionCurrentDensity: return reaction + "|" + density;
  }
  return reaction;
}

std::map<std::string, std::vector<Bin>> histogram(const std::vector<CatalystEntry>& entries, double bin_width_mv,
                                                   Facet facet) {
  if (!(bin_width_mv > 0.0) || !std::isfinite(bin_width_mv)) {
    throw Error(ErrorCode::InvalidInput, "bin width must be positive");
  }
  std::map<std::string, std::map<long long, std::size_t>> counts;
  for (const auto& e : entries) {
    auto& facet_counts = counts[facet_key(e, facet)];
    if (!e.overpotential_mv) continue;
    ++facet_counts[static_cast<long long>(std::floor(*e.overpotential_mv / bin_width_mv))];
  }
  std::map<std::string, std::vector<Bin>> out;
  for (const auto& [key, bins] : counts) {
    auto& list = out[key];
    std::size_t total = 0;
    for (const auto& [k, n] : bins) total += n;
    for (const auto& [k, n] : bins) {
      list.push_back({static_cast<double>(k) * bin_width_mv, static_cast<double>(k + 1) * bin_width_mv, n,
                      static_cast<double>(n) / static_cast<double>(total)});
    }
  }
  return out;
}

std::string histogram_csv(const std::map<std::string, std::vector<Bin>>& hist) {
  std::string out = "facet,bin_lower_mv,bin_upper_mv,count,normalized\n";
  char buf[160];
  for (const auto& [key, bins] : hist) {
    for (const auto& b : bins) {
      std::snprintf(buf, sizeof buf, ",%g,%g,%zu,%.10g\n", b.lower, b.upper, b.count, b.normalized);
      out += key;
      out += buf;
    }
  }
  return out;
}

CoUsageGraph mine_associations(const std::vector<CatalystEntry>& entries, double min_support) {
  if (!(min_support >= 0.0 && min_support <= 1.0)) {
    throw Error(ErrorCode::InvalidInput, "min_support must lie in [0, 1]");
  }
  CoUsageGraph g;
  g.entry_count = entries.size();
  for (const auto& e : entries) {
    for (const auto& a : e.elements) ++g.nodes[a];
    for (auto a = e.elements.begin(); a != e.elements.end(); ++a) {
      for (auto b = std::next(a); b != e.elements.end(); ++b) ++g.edges[{*a, *b}];
    }
  }
  if (g.entry_count > 0) {
    const double n = static_cast<double>(g.entry_count);
    std::erase_if(g.edges, [&](const auto& kv) { return static_cast<double>(kv.second) / n < min_support; });
  }
  return g;
}

CoUsageGraph anchor_subgraph(const CoUsageGraph& graph, const std::string& anchor) {
  CoUsageGraph sub;
  sub.entry_count = graph.entry_count;
  if (const auto it = graph.nodes.find(anchor); it != graph.nodes.end()) sub.nodes.insert(*it);
  for (const auto& [pair, count] : graph.edges) {
    if (pair.first != anchor && pair.second != anchor) continue;
    sub.edges.emplace(pair, count);
    for (const auto& el : {pair.first, pair.second}) {
      if (const auto it = graph.nodes.find(el); it != graph.nodes.end()) sub.nodes.insert(*it);
    }
  }
  return sub;
}

std::map<ElectrolyteClass, std::map<std::string, std::size_t>> element_frequencies(
    const std::vector<CatalystEntry>& entries) {
  std::map<ElectrolyteClass, std::map<std::string, std::size_t>> out;
  for (const auto& e : entries) {
    for (const auto& el : e.elements) ++out[e.electrolyte][el];
  }
  return out;
}

nlohmann::json to_json(const CoUsageGraph& graph) {
  nlohmann::json edges = nlohmann::json::array();
  for (const auto& [pair, count] : graph.edges) {
    edges.push_back({{"source", pair.first}, {"target", pair.second}, {"count", count}});
  }
  return {{"entry_count", graph.entry_count}, {"nodes", graph.nodes}, {"edges", std::move(edges)}};
}

nlohmann::json to_json(const CatalystEntry& e) {
  nlohmann::json j{{"name", e.name},
                   {"elements", e.elements},
                   {"reaction", to_string(e.reaction)},
                   {"electrolyte", to_string(e.electrolyte)}};
  j["overpotential_mv"] = e.overpotential_mv ? nlohmann::json(*e.overpotential_mv) : nlohmann::json(nullptr);
  j["current_density"] = e.current_density ? nlohmann::json(*e.current_density) : nlohmann::json(nullptr);
  return j;
}

}  // namespace tablemine::stats
