#pragma once

#include <map>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include <json.hpp>

namespace tablemine::screen {

enum class Exclusion { TitleKeyword, TfidfRule };

std::string_view to_string(Exclusion e);

struct DocumentStats {
  std::string doc_id;
  std::map<std::string, double> term_tfidf;
  std::optional<Exclusion> excluded_by;
};

struct Document {
  std::string doc_id;
  std::string title;
  std::string body;
};

const std::vector<std::string>& default_banned_title_terms();
const std::vector<std::string>& default_competitor_terms();
// Tracked terms; a trailing '*' marks a prefix term ("photo*" counts
// "photocatalyst").
const std::vector<std::string>& default_tracked_terms();

// Case-insensitive substring match after folding sub/superscript digits, so
// "CO₂" and "CO2" are the same term.
bool title_exclude(std::string_view title, const std::vector<std::string>& banned = default_banned_title_terms());

// Lowercased alphanumeric runs (script digits folded to ASCII).
std::vector<std::string> tokenize(std::string_view body);

// tfidf(t, d) = count(t, d) * ln(N / (1 + df(t))), clamped at 0.
// Throws Error(EmptyCorpus).
std::vector<DocumentStats> compute_tfidf(const std::vector<std::pair<std::string, std::string>>& corpus,
                                         const std::vector<std::string>& tracked = default_tracked_terms());

// Keep iff tfidf(target) >= every competitor's tfidf. Throws
// Error(UntrackedTerm) when a term has no entry in `stats`.
bool topic_filter(const DocumentStats& stats, std::string_view target = "oer",
                  const std::vector<std::string>& competitors = default_competitor_terms());

// Title exclusion, then TF-IDF over the surviving documents, then the topic
// rule. Output order follows input order; title-excluded documents carry no
// scores.
std::vector<DocumentStats> screen_corpus(const std::vector<Document>& docs);

nlohmann::json to_json(const DocumentStats& stats);

}  // namespace tablemine::screen
