#include "tablemine/screen.hpp"

#include <cctype>
#include <cmath>
#include <set>

#include "tablemine/error.hpp"
#include "tablemine/text.hpp"

namespace tablemine::screen {

std::string_view to_string(Exclusion e) { return e == Exclusion::TitleKeyword ? "TitleKeyword" : "TfidfRule"; }

const std::vector<std::string>& default_banned_title_terms() {
  static const std::vector<std::string> terms{"battery", "CO₂", "fuel cell", "methanol", "H₂O₂"};
  return terms;
}

const std::vector<std::string>& default_competitor_terms() {
  static const std::vector<std::string> terms{"battery", "co2", "aldehyde", "alcohol", "orr", "photo*"};
  return terms;
}

const std::vector<std::string>& default_tracked_terms() {
  static const std::vector<std::string> terms{"oer", "battery", "co2", "aldehyde", "alcohol", "orr", "photo*"};
  return terms;
}

namespace {

std::string fold(std::string_view s) {
  return text::to_lower_ascii(text::collapse_whitespace(text::fold_script_digits(text::strip_markup(s))));
}

std::string term_key(std::string_view term) { return fold(term); }

bool token_matches(const std::string& token, const std::string& term) {
  if (!term.empty() && term.back() == '*') {
    return token.compare(0, term.size() - 1, term, 0, term.size() - 1) == 0;
  }
  return token == term;
}

}  // namespace

bool title_exclude(std::string_view title, const std::vector<std::string>& banned) {
  const std::string t = fold(title);
  for (const auto& term : banned) {
    const std::string b = fold(term);
    if (!b.empty() && t.find(b) != std::string::npos) return true;
  }
  return false;
}

std::vector<std::string> tokenize(std::string_view body) {
  const std::string folded = text::to_lower_ascii(text::fold_script_digits(body));
  std::vector<std::string> tokens;
  std::string current;
  for (char c : folded) {
    if (std::isalnum(static_cast<unsigned char>(c))) {
      current.push_back(c);
    } else if (!current.empty()) {
      tokens.push_back(std::move(current));
      current.clear();
    }
  }
  if (!current.empty()) tokens.push_back(std::move(current));
  return tokens;
}

std::vector<DocumentStats> compute_tfidf(const std::vector<std::pair<std::string, std::string>>& corpus,
                                         const std::vector<std::string>& tracked) {
  if (corpus.empty()) throw Error(ErrorCode::EmptyCorpus, "TF-IDF needs at least one document");
  std::vector<std::string> terms;
  for (const auto& t : tracked) terms.push_back(term_key(t));

  // Pass 1: raw counts per document, document frequency per term.
  std::vector<std::map<std::string, std::size_t>> counts(corpus.size());
  std::map<std::string, std::size_t> df;
  for (std::size_t d = 0; d < corpus.size(); ++d) {
    for (const auto& token : tokenize(corpus[d].second)) {
      for (const auto& term : terms) {
        if (token_matches(token, term)) ++counts[d][term];
      }
    }
    for (const auto& [term, n] : counts[d]) {
      if (n > 0) ++df[term];
    }
  }

  // Pass 2: scores.
  const auto n_docs = static_cast<double>(corpus.size());
  std::vector<DocumentStats> out;
  out.reserve(corpus.size());
  for (std::size_t d = 0; d < corpus.size(); ++d) {
    DocumentStats stats;
    stats.doc_id = corpus[d].first;
    for (const auto& term : terms) {
      const auto it = counts[d].find(term);
      const double tf = it == counts[d].end() ? 0.0 : static_cast<double>(it->second);
      const double idf = std::log(n_docs / (1.0 + static_cast<double>(df[term])));
      stats.term_tfidf[term] = std::max(0.0, tf * idf);
    }
    out.push_back(std::move(stats));
  }
  return out;
}

bool topic_filter(const DocumentStats& stats, std::string_view target,
                  const std::vector<std::string>& competitors) {
  auto score = [&](std::string_view term) {
    const auto it = stats.term_tfidf.find(term_key(term));
    if (it == stats.term_tfidf.end()) {
      throw Error(ErrorCode::UntrackedTerm, "term '" + std::string(term) + "' is not tracked");
    }
    return it->second;
  };
  const double target_score = score(target);
  for (const auto& c : competitors) {
    if (target_score < score(c)) return false;
  }
  return true;
}

std::vector<DocumentStats> screen_corpus(const std::vector<Document>& docs) {
  std::vector<DocumentStats> out(docs.size());
  std::vector<std::pair<std::string, std::string>> kept;
  std::vector<std::size_t> kept_index;
  for (std::size_t i = 0; i < docs.size(); ++i) {
    out[i].doc_id = docs[i].doc_id;
    if (title_exclude(docs[i].title)) {
      out[i].excluded_by = Exclusion::TitleKeyword;
    } else {
      kept.emplace_back(docs[i].doc_id, docs[i].body);
      kept_index.push_back(i);
    }
  }
  if (kept.empty()) return out;
  auto stats = compute_tfidf(kept);
  for (std::size_t k = 0; k < stats.size(); ++k) {
    auto& slot = out[kept_index[k]];
    slot = std::move(stats[k]);
    if (!topic_filter(slot)) slot.excluded_by = Exclusion::TfidfRule;
  }
  return out;
}

nlohmann::json to_json(const DocumentStats& stats) {
  nlohmann::json j{{"doc_id", stats.doc_id}, {"term_tfidf", stats.term_tfidf}};
  j["excluded_by"] = stats.excluded_by ? nlohmann::json(std::string(to_string(*stats.excluded_by))) : nullptr;
  return j;
}

}  // namespace tablemine::screen
