#include "tablemine/llm/hallucination.hpp"

#include "tablemine/error.hpp"
#include "tablemine/llm/prompts.hpp"
#include "tablemine/text.hpp"

namespace tablemine::llm {

namespace {

std::string normalize(std::string_view s) { return text::normalize_for_match(text::fold_script_digits(s)); }

std::string remove_all(std::string s, std::string_view what) {
  for (std::size_t pos = s.find(what); pos != std::string::npos; pos = s.find(what, pos)) s.erase(pos, what.size());
  return s;
}

class Judge {
 public:
  Judge(const represent::CustomTsvDoc& tsv, ChatClient* client, const FilterOptions& options)
      : evidence_(evidence_text(tsv)), tsv_(tsv), client_(client), options_(options) {}

  bool keep(std::string_view key) {
    if (evidenced(evidence_, key)) return true;
    if (options_.mode == FilterMode::Deterministic) return false;
    const std::string question = fill_template(prompt_resource("followup"), {{"table", tsv_.text}, {"key", std::string(key)}});
    const ChatResponse r = client_->complete({options_.call.model,
                                              {{Role::User, question}},
                                              options_.call.temperature,
                                              options_.call.frequency_penalty,
                                              options_.call.presence_penalty});
    return text::to_lower_ascii(text::collapse_whitespace(r.content)).starts_with("yes");
  }

  bool keep_performance(const std::string& name) {
    if (evidenced(evidence_, name)) return true;
    const auto it = options_.aliases.find(text::to_lower_ascii(text::collapse_whitespace(name)));
    if (it != options_.aliases.end()) {
      for (const auto& alias : it->second) {
        if (evidenced(evidence_, alias)) return true;
      }
    }
    return keep(name);
  }

 private:
  std::string evidence_;
  const represent::CustomTsvDoc& tsv_;
  ChatClient* client_;
  const FilterOptions& options_;
};

}  // namespace

std::string_view to_string(FilterMode mode) { return mode == FilterMode::Llm ? "llm" : "deterministic"; }

FilterMode filter_mode_from_string(std::string_view s) {
  if (s == "llm") return FilterMode::Llm;
  if (s == "deterministic") return FilterMode::Deterministic;
  throw Error(ErrorCode::InvalidConfig, "unknown filter mode: " + std::string(s));
}

const std::map<std::string, std::vector<std::string>>& default_performance_aliases() {
  static const std::map<std::string, std::vector<std::string>> aliases{
      {"overpotential", {"\xCE\xB7", "eta"}},
      {"tafel slope", {"tafel"}},
      {"onset potential", {"onset"}},
      {"exchange current density", {"j_{0}", "j0", "exchange current"}},
      {"turnover frequency", {"tof"}},
  };
  return aliases;
}

std::string evidence_text(const represent::CustomTsvDoc& tsv) {
  return normalize(remove_all(remove_all(tsv.text, "<merged>"), "</merged>"));
}

bool evidenced(std::string_view evidence, std::string_view needle) {
  const std::string n = normalize(needle);
  return !n.empty() && evidence.find(n) != std::string_view::npos;
}

ExtractionRecord filter_hallucinations(const ExtractionRecord& record, const represent::CustomTsvDoc& tsv,
                                       ChatClient* client, const FilterOptions& options) {
  if (options.mode == FilterMode::Llm && client == nullptr) {
    throw Error(ErrorCode::InvalidInput, "LLM follow-up filtering needs a chat client");
  }
  Judge judge(tsv, client, options);
  ExtractionRecord out;
  out.provenance = record.provenance;
  for (const auto& [catalyst, performances] : record.catalysts) {
    if (!judge.keep(catalyst)) continue;
    auto& kept_perfs = out.catalysts[catalyst];
    for (const auto& [performance, props] : performances) {
      if (!judge.keep_performance(performance)) continue;
      auto& kept_props = kept_perfs[performance];
      for (const auto& [key, value] : props) {
        if (judge.keep(value)) kept_props.emplace(key, value);
      }
    }
  }
  return out;
}

}  // namespace tablemine::llm
