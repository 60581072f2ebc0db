#include "tablemine/llm/prompts.hpp"

#include "tablemine/error.hpp"

namespace tablemine::llm {

namespace detail {
std::string_view prompt_resource(std::string_view name);
}

std::string_view to_string(PromptVariant v) {
  switch (v) {
    case PromptVariant::P1: return "P1";
    case PromptVariant::P2: return "P2";
    case PromptVariant::P3: return "P3";
  }
  return "P3";
}

PromptVariant variant_from_string(std::string_view s) {
  if (s == "P1" || s == "p1") return PromptVariant::P1;
  if (s == "P2" || s == "p2") return PromptVariant::P2;
  if (s == "P3" || s == "p3") return PromptVariant::P3;
  throw Error(ErrorCode::InvalidConfig, "unknown prompt variant: " + std::string(s));
}

std::string prompt_resource(std::string_view name) {
  std::string_view text = detail::prompt_resource(name);
  if (text.empty()) throw Error(ErrorCode::InvalidConfig, "no prompt resource named " + std::string(name));
  while (!text.empty() && (text.back() == '\n' || text.back() == ' ' || text.back() == '\r')) text.remove_suffix(1);
  return std::string(text);
}

std::string prompt_text(PromptVariant v) {
  std::string text = prompt_resource("task");
  if (v == PromptVariant::P1) return text;
  text += "\n\n" + prompt_resource("features");
  if (v == PromptVariant::P2) return text;
  return text + "\n\n" + prompt_resource("examples");
}

std::string fill_template(std::string_view tmpl, const std::map<std::string, std::string>& vars) {
  std::string out;
  std::size_t i = 0;
  while (i < tmpl.size()) {
    if (tmpl[i] == '{') {
      const std::size_t close = tmpl.find('}', i + 1);
      if (close != std::string_view::npos) {
        const auto it = vars.find(std::string(tmpl.substr(i + 1, close - i - 1)));
        if (it != vars.end()) {
          out += it->second;
          i = close + 1;
          continue;
        }
      }
    }
    out += tmpl[i++];
  }
  return out;
}

}  // namespace tablemine::llm
