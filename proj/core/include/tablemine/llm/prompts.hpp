#pragma once

#include <map>
#include <string>
#include <string_view>

namespace tablemine::llm {

// P1: task description. P2: P1 + feature list. P3: P2 + example outputs.
enum class PromptVariant { P1, P2, P3 };

std::string_view to_string(PromptVariant v);
PromptVariant variant_from_string(std::string_view s);

std::string prompt_text(PromptVariant v);

// Prompt resource by file stem (resources/prompts/<name>.txt), trailing
// whitespace trimmed. Throws Error(InvalidConfig) for an unknown name.
std::string prompt_resource(std::string_view name);

// Replaces "{key}" for each key in `vars`; other braces are left alone.
// Substituted text is not rescanned.
std::string fill_template(std::string_view tmpl, const std::map<std::string, std::string>& vars);

}  // namespace tablemine::llm
