#pragma once

#include <string>
#include <string_view>
#include <utility>
#include <vector>

namespace tablemine::html {

struct Token {
  enum class Kind { Text, StartTag, EndTag };

  Kind kind = Kind::Text;
  // Lowercased tag name for tags; entity-decoded content for text.
  std::string name;
  std::string text;
  std::vector<std::pair<std::string, std::string>> attrs;
  bool self_closing = false;

  const std::string* attr(std::string_view key) const;
};

// Forgiving tokenizer: comments, doctypes, processing instructions, and the
// bodies of <script>/<style> are dropped; stray '<' is kept as text.
std::vector<Token> tokenize(std::string_view html);

std::string decode_entities(std::string_view s);

bool is_void_element(std::string_view name);

}  // namespace tablemine::html
