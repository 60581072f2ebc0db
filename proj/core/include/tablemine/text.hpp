#pragma once

#include <string>
#include <string_view>
#include <vector>

namespace tablemine::text {

// Lenient UTF-8 decoding: invalid sequences become U+FFFD.
std::u32string decode_utf8(std::string_view s);
void append_utf8(std::string& out, char32_t cp);
std::string encode_utf8(std::u32string_view s);

bool is_unicode_space(char32_t cp);

// Trim, map every Unicode space (including NBSP, tab, newline) to ' ', and
// collapse runs to a single space.
std::string collapse_whitespace(std::string_view s);

std::string to_lower_ascii(std::string_view s);

// Maps subscript and superscript digits (U+2080.., U+2070..) to ASCII digits.
std::string fold_script_digits(std::string_view s);

// Inline super/subscript notation: "^{...}" and "_{...}".
enum class SpanKind { Plain, Sup, Sub };

struct MarkupSpan {
  SpanKind kind = SpanKind::Plain;
  std::string text;

  bool operator==(const MarkupSpan&) const = default;
};

std::vector<MarkupSpan> decode_markup(std::string_view s);
std::string encode_markup(const std::vector<MarkupSpan>& spans);

// Drops the "^{" / "_{" wrappers but keeps their content: "Co_{2}O" -> "Co2O".
std::string strip_markup(std::string_view s);

// strip_markup + collapse_whitespace + to_lower_ascii.
std::string normalize_for_match(std::string_view s);

std::string join(const std::vector<std::string>& parts, std::string_view sep);

}  // namespace tablemine::text
