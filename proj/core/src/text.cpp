#include "tablemine/text.hpp"

#include <cctype>

namespace tablemine::text {

std::u32string decode_utf8(std::string_view s) {
  std::u32string out;
  out.reserve(s.size());
  std::size_t i = 0;
  while (i < s.size()) {
    const auto b0 = static_cast<unsigned char>(s[i]);
    int extra = 0;
    char32_t cp = 0;
    if (b0 < 0x80) {
      cp = b0;
    } else if ((b0 & 0xE0) == 0xC0) {
      cp = b0 & 0x1F;
      extra = 1;
    } else if ((b0 & 0xF0) == 0xE0) {
      cp = b0 & 0x0F;
      extra = 2;
    } else if ((b0 & 0xF8) == 0xF0) {
      cp = b0 & 0x07;
      extra = 3;
    } else {
      out.push_back(U'\uFFFD');
      ++i;
      continue;
    }
    bool ok = true;
    for (int k = 1; k <= extra; ++k) {
      if (i + k >= s.size()) {
        ok = false;
        break;
      }
      const auto bk = static_cast<unsigned char>(s[i + k]);
      if ((bk & 0xC0) != 0x80) {
        ok = false;
        break;
      }
      cp = (cp << 6) | (bk & 0x3F);
    }
    if (!ok) {
      out.push_back(U'\uFFFD');
      ++i;
      continue;
    }
    out.push_back(cp);
    i += extra + 1;
  }
  return out;
}

void append_utf8(std::string& out, char32_t cp) {
  if (cp < 0x80) {
    out.push_back(static_cast<char>(cp));
  } else if (cp < 0x800) {
    out.push_back(static_cast<char>(0xC0 | (cp >> 6)));
    out.push_back(static_cast<char>(0x80 | (cp & 0x3F)));
  } else if (cp < 0x10000) {
    out.push_back(static_cast<char>(0xE0 | (cp >> 12)));
    out.push_back(static_cast<char>(0x80 | ((cp >> 6) & 0x3F)));
    out.push_back(static_cast<char>(0x80 | (cp & 0x3F)));
  } else {
    out.push_back(static_cast<char>(0xF0 | (cp >> 18)));
    out.push_back(static_cast<char>(0x80 | ((cp >> 12) & 0x3F)));
    out.push_back(static_cast<char>(0x80 | ((cp >> 6) & 0x3F)));
    out.push_back(static_cast<char>(0x80 | (cp & 0x3F)));
  }
}

std::string encode_utf8(std::u32string_view s) {
  std::string out;
  out.reserve(s.size());
  for (char32_t cp : s) append_utf8(out, cp);
  return out;
}

bool is_unicode_space(char32_t cp) {
  switch (cp) {
    case U' ': case U'\t': case U'\n': case U'\r': case U'\f': case U'\v':
    case U'\u0085': case U'\u00A0': case U'\u1680': case U'\u2028':
    case U'\u2029': case U'\u202F': case U'\u205F': case U'\u3000':
      return true;
    default:
      return cp >= U'\u2000' && cp <= U'\u200A';
  }
}

std::string collapse_whitespace(std::string_view s) {
  std::string out;
  out.reserve(s.size());
  bool pending_space = false;
  for (char32_t cp : decode_utf8(s)) {
    if (is_unicode_space(cp)) {
      pending_space = !out.empty();
      continue;
    }
    if (pending_space) {
      out.push_back(' ');
      pending_space = false;
    }
    append_utf8(out, cp);
  }
  return out;
}

std::string to_lower_ascii(std::string_view s) {
  std::string out(s);
  for (char& c : out) c = static_cast<char>(std::tolower(static_cast<unsigned char>(c)));
  return out;
}

std::string fold_script_digits(std::string_view s) {
  std::string out;
  out.reserve(s.size());
  for (char32_t cp : decode_utf8(s)) {
    if (cp >= U'\u2080' && cp <= U'\u2089') {
      out.push_back(static_cast<char>('0' + (cp - U'\u2080')));
    } else if (cp == U'\u2070') {
      out.push_back('0');
    } else if (cp == U'\u00B9') {
      out.push_back('1');
    } else if (cp == U'\u00B2') {
      out.push_back('2');
    } else if (cp == U'\u00B3') {
      out.push_back('3');
    } else if (cp >= U'\u2074' && cp <= U'\u2079') {
      out.push_back(static_cast<char>('4' + (cp - U'\u2074')));
    } else {
      append_utf8(out, cp);
    }
  }
  return out;
}

namespace {

bool opens_span(std::string_view s, std::size_t i) {
  return i + 1 < s.size() && (s[i] == '^' || s[i] == '_') && s[i + 1] == '{';
}

// Index of the '}' closing a span whose content starts at `begin`, or npos.
std::size_t matching_brace(std::string_view s, std::size_t begin) {
  int depth = 0;
  for (std::size_t i = begin; i < s.size(); ++i) {
    if (s[i] == '{') {
      ++depth;
    } else if (s[i] == '}') {
      if (depth == 0) return i;
      --depth;
    }
  }
  return std::string_view::npos;
}

}  // namespace

std::vector<MarkupSpan> decode_markup(std::string_view s) {
  std::vector<MarkupSpan> spans;
  std::string plain;
  std::size_t i = 0;
  while (i < s.size()) {
    if (opens_span(s, i)) {
      const std::size_t close = matching_brace(s, i + 2);
      if (close != std::string_view::npos) {
        if (!plain.empty()) {
          spans.push_back({SpanKind::Plain, std::move(plain)});
          plain.clear();
        }
        spans.push_back({s[i] == '^' ? SpanKind::Sup : SpanKind::Sub,
                         std::string(s.substr(i + 2, close - i - 2))});
        i = close + 1;
        continue;
      }
    }
    plain.push_back(s[i]);
    ++i;
  }
  if (!plain.empty()) spans.push_back({SpanKind::Plain, std::move(plain)});
  return spans;
}

std::string encode_markup(const std::vector<MarkupSpan>& spans) {
  std::string out;
  for (const auto& span : spans) {
    switch (span.kind) {
      case SpanKind::Plain: out += span.text; break;
      case SpanKind::Sup: out += "^{" + span.text + "}"; break;
      case SpanKind::Sub: out += "_{" + span.text + "}"; break;
    }
  }
  return out;
}

std::string strip_markup(std::string_view s) {
  std::string out;
  out.reserve(s.size());
  // true = brace opened by a markup span, false = literal brace
  std::vector<bool> stack;
  std::size_t i = 0;
  while (i < s.size()) {
    if (opens_span(s, i) && matching_brace(s, i + 2) != std::string_view::npos) {
      stack.push_back(true);
      i += 2;
      continue;
    }
    if (s[i] == '{') {
      stack.push_back(false);
    } else if (s[i] == '}' && !stack.empty()) {
      const bool markup = stack.back();
      stack.pop_back();
      if (markup) {
        ++i;
        continue;
      }
    }
    out.push_back(s[i]);
    ++i;
  }
  return out;
}

std::string normalize_for_match(std::string_view s) {
  return to_lower_ascii(collapse_whitespace(strip_markup(s)));
}

std::string join(const std::vector<std::string>& parts, std::string_view sep) {
  std::string out;
  for (std::size_t i = 0; i < parts.size(); ++i) {
    if (i) out += sep;
    out += parts[i];
  }
  return out;
}

}  // namespace tablemine::text
