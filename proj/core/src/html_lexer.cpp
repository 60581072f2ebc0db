#include "html_lexer.hpp"

#include <array>
#include <cctype>
#include <charconv>

#include "tablemine/text.hpp"

namespace tablemine::html {

const std::string* Token::attr(std::string_view key) const {
  for (const auto& [k, v] : attrs) {
    if (k == key) return &v;
  }
  return nullptr;
}

namespace {

struct NamedEntity {
  std::string_view name;
  char32_t cp;
};

// The entities publisher table HTML actually uses; anything else is kept
// verbatim.
constexpr std::array<NamedEntity, 74> kEntities{{
    {"amp", U'&'},       {"lt", U'<'},        {"gt", U'>'},        {"quot", U'"'},
    {"apos", U'\''},     {"nbsp", 0x00A0},    {"ensp", 0x2002},    {"emsp", 0x2003},
    {"thinsp", 0x2009},  {"hairsp", 0x200A},  {"minus", 0x2212},   {"ndash", 0x2013},
    {"mdash", 0x2014},   {"plusmn", 0x00B1},  {"pm", 0x00B1},      {"times", 0x00D7},
    {"divide", 0x00F7},  {"deg", 0x00B0},     {"micro", 0x00B5},   {"middot", 0x00B7},
    {"sup1", 0x00B9},    {"sup2", 0x00B2},    {"sup3", 0x00B3},    {"le", 0x2264},
    {"ge", 0x2265},      {"asymp", 0x2248},   {"approx", 0x2248},  {"sim", 0x223C},
    {"ne", 0x2260},      {"hellip", 0x2026},  {"prime", 0x2032},   {"Prime", 0x2033},
    {"lsquo", 0x2018},   {"rsquo", 0x2019},   {"ldquo", 0x201C},   {"rdquo", 0x201D},
    {"bull", 0x2022},    {"dagger", 0x2020},  {"Dagger", 0x2021},  {"sect", 0x00A7},
    {"para", 0x00B6},    {"copy", 0x00A9},    {"reg", 0x00AE},     {"permil", 0x2030},
    {"infin", 0x221E},   {"rarr", 0x2192},    {"larr", 0x2190},    {"uarr", 0x2191},
    {"darr", 0x2193},    {"alpha", 0x03B1},   {"beta", 0x03B2},    {"gamma", 0x03B3},
    {"delta", 0x03B4},   {"epsilon", 0x03B5}, {"eta", 0x03B7},     {"theta", 0x03B8},
    {"kappa", 0x03BA},   {"lambda", 0x03BB},  {"mu", 0x03BC},      {"nu", 0x03BD},
    {"pi", 0x03C0},      {"rho", 0x03C1},     {"sigma", 0x03C3},   {"tau", 0x03C4},
    {"phi", 0x03C6},     {"chi", 0x03C7},     {"psi", 0x03C8},     {"omega", 0x03C9},
    {"Delta", 0x0394},   {"Omega", 0x03A9},   {"Sigma", 0x03A3},   {"Phi", 0x03A6},
    {"Aring", 0x00C5},   {"angst", 0x00C5},
}};

bool lookup_entity(std::string_view name, char32_t& cp) {
  for (const auto& e : kEntities) {
    if (e.name == name) {
      cp = e.cp;
      return true;
    }
  }
  return false;
}

bool is_name_char(char c) {
  const auto u = static_cast<unsigned char>(c);
  return std::isalnum(u) || c == '-' || c == ':' || c == '_';
}

std::string lower(std::string_view s) { return text::to_lower_ascii(s); }

}  // namespace

std::string decode_entities(std::string_view s) {
  std::string out;
  out.reserve(s.size());
  std::size_t i = 0;
  while (i < s.size()) {
    if (s[i] != '&') {
      out.push_back(s[i++]);
      continue;
    }
    const std::size_t semi = s.find(';', i + 1);
    if (semi == std::string_view::npos || semi - i > 32) {
      out.push_back(s[i++]);
      continue;
    }
    const std::string_view body = s.substr(i + 1, semi - i - 1);
    char32_t cp = 0;
    bool ok = false;
    if (body.size() > 1 && body[0] == '#') {
      unsigned long value = 0;
      const bool hex = body[1] == 'x' || body[1] == 'X';
      const std::string_view digits = body.substr(hex ? 2 : 1);
      const auto res = std::from_chars(digits.data(), digits.data() + digits.size(), value, hex ? 16 : 10);
      if (res.ec == std::errc{} && res.ptr == digits.data() + digits.size() && value > 0 && value <= 0x10FFFF) {
        cp = static_cast<char32_t>(value);
        ok = true;
      }
    } else {
      ok = lookup_entity(body, cp);
    }
    if (!ok) {
      out.push_back(s[i++]);
      continue;
    }
    text::append_utf8(out, cp);
    i = semi + 1;
  }
  return out;
}

bool is_void_element(std::string_view name) {
  static constexpr std::array<std::string_view, 14> kVoid{
      "area", "base", "br", "col", "embed", "hr", "img", "input", "link", "meta", "param", "source", "track", "wbr"};
  for (auto v : kVoid) {
    if (v == name) return true;
  }
  return false;
}

std::vector<Token> tokenize(std::string_view html) {
  std::vector<Token> tokens;
  std::string pending_text;
  auto flush_text = [&] {
    if (pending_text.empty()) return;
    Token t;
    t.kind = Token::Kind::Text;
    t.text = decode_entities(pending_text);
    tokens.push_back(std::move(t));
    pending_text.clear();
  };

  std::size_t i = 0;
  const std::size_t n = html.size();
  while (i < n) {
    if (html[i] != '<') {
      pending_text.push_back(html[i++]);
      continue;
    }
    if (html.substr(i, 4) == "<!--") {
      const std::size_t end = html.find("-->", i + 4);
      i = end == std::string_view::npos ? n : end + 3;
      continue;
    }
    if (i + 1 < n && (html[i + 1] == '!' || html[i + 1] == '?')) {
      const std::size_t end = html.find('>', i);
      i = end == std::string_view::npos ? n : end + 1;
      continue;
    }
    const bool closing = i + 1 < n && html[i + 1] == '/';
    std::size_t j = i + (closing ? 2 : 1);
    if (j >= n || !std::isalpha(static_cast<unsigned char>(html[j]))) {
      pending_text.push_back(html[i++]);
      continue;
    }
    std::size_t name_end = j;
    while (name_end < n && is_name_char(html[name_end])) ++name_end;

    Token tag;
    tag.kind = closing ? Token::Kind::EndTag : Token::Kind::StartTag;
    tag.name = lower(html.substr(j, name_end - j));

    // Attributes up to the closing '>'.
    std::size_t k = name_end;
    while (k < n && html[k] != '>') {
      const char c = html[k];
      if (std::isspace(static_cast<unsigned char>(c))) {
        ++k;
        continue;
      }
      if (c == '/') {
        if (k + 1 < n && html[k + 1] == '>') tag.self_closing = true;
        ++k;
        continue;
      }
      std::size_t an = k;
      while (an < n && html[an] != '=' && html[an] != '>' && html[an] != '/' &&
             !std::isspace(static_cast<unsigned char>(html[an]))) {
        ++an;
      }
      std::string key = lower(html.substr(k, an - k));
      k = an;
      while (k < n && std::isspace(static_cast<unsigned char>(html[k]))) ++k;
      std::string value;
      if (k < n && html[k] == '=') {
        ++k;
        while (k < n && std::isspace(static_cast<unsigned char>(html[k]))) ++k;
        if (k < n && (html[k] == '"' || html[k] == '\'')) {
          const char q = html[k];
          const std::size_t close = html.find(q, k + 1);
          const std::size_t stop = close == std::string_view::npos ? n : close;
          value = decode_entities(html.substr(k + 1, stop - k - 1));
          k = stop == n ? n : stop + 1;
        } else {
          std::size_t vend = k;
          while (vend < n && html[vend] != '>' && !std::isspace(static_cast<unsigned char>(html[vend]))) ++vend;
          value = decode_entities(html.substr(k, vend - k));
          k = vend;
        }
      }
      if (!key.empty()) tag.attrs.emplace_back(std::move(key), std::move(value));
    }
    i = k < n ? k + 1 : n;

    flush_text();
    const bool raw_text = !closing && (tag.name == "script" || tag.name == "style");
    const std::string raw_name = tag.name;
    tokens.push_back(std::move(tag));
    if (raw_text) {
      const std::string close_tag = "</" + raw_name;
      std::size_t end = i;
      while (true) {
        end = html.find('<', end);
        if (end == std::string_view::npos) {
          end = n;
          break;
        }
        if (lower(html.substr(end, close_tag.size())) == close_tag) break;
        ++end;
      }
      i = end;
    }
  }
  flush_text();
  return tokens;
}

}  // namespace tablemine::html
