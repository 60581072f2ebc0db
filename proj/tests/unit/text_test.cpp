#include <random>

#include <gtest/gtest.h>

#include "tablemine/ingest.hpp"
#include "tablemine/text.hpp"

namespace tablemine::text {
namespace {

TEST(Utf8, RoundTripsAndReplacesInvalidBytes) {
  const std::string s = "η_{10} Co₂ 😀";
  EXPECT_EQ(encode_utf8(decode_utf8(s)), s);
  EXPECT_EQ(decode_utf8("a\xFF" "b"), (std::u32string{U'a', U'�', U'b'}));
  for (char32_t cp : decode_utf8("\xE2\x82")) EXPECT_EQ(cp, U'\uFFFD');
}

TEST(CollapseWhitespace, TrimsAndFoldsUnicodeSpaces) {
  EXPECT_EQ(collapse_whitespace("  a \t\n b\xC2\xA0\xC2\xA0" "c  "), "a b c");
  EXPECT_EQ(collapse_whitespace("\xE2\x80\x83x\xE3\x80\x80y"), "x y");
  EXPECT_EQ(collapse_whitespace(""), "");
  EXPECT_EQ(collapse_whitespace(" \t "), "");
}

TEST(FoldScriptDigits, MapsSubAndSuperscripts) {
  EXPECT_EQ(fold_script_digits("CO₂"), "CO2");
  EXPECT_EQ(fold_script_digits("H₂O₂"), "H2O2");
  EXPECT_EQ(fold_script_digits("cm⁻²"), "cm⁻2");
}

TEST(Markup, DecodesSpans) {
  const auto spans = decode_markup("Co_{2}FeO_{4}");
  ASSERT_EQ(spans.size(), 4u);
  EXPECT_EQ(spans[0], (MarkupSpan{SpanKind::Plain, "Co"}));
  EXPECT_EQ(spans[1], (MarkupSpan{SpanKind::Sub, "2"}));
  EXPECT_EQ(spans[3], (MarkupSpan{SpanKind::Sub, "4"}));
  EXPECT_EQ(strip_markup("Co_{2}FeO_{4}@PdO"), "Co2FeO4@PdO");
  EXPECT_EQ(strip_markup("{a}_{b}"), "{a}b");
  EXPECT_EQ(normalize_for_match("  RuO_{2}   Catalyst "), "ruo2 catalyst");
}

TEST(Markup, UnclosedSpanIsPlainText) {
  EXPECT_EQ(decode_markup("x_{2"), (std::vector<MarkupSpan>{{SpanKind::Plain, "x_{2"}}));
}

// Random sup/sub structures survive encode -> decode, and also the trip
// through HTML <sup>/<sub> and the ingest parser.
TEST(MarkupProperty, ReversibleOnSyntheticSpans) {
  std::mt19937_64 rng(11);
  const std::string alphabet = "abcXYZ0123-+.";
  for (int iter = 0; iter < 2000; ++iter) {
    std::vector<MarkupSpan> spans;
    std::string html = "<table><tr><td>";
    const int n = std::uniform_int_distribution<int>(1, 6)(rng);
    for (int i = 0; i < n; ++i) {
      auto kind = static_cast<SpanKind>(std::uniform_int_distribution<int>(0, 2)(rng));
      if (!spans.empty() && spans.back().kind == SpanKind::Plain && kind == SpanKind::Plain) kind = SpanKind::Sup;
      if (spans.empty() && kind != SpanKind::Plain) kind = SpanKind::Plain;
      std::string t;
      const int len = std::uniform_int_distribution<int>(1, 4)(rng);
      for (int k = 0; k < len; ++k) t += alphabet[std::uniform_int_distribution<std::size_t>(0, alphabet.size() - 1)(rng)];
      spans.push_back({kind, t});
      html += kind == SpanKind::Plain ? t : kind == SpanKind::Sup ? "<sup>" + t + "</sup>" : "<sub>" + t + "</sub>";
    }
    html += "</td></tr></table>";
    const std::string encoded = encode_markup(spans);
    ASSERT_EQ(decode_markup(encoded), spans) << encoded;

    const TableGrid grid = ingest::parse_html({html, "fuzz", 0});
    ASSERT_EQ(grid.body.size(), 1u);
    ASSERT_EQ(decode_markup(grid.body[0][0].text), spans) << html;
  }
}

}  // namespace
}  // namespace tablemine::text
