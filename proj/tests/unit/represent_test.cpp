#include <random>

#include <gtest/gtest.h>

#include "oracles.hpp"
#include "tablemine/error.hpp"
#include "tablemine/ingest.hpp"
#include "tablemine/io.hpp"
#include "tablemine/represent.hpp"
#include "tablemine/split.hpp"

namespace tablemine::represent {
namespace {

Row row(std::vector<std::string> cells) {
  Row r;
  int c = 0;
  for (auto& t : cells) r.push_back(Cell{t, {0, c++}, false, false});
  return r;
}

TableGrid fig2(char which) {
  const auto path = oracle::data_dir() / "fig2" / (std::string("fig2") + which + ".html");
  return ingest::parse_html({io::read_file(path), std::string("fig2") + which, 0});
}

TEST(CustomJson, SimpleGrid) {
  TableGrid g;
  g.width = 2;
  g.header.push_back(row({"Catalyst", "η"}));
  g.body.push_back(row({"RuO2", "300"}));
  const auto doc = to_custom_json(g);
  ASSERT_EQ(doc.columns.size(), 2u);
  EXPECT_EQ(doc.columns[0], (std::pair<std::string, std::vector<std::string>>{"Catalyst", {"RuO2"}}));
  EXPECT_EQ(doc.columns[1], (std::pair<std::string, std::vector<std::string>>{"η", {"300"}}));
}

TEST(CustomJson, Fig2aHeaderPath) {
  const auto doc = to_custom_json(fig2('a'));
  ASSERT_EQ(doc.columns.size(), 5u);
  EXPECT_EQ(doc.columns[1].first, "Calculation by LSV/HER/Tafel slope/mV/dec");
  EXPECT_EQ(doc.columns[1].second, (std::vector<std::string>{"103", "49"}));
}

TEST(CustomJson, EmptyBodyGivesEmptyColumns) {
  TableGrid g;
  g.width = 2;
  g.header.push_back(row({"a", "b"}));
  const auto doc = to_custom_json(g);
  ASSERT_EQ(doc.columns.size(), 2u);
  for (const auto& [k, v] : doc.columns) EXPECT_TRUE(v.empty()) << k;
}

TEST(CustomJson, RejectsSubHeaderInBody) {
  try {
    to_custom_json(fig2('b'));
    FAIL();
  } catch (const Error& e) {
    EXPECT_EQ(e.code(), ErrorCode::SubHeaderInBody);
  }
  for (const auto& part : split::split(fig2('b'))) EXPECT_NO_THROW(to_custom_json(part));
}

TEST(CustomJson, DuplicateKeysGetSuffixes) {
  TableGrid g;
  g.width = 3;
  g.header.push_back(row({"x", "x", "x"}));
  g.body.push_back(row({"1", "2", "3"}));
  const auto doc = to_custom_json(g);
  EXPECT_EQ(doc.columns[1].first, "x (2)");
  EXPECT_EQ(doc.columns[2].first, "x (3)");
}

TEST(CustomTsv, SingleCell) {
  TableGrid g;
  g.width = 1;
  g.title = "T";
  g.body.push_back(row({"a"}));
  EXPECT_EQ(to_custom_tsv(g).text, "<title>T</title>\n<table>\na\n</table>\n<caption></caption>");
}

TEST(CustomTsv, MergedMarkerOnDuplicatesOnly) {
  const auto tsv = to_custom_tsv(fig2('a')).text;
  const std::string first_line = tsv.substr(tsv.find("<table>\n") + 8, tsv.find('\n', tsv.find("<table>\n") + 8) - tsv.find("<table>\n") - 8);
  EXPECT_EQ(first_line,
            "Catalyst\tCalculation by LSV\t<merged>Calculation by LSV</merged>\t<merged>Calculation by LSV</merged>\t"
            "<merged>Calculation by LSV</merged>");
}

TEST(CustomTsv, CaptionVerbatim) {
  const auto g = fig2('c');
  const auto tsv = to_custom_tsv(g).text;
  EXPECT_NE(tsv.find("<caption>" + g.caption + "</caption>"), std::string::npos);
  EXPECT_NE(g.caption.find("Glassy carbon electrode."), std::string::npos);
}

TEST(CustomTsv, RejectsMalformedText) {
  EXPECT_THROW(parse_custom_tsv("no wrapper"), Error);
}

TEST(Goldens, Fig2) {
  const auto golden = oracle::data_dir() / "golden";
  for (char c : {'a', 'b', 'c', 'd'}) {
    const auto g = fig2(c);
    const std::string stem = std::string("fig2") + c;
    EXPECT_EQ(oracle::check_golden(golden / (stem + ".tsv"), to_custom_tsv(g).text), "") << stem;
    if (c == 'b') {
      const auto parts = split::split(g);
      for (std::size_t i = 0; i < parts.size(); ++i) {
        const std::string name = stem + "-r0" + std::to_string(i) + ".json";
        EXPECT_EQ(oracle::check_golden(golden / name, to_canonical_text(to_custom_json(parts[i]))), "") << name;
      }
    } else {
      EXPECT_EQ(oracle::check_golden(golden / (stem + ".json"), to_canonical_text(to_custom_json(g))), "") << stem;
    }
  }
}

TEST(TsvProperty, RoundTripRecoversGrid) {
  std::mt19937_64 rng(13);
  for (int i = 0; i < 3000; ++i) {
    const TableGrid g = oracle::random_grid(rng);
    const TableGrid back = parse_custom_tsv(to_custom_tsv(g).text, g.header.size());
    ASSERT_EQ(back.title, g.title);
    ASSERT_EQ(back.caption, g.caption);
    // Width is only recoverable from a row.
    if (g.row_count() > 0) ASSERT_EQ(back.width, g.width);
    ASSERT_EQ(back.header.size(), g.header.size());
    ASSERT_EQ(back.body.size(), g.body.size());
    for (std::size_t r = 0; r < g.row_count(); ++r) {
      for (std::size_t c = 0; c < g.width; ++c) {
        ASSERT_EQ(back.row_at(r)[c].text, g.row_at(r)[c].text);
        ASSERT_EQ(back.row_at(r)[c].was_merged, g.row_at(r)[c].was_merged);
      }
    }
  }
}

TEST(Html, RendersAndReparses) {
  for (char c : {'a', 'c'}) {
    const auto g = fig2(c);
    const auto back = ingest::parse_html({to_html(g), "x", 0});
    ASSERT_EQ(back.row_count(), g.row_count());
    ASSERT_EQ(back.header.size(), g.header.size());
    for (std::size_t r = 0; r < g.row_count(); ++r) {
      for (std::size_t k = 0; k < g.width; ++k) EXPECT_EQ(back.row_at(r)[k].text, g.row_at(r)[k].text);
    }
    EXPECT_EQ(back.title, g.title);
  }
}

TEST(Format, StringRoundTrip) {
  for (auto f : {InputFormat::Html, InputFormat::CustomJson, InputFormat::CustomTsv}) {
    EXPECT_EQ(format_from_string(to_string(f)), f);
  }
  EXPECT_THROW(format_from_string("xml"), Error);
}

}  // namespace
}  // namespace tablemine::represent
