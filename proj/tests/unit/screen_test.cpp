#include <algorithm>
#include <cmath>

#include <gtest/gtest.h>

#include "tablemine/error.hpp"
#include "tablemine/screen.hpp"

namespace tablemine::screen {
namespace {

DocumentStats scored(std::map<std::string, double> scores) {
  DocumentStats s;
  s.doc_id = "d";
  for (const auto& t : default_tracked_terms()) s.term_tfidf[t] = 0.0;
  for (auto& [k, v] : scores) s.term_tfidf[k] = v;
  return s;
}

TEST(TitleExclude, SpecExamples) {
  EXPECT_TRUE(title_exclude("Zn-air battery cathode design"));
  EXPECT_FALSE(title_exclude("OER electrocatalyst for water oxidation"));
  EXPECT_FALSE(title_exclude(""));
  EXPECT_TRUE(title_exclude("Electroreduction of CO2 to formate"));
  EXPECT_TRUE(title_exclude("H₂O₂ synthesis"));
  EXPECT_TRUE(title_exclude("Selective H_{2}O_{2} production"));
}

TEST(Tokenize, LowercasesAndFoldsDigits) {
  EXPECT_EQ(tokenize("OER, CO₂-reduction!"), (std::vector<std::string>{"oer", "co2", "reduction"}));
}

TEST(Tfidf, SingleDocumentClampsToZero) {
  const auto stats = compute_tfidf({{"d1", "oer oer oer"}});
  ASSERT_EQ(stats.size(), 1u);
  EXPECT_EQ(stats[0].term_tfidf.at("oer"), 0.0);
}

TEST(Tfidf, TwoDocumentCorpus) {
  const auto stats = compute_tfidf({{"d1", "oer oer"}, {"d2", "battery"}});
  EXPECT_DOUBLE_EQ(stats[0].term_tfidf.at("oer"), 2.0 * std::log(2.0 / 2.0));
  EXPECT_EQ(stats[1].term_tfidf.at("oer"), 0.0);
}

TEST(Tfidf, FormulaOnLargerCorpus) {
  std::vector<std::pair<std::string, std::string>> corpus{
      {"a", "oer oer photocatalyst"}, {"b", "battery"}, {"c", "nothing"}, {"d", "nothing"}, {"e", "orr"}};
  const auto stats = compute_tfidf(corpus);
  EXPECT_NEAR(stats[0].term_tfidf.at("oer"), 2.0 * std::log(5.0 / 2.0), 1e-12);
  EXPECT_NEAR(stats[0].term_tfidf.at("photo*"), std::log(5.0 / 2.0), 1e-12);
  for (const auto& s : stats) {
    for (const auto& [t, v] : s.term_tfidf) EXPECT_GE(v, 0.0) << t;
  }
}

TEST(Tfidf, EmptyCorpusThrows) {
  try {
    compute_tfidf({});
    FAIL();
  } catch (const Error& e) {
    EXPECT_EQ(e.code(), ErrorCode::EmptyCorpus);
  }
}

TEST(TopicFilter, SpecExamples) {
  EXPECT_TRUE(topic_filter(scored({{"oer", 5.0}, {"battery", 4.9}})));
  EXPECT_FALSE(topic_filter(scored({{"oer", 1.0}, {"battery", 2.0}})));
  EXPECT_TRUE(topic_filter(scored({})));
}

TEST(TopicFilter, UntrackedTermThrows) {
  DocumentStats s;
  s.term_tfidf["oer"] = 1.0;
  try {
    topic_filter(s);
    FAIL();
  } catch (const Error& e) {
    EXPECT_EQ(e.code(), ErrorCode::UntrackedTerm);
  }
}

TEST(TopicFilter, InvariantUnderPositiveScaling) {
  for (double k : {0.5, 2.0, 1e6}) {
    const std::map<std::string, double> base{{"oer", 3.0}, {"orr", 2.9}, {"co2", 1.0}};
    std::map<std::string, double> scaled;
    for (auto& [t, v] : base) scaled[t] = v * k;
    EXPECT_EQ(topic_filter(scored(base)), topic_filter(scored(scaled)));
    const std::map<std::string, double> lose{{"oer", 1.0}, {"alcohol", 1.5}};
    std::map<std::string, double> lose_scaled;
    for (auto& [t, v] : lose) lose_scaled[t] = v * k;
    EXPECT_EQ(topic_filter(scored(lose)), topic_filter(scored(lose_scaled)));
  }
}

TEST(ScreenCorpus, OrderFollowsInputAndIsOrderInvariant) {
  std::vector<Document> docs{{"a", "OER catalysts", "oer oer oer water"},
                             {"b", "Li battery anodes", "battery"},
                             {"c", "Bifunctional ORR", "orr orr orr oer"},
                             {"d", "Layered hydroxides", "oer"},
                             {"e", "Misc", "nothing here"}};
  const auto out = screen_corpus(docs);
  ASSERT_EQ(out.size(), docs.size());
  for (std::size_t i = 0; i < docs.size(); ++i) EXPECT_EQ(out[i].doc_id, docs[i].doc_id);
  EXPECT_EQ(out[1].excluded_by, Exclusion::TitleKeyword);
  EXPECT_TRUE(out[1].term_tfidf.empty());
  EXPECT_EQ(out[2].excluded_by, Exclusion::TfidfRule);
  EXPECT_FALSE(out[0].excluded_by.has_value());

  std::vector<Document> reversed(docs.rbegin(), docs.rend());
  const auto rev = screen_corpus(reversed);
  for (std::size_t i = 0; i < docs.size(); ++i) {
    const auto& fwd = out[i];
    const auto& back = rev[docs.size() - 1 - i];
    EXPECT_EQ(fwd.doc_id, back.doc_id);
    EXPECT_EQ(fwd.excluded_by, back.excluded_by);
    EXPECT_EQ(fwd.term_tfidf, back.term_tfidf);
  }
}

}  // namespace
}  // namespace tablemine::screen
