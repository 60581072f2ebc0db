#include <filesystem>
#include <map>

#include <gtest/gtest.h>

#include "oracles.hpp"
#include "tablemine/error.hpp"
#include "tablemine/eval.hpp"
#include "tablemine/io.hpp"
#include "tablemine/pipeline.hpp"

namespace tablemine::pipeline {
namespace {

namespace fs = std::filesystem;

fs::path corpus_dir() { return oracle::data_dir() / "corpus"; }

fs::path fresh_dir(const std::string& name) {
  const auto dir = fs::temp_directory_path() / ("tablemine_pipeline_" + name);
  fs::remove_all(dir);
  return dir;
}

std::map<std::string, std::string> tree(const fs::path& root) {
  std::map<std::string, std::string> out;
  for (const auto& e : fs::recursive_directory_iterator(root)) {
    if (e.is_regular_file()) out[fs::relative(e.path(), root).generic_string()] = io::read_file(e.path());
  }
  return out;
}

TEST(Config, ParsesAndRejectsUnknownKeys) {
  const auto c = load_config(corpus_dir() / "config.json");
  EXPECT_EQ(c.method, Method::FewShot);
  EXPECT_TRUE(c.mock);
  EXPECT_EQ(c.parallelism, 3u);
  EXPECT_EQ(c.shots, corpus_dir() / "shots.jsonl");
  EXPECT_THROW(config_from_json({{"methd", "fewshot"}}), Error);
  EXPECT_THROW(config_from_json({{"mock", {{"enabeld", true}}}}), Error);
  EXPECT_THROW(config_from_json({{"parallelism", 0}}), Error);
  const auto back = config_from_json(to_json(c));
  EXPECT_EQ(to_json(back), to_json(c));
}

TEST(TableKey, Format) {
  EXPECT_EQ(table_key("10.1021/acs x", 3), "10.1021_acs_x-t03");
}

TEST(Run, MockCorpusMatchesGolds) {
  const auto dir = fresh_dir("golds");
  const auto report = run_pipeline(load_config(corpus_dir() / "config.json"), corpus_dir(), dir);
  EXPECT_EQ(report.tables_in, 10u);
  EXPECT_EQ(report.categories.at("performance"), 7u);
  EXPECT_EQ(report.categories.at("calculated"), 1u);
  EXPECT_EQ(report.categories.at("characterization"), 1u);
  EXPECT_EQ(report.categories.at("noise"), 1u);
  EXPECT_EQ(report.transposed, 1u);
  EXPECT_EQ(report.units, 18u);
  EXPECT_EQ(report.records_out + report.quarantined.size(), report.units);
  EXPECT_EQ(report.exit_code(), 0);
  EXPECT_GT(report.tokens.calls, 0u);
  ASSERT_TRUE(report.cost_usd.has_value());
  EXPECT_GT(*report.cost_usd, 0.0);

  const auto pred = eval::load_record_dir(dir / "records", ParseMode::Strict);
  const auto gold = eval::load_record_dir(corpus_dir() / "golds", ParseMode::Strict);
  EXPECT_TRUE(pred.failures.empty());
  const auto score = eval::score_corpus(pred.records, gold.records);
  EXPECT_EQ(score.total_f1, 1.0);
  EXPECT_EQ(score.fp, 0u);
  fs::remove_all(dir);
}

TEST(Run, RepeatIsByteIdentical) {
  const auto config = load_config(corpus_dir() / "config.json");
  const auto a = fresh_dir("repeat_a");
  const auto b = fresh_dir("repeat_b");
  run_pipeline(config, corpus_dir(), a);
  auto serial = config;
  serial.parallelism = 1;
  run_pipeline(serial, corpus_dir(), b);
  EXPECT_EQ(tree(a), tree(b));
  fs::remove_all(a);
  fs::remove_all(b);
}

TEST(Run, ResumeUsesCache) {
  const auto config = load_config(corpus_dir() / "config.json");
  const auto dir = fresh_dir("resume");
  run_pipeline(config, corpus_dir(), dir);
  auto before = tree(dir);
  const auto again = run_pipeline(config, corpus_dir(), dir);
  EXPECT_EQ(again.cache_hits, again.units);
  // Only the report changes: it counts the cache hits.
  auto after = tree(dir);
  before.erase("report.json");
  after.erase("report.json");
  EXPECT_EQ(after, before);
  fs::remove_all(dir);
}

TEST(Run, FailuresAreQuarantined) {
  auto config = load_config(corpus_dir() / "config.json");
  config.fixtures = fs::path();  // no rules: every call fails
  const auto dir = fresh_dir("quarantine");
  const auto report = run_pipeline(config, corpus_dir(), dir);
  EXPECT_EQ(report.records_out, 0u);
  EXPECT_EQ(report.quarantined.size(), report.units);
  EXPECT_EQ(report.exit_code(), 1);
  EXPECT_TRUE(fs::exists(dir / "quarantine" / "fig2a-t00-r00.json"));
  fs::remove_all(dir);
}

TEST(Run, ThreeTableCorpusWithoutSplitting) {
  const auto corpus = fresh_dir("three_src");
  fs::create_directories(corpus);
  for (const char* name : {"fig2a.html", "fig2c.html", "fig2d.html"}) {
    fs::copy_file(oracle::data_dir() / "fig2" / name, corpus / name);
  }
  PipelineConfig config;
  config.method = Method::FineTuned;
  config.split = false;
  config.mock = true;
  config.mock_defaults.default_reply = llm::DefaultReply::Fixed;
  config.mock_defaults.fixed_reply = R"({"X": {}})";
  const auto dir = fresh_dir("three");
  const auto report = run_pipeline(config, corpus, dir);
  EXPECT_EQ(report.units, 3u);
  EXPECT_EQ(report.records_out, 3u);
  EXPECT_TRUE(fs::exists(dir / "report.json"));
  EXPECT_TRUE(fs::exists(dir / "records" / "fig2d-t00.json"));
  fs::remove_all(dir);
  fs::remove_all(corpus);
}

TEST(Run, EmptyCorpus) {
  const auto corpus = fresh_dir("empty_src");
  fs::create_directories(corpus);
  PipelineConfig config;
  config.method = Method::ZeroShot;
  const auto dir = fresh_dir("empty");
  const auto report = run_pipeline(config, corpus, dir);
  EXPECT_EQ(report.tables_in, 0u);
  EXPECT_EQ(report.units, 0u);
  EXPECT_EQ(report.exit_code(), 0);
  EXPECT_TRUE(fs::exists(dir / "report.json"));
  fs::remove_all(dir);
  fs::remove_all(corpus);
}

TEST(Run, CustomJsonWithoutSplitRejectsSubHeaders) {
  PipelineConfig config;
  config.method = Method::ZeroShot;
  config.mock = true;
  config.split = false;
  config.input_format = represent::InputFormat::CustomJson;
  const auto dir = fresh_dir("plan");
  try {
    run_pipeline(config, oracle::data_dir() / "fig2" / "fig2b.html", dir);
    FAIL();
  } catch (const Error& e) {
    EXPECT_EQ(e.code(), ErrorCode::InvalidConfig);
  }
  fs::remove_all(dir);
}

TEST(Run, FewShotNeedsShots) {
  PipelineConfig config;
  config.mock = true;
  EXPECT_THROW(run_pipeline(config, oracle::data_dir() / "fig2", fresh_dir("noshots")), Error);
}

TEST(RenderInput, HtmlVerbatimOnlyWhenGiven) {
  TableGrid g;
  g.width = 1;
  g.body.push_back({Cell{"a", {0, 0}, false, false}});
  const std::string raw = "<table><tr><td>a</td></tr></table>";
  EXPECT_EQ(render_input(g, represent::InputFormat::Html, &raw), raw);
  EXPECT_NE(render_input(g, represent::InputFormat::Html), raw);
  EXPECT_EQ(render_input(g, represent::InputFormat::CustomTsv), "<title></title>\n<table>\na\n</table>\n<caption></caption>");
}

}  // namespace
}  // namespace tablemine::pipeline
