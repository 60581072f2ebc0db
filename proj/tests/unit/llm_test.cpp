#include <deque>
#include <filesystem>
#include <random>
#include <thread>

#include <gtest/gtest.h>

#include "oracles.hpp"
#include "tablemine/error.hpp"
#include "tablemine/ingest.hpp"
#include "tablemine/io.hpp"
#include "tablemine/llm/extract.hpp"
#include "tablemine/llm/fixtures.hpp"
#include "tablemine/llm/hallucination.hpp"
#include "tablemine/llm/prompts.hpp"
#include "tablemine/represent.hpp"

namespace tablemine::llm {
namespace {

// Replies from a queue and keeps every request it saw.
class ScriptedClient : public ChatClient {
 public:
  explicit ScriptedClient(std::vector<std::string> replies, std::string finish = "stop")
      : replies_(replies.begin(), replies.end()), finish_(std::move(finish)) {}

  ChatResponse complete(const ChatRequest& request) override {
    requests.push_back(request);
    if (replies_.empty()) throw Error(ErrorCode::LlmTransport, "script exhausted");
    ChatResponse r;
    r.content = replies_.front();
    replies_.pop_front();
    r.finish_reason = finish_;
    r.usage = {10, 5};
    r.model = request.model;
    return r;
  }

  std::vector<ChatRequest> requests;

 private:
  std::deque<std::string> replies_;
  std::string finish_;
};

const CallOptions kOptions{"gpt-4-1106-preview"};

ExtractionRecord gold(const std::string& catalyst, const std::string& value) {
  ExtractionRecord r;
  r.catalysts[catalyst]["overpotential"] = {{"value", value}};
  return r;
}

TEST(Prompts, VariantsNest) {
  const auto p1 = prompt_text(PromptVariant::P1);
  const auto p2 = prompt_text(PromptVariant::P2);
  const auto p3 = prompt_text(PromptVariant::P3);
  EXPECT_TRUE(p2.starts_with(p1));
  EXPECT_TRUE(p3.starts_with(p2));
  EXPECT_GT(p3.size(), p2.size());
  EXPECT_EQ(variant_from_string("P2"), PromptVariant::P2);
  EXPECT_THROW(prompt_resource("no_such_prompt"), Error);
}

TEST(Prompts, FillTemplateDoesNotRescan) {
  EXPECT_EQ(fill_template("{a} {b} {c}", {{"a", "{b}"}, {"b", "x"}}), "{b} x {c}");
}

TEST(FinetuneDataset, OneLinePerPairAndRoundTrip) {
  std::vector<TrainingPair> pairs;
  for (int i = 0; i < 126; ++i) pairs.push_back({"table " + std::to_string(i), gold("C" + std::to_string(i), std::to_string(i))});
  const auto jsonl = build_finetune_dataset(pairs, PromptVariant::P2);
  EXPECT_EQ(std::count(jsonl.begin(), jsonl.end(), '\n'), 126);
  const auto examples = parse_finetune_dataset(jsonl);
  ASSERT_EQ(examples.size(), 126u);
  for (std::size_t i = 0; i < pairs.size(); ++i) {
    EXPECT_EQ(examples[i].user, pairs[i].input_doc);
    EXPECT_EQ(examples[i].system, prompt_text(PromptVariant::P2));
    EXPECT_EQ(parse_model_output(examples[i].assistant), pairs[i].gold.catalysts);
  }
  EXPECT_EQ(build_finetune_dataset({}, PromptVariant::P1), "");
}

TEST(FinetuneDataset, InvalidGoldThrows) {
  ExtractionRecord bad;
  bad.catalysts["A"]["p"] = {{"colour", "red"}};
  try {
    make_example({"t", bad}, PromptVariant::P1);
    FAIL();
  } catch (const Error& e) {
    EXPECT_EQ(e.code(), ErrorCode::InvalidGold);
  }
}

TEST(Fewshot, BuildsConversationAndParses) {
  const std::vector<FineTuneExample> shots{{"s", "shot table", R"({"A":{}})"}};
  ScriptedClient client({R"({"RuO2": {"overpotential": {"value": "300"}}})"});
  const auto r = extract_fewshot("target", shots, PromptVariant::P3, client, kOptions);
  EXPECT_EQ(r.catalysts, gold("RuO2", "300").catalysts);
  ASSERT_EQ(client.requests.size(), 1u);
  const auto& m = client.requests[0].messages;
  ASSERT_EQ(m.size(), 4u);
  EXPECT_EQ(m[0].role, Role::System);
  EXPECT_EQ(m[1].content, "shot table");
  EXPECT_EQ(m[2].role, Role::Assistant);
  EXPECT_EQ(m[3].content, "target");
  EXPECT_EQ(client.requests[0].temperature, 0.0);
}

TEST(Fewshot, NeedsShots) {
  ScriptedClient client({});
  EXPECT_THROW(extract_fewshot("t", {}, PromptVariant::P1, client, kOptions), Error);
}

TEST(Fewshot, RepairOnceThenSucceed) {
  const std::vector<FineTuneExample> shots{{"s", "u", "{}"}};
  ScriptedClient client({"not json", R"({"A": {}})"});
  const auto r = extract_fewshot("t", shots, PromptVariant::P1, client, kOptions);
  EXPECT_EQ(r.catalysts.count("A"), 1u);
  ASSERT_EQ(client.requests.size(), 2u);
  EXPECT_EQ(client.requests[1].messages.back().content, kRepairRequest);
}

TEST(Fewshot, MalformedTwiceIsUnparseable) {
  const std::vector<FineTuneExample> shots{{"s", "u", "{}"}};
  ScriptedClient client({"not json", "{still not"});
  try {
    extract_fewshot("t", shots, PromptVariant::P1, client, kOptions);
    FAIL();
  } catch (const Error& e) {
    EXPECT_EQ(e.code(), ErrorCode::UnparseableOutput);
  }
}

TEST(Fewshot, TruncatedReplyIsTokenLimit) {
  const std::vector<FineTuneExample> shots{{"s", "u", "{}"}};
  ScriptedClient client({R"({"A": )"}, "length");
  try {
    extract_fewshot("t", shots, PromptVariant::P1, client, kOptions);
    FAIL();
  } catch (const Error& e) {
    EXPECT_EQ(e.code(), ErrorCode::TokenLimit);
  }
}

TEST(Zeroshot, NoneGivesEmptyRecord) {
  ScriptedClient client({"none"});
  EXPECT_TRUE(extract_zeroshot("t", {}, client, kOptions).empty());
  EXPECT_EQ(client.requests.size(), 1u);
}

TEST(Zeroshot, ScriptedConversation) {
  ScriptedClient client({R"(["RuO2"])", R"(["overpotential"])",
                         R"({"value": "300", "current_density": "10 mA cm-2", "substrate": "", "colour": "red"})"});
  const auto r = extract_zeroshot("the table", {}, client, kOptions);
  ASSERT_EQ(r.catalysts.size(), 1u);
  const auto& props = r.catalysts.at("RuO2").at("overpotential");
  EXPECT_EQ(props, (PropertyMap{{"value", "300"}, {"current_density", "10 mA cm-2"}}));
  ASSERT_EQ(client.requests.size(), 3u);
  // One growing conversation: each request extends the previous one.
  EXPECT_EQ(client.requests[2].messages.size(), 6u);
  EXPECT_NE(client.requests[0].messages[1].content.find("the table"), std::string::npos);
  EXPECT_NE(client.requests[2].messages.back().content.find("\"versus\""), std::string::npos);
}

TEST(NameList, Parsing) {
  EXPECT_TRUE(parse_name_list("None.").empty());
  EXPECT_EQ(parse_name_list(R"(Sure: ["A", "B", "A", ""])"), (std::vector<std::string>{"A", "B"}));
  EXPECT_THROW(parse_name_list("A and B"), Error);
}

TEST(Fixtures, EchoRulesAndDigest) {
  FixtureResponder responder;
  responder.add_rule({{"Co_{2}", "KOH"}, R"({"matched": {}})"});
  FixtureChatClient client(responder);
  ChatRequest echo{"m", {{Role::User, "hello there"}}};
  const auto r = client.complete(echo);
  EXPECT_EQ(r.content, "hello there");
  EXPECT_EQ(r.usage.output_tokens, estimate_tokens("hello there"));
  EXPECT_EQ(client.complete({"m", {{Role::User, "Co_{2} in KOH"}}}).content, R"({"matched": {}})");

  nlohmann::json body = to_wire(ChatResponse{"verbatim", "stop", {1, 2}, "m"});
  responder.add_fixture(request_digest(echo), body.dump());
  const auto fixed = FixtureChatClient(responder).complete(echo);
  EXPECT_EQ(fixed.content, "verbatim");
  EXPECT_EQ(fixed.usage, (Usage{1, 2}));
}

TEST(Fixtures, FailDefault) {
  FixtureConfig cfg;
  cfg.default_reply = DefaultReply::Fail;
  FixtureChatClient client(FixtureResponder(std::filesystem::path(), cfg));
  try {
    client.complete({"m", {{Role::User, "x"}}});
    FAIL();
  } catch (const Error& e) {
    EXPECT_EQ(e.code(), ErrorCode::LlmTransport);
  }
}

TEST(Fixtures, RecordingReplays) {
  const auto dir = std::filesystem::temp_directory_path() / "tablemine_recording_test";
  std::filesystem::remove_all(dir);
  ScriptedClient live({"recorded reply"});
  RecordingChatClient recorder(live, dir);
  const ChatRequest req{"m", {{Role::User, "q"}}};
  recorder.complete(req);
  FixtureConfig cfg;
  cfg.default_reply = DefaultReply::Fail;
  FixtureChatClient replay(FixtureResponder(dir, cfg));
  EXPECT_EQ(replay.complete(req).content, "recorded reply");
  std::filesystem::remove_all(dir);
}

TEST(Digest, StableAndSensitive) {
  const ChatRequest a{"m", {{Role::User, "q"}}};
  ChatRequest b = a;
  EXPECT_EQ(request_digest(a), request_digest(b));
  b.temperature = 0.5;
  EXPECT_NE(request_digest(a), request_digest(b));
  EXPECT_EQ(request_from_wire(to_wire(a)), a);
}

TEST(Metered, AppendsLedgerEntries) {
  cost::UsageLedger ledger;
  ScriptedClient inner({"a", "b"});
  MeteredClient metered(inner, ledger, cost::Phase::Extract, "doc-t00", [] { return std::string("T"); });
  metered.complete({"gpt-4-1106-preview", {{Role::User, "x"}}});
  metered.complete({"gpt-4-1106-preview", {{Role::User, "y"}}});
  const auto entries = ledger.snapshot();
  ASSERT_EQ(entries.size(), 2u);
  EXPECT_EQ(entries[0].call_id, "doc-t00#001");
  EXPECT_EQ(entries[1].call_id, "doc-t00#002");
  EXPECT_EQ(entries[0].input_tokens, 10u);
  EXPECT_EQ(entries[0].timestamp, "T");
}

TEST(RateLimiter, SleepsWhenWindowIsFull) {
  std::vector<std::chrono::milliseconds> sleeps;
  RateLimiter limiter(2, std::chrono::milliseconds(50), [&](std::chrono::milliseconds d) {
    sleeps.push_back(d);
    std::this_thread::sleep_for(d);
  });
  limiter.acquire();
  limiter.acquire();
  EXPECT_TRUE(sleeps.empty());
  limiter.acquire();
  EXPECT_FALSE(sleeps.empty());
}

// ---- hallucination filter ----

represent::CustomTsvDoc fig2a_tsv() {
  const auto path = oracle::data_dir() / "fig2" / "fig2a.html";
  return represent::to_custom_tsv(ingest::parse_html({io::read_file(path), "fig2a", 0}));
}

TEST(Filter, PlantedCatalystRemoved) {
  ExtractionRecord r;
  r.catalysts["Co_{2}FeO_{4}@PdO"]["overpotential"] = {{"value", "259"}, {"current_density", "10 mA/cm^{2}"}};
  r.catalysts["Co_{2}FeO_{4}@PdO"]["tafel slope"] = {{"value", "59"}};
  r.catalysts["Pt/C"]["overpotential"] = {{"value", "31"}};
  const auto out = filter_hallucinations(r, fig2a_tsv(), nullptr);
  EXPECT_EQ(out.catalysts.count("Pt/C"), 0u);
  EXPECT_EQ(out.catalysts.at("Co_{2}FeO_{4}@PdO"), r.catalysts.at("Co_{2}FeO_{4}@PdO"));
  EXPECT_EQ(filter_hallucinations(out, fig2a_tsv(), nullptr), out);
}

TEST(Filter, RuO2KeptPtCRemoved) {
  represent::CustomTsvDoc tsv{"<title></title>\n<table>\nCatalyst\tη (mV)\nRuO_{2}\t300\n</table>\n<caption></caption>"};
  ExtractionRecord r;
  r.catalysts["RuO2"]["overpotential"] = {{"value", "300"}};
  r.catalysts["Pt/C"]["overpotential"] = {{"value", "300"}};
  const auto out = filter_hallucinations(r, tsv, nullptr);
  EXPECT_EQ(out.catalysts.size(), 1u);
  EXPECT_EQ(out.catalysts.at("RuO2").at("overpotential").at("value"), "300");
}

TEST(Filter, LlmModeAsksOnlyUnevidencedKeys) {
  represent::CustomTsvDoc tsv{"<title></title>\n<table>\nCatalyst\tη\nRuO_{2}\t300\n</table>\n<caption></caption>"};
  ExtractionRecord r;
  r.catalysts["RuO2"]["overpotential"] = {{"value", "300"}};
  r.catalysts["IrO2"]["overpotential"] = {{"value", "300"}};
  ScriptedClient client({"Yes."});
  FilterOptions options;
  options.mode = FilterMode::Llm;
  const auto out = filter_hallucinations(r, tsv, &client, options);
  ASSERT_EQ(client.requests.size(), 1u);
  EXPECT_NE(client.requests[0].messages[0].content.find("\"IrO2\""), std::string::npos);
  EXPECT_EQ(out.catalysts.size(), 2u);
  EXPECT_THROW(filter_hallucinations(r, tsv, nullptr, options), Error);
}

bool performance_evidenced(const std::string& tsv, const std::string& name) {
  if (oracle::contains(tsv, name)) return true;
  const auto& aliases = default_performance_aliases();
  const auto it = aliases.find(oracle::normalize(name));
  if (it == aliases.end()) return false;
  return std::any_of(it->second.begin(), it->second.end(), [&](const auto& a) { return oracle::contains(tsv, a); });
}

TEST(FilterProperty, SubsetIdempotentAndMatchesOracle) {
  std::mt19937_64 rng(37);
  for (int i = 0; i < 1000; ++i) {
    const auto c = oracle::random_filter_case(rng);
    const represent::CustomTsvDoc tsv{c.tsv};
    const auto out = filter_hallucinations(c.record, tsv, nullptr);
    ASSERT_EQ(filter_hallucinations(out, tsv, nullptr), out);
    for (const auto& [cat, perfs] : c.record.catalysts) {
      const bool keep_cat = oracle::contains(c.tsv, cat);
      ASSERT_EQ(out.catalysts.count(cat) == 1, keep_cat) << cat;
      if (!keep_cat) continue;
      for (const auto& [perf, props] : perfs) {
        const bool keep_perf = performance_evidenced(c.tsv, perf);
        ASSERT_EQ(out.catalysts.at(cat).count(perf) == 1, keep_perf) << perf;
        if (!keep_perf) continue;
        const auto& kept = out.catalysts.at(cat).at(perf);
        for (const auto& [key, value] : props) {
          ASSERT_EQ(kept.count(key) == 1, oracle::contains(c.tsv, value)) << value;
          if (kept.count(key)) ASSERT_EQ(kept.at(key), value);
        }
        ASSERT_LE(kept.size(), props.size());
      }
    }
    ASSERT_LE(out.catalysts.size(), c.record.catalysts.size());
  }
}

}  // namespace
}  // namespace tablemine::llm
