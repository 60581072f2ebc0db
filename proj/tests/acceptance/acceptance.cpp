// One line per acceptance criterion. Exit status reflects criteria 1-8;
// criterion 9 needs data that is not distributed and never gates.

#include <chrono>
#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <filesystem>
#include <functional>
#include <map>
#include <random>
#include <string>

#include "oracles.hpp"
#include "tablemine/cost.hpp"
#include "tablemine/eval.hpp"
#include "tablemine/ingest.hpp"
#include "tablemine/io.hpp"
#include "tablemine/llm/hallucination.hpp"
#include "tablemine/pipeline.hpp"
#include "tablemine/represent.hpp"
#include "tablemine/split.hpp"
#include "tablemine/stats.hpp"

using namespace tablemine;
namespace fs = std::filesystem;

namespace {

// Pinned tolerances and budgets.
constexpr double kMetricTolerance = 1e-9;
constexpr double kCostTolerance = 1e-9;
constexpr double kHistogramTolerance = 1e-9;
constexpr double kBudget1 = 5.0, kBudget2 = 1.0, kBudget3 = 30.0, kBudget6 = 10.0;
constexpr int kFuzzMetric = 10000, kFuzzSplit = 10000, kFuzzSubheader = 10000, kFuzzFilter = 1000, kArmEntries = 1000;

struct Outcome {
  bool pass = true;
  std::string detail;

  void fail(const std::string& why) {
    if (pass) detail = why;
    pass = false;
  }
};

TableGrid fig2(char which) {
  const auto path = oracle::data_dir() / "fig2" / (std::string("fig2") + which + ".html");
  return ingest::parse_html({io::read_file(path), std::string("fig2") + which, 0});
}

std::map<std::string, std::string> tree(const fs::path& root) {
  std::map<std::string, std::string> out;
  for (const auto& e : fs::recursive_directory_iterator(root)) {
    if (e.is_regular_file()) out[fs::relative(e.path(), root).generic_string()] = io::read_file(e.path());
  }
  return out;
}

Outcome metrics() {
  Outcome o;
  std::size_t cases = 0;
  for (const auto& c : oracle::structure_cases()) {
    ++cases;
    if (std::abs(eval::structure_f1(c.tp, c.fn, c.fp) - c.expected) > kMetricTolerance) o.fail("structure case");
  }
  for (const auto& c : oracle::harmonic_cases()) {
    ++cases;
    if (std::abs(eval::total_f1(c.s, c.v) - c.expected) > kMetricTolerance) o.fail("harmonic case");
  }
  if (cases < 20) o.fail("fewer than 20 oracle cases");
  std::mt19937_64 rng(101);
  std::uniform_real_distribution<double> u(0.0, 1.0);
  std::uniform_int_distribution<std::size_t> n(0, 40);
  for (int i = 0; i < kFuzzMetric; ++i) {
    const double s = u(rng), v = u(rng);
    const double h = eval::total_f1(s, v);
    if (h < std::min(s, v) - kMetricTolerance || h > std::max(s, v) + kMetricTolerance) o.fail("hmean bounds");
    if (std::abs(h - oracle::harmonic(s, v)) > kMetricTolerance) o.fail("hmean oracle");
    if (eval::total_f1(s, std::min(1.0, v + 0.01)) + kMetricTolerance < h) o.fail("hmean monotonicity");
    const std::size_t tp = n(rng), fn = n(rng), fp = n(rng);
    const double f = eval::structure_f1(tp, fn, fp);
    if (f < 0.0 || f > 1.0) o.fail("structure bounds");
    if (std::abs(f - oracle::dice(tp, fn, fp)) > kMetricTolerance) o.fail("structure oracle");
    if (eval::structure_f1(tp + 1, fn, fp) + kMetricTolerance < f) o.fail("structure monotonicity");
  }
  o.detail = o.pass ? std::to_string(cases) + " oracle cases, " + std::to_string(kFuzzMetric) + " random pairs" : o.detail;
  return o;
}

Outcome goldens() {
  Outcome o;
  const auto dir = oracle::data_dir() / "golden";
  std::size_t files = 0;
  for (char c : {'a', 'b', 'c', 'd'}) {
    const auto g = fig2(c);
    const std::string stem = std::string("fig2") + c;
    const auto tsv = represent::to_custom_tsv(g).text;
    ++files;
    if (const auto diff = oracle::check_golden(dir / (stem + ".tsv"), tsv); !diff.empty()) o.fail(stem + ".tsv: " + diff);
    if (c == 'b') {
      const auto parts = split::split(g);
      for (std::size_t i = 0; i < parts.size(); ++i) {
        const std::string name = stem + "-r0" + std::to_string(i) + ".json";
        ++files;
        const auto diff = oracle::check_golden(dir / name, represent::to_canonical_text(represent::to_custom_json(parts[i])));
        if (!diff.empty()) o.fail(name + ": " + diff);
      }
    } else {
      ++files;
      const auto diff = oracle::check_golden(dir / (stem + ".json"), represent::to_canonical_text(represent::to_custom_json(g)));
      if (!diff.empty()) o.fail(stem + ".json: " + diff);
    }
    const auto back = represent::parse_custom_tsv(tsv, g.header.size());
    bool same = back.row_count() == g.row_count() && back.width == g.width && back.title == g.title &&
                back.caption == g.caption;
    for (std::size_t r = 0; same && r < g.row_count(); ++r) {
      for (std::size_t k = 0; k < g.width; ++k) same = same && back.row_at(r)[k].text == g.row_at(r)[k].text;
    }
    if (!same) o.fail(stem + " TSV round trip");
  }
  if (o.pass) o.detail = std::to_string(files) + " golden files, 4 round trips";
  return o;
}

Outcome splitting() {
  Outcome o;
  std::mt19937_64 rng(103);
  for (int i = 0; i < kFuzzSplit; ++i) {
    const auto g = oracle::random_grid(rng);
    std::size_t sub = 0;
    for (const auto& r : g.body) sub += oracle::subheader(r, false) ? 1 : 0;
    if (split::split(g).size() + sub != g.body.size()) o.fail("conservation at fuzz case " + std::to_string(i));
  }
  const auto b = fig2('b');
  const auto parts = split::split(b);
  if (parts.size() != 4) {
    o.fail("fig2b gave " + std::to_string(parts.size()) + " grids");
  } else {
    const char* expected[] = {"HER", "HER", "OER", "OER"};
    for (std::size_t i = 0; i < 4; ++i) {
      const auto& h = parts[i].header;
      if (h.size() != b.header.size() + 1 || h.back()[0].text != expected[i]) o.fail("fig2b sub-header placement");
    }
  }
  if (o.pass) o.detail = std::to_string(kFuzzSplit) + " fuzz grids conserved, fig2b -> 4 grids";
  return o;
}

Outcome subheaders() {
  Outcome o;
  std::mt19937_64 rng(107);
  for (int i = 0; i < kFuzzSubheader; ++i) {
    const auto r = oracle::random_row(rng, 1 + rng() % 6);
    if (split::is_subheader(r).is_subheader != oracle::subheader(r, false)) o.fail("disagreement at row " + std::to_string(i));
  }
  const auto b = fig2('b');
  for (std::size_t i = 0; i < b.body.size(); ++i) {
    const bool expect = b.body[i][0].text == "HER" || b.body[i][0].text == "OER";
    if (split::is_subheader(b.body[i]).is_subheader != expect) o.fail("fig2b row " + std::to_string(i));
  }
  if (o.pass) o.detail = std::to_string(kFuzzSubheader) + " rows agree, fig2b rows classified";
  return o;
}

bool subset(const ExtractionRecord& out, const ExtractionRecord& in) {
  for (const auto& [c, perfs] : out.catalysts) {
    if (!in.catalysts.contains(c)) return false;
    for (const auto& [p, props] : perfs) {
      if (!in.catalysts.at(c).contains(p)) return false;
      for (const auto& [k, v] : props) {
        const auto& src = in.catalysts.at(c).at(p);
        if (!src.contains(k) || src.at(k) != v) return false;
      }
    }
  }
  return true;
}

Outcome filtering() {
  Outcome o;
  std::mt19937_64 rng(109);
  for (int i = 0; i < kFuzzFilter; ++i) {
    const auto c = oracle::random_filter_case(rng);
    const represent::CustomTsvDoc tsv{c.tsv};
    const auto once = llm::filter_hallucinations(c.record, tsv, nullptr);
    if (!subset(once, c.record)) o.fail("output not a subset at case " + std::to_string(i));
    if (llm::filter_hallucinations(once, tsv, nullptr) != once) o.fail("not idempotent at case " + std::to_string(i));
  }
  const auto tsv = represent::to_custom_tsv(fig2('a'));
  ExtractionRecord r;
  r.catalysts["Co_{2}FeO_{4}"]["overpotential"] = {{"value", "293"}};
  r.catalysts["Pt/C"]["overpotential"] = {{"value", "31"}};
  const auto out = llm::filter_hallucinations(r, tsv, nullptr);
  if (out.catalysts.contains("Pt/C") || !out.catalysts.contains("Co_{2}FeO_{4}")) o.fail("planted Pt/C not removed");
  if (o.pass) o.detail = std::to_string(kFuzzFilter) + " cases subset + idempotent, Pt/C removed";
  return o;
}

Outcome end_to_end() {
  Outcome o;
  const auto corpus = oracle::data_dir() / "corpus";
  const auto config = pipeline::load_config(corpus / "config.json");
  const auto base = fs::temp_directory_path() / "tablemine_acceptance";
  fs::remove_all(base);
  const auto first = pipeline::run_pipeline(config, corpus, base / "a");
  pipeline::run_pipeline(config, corpus, base / "b");
  if (first.tables_in != 10) o.fail("fixture has " + std::to_string(first.tables_in) + " tables");
  if (first.exit_code() != 0) o.fail(std::to_string(first.quarantined.size()) + " units quarantined");
  const auto pred = eval::load_record_dir(base / "a" / "records", ParseMode::Strict);
  const auto gold = eval::load_record_dir(corpus / "golds", ParseMode::Strict);
  const auto score = eval::score_corpus(pred.records, gold.records);
  if (score.total_f1 != 1.0) o.fail("total F1 " + std::to_string(score.total_f1));
  if (tree(base / "a") != tree(base / "b")) o.fail("run directories differ");
  if (o.pass) o.detail = "10 tables, " + std::to_string(first.units) + " units, total F1 = 1.0, repeat identical";
  fs::remove_all(base);
  return o;
}

Outcome costs() {
  Outcome o;
  const auto prices = cost::PriceTable::defaults();
  const std::string model = "gpt-4-1106-preview";
  auto usd = [&](std::uint64_t in, std::uint64_t out) {
    return cost::cost({{"t", model, cost::Phase::Extract, in, out, "c#001"}}, prices).total_usd;
  };
  if (std::abs(usd(1'000'000, 0) - 10.0) > kCostTolerance) o.fail("1M input != $10.00");
  if (std::abs(usd(0, 1'000'000) - 30.0) > kCostTolerance) o.fail("1M output != $30.00");
  std::mt19937_64 rng(113);
  std::uniform_int_distribution<std::uint64_t> t(0, 3'000'000);
  for (int i = 0; i < 1000; ++i) {
    const auto a_in = t(rng), a_out = t(rng), b_in = t(rng), b_out = t(rng);
    const double joint = cost::cost({{"t", model, cost::Phase::Extract, a_in, a_out, "c#001"},
                                     {"t", model, cost::Phase::Followup, b_in, b_out, "c#002"}},
                                    prices)
                             .total_usd;
    if (std::abs(joint - usd(a_in, a_out) - usd(b_in, b_out)) > kCostTolerance) o.fail("not linear");
  }
  if (o.pass) o.detail = "$10.00 / $30.00 per 1M, linear on 1000 pairs";
  return o;
}

Outcome statistics() {
  Outcome o;
  std::mt19937_64 rng(127);
  const auto entries = oracle::random_entries(rng, kArmEntries);
  for (const auto& [key, bins] : stats::histogram(entries, 50.0, stats::Facet::ReactionElectrolyte)) {
    if (bins.empty()) continue;
    double sum = 0.0;
    for (const auto& b : bins) sum += b.normalized;
    if (std::abs(sum - 1.0) > kHistogramTolerance) o.fail("histogram " + key + " sums to " + std::to_string(sum));
  }
  std::vector<std::vector<std::string>> sets;
  for (const auto& e : entries) sets.emplace_back(e.elements.begin(), e.elements.end());
  const auto expected = oracle::brute_force_pairs(sets);
  const auto graph = stats::mine_associations(entries, 0.0);
  if (graph.edges.size() != expected.size()) o.fail("edge count differs from brute force");
  for (const auto& [pair, count] : expected) {
    const auto it = graph.edges.find(pair);
    if (it == graph.edges.end() || it->second != count) o.fail("edge " + pair.first + "-" + pair.second);
  }
  if (stats::parse_elements("NiFe LDH") != std::set<std::string>{"Ni", "Fe"}) o.fail("NiFe LDH elements");
  if (o.pass) o.detail = "histograms normalized, ARM matches brute force on " + std::to_string(kArmEntries) + " entries";
  return o;
}

// Optional: with TABLEMINE_PUBLIC_DB pointing at the published extraction
// database, report where the OER and HER overpotential modes fall.
std::string public_histogram_check() {
  const char* db = std::getenv("TABLEMINE_PUBLIC_DB");
  if (!db) return "public database check skipped (TABLEMINE_PUBLIC_DB unset)";
  try {
    const auto set = stats::entries_from_records(stats::load_database(db));
    const auto hist = stats::histogram(set.entries, 50.0, stats::Facet::Reaction);
    auto mode = [&](const std::string& key) -> double {
      const auto it = hist.find(key);
      if (it == hist.end() || it->second.empty()) return -1.0;
      const stats::Bin* best = &it->second.front();
      for (const auto& b : it->second) {
        if (b.count > best->count) best = &b;
      }
      return best->lower;
    };
    const double oer = mode("OER"), her = mode("HER");
    const bool ok = oer >= 200 && oer < 400 && her >= 50 && her < 150;
    return std::string(ok ? "public histogram modes in range" : "public histogram modes out of range") +
           " (OER bin " + std::to_string(static_cast<int>(oer)) + " mV, HER bin " + std::to_string(static_cast<int>(her)) +
           " mV)";
  } catch (const std::exception& e) {
    return std::string("public database check failed: ") + e.what();
  }
}

}  // namespace

int main() {
  struct Criterion {
    int id;
    const char* name;
    double budget_s;
    std::function<Outcome()> run;
  };
  const std::vector<Criterion> criteria{
      {1, "metric oracles", kBudget1, metrics},
      {2, "figure goldens and TSV round trip", kBudget2, goldens},
      {3, "split conservation and fig2b", kBudget3, splitting},
      {4, "sub-header oracle agreement", 0.0, subheaders},
      {5, "hallucination filter laws", 0.0, filtering},
      {6, "offline end-to-end run", kBudget6, end_to_end},
      {7, "cost accounting", 0.0, costs},
      {8, "histograms and association mining", 0.0, statistics},
  };
  int failed = 0;
  for (const auto& c : criteria) {
    const auto start = std::chrono::steady_clock::now();
    Outcome o;
    try {
      o = c.run();
    } catch (const std::exception& e) {
      o.fail(std::string("exception: ") + e.what());
    }
    const double secs = std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
    if (c.budget_s > 0.0 && secs > c.budget_s) o.fail("took " + std::to_string(secs) + " s, budget " + std::to_string(c.budget_s) + " s");
    std::printf("[%s] criterion %d: %s (%.3f s) - %s\n", o.pass ? "PASS" : "FAIL", c.id, c.name, secs, o.detail.c_str());
    if (!o.pass) ++failed;
  }
  std::printf(
      "[NOT REPRODUCIBLE] criterion 9: published extraction scores and few-shot cost need the original "
      "annotated corpus, which is not distributed; non-gating. %s\n",
      public_histogram_check().c_str());
  return failed == 0 ? 0 : 1;
}
