#include <random>
#include <string>

#include <benchmark/benchmark.h>

#include "tablemine/eval.hpp"
#include "tablemine/ingest.hpp"
#include "tablemine/io.hpp"
#include "tablemine/represent.hpp"
#include "tablemine/split.hpp"
#include "tablemine/stats.hpp"

using namespace tablemine;

namespace {

std::string fig2_html(char which) {
  return io::read_file(std::string(TABLEMINE_BENCH_DATA) + "/fig2/fig2" + which + ".html");
}

// A long table: `rows` data rows under a sub-header every 10 rows.
TableGrid long_grid(std::size_t rows) {
  TableGrid g;
  g.width = 4;
  g.header.push_back({Cell{"Catalyst"}, Cell{"η (mV)"}, Cell{"Tafel slope"}, Cell{"Electrolyte"}});
  for (std::size_t r = 0; r < rows; ++r) {
    if (r % 10 == 0) g.body.push_back({Cell{r % 20 ? "HER" : "OER"}, Cell{}, Cell{}, Cell{}});
    g.body.push_back({Cell{"Cat" + std::to_string(r)}, Cell{std::to_string(200 + r % 300)}, Cell{"45"}, Cell{"1 M KOH"}});
  }
  return g;
}

void BM_ParseHtml(benchmark::State& state) {
  const std::string html = fig2_html('a');
  for (auto _ : state) benchmark::DoNotOptimize(ingest::parse_html({html, "fig2a", 0}));
}
BENCHMARK(BM_ParseHtml);

void BM_Split(benchmark::State& state) {
  const auto g = long_grid(static_cast<std::size_t>(state.range(0)));
  for (auto _ : state) benchmark::DoNotOptimize(split::split(g));
  state.SetItemsProcessed(state.iterations() * state.range(0));
}
BENCHMARK(BM_Split)->Range(10, 1000);

void BM_CustomTsvRoundTrip(benchmark::State& state) {
  const auto g = long_grid(static_cast<std::size_t>(state.range(0)));
  for (auto _ : state) {
    const auto doc = represent::to_custom_tsv(g);
    benchmark::DoNotOptimize(represent::parse_custom_tsv(doc.text, 1));
  }
}
BENCHMARK(BM_CustomTsvRoundTrip)->Range(10, 1000);

void BM_DiffStructure(benchmark::State& state) {
  ExtractionRecord pred, gold;
  for (int c = 0; c < state.range(0); ++c) {
    const std::string name = "Cat" + std::to_string(c);
    gold.catalysts[name]["overpotential"] = {{"value", std::to_string(c)}, {"electrolyte", "1 M KOH"}};
    pred.catalysts[name]["overpotential"] = {{"value", std::to_string(c + c % 2)}};
  }
  for (auto _ : state) benchmark::DoNotOptimize(eval::diff_structure(pred, gold));
}
BENCHMARK(BM_DiffStructure)->Range(8, 512);

void BM_MineAssociations(benchmark::State& state) {
  std::mt19937_64 rng(1);
  const std::vector<std::string> pool{"Ni", "Fe", "Co", "Mn", "Cu", "Mo", "S", "P", "O", "Ru", "Ir", "Pt", "W", "V"};
  std::vector<stats::CatalystEntry> entries(static_cast<std::size_t>(state.range(0)));
  for (auto& e : entries) {
    const auto k = 1 + rng() % 4;
    for (std::size_t i = 0; i < k; ++i) e.elements.insert(pool[rng() % pool.size()]);
  }
  for (auto _ : state) benchmark::DoNotOptimize(stats::mine_associations(entries, 0.01));
  state.SetItemsProcessed(state.iterations() * state.range(0));
}
BENCHMARK(BM_MineAssociations)->Range(100, 10000);

}  // namespace

BENCHMARK_MAIN();
