// tablemine command-line front end.

#include <csignal>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

#include <CLI11.hpp>
#include <json.hpp>

#include "tablemine/classify.hpp"
#include "tablemine/cost.hpp"
#include "tablemine/error.hpp"
#include "tablemine/eval.hpp"
#include "tablemine/ingest.hpp"
#include "tablemine/io.hpp"
#include "tablemine/llm/extract.hpp"
#include "tablemine/llm/fixtures.hpp"
#include "tablemine/llm/hallucination.hpp"
#include "tablemine/llm/http_client.hpp"
#include "tablemine/llm/mock_server.hpp"
#include "tablemine/pipeline.hpp"
#include "tablemine/record.hpp"
#include "tablemine/represent.hpp"
#include "tablemine/screen.hpp"
#include "tablemine/split.hpp"
#include "tablemine/stats.hpp"

namespace fs = std::filesystem;
using nlohmann::json;
using namespace tablemine;

namespace {

constexpr int kExitOk = 0;
constexpr int kExitPartial = 1;
constexpr int kExitFatal = 2;

void emit(const std::string& text, const std::string& out) {
  if (out.empty() || out == "-") {
    std::cout << text;
  } else {
    io::write_file_atomic(out, text);
  }
}

// Tables from an HTML file / directory / manifest, or a single grid JSON file.
std::vector<TableGrid> load_grids(const fs::path& path) {
  if (path.extension() == ".json" && fs::is_regular_file(path)) {
    const json j = json::parse(io::read_file(path));
    if (j.is_object() && j.contains("body")) return {grid_from_json(j)};
  }
  std::vector<TableGrid> grids;
  for (const auto& raw : ingest::load_corpus(path)) grids.push_back(ingest::parse_html(raw));
  return grids;
}

TableGrid load_one_grid(const fs::path& path) {
  auto grids = load_grids(path);
  if (grids.size() != 1) throw Error(ErrorCode::InvalidInput, path.string() + " holds " + std::to_string(grids.size()) + " tables, expected 1");
  return std::move(grids.front());
}

ExtractionRecord load_record(const fs::path& path, ParseMode mode) {
  return record_from_json(json::parse(io::read_file(path)), mode);
}

struct ClientOptions {
  std::string base_url;
  std::string fixtures;
  std::string default_reply = "echo";
};

void add_client_options(CLI::App* cmd, ClientOptions& o) {
  cmd->add_option("--base-url", o.base_url, "OpenAI-compatible endpoint, e.g. https://api.openai.com/v1");
  cmd->add_option("--mock-fixtures", o.fixtures, "Answer offline from this fixture directory");
  cmd->add_option("--mock-default", o.default_reply, "Reply for unknown requests in mock mode: echo|fixed|fail");
}

std::unique_ptr<llm::ChatClient> make_client(const ClientOptions& o) {
  if (!o.fixtures.empty()) {
    llm::FixtureConfig fc;
    fc.default_reply = llm::default_reply_from_string(o.default_reply);
    return std::make_unique<llm::FixtureChatClient>(llm::FixtureResponder(o.fixtures, fc));
  }
  llm::HttpConfig hc;
  if (!o.base_url.empty()) hc.base_url = o.base_url;
  return std::make_unique<llm::HttpChatClient>(hc);
}

llm::MockLlmServer* g_server = nullptr;

void on_signal(int) {
  if (g_server) g_server->stop();
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Extract catalyst performance data from HTML tables of materials papers."};
  app.require_subcommand(1);
  app.set_version_flag("--version", "tablemine 0.3.0");

  // ingest
  std::string ingest_in, ingest_out;
  auto* ingest_cmd = app.add_subcommand("ingest", "Parse HTML tables into normalized grids");
  ingest_cmd->add_option("corpus", ingest_in, "HTML file, directory, or manifest")->required();
  ingest_cmd->add_option("-o,--out", ingest_out, "Directory for <key>.json grids (stdout when omitted)");

  // classify
  std::string classify_in, classify_rules;
  bool classify_dump = false;
  auto* classify_cmd = app.add_subcommand("classify", "Label tables performance/calculated/characterization/noise");
  classify_cmd->add_option("corpus", classify_in);
  classify_cmd->add_option("--rules", classify_rules, "Keyword rule JSON");
  classify_cmd->add_flag("--dump-rules", classify_dump, "Print the effective rule set and exit");

  // represent
  std::string represent_in, represent_format = "custom_tsv", represent_out;
  auto* represent_cmd = app.add_subcommand("represent", "Serialize a table as html, custom_json or custom_tsv");
  represent_cmd->add_option("table", represent_in, "HTML or grid JSON")->required();
  represent_cmd->add_option("-f,--format", represent_format)->check(CLI::IsMember({"html", "custom_json", "custom_tsv", "json", "tsv"}));
  represent_cmd->add_option("-o,--out", represent_out);

  // split
  std::string split_in, split_out, split_format = "grid";
  bool split_no_transpose = false;
  auto* split_cmd = app.add_subcommand("split", "Split a table into one table per data row");
  split_cmd->add_option("table", split_in)->required();
  split_cmd->add_option("-o,--out", split_out, "Directory for <stem>-rNN parts (stdout when omitted)");
  split_cmd->add_option("-f,--format", split_format)->check(CLI::IsMember({"grid", "html", "custom_json", "custom_tsv"}));
  split_cmd->add_flag("--no-transpose", split_no_transpose, "Skip transposed-table detection");

  // screen
  std::string screen_in;
  auto* screen_cmd = app.add_subcommand("screen", "Title and TF-IDF screening of candidate papers");
  screen_cmd->add_option("documents", screen_in, "JSONL (or JSON list) of {doc_id, title, body}")->required();

  // finetune-dataset
  std::string ft_pairs, ft_prompt = "P3", ft_out;
  auto* ft_cmd = app.add_subcommand("finetune-dataset", "Build a chat fine-tuning JSONL from input/gold pairs");
  ft_cmd->add_option("pairs", ft_pairs, "JSON list of {input, gold} file paths")->required();
  ft_cmd->add_option("--prompt", ft_prompt)->check(CLI::IsMember({"P1", "P2", "P3"}));
  ft_cmd->add_option("-o,--out", ft_out);

  // extract
  std::string ex_input, ex_method = "fewshot", ex_prompt = "P3", ex_model, ex_shots, ex_ledger, ex_out;
  std::size_t ex_max_shots = 10;
  ClientOptions ex_client;
  auto* extract_cmd = app.add_subcommand("extract", "Extract an ExtractionRecord from one table input");
  extract_cmd->add_option("input", ex_input, "Table representation (html, custom_json or custom_tsv text)")->required();
  extract_cmd->add_option("--method", ex_method)->check(CLI::IsMember({"fewshot", "zeroshot", "finetuned"}));
  extract_cmd->add_option("--prompt", ex_prompt)->check(CLI::IsMember({"P1", "P2", "P3"}));
  extract_cmd->add_option("--model", ex_model, "Defaults depend on --method");
  extract_cmd->add_option("--shots", ex_shots, "Fine-tune JSONL used as few-shot examples");
  extract_cmd->add_option("--max-shots", ex_max_shots);
  extract_cmd->add_option("--ledger", ex_ledger, "Append usage to this JSONL ledger");
  extract_cmd->add_option("-o,--out", ex_out);
  add_client_options(extract_cmd, ex_client);

  // filter
  std::string flt_record, flt_tsv, flt_mode = "deterministic", flt_model{llm::kDefaultFollowupModel}, flt_out, flt_ledger;
  ClientOptions flt_client;
  auto* filter_cmd = app.add_subcommand("filter", "Remove extracted keys not evidenced in the table");
  filter_cmd->add_option("record", flt_record)->required();
  filter_cmd->add_option("tsv", flt_tsv, "Customized TSV of the table")->required();
  filter_cmd->add_option("--mode", flt_mode)->check(CLI::IsMember({"deterministic", "llm"}));
  filter_cmd->add_option("--model", flt_model);
  filter_cmd->add_option("--ledger", flt_ledger);
  filter_cmd->add_option("-o,--out", flt_out);
  add_client_options(filter_cmd, flt_client);

  // evaluate
  std::string ev_pred, ev_gold, ev_json;
  auto* eval_cmd = app.add_subcommand("evaluate", "Score predicted records against gold records");
  eval_cmd->add_option("--pred", ev_pred)->required();
  eval_cmd->add_option("--gold", ev_gold)->required();
  eval_cmd->add_option("--json", ev_json, "Write the ScoreReport JSON here");

  // cost
  std::string cost_ledger, cost_prices, cost_map;
  auto* cost_cmd = app.add_subcommand("cost", "Price a usage ledger");
  auto* cost_report = cost_cmd->add_subcommand("report", "Per-phase and total cost");
  cost_cmd->require_subcommand(1);
  cost_report->add_option("--ledger", cost_ledger, "Ledger JSONL");
  cost_report->add_option("--prices", cost_prices, "Price table JSON overriding the defaults");
  cost_report->add_option("--map", cost_map,
                          "JSON list of {name, ledger, labeling_size, scores}: print cost/size/total-F1 CSV");
  std::string rec_ledger, rec_model, rec_phase = "finetune_train", rec_call;
  std::uint64_t rec_in = 0, rec_out = 0;
  auto* cost_record = cost_cmd->add_subcommand("record", "Append a provider-reported usage entry");
  cost_record->add_option("--ledger", rec_ledger)->required();
  cost_record->add_option("--model", rec_model)->required();
  cost_record->add_option("--phase", rec_phase)->check(CLI::IsMember({"finetune_train", "extract", "followup"}));
  cost_record->add_option("--input-tokens", rec_in);
  cost_record->add_option("--output-tokens", rec_out);
  cost_record->add_option("--call-id", rec_call);

  // stats
  std::string st_db, st_facet = "reaction", st_anchor, st_out;
  double st_width = 25.0, st_support = 0.0;
  bool st_no_oh = false;
  auto* stats_cmd = app.add_subcommand("stats", "Statistics over an extracted database");
  stats_cmd->require_subcommand(1);
  auto* st_hist = stats_cmd->add_subcommand("histogram", "Overpotential histogram CSV");
  st_hist->add_option("db", st_db)->required();
  st_hist->add_option("--bin-width", st_width);
  st_hist->add_option("--facet", st_facet)
      ->check(CLI::IsMember({"reaction", "electrolyte", "current_density", "reaction+electrolyte", "reaction+current_density"}));
  st_hist->add_option("-o,--out", st_out);
  auto* st_graph = stats_cmd->add_subcommand("graph", "Element co-usage graph JSON");
  st_graph->add_option("db", st_db)->required();
  st_graph->add_option("--min-support", st_support);
  st_graph->add_option("--anchor", st_anchor, "Keep only edges touching this element");
  st_graph->add_flag("--exclude-oh", st_no_oh, "Leave O and H out of element sets");
  st_graph->add_option("-o,--out", st_out);
  auto* st_elem = stats_cmd->add_subcommand("elements", "Element frequencies per electrolyte class");
  st_elem->add_option("db", st_db)->required();
  st_elem->add_flag("--exclude-oh", st_no_oh);
  st_elem->add_option("-o,--out", st_out);

  // run
  std::string run_config, run_corpus, run_out;
  auto* run_cmd = app.add_subcommand("run", "ingest -> classify -> split/represent -> extract -> filter -> persist");
  run_cmd->add_option("--config", run_config, "Pipeline config JSON")->required();
  run_cmd->add_option("--corpus", run_corpus)->required();
  run_cmd->add_option("-o,--out", run_out, "Run directory")->required();

  // mock-serve
  std::string ms_fixtures, ms_default = "echo", ms_fixed = "{}", ms_host = "127.0.0.1";
  int ms_port = 8089;
  auto* ms_cmd = app.add_subcommand("mock-serve", "Serve chat completions from fixtures");
  ms_cmd->add_option("--fixtures", ms_fixtures, "Directory of <digest>.json and rules.json");
  ms_cmd->add_option("--port", ms_port);
  ms_cmd->add_option("--host", ms_host);
  ms_cmd->add_option("--default", ms_default)->check(CLI::IsMember({"echo", "fixed", "fail"}));
  ms_cmd->add_option("--fixed-reply", ms_fixed);

  CLI11_PARSE(app, argc, argv);

  try {
    if (*ingest_cmd) {
      const auto raws = ingest::load_corpus(ingest_in);
      json all = json::array();
      for (const auto& raw : raws) {
        const TableGrid grid = ingest::parse_html(raw);
        if (ingest_out.empty()) {
          all.push_back(to_json(grid));
        } else {
          io::write_file_atomic(fs::path(ingest_out) / (pipeline::table_key(raw.source_id, raw.table_index) + ".json"),
                                to_canonical_json(grid));
        }
      }
      if (ingest_out.empty()) std::cout << all.dump(2) << "\n";
    } else if (*classify_cmd) {
      const auto rules = classify_rules.empty() ? classify::KeywordRuleSet::defaults() : classify::load_rules(classify_rules);
      if (classify_dump) {
        std::cout << classify::to_json(rules).dump(2) << "\n";
        return kExitOk;
      }
      if (classify_in.empty()) throw Error(ErrorCode::InvalidInput, "classify needs a corpus path");
      for (const auto& raw : ingest::load_corpus(classify_in)) {
        const auto category = classify::classify(ingest::parse_html(raw), rules);
        std::cout << json{{"key", pipeline::table_key(raw.source_id, raw.table_index)},
                          {"label", classify::to_string(category.label)},
                          {"matched", category.matched_keywords}}
                         .dump()
                  << "\n";
      }
    } else if (*represent_cmd) {
      const TableGrid grid = load_one_grid(represent_in);
      const auto format = represent::format_from_string(represent_format);
      std::string text = pipeline::render_input(grid, format);
      if (format == represent::InputFormat::CustomJson) text = represent::to_canonical_text(represent::to_custom_json(grid));
      emit(text, represent_out);
    } else if (*split_cmd) {
      TableGrid grid = load_one_grid(split_in);
      if (!split_no_transpose && split::detect_transposed(grid)) grid = split::transpose(grid);
      const auto parts = split::split(grid);
      for (std::size_t i = 0; i < parts.size(); ++i) {
        std::string text;
        std::string ext;
        if (split_format == "grid") {
          text = to_canonical_json(parts[i]);
          ext = ".json";
        } else {
          const auto format = represent::format_from_string(split_format);
          text = format == represent::InputFormat::CustomJson
                     ? represent::to_canonical_text(represent::to_custom_json(parts[i]))
                     : pipeline::render_input(parts[i], format);
          ext = format == represent::InputFormat::Html ? ".html" : format == represent::InputFormat::CustomJson ? ".json" : ".tsv";
        }
        if (split_out.empty()) {
          std::cout << text << (text.ends_with('\n') ? "" : "\n") << "\n";
        } else {
          char suffix[24];
          std::snprintf(suffix, sizeof suffix, "-r%02zu", i);
          io::write_file_atomic(fs::path(split_out) / (fs::path(split_in).stem().string() + suffix + ext), text);
        }
      }
    } else if (*screen_cmd) {
      std::vector<screen::Document> docs;
      auto add_doc = [&](const json& d) {
        docs.push_back({d.at("doc_id").get<std::string>(), d.value("title", ""), d.value("body", "")});
      };
      const std::string content = io::read_file(screen_in);
      if (content.find_first_not_of(" \t\r\n") != std::string::npos && content[content.find_first_not_of(" \t\r\n")] == '[') {
        for (const auto& d : json::parse(content)) add_doc(d);
      } else {
        std::istringstream lines(content);
        for (std::string line; std::getline(lines, line);) {
          if (line.find_first_not_of(" \t\r") != std::string::npos) add_doc(json::parse(line));
        }
      }
      for (const auto& s : screen::screen_corpus(docs)) std::cout << screen::to_json(s).dump() << "\n";
    } else if (*ft_cmd) {
      const fs::path base = fs::path(ft_pairs).parent_path();
      std::vector<llm::TrainingPair> pairs;
      for (const auto& p : json::parse(io::read_file(ft_pairs))) {
        const fs::path input = base / p.at("input").get<std::string>();
        const fs::path gold = base / p.at("gold").get<std::string>();
        pairs.push_back({io::read_file(input), load_record(gold, ParseMode::Strict)});
      }
      emit(llm::build_finetune_dataset(pairs, llm::variant_from_string(ft_prompt)), ft_out);
    } else if (*extract_cmd) {
      const auto method = pipeline::method_from_string(ex_method);
      llm::CallOptions call;
      call.model = !ex_model.empty() ? ex_model
                   : method == pipeline::Method::FineTuned ? std::string(llm::kDefaultFinetunedModel)
                   : method == pipeline::Method::FewShot   ? std::string(llm::kDefaultFewshotModel)
                                                           : std::string(llm::kDefaultZeroshotModel);
      auto client = make_client(ex_client);
      cost::UsageLedger ledger;
      llm::MeteredClient metered(*client, ledger, cost::Phase::Extract, fs::path(ex_input).stem().string());
      const std::string input = io::read_file(ex_input);
      const auto prompt = llm::variant_from_string(ex_prompt);
      ExtractionRecord record;
      switch (method) {
        case pipeline::Method::FewShot: {
          if (ex_shots.empty()) throw Error(ErrorCode::InvalidInput, "--shots is required for fewshot");
          auto shots = llm::parse_finetune_dataset(io::read_file(ex_shots));
          if (shots.size() > ex_max_shots) shots.resize(ex_max_shots);
          record = llm::extract_fewshot(input, shots, prompt, metered, call);
          break;
        }
        case pipeline::Method::FineTuned: record = llm::extract_finetuned(input, prompt, metered, call); break;
        case pipeline::Method::ZeroShot: record = llm::extract_zeroshot(input, {}, metered, call); break;
      }
      record.provenance.source_id = fs::path(ex_input).stem().string();
      if (!ex_ledger.empty()) {
        std::ofstream(ex_ledger, std::ios::app) << cost::to_jsonl(ledger.snapshot());
      }
      emit(to_canonical_text(record), ex_out);
    } else if (*filter_cmd) {
      const auto record = load_record(flt_record, ParseMode::Lenient);
      const represent::CustomTsvDoc tsv{io::read_file(flt_tsv)};
      llm::FilterOptions options;
      options.mode = llm::filter_mode_from_string(flt_mode);
      options.call.model = flt_model;
      std::unique_ptr<llm::ChatClient> client;
      cost::UsageLedger ledger;
      std::optional<llm::MeteredClient> metered;
      if (options.mode == llm::FilterMode::Llm) {
        client = make_client(flt_client);
        metered.emplace(*client, ledger, cost::Phase::Followup, fs::path(flt_record).stem().string() + "/followup");
      }
      const auto filtered = llm::filter_hallucinations(record, tsv, metered ? &*metered : nullptr, options);
      if (!flt_ledger.empty() && ledger.size() > 0) {
        std::ofstream(flt_ledger, std::ios::app) << cost::to_jsonl(ledger.snapshot());
      }
      emit(to_canonical_text(filtered), flt_out);
    } else if (*eval_cmd) {
      const auto pred = eval::load_record_dir(ev_pred, ParseMode::Lenient);
      const auto gold = eval::load_record_dir(ev_gold, ParseMode::Strict);
      if (!gold.failures.empty()) {
        for (const auto& [name, err] : gold.failures) std::cerr << "gold " << name << ": " << err << "\n";
        return kExitFatal;
      }
      const auto report = eval::score_corpus(pred.records, gold.records);
      std::cout << eval::render_table(report);
      if (!ev_json.empty()) io::write_file_atomic(ev_json, eval::to_json(report).dump(2) + "\n");
      for (const auto& [name, err] : pred.failures) std::cerr << "unparseable " << name << ": " << err << "\n";
      return pred.failures.empty() ? kExitOk : kExitPartial;
    } else if (*cost_report) {
      cost::PriceTable prices = cost::PriceTable::defaults();
      if (!cost_prices.empty()) {
        const auto overrides = cost::prices_from_json(json::parse(io::read_file(cost_prices)));
        for (const auto& [m, p] : overrides.entries()) prices.set(m, p);
      }
      if (!cost_map.empty()) {
        const fs::path base = fs::path(cost_map).parent_path();
        std::cout << "name,cost_usd,labeling_size,total_f1\n";
        for (const auto& point : json::parse(io::read_file(cost_map))) {
          const auto report = cost::cost(cost::load_ledger(base / point.at("ledger").get<std::string>()), prices);
          const auto scores = json::parse(io::read_file(base / point.at("scores").get<std::string>()));
          std::printf("%s,%.6f,%lld,%.6f\n", point.at("name").get<std::string>().c_str(), report.total_usd,
                      point.value("labeling_size", 0LL), scores.at("total_f1").get<double>());
        }
      } else {
        if (cost_ledger.empty()) throw Error(ErrorCode::InvalidInput, "--ledger or --map is required");
        std::cout << cost::to_json(cost::cost(cost::load_ledger(cost_ledger), prices)).dump(2) << "\n";
      }
    } else if (*cost_record) {
      const cost::LedgerEntry e{llm::utc_timestamp(), rec_model, cost::phase_from_string(rec_phase), rec_in, rec_out,
                                rec_call.empty() ? rec_phase + "/" + rec_model : rec_call};
      std::ofstream(rec_ledger, std::ios::app) << cost::to_jsonl({e});
    } else if (*stats_cmd) {
      stats::ElementOptions eo;
      eo.include_oxygen_hydrogen = !st_no_oh;
      const auto set = stats::entries_from_records(stats::load_database(st_db), stats::ElectrolyteRules::defaults(), eo);
      if (set.skipped_overpotentials > 0) {
        std::cerr << set.skipped_overpotentials << " overpotential value(s) without a parseable number skipped\n";
      }
      if (*st_hist) {
        emit(stats::histogram_csv(stats::histogram(set.entries, st_width, stats::facet_from_string(st_facet))), st_out);
      } else if (*st_graph) {
        auto graph = stats::mine_associations(set.entries, st_support);
        if (!st_anchor.empty()) graph = stats::anchor_subgraph(graph, st_anchor);
        emit(stats::to_json(graph).dump(2) + "\n", st_out);
      } else {
        json out = json::object();
        for (const auto& [cls, freq] : stats::element_frequencies(set.entries)) out[std::string(stats::to_string(cls))] = freq;
        emit(out.dump(2) + "\n", st_out);
      }
    } else if (*run_cmd) {
      const auto config = pipeline::load_config(run_config);
      const auto report = pipeline::run_pipeline(config, run_corpus, run_out);
      std::cout << pipeline::to_json(report).dump(2) << "\n";
      return report.exit_code() == 0 ? kExitOk : kExitPartial;
    } else if (*ms_cmd) {
      llm::FixtureConfig fc;
      fc.default_reply = llm::default_reply_from_string(ms_default);
      fc.fixed_reply = ms_fixed;
      llm::MockLlmServer server(llm::FixtureResponder(ms_fixtures, fc));
      server.start(ms_port, ms_host);
      g_server = &server;
      std::signal(SIGINT, on_signal);
      std::signal(SIGTERM, on_signal);
      std::cerr << "mock server listening on " << server.base_url() << "\n";
      server.wait();
      g_server = nullptr;
    }
  } catch (const Error& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kExitFatal;
  } catch (const json::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kExitFatal;
  } catch (const fs::filesystem_error& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kExitFatal;
  }
  return kExitOk;
}
