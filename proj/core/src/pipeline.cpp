#include "tablemine/pipeline.hpp"

#include <algorithm>
#include <atomic>
#include <cstdio>
#include <cstdlib>
#include <memory>
#include <mutex>
#include <set>
#include <thread>

#include "tablemine/classify.hpp"
#include "tablemine/error.hpp"
#include "tablemine/ingest.hpp"
#include "tablemine/io.hpp"
#include "tablemine/llm/extract.hpp"
#include "tablemine/record.hpp"
#include "tablemine/split.hpp"

namespace tablemine::pipeline {

namespace fs = std::filesystem;
using nlohmann::json;

std::string_view to_string(Method m) {
  switch (m) {
    case Method::FineTuned: return "finetuned";
    case Method::FewShot: return "fewshot";
    case Method::ZeroShot: return "zeroshot";
  }
  return "fewshot";
}

Method method_from_string(std::string_view s) {
  if (s == "finetuned" || s == "fine-tuned" || s == "finetune") return Method::FineTuned;
  if (s == "fewshot" || s == "few-shot") return Method::FewShot;
  if (s == "zeroshot" || s == "zero-shot") return Method::ZeroShot;
  throw Error(ErrorCode::InvalidConfig, "unknown method: " + std::string(s));
}

namespace {

void check_keys(const json& j, std::string_view where, std::initializer_list<std::string_view> allowed) {
  if (!j.is_object()) throw Error(ErrorCode::InvalidConfig, std::string(where) + " must be an object");
  for (const auto& [key, value] : j.items()) {
    if (std::find(allowed.begin(), allowed.end(), key) == allowed.end()) {
      throw Error(ErrorCode::InvalidConfig, "unknown key '" + key + "' in " + std::string(where));
    }
  }
}

fs::path resolve(const fs::path& base, const std::string& p) {
  if (p.empty()) return {};
  const fs::path path(p);
  return path.is_relative() && !base.empty() ? base / path : path;
}

std::string input_extension(represent::InputFormat f) {
  switch (f) {
    case represent::InputFormat::Html: return ".html";
    case represent::InputFormat::CustomJson: return ".json";
    case represent::InputFormat::CustomTsv: return ".tsv";
  }
  return ".txt";
}

std::string two_digits(std::size_t n) {
  char buf[24];
  std::snprintf(buf, sizeof buf, "%02zu", n);
  return buf;
}

struct Unit {
  std::string key;
  Provenance provenance;
  TableGrid grid;
  std::string input;
};

struct UnitResult {
  std::optional<ExtractionRecord> record;
  std::optional<QuarantineEntry> failure;
  bool cache_hit = false;
};

json quarantine_json(const QuarantineEntry& q) { return {{"key", q.key}, {"stage", q.stage}, {"error", q.error}}; }

}  // namespace

PipelineConfig config_from_json(const json& j, const fs::path& base_dir) {
  check_keys(j, "config",
             {"models", "method", "prompt", "input_format", "split", "detect_transposed", "followup", "followup_mode",
              "parallelism", "sampling", "prices", "keyword_rules", "shots", "max_shots", "mock", "http",
              "requests_per_minute"});
  PipelineConfig c;
  try {
    if (j.contains("models")) {
      const auto& m = j.at("models");
      check_keys(m, "models", {"finetuned", "fewshot", "zeroshot", "followup"});
      c.models.finetuned = m.value("finetuned", c.models.finetuned);
      c.models.fewshot = m.value("fewshot", c.models.fewshot);
      c.models.zeroshot = m.value("zeroshot", c.models.zeroshot);
      c.models.followup = m.value("followup", c.models.followup);
    }
    if (j.contains("method")) c.method = method_from_string(j.at("method").get<std::string>());
    if (j.contains("prompt")) c.prompt = llm::variant_from_string(j.at("prompt").get<std::string>());
    if (j.contains("input_format")) {
      c.input_format = represent::format_from_string(j.at("input_format").get<std::string>());
    }
    c.split = j.value("split", c.split);
    c.detect_transposed = j.value("detect_transposed", c.detect_transposed);
    c.followup = j.value("followup", c.followup);
    if (j.contains("followup_mode")) {
      c.followup_mode = llm::filter_mode_from_string(j.at("followup_mode").get<std::string>());
    }
    c.parallelism = j.value("parallelism", c.parallelism);
    if (j.contains("sampling")) {
      const auto& s = j.at("sampling");
      check_keys(s, "sampling", {"temperature", "frequency_penalty", "presence_penalty"});
      c.temperature = s.value("temperature", 0.0);
      c.frequency_penalty = s.value("frequency_penalty", 0.0);
      c.presence_penalty = s.value("presence_penalty", 0.0);
    }
    if (j.contains("prices")) {
      const auto overrides = cost::prices_from_json(j.at("prices"));
      for (const auto& [model, price] : overrides.entries()) c.prices.set(model, price);
    }
    c.keyword_rules = resolve(base_dir, j.value("keyword_rules", std::string{}));
    c.shots = resolve(base_dir, j.value("shots", std::string{}));
    c.max_shots = j.value("max_shots", c.max_shots);
    if (j.contains("mock")) {
      const auto& m = j.at("mock");
      check_keys(m, "mock", {"enabled", "fixtures", "default_reply", "fixed_reply"});
      c.mock = m.value("enabled", true);
      c.fixtures = resolve(base_dir, m.value("fixtures", std::string{}));
      if (m.contains("default_reply")) {
        c.mock_defaults.default_reply = llm::default_reply_from_string(m.at("default_reply").get<std::string>());
      }
      c.mock_defaults.fixed_reply = m.value("fixed_reply", c.mock_defaults.fixed_reply);
    }
    if (j.contains("http")) {
      const auto& h = j.at("http");
      check_keys(h, "http", {"base_url", "api_key_env", "timeout_s", "max_attempts", "initial_backoff_ms"});
      c.http.base_url = h.value("base_url", c.http.base_url);
      c.http.api_key_env = h.value("api_key_env", c.http.api_key_env);
      c.http.timeout = std::chrono::seconds(h.value("timeout_s", static_cast<long long>(c.http.timeout.count())));
      c.http.retry.max_attempts = h.value("max_attempts", c.http.retry.max_attempts);
      c.http.retry.initial_backoff = std::chrono::milliseconds(
          h.value("initial_backoff_ms", static_cast<long long>(c.http.retry.initial_backoff.count())));
    }
    c.requests_per_minute = j.value("requests_per_minute", c.requests_per_minute);
  } catch (const json::exception& e) {
    throw Error(ErrorCode::InvalidConfig, e.what());
  }
  if (c.parallelism < 1) throw Error(ErrorCode::InvalidConfig, "parallelism must be >= 1");
  if (c.max_shots < 1) throw Error(ErrorCode::InvalidConfig, "max_shots must be >= 1");
  return c;
}

PipelineConfig load_config(const fs::path& path) {
  json j;
  try {
    j = json::parse(io::read_file(path));
  } catch (const json::parse_error& e) {
    throw Error(ErrorCode::InvalidConfig, path.string() + ": " + e.what());
  }
  return config_from_json(j, path.parent_path());
}

json to_json(const PipelineConfig& c) {
  return {{"models",
           {{"finetuned", c.models.finetuned},
            {"fewshot", c.models.fewshot},
            {"zeroshot", c.models.zeroshot},
            {"followup", c.models.followup}}},
          {"method", to_string(c.method)},
          {"prompt", llm::to_string(c.prompt)},
          {"input_format", represent::to_string(c.input_format)},
          {"split", c.split},
          {"detect_transposed", c.detect_transposed},
          {"followup", c.followup},
          {"followup_mode", llm::to_string(c.followup_mode)},
          {"parallelism", c.parallelism},
          {"sampling",
           {{"temperature", c.temperature},
            {"frequency_penalty", c.frequency_penalty},
            {"presence_penalty", c.presence_penalty}}},
          {"prices", cost::to_json(c.prices)},
          {"keyword_rules", c.keyword_rules.string()},
          {"shots", c.shots.string()},
          {"max_shots", c.max_shots},
          {"mock",
           {{"enabled", c.mock},
            {"fixtures", c.fixtures.string()},
            {"default_reply", llm::to_string(c.mock_defaults.default_reply)},
            {"fixed_reply", c.mock_defaults.fixed_reply}}},
          {"http",
           {{"base_url", c.http.base_url},
            {"api_key_env", c.http.api_key_env},
            {"timeout_s", c.http.timeout.count()},
            {"max_attempts", c.http.retry.max_attempts},
            {"initial_backoff_ms", c.http.retry.initial_backoff.count()}}},
          {"requests_per_minute", c.requests_per_minute}};
}

json to_json(const RunReport& r) {
  json quarantine = json::array();
  for (const auto& q : r.quarantined) quarantine.push_back(quarantine_json(q));
  return {{"tables_in", r.tables_in},
          {"categories", r.categories},
          {"transposed", r.transposed},
          {"units", r.units},
          {"records_out", r.records_out},
          {"cache_hits", r.cache_hits},
          {"quarantined", std::move(quarantine)},
          {"ledger",
           {{"calls", r.tokens.calls},
            {"input_tokens", r.tokens.input_tokens},
            {"output_tokens", r.tokens.output_tokens},
            {"cost_usd", r.cost_usd ? json(*r.cost_usd) : json(nullptr)}}}};
}

std::string table_key(const std::string& source_id, int table_index) {
  return io::slugify(source_id) + "-t" + two_digits(static_cast<std::size_t>(std::max(table_index, 0)));
}

std::string render_input(const TableGrid& grid, represent::InputFormat format, const std::string* raw_html) {
  switch (format) {
    case represent::InputFormat::Html: return raw_html ? *raw_html : represent::to_html(grid);
    case represent::InputFormat::CustomJson: return represent::to_compact_text(represent::to_custom_json(grid));
    case represent::InputFormat::CustomTsv: return represent::to_custom_tsv(grid).text;
  }
  return {};
}

RunReport run_pipeline(const PipelineConfig& config, const fs::path& corpus, const fs::path& run_dir,
                       llm::ChatClient* client) {
  const auto rules =
      config.keyword_rules.empty() ? classify::KeywordRuleSet::defaults() : classify::load_rules(config.keyword_rules);
  std::vector<llm::FineTuneExample> shots;
  if (config.method == Method::FewShot) {
    if (config.shots.empty()) throw Error(ErrorCode::InvalidConfig, "few-shot method needs a shots file");
    shots = llm::parse_finetune_dataset(io::read_file(config.shots));
    if (shots.empty()) throw Error(ErrorCode::InvalidConfig, "shots file has no examples");
    if (shots.size() > config.max_shots) shots.resize(config.max_shots);
  }
  const auto raw_tables = ingest::load_corpus(corpus);

  for (const char* sub : {"grids", "inputs", "cache", "records", "quarantine"}) fs::create_directories(run_dir / sub);

  RunReport report;
  report.tables_in = raw_tables.size();
  for (const auto label : {classify::Label::Performance, classify::Label::Calculated,
                           classify::Label::Characterization, classify::Label::Noise}) {
    report.categories[std::string(classify::to_string(label))] = 0;
  }

  // Ingest, classify, plan.
  std::vector<Unit> units;
  std::set<std::string> seen_keys;
  for (const auto& raw : raw_tables) {
    std::string key = table_key(raw.source_id, raw.table_index);
    for (int n = 2; seen_keys.contains(key); ++n) key = table_key(raw.source_id, raw.table_index) + "-" + std::to_string(n);
    seen_keys.insert(key);

    TableGrid grid;
    try {
      grid = ingest::parse_html(raw);
    } catch (const Error& e) {
      report.quarantined.push_back({key, "ingest", e.what()});
      continue;
    }
    io::write_file_atomic(run_dir / "grids" / (key + ".json"), to_canonical_json(grid));
    const auto category = classify::classify(grid, rules);
    ++report.categories[std::string(classify::to_string(category.label))];
    if (category.label != classify::Label::Performance) continue;

    const bool transposed = config.detect_transposed && split::detect_transposed(grid);
    if (transposed) {
      grid = split::transpose(grid);
      ++report.transposed;
    }
    if (config.input_format == represent::InputFormat::CustomJson && !config.split &&
        split::count_subheader_rows(grid) > 0) {
      throw Error(ErrorCode::InvalidConfig, key +
                                                ": custom_json input without splitting cannot carry the table's "
                                                "sub-header rows; enable split or choose another format");
    }
    if (config.split) {
      const auto parts = split::split(grid);
      for (std::size_t i = 0; i < parts.size(); ++i) {
        units.push_back({key + "-r" + two_digits(i), {raw.source_id, raw.table_index, static_cast<int>(i)}, parts[i], {}});
      }
    } else {
      const bool verbatim = config.input_format == represent::InputFormat::Html && !transposed;
      units.push_back({key, {raw.source_id, raw.table_index, 0}, grid, verbatim ? raw.html : std::string{}});
    }
  }
  report.units = units.size();

  // Render inputs.
  std::vector<std::optional<QuarantineEntry>> render_failures(units.size());
  for (std::size_t i = 0; i < units.size(); ++i) {
    auto& u = units[i];
    try {
      const std::string raw = std::move(u.input);
      u.input = render_input(u.grid, config.input_format, raw.empty() ? nullptr : &raw);
      io::write_file_atomic(run_dir / "inputs" / (u.key + input_extension(config.input_format)), u.input);
    } catch (const Error& e) {
      render_failures[i] = QuarantineEntry{u.key, "represent", e.what()};
    }
  }

  // Client.
  std::unique_ptr<llm::ChatClient> owned;
  if (!client && !units.empty()) {
    if (config.mock) {
      owned = std::make_unique<llm::FixtureChatClient>(llm::FixtureResponder(config.fixtures, config.mock_defaults));
    } else {
      auto http = config.http;
      if (!http.api_key && !std::getenv(http.api_key_env.c_str())) {
        throw Error(ErrorCode::InvalidConfig, "no API key: set " + http.api_key_env + " or use mock mode");
      }
      owned = std::make_unique<llm::HttpChatClient>(http);
    }
    client = owned.get();
  }
  llm::RateLimiter limiter(config.requests_per_minute);
  std::optional<llm::RateLimitedClient> limited;
  if (client) limited.emplace(*client, limiter);

  cost::UsageLedger ledger;
  if (fs::exists(run_dir / "ledger.jsonl")) {
    for (auto& e : cost::load_ledger(run_dir / "ledger.jsonl")) ledger.append(std::move(e));
  }
  const llm::Clock clock = config.mock ? llm::Clock([] { return std::string(kMockTimestamp); })
                                       : llm::Clock(llm::utc_timestamp);

  const std::string& model = config.method == Method::FineTuned ? config.models.finetuned
                             : config.method == Method::FewShot ? config.models.fewshot
                                                                 : config.models.zeroshot;
  const llm::CallOptions call{model, config.temperature, config.frequency_penalty, config.presence_penalty};
  llm::FilterOptions filter;
  filter.mode = config.followup_mode;
  filter.call = {config.models.followup, config.temperature, config.frequency_penalty, config.presence_penalty};

  json shots_digest = json::array();
  for (const auto& s : shots) shots_digest.push_back({s.system, s.user, s.assistant});
  const std::string shots_hash = io::sha256_hex(shots_digest.dump());

  auto process = [&](const Unit& u) -> UnitResult {
    UnitResult result;
    const json cache_key{{"method", to_string(config.method)},
                         {"model", model},
                         {"prompt", llm::to_string(config.prompt)},
                         {"sampling", {config.temperature, config.frequency_penalty, config.presence_penalty}},
                         {"shots", shots_hash},
                         {"input", u.input},
                         {"followup", config.followup ? json(llm::to_string(config.followup_mode)) : json(false)},
                         {"followup_model", config.models.followup}};
    const fs::path cache_file = run_dir / "cache" / (io::sha256_hex(cache_key.dump()) + ".json");
    ExtractionRecord record;
    std::string stage = "extract";
    try {
      if (fs::exists(cache_file)) {
        record.catalysts = record_from_json(json::parse(io::read_file(cache_file)), ParseMode::Strict).catalysts;
        result.cache_hit = true;
      } else {
        llm::MeteredClient metered(*limited, ledger, cost::Phase::Extract, u.key, clock);
        switch (config.method) {
          case Method::FineTuned: record = llm::extract_finetuned(u.input, config.prompt, metered, call); break;
          case Method::FewShot: record = llm::extract_fewshot(u.input, shots, config.prompt, metered, call); break;
          case Method::ZeroShot: record = llm::extract_zeroshot(u.input, {}, metered, call); break;
        }
        if (config.followup) {
          stage = "followup";
          llm::MeteredClient followup_client(*limited, ledger, cost::Phase::Followup, u.key + "/followup", clock);
          record = llm::filter_hallucinations(record, represent::to_custom_tsv(u.grid), &followup_client, filter);
        }
        io::write_file_atomic(cache_file, catalysts_to_json(record.catalysts).dump(2) + "\n");
      }
      stage = "persist";
      record.provenance = u.provenance;
      io::write_file_atomic(run_dir / "records" / (u.key + ".json"), to_canonical_text(record));
      result.record = std::move(record);
    } catch (const Error& e) {
      result.failure = QuarantineEntry{u.key, stage, e.what()};
    } catch (const json::exception& e) {
      result.failure = QuarantineEntry{u.key, stage, e.what()};
    }
    return result;
  };

  std::vector<UnitResult> results(units.size());
  std::atomic<std::size_t> next{0};
  auto worker = [&] {
    for (std::size_t i = next++; i < units.size(); i = next++) {
      if (render_failures[i]) {
        results[i].failure = render_failures[i];
      } else {
        results[i] = process(units[i]);
      }
    }
  };
  const std::size_t n_threads = std::min(config.parallelism, std::max<std::size_t>(units.size(), 1));
  if (n_threads <= 1) {
    worker();
  } else {
    std::vector<std::thread> pool;
    for (std::size_t t = 0; t < n_threads; ++t) pool.emplace_back(worker);
    for (auto& th : pool) th.join();
  }

  for (std::size_t i = 0; i < units.size(); ++i) {
    auto& r = results[i];
    if (r.record) {
      ++report.records_out;
      fs::remove(run_dir / "quarantine" / (units[i].key + ".json"));
    }
    if (r.cache_hit) ++report.cache_hits;
    if (r.failure) report.quarantined.push_back(*r.failure);
  }
  for (const auto& q : report.quarantined) {
    io::write_file_atomic(run_dir / "quarantine" / (q.key + ".json"), quarantine_json(q).dump(2) + "\n");
  }

  auto entries = ledger.snapshot();
  std::stable_sort(entries.begin(), entries.end(),
                   [](const cost::LedgerEntry& a, const cost::LedgerEntry& b) { return a.call_id < b.call_id; });
  io::write_file_atomic(run_dir / "ledger.jsonl", cost::to_jsonl(entries));
  for (const auto& e : entries) {
    report.tokens.input_tokens += e.input_tokens;
    report.tokens.output_tokens += e.output_tokens;
    ++report.tokens.calls;
  }
  try {
    report.cost_usd = cost::cost(entries, config.prices).total_usd;
  } catch (const Error&) {
    report.cost_usd.reset();
  }
  io::write_file_atomic(run_dir / "report.json", to_json(report).dump(2) + "\n");
  return report;
}

}  // namespace tablemine::pipeline
