#include "tablemine/cost.hpp"

#include <sstream>

#include "tablemine/error.hpp"
#include "tablemine/io.hpp"

namespace tablemine::cost {

std::string_view to_string(Phase phase) {
  switch (phase) {
    case Phase::FinetuneTrain: return "finetune_train";
    case Phase::Extract: return "extract";
    case Phase::Followup: return "followup";
  }
  return "extract";
}

Phase phase_from_string(std::string_view s) {
  if (s == "finetune_train") return Phase::FinetuneTrain;
  if (s == "extract") return Phase::Extract;
  if (s == "followup") return Phase::Followup;
  throw Error(ErrorCode::InvalidInput, "unknown ledger phase: " + std::string(s));
}

PriceTable PriceTable::defaults() {
  // USD per 1M tokens, May 2024 list prices.
  PriceTable t;
  t.set("gpt-4-1106-preview", {10.00, 30.00});
  t.set("gpt-4-0125-preview", {10.00, 30.00});
  t.set("gpt-3.5-turbo-1106", {1.00, 2.00});
  t.set("ft:gpt-3.5-turbo*", {3.00, 6.00});
  t.set("gpt-3.5-turbo-1106:training", {8.00, 0.00});
  return t;
}

void PriceTable::set(const std::string& model, Price price) {
  if (price.input_usd_per_1m < 0 || price.output_usd_per_1m < 0) {
    throw Error(ErrorCode::InvalidConfig, "negative price for " + model);
  }
  prices_[model] = price;
}

const Price* PriceTable::find(std::string_view model) const {
  if (const auto it = prices_.find(std::string(model)); it != prices_.end()) return &it->second;
  const Price* best = nullptr;
  std::size_t best_len = 0;
  for (const auto& [key, price] : prices_) {
    if (key.empty() || key.back() != '*') continue;
    const std::string_view prefix(key.data(), key.size() - 1);
    if (model.substr(0, prefix.size()) == prefix && prefix.size() >= best_len) {
      best = &price;
      best_len = prefix.size();
    }
  }
  return best;
}

nlohmann::json to_json(const PriceTable& table) {
  nlohmann::json j = nlohmann::json::object();
  for (const auto& [model, p] : table.entries()) {
    j[model] = {{"input_usd_per_1m", p.input_usd_per_1m}, {"output_usd_per_1m", p.output_usd_per_1m}};
  }
  return j;
}

PriceTable prices_from_json(const nlohmann::json& j) {
  if (!j.is_object()) throw Error(ErrorCode::InvalidConfig, "price table must be an object");
  PriceTable t;
  for (const auto& [model, p] : j.items()) {
    try {
      t.set(model, {p.at("input_usd_per_1m").get<double>(), p.at("output_usd_per_1m").get<double>()});
    } catch (const nlohmann::json::exception& e) {
      throw Error(ErrorCode::InvalidConfig, "price for " + model + ": " + e.what());
    }
  }
  return t;
}

nlohmann::json to_json(const LedgerEntry& e) {
  return {{"timestamp", e.timestamp},       {"model", e.model},
          {"phase", to_string(e.phase)},    {"input_tokens", e.input_tokens},
          {"output_tokens", e.output_tokens}, {"call_id", e.call_id}};
}

LedgerEntry entry_from_json(const nlohmann::json& j) {
  try {
    LedgerEntry e;
    e.timestamp = j.value("timestamp", std::string{});
    e.model = j.at("model").get<std::string>();
    e.phase = phase_from_string(j.at("phase").get<std::string>());
    e.input_tokens = j.at("input_tokens").get<std::uint64_t>();
    e.output_tokens = j.at("output_tokens").get<std::uint64_t>();
    e.call_id = j.value("call_id", std::string{});
    return e;
  } catch (const nlohmann::json::exception& ex) {
    throw Error(ErrorCode::InvalidInput, std::string("ledger entry: ") + ex.what());
  }
}

void UsageLedger::append(LedgerEntry entry) {
  std::lock_guard lock(mu_);
  entries_.push_back(std::move(entry));
}

std::vector<LedgerEntry> UsageLedger::snapshot() const {
  std::lock_guard lock(mu_);
  return entries_;
}

std::size_t UsageLedger::size() const {
  std::lock_guard lock(mu_);
  return entries_.size();
}

TokenTotals UsageLedger::totals() const {
  TokenTotals t;
  for (const auto& e : snapshot()) {
    t.input_tokens += e.input_tokens;
    t.output_tokens += e.output_tokens;
    ++t.calls;
  }
  return t;
}

std::map<Phase, TokenTotals> UsageLedger::totals_by_phase() const {
  std::map<Phase, TokenTotals> out;
  for (const auto& e : snapshot()) {
    auto& t = out[e.phase];
    t.input_tokens += e.input_tokens;
    t.output_tokens += e.output_tokens;
    ++t.calls;
  }
  return out;
}

std::string to_jsonl(const std::vector<LedgerEntry>& entries) {
  std::string out;
  for (const auto& e : entries) out += to_json(e).dump() + "\n";
  return out;
}

std::vector<LedgerEntry> entries_from_jsonl(std::string_view text) {
  std::vector<LedgerEntry> out;
  std::istringstream in{std::string(text)};
  std::string line;
  while (std::getline(in, line)) {
    if (line.find_first_not_of(" \t\r") == std::string::npos) continue;
    try {
      out.push_back(entry_from_json(nlohmann::json::parse(line)));
    } catch (const nlohmann::json::parse_error& e) {
      throw Error(ErrorCode::InvalidInput, std::string("ledger line: ") + e.what());
    }
  }
  return out;
}

std::vector<LedgerEntry> load_ledger(const std::filesystem::path& path) {
  return entries_from_jsonl(io::read_file(path));
}

CostReport cost(const std::vector<LedgerEntry>& entries, const PriceTable& prices) {
  CostReport report;
  for (const auto& e : entries) {
    const Price* p = prices.find(e.model);
    if (!p) throw Error(ErrorCode::UnknownModel, "no price for model '" + e.model + "'");
    const double usd = (static_cast<double>(e.input_tokens) * p->input_usd_per_1m +
                        static_cast<double>(e.output_tokens) * p->output_usd_per_1m) /
                       1'000'000.0;
    report.total_usd += usd;
    report.per_phase_usd[e.phase] += usd;
    report.per_model_usd[e.model] += usd;
    report.tokens.input_tokens += e.input_tokens;
    report.tokens.output_tokens += e.output_tokens;
    ++report.tokens.calls;
  }
  return report;
}

nlohmann::json to_json(const CostReport& report) {
  nlohmann::json phases = nlohmann::json::object();
  for (const auto& [phase, usd] : report.per_phase_usd) phases[std::string(to_string(phase))] = usd;
  return {{"total_usd", report.total_usd},
          {"per_phase_usd", std::move(phases)},
          {"per_model_usd", report.per_model_usd},
          {"input_tokens", report.tokens.input_tokens},
          {"output_tokens", report.tokens.output_tokens},
          {"calls", report.tokens.calls}};
}

}  // namespace tablemine::cost
