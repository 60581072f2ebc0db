#pragma once

#include <cstdint>
#include <filesystem>
#include <map>
#include <mutex>
#include <string>
#include <string_view>
#include <vector>

#include <json.hpp>

namespace tablemine::cost {

enum class Phase { FinetuneTrain, Extract, Followup };

std::string_view to_string(Phase phase);
Phase phase_from_string(std::string_view s);

struct Price {
  double input_usd_per_1m = 0.0;
  double output_usd_per_1m = 0.0;
};

// model name -> price. A key ending in '*' prices every model with that
// prefix; exact keys win, then the longest prefix.
class PriceTable {
 public:
  static PriceTable defaults();

  void set(const std::string& model, Price price);
  const Price* find(std::string_view model) const;
  const std::map<std::string, Price>& entries() const { return prices_; }

 private:
  std::map<std::string, Price> prices_;
};

nlohmann::json to_json(const PriceTable& table);
PriceTable prices_from_json(const nlohmann::json& j);

struct LedgerEntry {
  std::string timestamp;
  std::string model;
  Phase phase = Phase::Extract;
  std::uint64_t input_tokens = 0;
  std::uint64_t output_tokens = 0;
  // Stable identifier of the call (artifact key + sequence number).
  std::string call_id;

  bool operator==(const LedgerEntry&) const = default;
};

nlohmann::json to_json(const LedgerEntry& entry);
LedgerEntry entry_from_json(const nlohmann::json& j);

struct TokenTotals {
  std::uint64_t input_tokens = 0;
  std::uint64_t output_tokens = 0;
  std::size_t calls = 0;
};

// Append-only and safe for concurrent appends; readers work on snapshots.
class UsageLedger {
 public:
  UsageLedger() = default;
  explicit UsageLedger(std::vector<LedgerEntry> entries) : entries_(std::move(entries)) {}
  UsageLedger(const UsageLedger&) = delete;
  UsageLedger& operator=(const UsageLedger&) = delete;

  void append(LedgerEntry entry);
  std::vector<LedgerEntry> snapshot() const;
  std::size_t size() const;

  // Recomputed from the entries on every call.
  TokenTotals totals() const;
  std::map<Phase, TokenTotals> totals_by_phase() const;

 private:
  mutable std::mutex mu_;
  std::vector<LedgerEntry> entries_;
};

std::string to_jsonl(const std::vector<LedgerEntry>& entries);
std::vector<LedgerEntry> entries_from_jsonl(std::string_view text);
std::vector<LedgerEntry> load_ledger(const std::filesystem::path& path);

struct CostReport {
  double total_usd = 0.0;
  std::map<Phase, double> per_phase_usd;
  std::map<std::string, double> per_model_usd;
  TokenTotals tokens;
};

// sum(input * in_price + output * out_price) / 1e6. Throws Error(UnknownModel).
CostReport cost(const std::vector<LedgerEntry>& entries, const PriceTable& prices);

nlohmann::json to_json(const CostReport& report);

}  // namespace tablemine::cost
