#pragma once

#include <cstddef>
#include <filesystem>
#include <map>
#include <optional>
#include <set>
#include <string>
#include <vector>

#include <json.hpp>

#include "tablemine/record.hpp"

namespace tablemine::eval {

// catalyst, catalyst/performance, or catalyst/performance/property.
using KeyPath = std::vector<std::string>;

std::set<KeyPath> key_paths(const CatalystMap& catalysts);

struct StructureDiff {
  std::size_t tp = 0;
  std::size_t fn = 0;
  std::size_t fp = 0;
  std::vector<KeyPath> matched_paths;
};

// Exact matching on whitespace-collapsed keys at every level of the hierarchy.
StructureDiff diff_structure(const ExtractionRecord& pred, const ExtractionRecord& gold);

// tp / (tp + (fn + fp) / 2); 1.0 when all three counts are zero.
double structure_f1(const StructureDiff& d);
double structure_f1(std::size_t tp, std::size_t fn, std::size_t fp);

struct ValueTally {
  std::size_t correct = 0;
  std::size_t incorrect = 0;

  std::optional<double> accuracy() const;
};

// Compares leaf values on matched property paths, exact match after
// whitespace collapse.
ValueTally tally_values(const ExtractionRecord& pred, const ExtractionRecord& gold, const StructureDiff& d);
// Absent when no matched path ends in a value.
std::optional<double> value_accuracy(const ExtractionRecord& pred, const ExtractionRecord& gold,
                                     const StructureDiff& d);

// Harmonic mean 2sv/(s+v); 0 when s + v == 0.
double total_f1(double s, double v);

struct TableScore {
  std::string name;
  Provenance provenance;
  StructureDiff diff;
  ValueTally values;
};

struct ScoreReport {
  double structure_f1 = 1.0;
  std::optional<double> value_accuracy;
  // Equals structure_f1 when value accuracy is absent.
  double total_f1 = 1.0;
  std::size_t tp = 0;
  std::size_t fn = 0;
  std::size_t fp = 0;
  std::size_t correct = 0;
  std::size_t incorrect = 0;
  std::vector<TableScore> per_table;
};

// Micro-averaged over pooled counts. Records are paired by name; a name
// present on one side only is scored against an empty record.
ScoreReport score_corpus(const std::map<std::string, ExtractionRecord>& pred,
                         const std::map<std::string, ExtractionRecord>& gold);

nlohmann::json to_json(const ScoreReport& report);
std::string render_table(const ScoreReport& report);

struct LoadedRecords {
  std::map<std::string, ExtractionRecord> records;
  // file name -> parse error
  std::map<std::string, std::string> failures;
};

// Every *.json file in `dir`, keyed by file stem.
LoadedRecords load_record_dir(const std::filesystem::path& dir, ParseMode mode);

}  // namespace tablemine::eval
