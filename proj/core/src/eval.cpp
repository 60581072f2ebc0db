#include "tablemine/eval.hpp"

#include <algorithm>
#include <cstdio>
#include <sstream>

#include "tablemine/error.hpp"
#include "tablemine/io.hpp"
#include "tablemine/text.hpp"

namespace tablemine::eval {

std::set<KeyPath> key_paths(const CatalystMap& catalysts) {
  std::set<KeyPath> paths;
  for (const auto& [catalyst, performances] : catalysts) {
    const std::string c = text::collapse_whitespace(catalyst);
    paths.insert({c});
    for (const auto& [performance, properties] : performances) {
      const std::string p = text::collapse_whitespace(performance);
      paths.insert({c, p});
      for (const auto& [key, value] : properties) paths.insert({c, p, text::collapse_whitespace(key)});
    }
  }
  return paths;
}

StructureDiff diff_structure(const ExtractionRecord& pred, const ExtractionRecord& gold) {
  const auto pp = key_paths(pred.catalysts);
  const auto gp = key_paths(gold.catalysts);
  StructureDiff d;
  std::set_intersection(pp.begin(), pp.end(), gp.begin(), gp.end(), std::back_inserter(d.matched_paths));
  d.tp = d.matched_paths.size();
  d.fn = gp.size() - d.tp;
  d.fp = pp.size() - d.tp;
  return d;
}

double structure_f1(std::size_t tp, std::size_t fn, std::size_t fp) {
  if (tp == 0 && fn == 0 && fp == 0) return 1.0;
  const double t = static_cast<double>(tp);
  return t / (t + 0.5 * static_cast<double>(fn + fp));
}

double structure_f1(const StructureDiff& d) { return structure_f1(d.tp, d.fn, d.fp); }

std::optional<double> ValueTally::accuracy() const {
  if (correct + incorrect == 0) return std::nullopt;
  return static_cast<double>(correct) / static_cast<double>(correct + incorrect);
}

namespace {

const std::string* lookup_value(const CatalystMap& catalysts, const KeyPath& path) {
  if (path.size() != 3) return nullptr;
  for (const auto& [catalyst, performances] : catalysts) {
    if (text::collapse_whitespace(catalyst) != path[0]) continue;
    for (const auto& [performance, properties] : performances) {
      if (text::collapse_whitespace(performance) != path[1]) continue;
      for (const auto& [key, value] : properties) {
        if (text::collapse_whitespace(key) == path[2]) return &value;
      }
    }
  }
  return nullptr;
}

}  // namespace

ValueTally tally_values(const ExtractionRecord& pred, const ExtractionRecord& gold, const StructureDiff& d) {
  ValueTally tally;
  for (const auto& path : d.matched_paths) {
    const std::string* pv = lookup_value(pred.catalysts, path);
    const std::string* gv = lookup_value(gold.catalysts, path);
    if (!pv || !gv) continue;
    if (text::collapse_whitespace(*pv) == text::collapse_whitespace(*gv)) {
      ++tally.correct;
    } else {
      ++tally.incorrect;
    }
  }
  return tally;
}

std::optional<double> value_accuracy(const ExtractionRecord& pred, const ExtractionRecord& gold,
                                     const StructureDiff& d) {
  return tally_values(pred, gold, d).accuracy();
}

double total_f1(double s, double v) {
  if (s + v == 0.0) return 0.0;
  return 2.0 * s * v / (s + v);
}

ScoreReport score_corpus(const std::map<std::string, ExtractionRecord>& pred,
                         const std::map<std::string, ExtractionRecord>& gold) {
  std::set<std::string> names;
  for (const auto& [k, _] : pred) names.insert(k);
  for (const auto& [k, _] : gold) names.insert(k);

  ScoreReport report;
  const ExtractionRecord empty;
  for (const auto& name : names) {
    const auto pi = pred.find(name);
    const auto gi = gold.find(name);
    const ExtractionRecord& p = pi == pred.end() ? empty : pi->second;
    const ExtractionRecord& g = gi == gold.end() ? empty : gi->second;
    TableScore score;
    score.name = name;
    score.provenance = gi != gold.end() ? g.provenance : p.provenance;
    score.diff = diff_structure(p, g);
    score.values = tally_values(p, g, score.diff);
    report.tp += score.diff.tp;
    report.fn += score.diff.fn;
    report.fp += score.diff.fp;
    report.correct += score.values.correct;
    report.incorrect += score.values.incorrect;
    report.per_table.push_back(std::move(score));
  }
  report.structure_f1 = structure_f1(report.tp, report.fn, report.fp);
  report.value_accuracy = ValueTally{report.correct, report.incorrect}.accuracy();
  report.total_f1 =
      report.value_accuracy ? total_f1(report.structure_f1, *report.value_accuracy) : report.structure_f1;
  return report;
}

nlohmann::json to_json(const ScoreReport& report) {
  nlohmann::json tables = nlohmann::json::array();
  for (const auto& t : report.per_table) {
    nlohmann::json matched = nlohmann::json::array();
    for (const auto& path : t.diff.matched_paths) matched.push_back(path);
    tables.push_back({{"name", t.name},
                      {"source_id", t.provenance.source_id},
                      {"table_index", t.provenance.table_index},
                      {"row", t.provenance.row},
                      {"tp", t.diff.tp},
                      {"fn", t.diff.fn},
                      {"fp", t.diff.fp},
                      {"matched_paths", std::move(matched)},
                      {"correct_values", t.values.correct},
                      {"incorrect_values", t.values.incorrect}});
  }
  return {{"structure_f1", report.structure_f1},
          {"value_accuracy", report.value_accuracy ? nlohmann::json(*report.value_accuracy) : nlohmann::json()},
          {"total_f1", report.total_f1},
          {"tp", report.tp},
          {"fn", report.fn},
          {"fp", report.fp},
          {"correct_values", report.correct},
          {"incorrect_values", report.incorrect},
          {"per_table", std::move(tables)}};
}

std::string render_table(const ScoreReport& report) {
  std::ostringstream out;
  char line[256];
  std::snprintf(line, sizeof line, "%-40s %5s %5s %5s %8s %8s\n", "record", "TP", "FN", "FP", "correct", "wrong");
  out << line;
  for (const auto& t : report.per_table) {
    std::snprintf(line, sizeof line, "%-40.40s %5zu %5zu %5zu %8zu %8zu\n", t.name.c_str(), t.diff.tp, t.diff.fn,
                  t.diff.fp, t.values.correct, t.values.incorrect);
    out << line;
  }
  std::snprintf(line, sizeof line, "%-40s %5zu %5zu %5zu %8zu %8zu\n", "TOTAL", report.tp, report.fn, report.fp,
                report.correct, report.incorrect);
  out << line << '\n';
  std::snprintf(line, sizeof line, "structure F1   %.4f\n", report.structure_f1);
  out << line;
  if (report.value_accuracy) {
    std::snprintf(line, sizeof line, "value accuracy %.4f\n", *report.value_accuracy);
  } else {
    std::snprintf(line, sizeof line, "value accuracy n/a\n");
  }
  out << line;
  std::snprintf(line, sizeof line, "total F1       %.4f\n", report.total_f1);
  out << line;
  return out.str();
}

LoadedRecords load_record_dir(const std::filesystem::path& dir, ParseMode mode) {
  namespace fs = std::filesystem;
  if (!fs::is_directory(dir)) throw Error(ErrorCode::Io, dir.string() + " is not a directory");
  LoadedRecords out;
  std::vector<fs::path> files;
  for (const auto& entry : fs::directory_iterator(dir)) {
    if (entry.is_regular_file() && entry.path().extension() == ".json") files.push_back(entry.path());
  }
  std::sort(files.begin(), files.end());
  for (const auto& f : files) {
    try {
      out.records[f.stem().string()] = record_from_json(nlohmann::json::parse(io::read_file(f)), mode);
    } catch (const std::exception& e) {
      out.failures[f.filename().string()] = e.what();
    }
  }
  return out;
}

}  // namespace tablemine::eval
