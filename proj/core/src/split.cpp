#include "tablemine/split.hpp"

#include <algorithm>
#include <optional>
#include <set>

#include "tablemine/classify.hpp"
#include "tablemine/text.hpp"

namespace tablemine::split {

std::string_view to_string(SubHeaderReason reason) {
  switch (reason) {
    case SubHeaderReason::NoNumericLeadingCell: return "NoNumericLeadingCell";
    case SubHeaderReason::FullyMergedRow: return "FullyMergedRow";
    case SubHeaderReason::NumericPresent: return "NumericPresent";
  }
  return "NumericPresent";
}

bool is_numeric_leading(std::string_view cell_text, const SubHeaderRule& rule) {
  for (char32_t cp : text::decode_utf8(cell_text)) {
    if (text::is_unicode_space(cp) || rule.strip_chars.find(cp) != std::u32string::npos) continue;
    return cp >= U'0' && cp <= U'9';
  }
  return false;
}

SubHeaderVerdict is_subheader(std::span<const Cell> row, const SubHeaderRule& rule, std::size_t row_index) {
  SubHeaderVerdict verdict{row_index, false, SubHeaderReason::NumericPresent};
  const bool numeric = std::any_of(row.begin(), row.end(),
                                   [&](const Cell& c) { return is_numeric_leading(c.text, rule); });
  if (!numeric) {
    verdict.is_subheader = true;
    verdict.reason = SubHeaderReason::NoNumericLeadingCell;
    return verdict;
  }
  if (row.size() > 1 && !row.front().origin.is_padding() &&
      std::all_of(row.begin(), row.end(), [&](const Cell& c) { return c.origin == row.front().origin; })) {
    verdict.is_subheader = true;
    verdict.reason = SubHeaderReason::FullyMergedRow;
  }
  return verdict;
}

const std::vector<std::string>& transposition_keywords() {
  static const std::vector<std::string> keywords = [] {
    auto kw = classify::KeywordRuleSet::defaults().performance;
    kw.push_back("potential");
    return kw;
  }();
  return keywords;
}

namespace {

bool hits_keyword(const std::string& text) {
  for (const auto& kw : transposition_keywords()) {
    if (classify::matches_keyword(text, kw)) return true;
  }
  return false;
}

constexpr std::size_t kMaxNameLength = 40;

// Distinct non-empty texts in a row.
std::size_t distinct_labels(const Row& row) {
  std::set<std::string> seen;
  for (const auto& c : row) {
    if (!c.text.empty()) seen.insert(c.text);
  }
  return seen.size();
}

}  // namespace

bool detect_transposed(const TableGrid& grid) {
  const std::vector<Row> rows = grid.all_rows();
  if (rows.size() < 2 || grid.width < 2) return false;

  std::size_t column_hits = 0;
  for (const auto& row : rows) {
    if (!row.empty() && hits_keyword(row.front().text)) ++column_hits;
  }
  if (column_hits < 2) return false;

  const Row& first = rows.front();
  for (std::size_t c = 1; c < first.size(); ++c) {
    const std::string& t = first[c].text;
    if (hits_keyword(t)) return false;
    if (is_numeric_leading(t)) return false;
    if (text::decode_utf8(text::strip_markup(t)).size() > kMaxNameLength) return false;
  }
  return true;
}

TableGrid transpose(const TableGrid& grid) {
  const std::vector<Row> rows = grid.all_rows();
  TableGrid out;
  out.source_id = grid.source_id;
  out.table_index = grid.table_index;
  out.title = grid.title;
  out.caption = grid.caption;
  out.warnings = grid.warnings;
  out.width = rows.size();
  for (std::size_t c = 0; c < grid.width; ++c) {
    Row row;
    row.reserve(rows.size());
    for (const auto& src : rows) {
      Cell cell = c < src.size() ? src[c] : Cell{};
      cell.header_markup = c == 0;
      row.push_back(std::move(cell));
    }
    (c == 0 ? out.header : out.body).push_back(std::move(row));
  }
  return out;
}

namespace {

// Body rows are data rows, single-label sub-headers (e.g. "HER"), or in-body
// headers (several distinct labels, no numbers).
enum class RowKind { Data, SubHeader, InBodyHeader };

RowKind kind_of(const Row& row, const SubHeaderRule& rule) {
  const auto verdict = is_subheader(row, rule);
  if (!verdict.is_subheader) return RowKind::Data;
  if (verdict.reason == SubHeaderReason::FullyMergedRow) return RowKind::SubHeader;
  return distinct_labels(row) >= 2 ? RowKind::InBodyHeader : RowKind::SubHeader;
}

}  // namespace

std::vector<TableGrid> split(const TableGrid& grid, const SubHeaderRule& rule) {
  std::vector<TableGrid> out;
  if (grid.body.empty()) return out;

  std::optional<Row> in_body_header;
  std::optional<Row> subheader;
  for (const auto& row : grid.body) {
    switch (kind_of(row, rule)) {
      case RowKind::InBodyHeader:
        in_body_header = row;
        subheader.reset();
        continue;
      case RowKind::SubHeader:
        subheader = row;
        continue;
      case RowKind::Data:
        break;
    }
    TableGrid piece;
    piece.source_id = grid.source_id;
    piece.table_index = grid.table_index;
    piece.title = grid.title;
    piece.caption = grid.caption;
    piece.width = grid.width;
    piece.header = grid.header;
    if (in_body_header) piece.header.push_back(*in_body_header);
    if (subheader) piece.header.push_back(*subheader);
    piece.body.push_back(row);
    out.push_back(std::move(piece));
  }
  return out;
}

std::size_t count_subheader_rows(const TableGrid& grid, const SubHeaderRule& rule) {
  return static_cast<std::size_t>(std::count_if(grid.body.begin(), grid.body.end(),
                                                [&](const Row& r) { return kind_of(r, rule) != RowKind::Data; }));
}

}  // namespace tablemine::split
