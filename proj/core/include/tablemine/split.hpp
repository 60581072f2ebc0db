#pragma once

#include <cstddef>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "tablemine/table.hpp"

namespace tablemine::split {

enum class SubHeaderReason { NoNumericLeadingCell, FullyMergedRow, NumericPresent };

std::string_view to_string(SubHeaderReason reason);

struct SubHeaderVerdict {
  std::size_t row_index = 0;
  bool is_subheader = false;
  SubHeaderReason reason = SubHeaderReason::NumericPresent;
};

// Leading characters skipped before testing for a digit (whitespace is always
// skipped). `literal()` is exactly {~, <, >}; the default also skips sign and
// approximation marks so negative values are not read as labels.
struct SubHeaderRule {
  std::u32string strip_chars = U"~<>-+≈±−";

  static SubHeaderRule literal() { return SubHeaderRule{U"~<>"}; }
};

bool is_numeric_leading(std::string_view cell_text, const SubHeaderRule& rule = {});

// A row is a sub-header when no cell is numeric-leading, or when the whole
// row is a single merged cell.
SubHeaderVerdict is_subheader(std::span<const Cell> row, const SubHeaderRule& rule = {}, std::size_t row_index = 0);

// True when column 0 carries the performance labels (at least two keyword
// hits) and row 0 beyond position 0 holds short, non-numeric, keyword-free
// names. Ambiguous grids are reported as standard orientation.
bool detect_transposed(const TableGrid& grid);

// Keywords used by detect_transposed: the default performance group plus
// "potential", which row labels such as "Potentials at 10 mA cm-2" need.
const std::vector<std::string>& transposition_keywords();

// Swaps rows and columns; the first row of the result is its single header row.
TableGrid transpose(const TableGrid& grid);

// One grid per data row of the body. Each output keeps title, caption and the
// full header stack; rows governed by an in-body header and/or sub-header get
// those rows appended below the main header.
std::vector<TableGrid> split(const TableGrid& grid, const SubHeaderRule& rule = {});

// Body rows that split() consumes as sub-headers / in-body headers.
std::size_t count_subheader_rows(const TableGrid& grid, const SubHeaderRule& rule = {});

}  // namespace tablemine::split
