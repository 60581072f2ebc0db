#pragma once

#include <cstddef>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

#include <json.hpp>

#include "tablemine/split.hpp"
#include "tablemine/table.hpp"

namespace tablemine::represent {

enum class InputFormat { Html, CustomJson, CustomTsv };

std::string_view to_string(InputFormat format);
InputFormat format_from_string(std::string_view s);

// Column-wise document: header path -> body values, in column order.
struct CustomJsonDoc {
  std::string title;
  std::string caption;
  std::vector<std::pair<std::string, std::vector<std::string>>> columns;
};

// "/"-joined header cells of column `col`, top to bottom, empty cells skipped
// and consecutive duplicates collapsed.
std::string header_path(const TableGrid& grid, std::size_t col);

// Throws Error(SubHeaderInBody) when a body row is a sub-header: split first.
// A header-less grid uses its first body row as the header. Repeated keys get
// " (2)", " (3)", ... suffixes.
CustomJsonDoc to_custom_json(const TableGrid& grid, const split::SubHeaderRule& rule = {});

nlohmann::ordered_json to_json(const CustomJsonDoc& doc);
// Indented, trailing newline; the golden-file form.
std::string to_canonical_text(const CustomJsonDoc& doc);
// Single line; the form sent to a model.
std::string to_compact_text(const CustomJsonDoc& doc);

// Plain HTML for a grid: title as <caption>, header rows in <thead> as <th>,
// one element per grid cell (merged cells repeated), ^{}/_{} as <sup>/<sub>,
// caption in a trailing <p>.
std::string to_html(const TableGrid& grid);

struct CustomTsvDoc {
  std::string text;
};

// <title>..</title>
// <table>
// one line per row, cells tab-separated; merge duplicates as <merged>..</merged>
// </table>
// <caption>..</caption>
CustomTsvDoc to_custom_tsv(const TableGrid& grid);

// Inverse of to_custom_tsv. Header/body partition is not encoded in the text,
// so the first `header_rows` lines are taken as header. Origins are not
// recovered. Throws Error(InvalidInput) on malformed text.
TableGrid parse_custom_tsv(std::string_view text, std::size_t header_rows = 0);

}  // namespace tablemine::represent
