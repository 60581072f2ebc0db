#pragma once

#include <cstddef>
#include <filesystem>
#include <string>
#include <vector>

#include "tablemine/table.hpp"

namespace tablemine::ingest {

struct RawTable {
  std::string html;
  std::string source_id;
  int table_index = 0;
};

// A table as written in HTML: span attributes recorded, not yet expanded.
struct SpanCell {
  std::string text;
  int rowspan = 1;
  int colspan = 1;
  bool header_markup = false;
};

struct SpanRow {
  std::vector<SpanCell> cells;
  bool in_thead = false;
};

struct SpannedTable {
  std::string source_id;
  int table_index = 0;
  std::string title;
  std::string caption;
  std::vector<SpanRow> rows;
  std::vector<std::string> warnings;
};

// Parses top-level table number `table_index`; the text between it and its
// neighbouring tables supplies title and footnotes. Throws
// Error(NoTableFound). Non-numeric span attributes are reported in
// `warnings` and treated as 1.
SpannedTable parse_spans(const RawTable& raw);

// Copies each merged cell's value into every position it covers. Overlaps
// are resolved in favour of the earlier (row-major) span, with a warning.
// All rows land in `body`; header partitioning is a separate step.
TableGrid expand_merged(const SpannedTable& spanned);

// Number of leading rows (over header followed by body) that form the header.
// Markup wins; otherwise the first row counts as header when no cell in it is
// numeric-leading and at least one further row exists.
std::size_t detect_header_rows(const TableGrid& grid);

// Moves the first `count` rows of the grid into `header`.
TableGrid with_header_rows(TableGrid grid, std::size_t count);

// parse_spans -> expand_merged -> detect_header_rows.
TableGrid parse_html(const RawTable& raw);

std::size_t count_tables(std::string_view html);

// One entry per top-level table of a single .html file or of each file in a
// directory (sorted by name, source id = file stem), or a JSON manifest: [{"source_id", "path", "table_index"?}].
// Relative manifest paths resolve against the manifest's directory.
std::vector<RawTable> load_corpus(const std::filesystem::path& path);

}  // namespace tablemine::ingest
