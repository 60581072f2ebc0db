#pragma once

#include <compare>
#include <cstddef>
#include <string>
#include <vector>

#include <json.hpp>

namespace tablemine {

// Position of the source cell before merge expansion: (source row, ordinal of
// the cell within that HTML row). Padding cells added to ragged rows have no
// source and carry {-1, -1}.
struct CellOrigin {
  int row = -1;
  int col = -1;

  bool is_padding() const { return row < 0; }
  auto operator<=>(const CellOrigin&) const = default;
};

struct Cell {
  std::string text;
  CellOrigin origin;
  // True on every duplicate produced by merge expansion (not on the anchor).
  bool was_merged = false;
  // Declared as header by markup (<th>, or any cell inside <thead>).
  bool header_markup = false;

  bool operator==(const Cell&) const = default;
};

using Row = std::vector<Cell>;

struct TableGrid {
  std::string source_id;
  int table_index = 0;
  std::string title;
  std::string caption;
  std::vector<Row> header;
  std::vector<Row> body;
  std::size_t width = 0;
  // Non-fatal diagnostics from ingest (malformed spans, overlaps, ...).
  std::vector<std::string> warnings;

  std::size_t row_count() const { return header.size() + body.size(); }
  std::vector<Row> all_rows() const;
  const Row& row_at(std::size_t i) const { return i < header.size() ? header[i] : body[i - header.size()]; }

  bool operator==(const TableGrid&) const = default;
};

bool is_rectangular(const TableGrid& grid);

// Canonical JSON (sorted keys). Warnings are only emitted when present.
nlohmann::json to_json(const TableGrid& grid);
TableGrid grid_from_json(const nlohmann::json& j);
std::string to_canonical_json(const TableGrid& grid);

}  // namespace tablemine
