#include "tablemine/table.hpp"

#include "tablemine/error.hpp"

namespace tablemine {

std::vector<Row> TableGrid::all_rows() const {
  std::vector<Row> rows = header;
  rows.insert(rows.end(), body.begin(), body.end());
  return rows;
}

bool is_rectangular(const TableGrid& grid) {
  if (grid.width == 0) return false;
  for (const auto& row : grid.header) {
    if (row.size() != grid.width) return false;
  }
  for (const auto& row : grid.body) {
    if (row.size() != grid.width) return false;
  }
  return true;
}

namespace {

nlohmann::json rows_to_json(const std::vector<Row>& rows) {
  auto out = nlohmann::json::array();
  for (const auto& row : rows) {
    auto jr = nlohmann::json::array();
    for (const auto& cell : row) {
      jr.push_back({{"text", cell.text},
                    {"origin", {cell.origin.row, cell.origin.col}},
                    {"merged", cell.was_merged},
                    {"th", cell.header_markup}});
    }
    out.push_back(std::move(jr));
  }
  return out;
}

std::vector<Row> rows_from_json(const nlohmann::json& j) {
  std::vector<Row> rows;
  for (const auto& jr : j) {
    Row row;
    for (const auto& jc : jr) {
      Cell cell;
      if (jc.is_string()) {
        cell.text = jc.get<std::string>();
      } else {
        cell.text = jc.at("text").get<std::string>();
        if (jc.contains("origin")) {
          cell.origin = {jc["origin"].at(0).get<int>(), jc["origin"].at(1).get<int>()};
        }
        cell.was_merged = jc.value("merged", false);
        cell.header_markup = jc.value("th", false);
      }
      row.push_back(std::move(cell));
    }
    rows.push_back(std::move(row));
  }
  return rows;
}

}  // namespace

nlohmann::json to_json(const TableGrid& grid) {
  nlohmann::json j = {
      {"source_id", grid.source_id},
      {"table_index", grid.table_index},
      {"title", grid.title},
      {"caption", grid.caption},
      {"width", grid.width},
      {"header", rows_to_json(grid.header)},
      {"body", rows_to_json(grid.body)},
  };
  if (!grid.warnings.empty()) j["warnings"] = grid.warnings;
  return j;
}

TableGrid grid_from_json(const nlohmann::json& j) {
  try {
    TableGrid grid;
    grid.source_id = j.value("source_id", std::string{});
    grid.table_index = j.value("table_index", 0);
    grid.title = j.value("title", std::string{});
    grid.caption = j.value("caption", std::string{});
    if (j.contains("header")) grid.header = rows_from_json(j["header"]);
    if (j.contains("body")) grid.body = rows_from_json(j["body"]);
    grid.width = j.value("width", std::size_t{0});
    if (grid.width == 0) {
      for (const auto& row : grid.all_rows()) grid.width = std::max(grid.width, row.size());
    }
    if (j.contains("warnings")) grid.warnings = j["warnings"].get<std::vector<std::string>>();
    return grid;
  } catch (const nlohmann::json::exception& e) {
    throw Error(ErrorCode::InvalidInput, std::string("bad grid JSON: ") + e.what());
  }
}

std::string to_canonical_json(const TableGrid& grid) { return to_json(grid).dump(2, ' ', false) + "\n"; }

}  // namespace tablemine
