#include "tablemine/represent.hpp"

#include <set>

#include "tablemine/error.hpp"
#include "tablemine/text.hpp"

namespace tablemine::represent {

std::string_view to_string(InputFormat format) {
  switch (format) {
    case InputFormat::Html: return "html";
    case InputFormat::CustomJson: return "custom_json";
    case InputFormat::CustomTsv: return "custom_tsv";
  }
  return "custom_tsv";
}

InputFormat format_from_string(std::string_view s) {
  if (s == "html") return InputFormat::Html;
  if (s == "custom_json" || s == "json") return InputFormat::CustomJson;
  if (s == "custom_tsv" || s == "tsv") return InputFormat::CustomTsv;
  throw Error(ErrorCode::InvalidConfig, "unknown input format: " + std::string(s));
}

namespace {

const std::vector<Row>& header_rows_of(const TableGrid& grid, std::vector<Row>& scratch) {
  if (!grid.header.empty() || grid.body.empty()) return grid.header;
  scratch = {grid.body.front()};
  return scratch;
}

std::string path_from(const std::vector<Row>& header, std::size_t col) {
  std::vector<std::string> parts;
  for (const auto& row : header) {
    if (col >= row.size()) continue;
    const std::string& t = row[col].text;
    if (t.empty()) continue;
    if (!parts.empty() && parts.back() == t) continue;
    parts.push_back(t);
  }
  return text::join(parts, "/");
}

std::string clean_tsv_cell(std::string_view s) {
  std::string out(s);
  for (char& c : out) {
    if (c == '\t' || c == '\n' || c == '\r') c = ' ';
  }
  return out;
}

constexpr std::string_view kMergedOpen = "<merged>";
constexpr std::string_view kMergedClose = "</merged>";

}  // namespace

std::string header_path(const TableGrid& grid, std::size_t col) {
  std::vector<Row> scratch;
  return path_from(header_rows_of(grid, scratch), col);
}

CustomJsonDoc to_custom_json(const TableGrid& grid, const split::SubHeaderRule& rule) {
  std::vector<Row> scratch;
  const std::vector<Row>& header = header_rows_of(grid, scratch);
  const std::size_t first_body = grid.header.empty() && !grid.body.empty() ? 1 : 0;

  for (std::size_t r = first_body; r < grid.body.size(); ++r) {
    if (split::is_subheader(grid.body[r], rule).is_subheader) {
      throw Error(ErrorCode::SubHeaderInBody, "body row " + std::to_string(r) + " of " + grid.source_id +
                                                  " is a sub-header; split the table before JSON conversion");
    }
  }

  CustomJsonDoc doc;
  doc.title = grid.title;
  doc.caption = grid.caption;
  std::set<std::string> used;
  for (std::size_t c = 0; c < grid.width; ++c) {
    const std::string base = path_from(header, c);
    std::string key = base;
    for (int n = 2; used.count(key); ++n) key = base + " (" + std::to_string(n) + ")";
    used.insert(key);
    std::vector<std::string> values;
    for (std::size_t r = first_body; r < grid.body.size(); ++r) {
      values.push_back(c < grid.body[r].size() ? grid.body[r][c].text : std::string{});
    }
    doc.columns.emplace_back(std::move(key), std::move(values));
  }
  return doc;
}

nlohmann::ordered_json to_json(const CustomJsonDoc& doc) {
  nlohmann::ordered_json columns = nlohmann::ordered_json::object();
  for (const auto& [key, values] : doc.columns) columns[key] = values;
  nlohmann::ordered_json j;
  j["title"] = doc.title;
  j["columns"] = std::move(columns);
  j["caption"] = doc.caption;
  return j;
}

std::string to_canonical_text(const CustomJsonDoc& doc) { return to_json(doc).dump(2, ' ', false) + "\n"; }

std::string to_compact_text(const CustomJsonDoc& doc) { return to_json(doc).dump(-1, ' ', false); }

namespace {

std::string html_escape(std::string_view s) {
  std::string out;
  for (char c : s) {
    switch (c) {
      case '&': out += "&amp;"; break;
      case '<': out += "&lt;"; break;
      case '>': out += "&gt;"; break;
      case '"': out += "&quot;"; break;
      default: out += c;
    }
  }
  return out;
}

std::string inline_html(std::string_view s) {
  std::string out;
  for (const auto& span : text::decode_markup(s)) {
    switch (span.kind) {
      case text::SpanKind::Plain: out += html_escape(span.text); break;
      case text::SpanKind::Sup: out += "<sup>" + html_escape(span.text) + "</sup>"; break;
      case text::SpanKind::Sub: out += "<sub>" + html_escape(span.text) + "</sub>"; break;
    }
  }
  return out;
}

}  // namespace

std::string to_html(const TableGrid& grid) {
  std::string out = "<table>\n";
  if (!grid.title.empty()) out += "<caption>" + inline_html(grid.title) + "</caption>\n";
  auto emit = [&](const std::vector<Row>& rows, const char* cell_tag) {
    for (const auto& row : rows) {
      out += "<tr>";
      for (const auto& cell : row) {
        out += std::string("<") + cell_tag + ">" + inline_html(cell.text) + "</" + cell_tag + ">";
      }
      out += "</tr>\n";
    }
  };
  if (!grid.header.empty()) {
    out += "<thead>\n";
    emit(grid.header, "th");
    out += "</thead>\n";
  }
  out += "<tbody>\n";
  emit(grid.body, "td");
  out += "</tbody>\n</table>\n";
  if (!grid.caption.empty()) out += "<p>" + inline_html(grid.caption) + "</p>\n";
  return out;
}

CustomTsvDoc to_custom_tsv(const TableGrid& grid) {
  std::string out;
  out += "<title>" + clean_tsv_cell(grid.title) + "</title>\n";
  out += "<table>\n";
  auto emit = [&](const Row& row) {
    for (std::size_t c = 0; c < row.size(); ++c) {
      if (c) out.push_back('\t');
      const std::string t = clean_tsv_cell(row[c].text);
      if (row[c].was_merged) {
        out += std::string(kMergedOpen) + t + std::string(kMergedClose);
      } else {
        out += t;
      }
    }
    out.push_back('\n');
  };
  for (const auto& row : grid.header) emit(row);
  for (const auto& row : grid.body) emit(row);
  out += "</table>\n";
  out += "<caption>" + clean_tsv_cell(grid.caption) + "</caption>";
  return {out};
}

TableGrid parse_custom_tsv(std::string_view tsv, std::size_t header_rows) {
  std::vector<std::string_view> lines;
  for (std::size_t start = 0;;) {
    const std::size_t nl = tsv.find('\n', start);
    if (nl == std::string_view::npos) {
      lines.push_back(tsv.substr(start));
      break;
    }
    lines.push_back(tsv.substr(start, nl - start));
    start = nl + 1;
  }
  auto fail = [](const std::string& why) { return Error(ErrorCode::InvalidInput, "custom TSV: " + why); };
  auto unwrap = [&](std::string_view line, std::string_view open, std::string_view close) {
    if (line.size() < open.size() + close.size() || line.substr(0, open.size()) != open ||
        line.substr(line.size() - close.size()) != close) {
      throw fail("expected " + std::string(open) + "..." + std::string(close));
    }
    return std::string(line.substr(open.size(), line.size() - open.size() - close.size()));
  };
  if (lines.size() < 4) throw fail("too few lines");
  TableGrid grid;
  grid.title = unwrap(lines.front(), "<title>", "</title>");
  grid.caption = unwrap(lines.back(), "<caption>", "</caption>");
  if (lines[1] != "<table>" || lines[lines.size() - 2] != "</table>") throw fail("missing <table> block");

  std::vector<Row> rows;
  for (std::size_t i = 2; i + 2 < lines.size(); ++i) {
    Row row;
    std::string_view line = lines[i];
    for (std::size_t start = 0;;) {
      const std::size_t tab = line.find('\t', start);
      std::string_view field = line.substr(start, tab == std::string_view::npos ? std::string_view::npos : tab - start);
      Cell cell;
      if (field.size() >= kMergedOpen.size() + kMergedClose.size() &&
          field.substr(0, kMergedOpen.size()) == kMergedOpen &&
          field.substr(field.size() - kMergedClose.size()) == kMergedClose) {
        cell.was_merged = true;
        field = field.substr(kMergedOpen.size(), field.size() - kMergedOpen.size() - kMergedClose.size());
      }
      cell.text = std::string(field);
      row.push_back(std::move(cell));
      if (tab == std::string_view::npos) break;
      start = tab + 1;
    }
    if (!rows.empty() && row.size() != rows.front().size()) throw fail("ragged row " + std::to_string(i - 2));
    rows.push_back(std::move(row));
  }
  grid.width = rows.empty() ? 1 : rows.front().size();
  header_rows = std::min(header_rows, rows.size());
  grid.header.assign(rows.begin(), rows.begin() + static_cast<std::ptrdiff_t>(header_rows));
  grid.body.assign(rows.begin() + static_cast<std::ptrdiff_t>(header_rows), rows.end());
  return grid;
}

}  // namespace tablemine::represent
