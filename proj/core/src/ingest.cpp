#include "tablemine/ingest.hpp"

#include <algorithm>
#include <cctype>
#include <optional>

#include "html_lexer.hpp"
#include "tablemine/error.hpp"
#include "tablemine/io.hpp"
#include "tablemine/split.hpp"
#include "tablemine/text.hpp"

namespace tablemine::ingest {

namespace {

using html::Token;

constexpr int kMaxColspan = 1000;
constexpr int kMaxRowspan = 65534;

bool contains_ci(std::string_view hay, std::string_view needle) {
  return text::to_lower_ascii(hay).find(needle) != std::string::npos;
}

// Elements whose text counts as the table's title when they precede <table>.
bool marks_title(const Token& tag) {
  static constexpr std::string_view kTags[] = {"h1", "h2", "h3", "h4", "h5", "h6", "figcaption"};
  for (auto t : kTags) {
    if (tag.name == t) return true;
  }
  for (std::string_view attr : {"class", "id"}) {
    if (const auto* v = tag.attr(attr)) {
      if (contains_ci(*v, "caption") || contains_ci(*v, "title") || contains_ci(*v, "label")) return true;
    }
  }
  return false;
}

bool is_block_break(std::string_view name) {
  return name == "br" || name == "p" || name == "div" || name == "li" || name == "ul" || name == "ol" ||
         name == "tr" || name == "td" || name == "th" || name == "table";
}

// Accumulates inline text, encoding <sup>/<sub> as ^{..}/_{..}.
class InlineText {
 public:
  void text(std::string_view s) { buf_ += s; }

  void space() { buf_.push_back(' '); }

  void open_script(bool sup) {
    opens_.push_back(buf_.size());
    buf_ += sup ? "^{" : "_{";
  }

  void close_script() {
    if (opens_.empty()) return;
    const std::size_t at = opens_.back();
    opens_.pop_back();
    const std::string_view inner = std::string_view(buf_).substr(at + 2);
    if (text::collapse_whitespace(inner).empty()) {
      buf_.erase(at, 2);
    } else {
      buf_.push_back('}');
    }
  }

  std::string finish() {
    while (!opens_.empty()) close_script();
    std::string out = text::collapse_whitespace(buf_);
    buf_.clear();
    return out;
  }

  bool empty() const { return buf_.empty(); }

 private:
  std::string buf_;
  std::vector<std::size_t> opens_;
};

// Parses a span attribute; returns 1 and records a warning when malformed.
int parse_span(const Token& tag, std::string_view attr, int max_value, std::vector<std::string>& warnings,
               std::size_t row, std::size_t cell) {
  const std::string* raw = tag.attr(attr);
  if (!raw) return 1;
  const std::string v = text::collapse_whitespace(*raw);
  const bool numeric = !v.empty() && std::all_of(v.begin(), v.end(), [](char c) {
    return std::isdigit(static_cast<unsigned char>(c));
  });
  if (!numeric || v.size() > 9) {
    warnings.push_back("MalformedSpan: " + std::string(attr) + "=\"" + *raw + "\" at row " + std::to_string(row) +
                       ", cell " + std::to_string(cell) + "; treated as 1");
    return 1;
  }
  const int value = std::stoi(v);
  if (attr == "colspan" && value == 0) return 1;
  return std::min(value, max_value);
}

std::vector<std::pair<std::size_t, std::size_t>> table_ranges(const std::vector<Token>& tokens) {
  std::vector<std::pair<std::size_t, std::size_t>> ranges;
  int depth = 0;
  for (std::size_t i = 0; i < tokens.size(); ++i) {
    const Token& t = tokens[i];
    if (t.name != "table" || t.kind == Token::Kind::Text) continue;
    if (t.kind == Token::Kind::StartTag) {
      if (depth++ == 0) ranges.push_back({i, tokens.size()});
    } else if (depth > 0 && --depth == 0) {
      ranges.back().second = i + 1;
    }
  }
  return ranges;
}

}  // namespace

std::size_t count_tables(std::string_view html) { return table_ranges(html::tokenize(html)).size(); }

SpannedTable parse_spans(const RawTable& raw) {
  // Only the stretch between the neighbouring top-level tables belongs to
  // table `table_index`: its title before it, its footnotes after it.
  std::vector<Token> tokens = html::tokenize(raw.html);
  const auto ranges = table_ranges(tokens);
  if (raw.table_index < 0 || static_cast<std::size_t>(raw.table_index) >= ranges.size()) {
    const std::string where = raw.source_id.empty() ? std::string("input") : raw.source_id;
    throw Error(ErrorCode::NoTableFound, ranges.empty() ? "no <table> element in " + where
                                                        : "no table " + std::to_string(raw.table_index) + " in " + where);
  }
  {
    const auto k = static_cast<std::size_t>(raw.table_index);
    const std::size_t begin = k == 0 ? 0 : ranges[k - 1].second;
    const std::size_t end = k + 1 < ranges.size() ? ranges[k + 1].first : tokens.size();
    tokens = std::vector<Token>(tokens.begin() + static_cast<std::ptrdiff_t>(begin),
                                tokens.begin() + static_cast<std::ptrdiff_t>(end));
  }

  SpannedTable out;
  out.source_id = raw.source_id;
  out.table_index = raw.table_index;

  // Phase 1: text before the table, inside title-marking elements. The
  // nearest (last) outermost marked element wins.
  std::size_t i = 0;
  std::string preceding_title;
  {
    struct Open {
      std::string name;
      bool marked;
    };
    std::vector<Open> stack;
    std::optional<InlineText> current;
    int marked_depth = 0;
    for (; i < tokens.size(); ++i) {
      const Token& t = tokens[i];
      if (t.kind == Token::Kind::StartTag && t.name == "table") break;
      if (t.kind == Token::Kind::Text) {
        if (marked_depth > 0 && current) current->text(t.text);
      } else if (t.kind == Token::Kind::StartTag) {
        if (marked_depth > 0 && current) {
          if (t.name == "sup" || t.name == "sub") {
            current->open_script(t.name == "sup");
          } else if (is_block_break(t.name) || t.name == "span") {
            current->space();
          }
        }
        if (html::is_void_element(t.name) || t.self_closing) continue;
        const bool marked = marks_title(t);
        if (marked) {
          if (marked_depth == 0) current.emplace();
          ++marked_depth;
        }
        stack.push_back({t.name, marked});
      } else {
        auto it = std::find_if(stack.rbegin(), stack.rend(), [&](const Open& o) { return o.name == t.name; });
        if (it == stack.rend()) continue;
        if (marked_depth > 0 && current && (t.name == "sup" || t.name == "sub")) current->close_script();
        if (marked_depth > 0 && current && (is_block_break(t.name) || t.name == "span")) current->space();
        const auto keep = static_cast<std::size_t>(stack.rend() - it) - 1;
        for (std::size_t k = keep; k < stack.size(); ++k) {
          if (stack[k].marked) --marked_depth;
        }
        stack.resize(keep);
        if (marked_depth == 0 && current) {
          std::string s = current->finish();
          if (!s.empty()) preceding_title = std::move(s);
          current.reset();
        }
      }
    }
    if (current) {
      std::string s = current->finish();
      if (!s.empty()) preceding_title = std::move(s);
    }
  }
  if (i == tokens.size()) {
    throw Error(ErrorCode::NoTableFound, "no <table> element in " +
                                             (raw.source_id.empty() ? std::string("input") : raw.source_id));
  }

  // Phase 2: the table itself.
  std::string caption_element;
  std::vector<std::string> footnotes;
  int depth = 0;
  bool in_thead = false;
  bool in_tfoot = false;
  bool in_caption = false;
  bool in_cell = false;
  SpanCell cell;
  InlineText cell_text;
  InlineText caption_text;
  InlineText tfoot_text;
  std::optional<SpanRow> row;

  auto close_cell = [&] {
    if (!in_cell) return;
    cell.text = cell_text.finish();
    if (!row) row.emplace();
    row->cells.push_back(std::move(cell));
    cell = SpanCell{};
    in_cell = false;
  };
  auto close_row = [&] {
    close_cell();
    if (row) {
      out.rows.push_back(std::move(*row));
      row.reset();
    }
  };
  auto sink = [&]() -> InlineText* {
    if (in_caption) return &caption_text;
    if (in_tfoot) return &tfoot_text;
    if (in_cell) return &cell_text;
    return nullptr;
  };

  for (; i < tokens.size(); ++i) {
    const Token& t = tokens[i];
    if (t.kind == Token::Kind::Text) {
      if (auto* s = sink()) s->text(t.text);
      continue;
    }
    const bool start = t.kind == Token::Kind::StartTag;
    if (t.name == "table") {
      if (start) {
        ++depth;
        if (depth > 1) {
          if (auto* s = sink()) s->space();
        }
        continue;
      }
      if (depth > 1) {
        --depth;
        if (auto* s = sink()) s->space();
        continue;
      }
      close_row();
      ++i;
      break;
    }
    if (depth > 1) {
      // Nested table: flatten into the enclosing cell's text.
      if (auto* s = sink()) {
        if (t.name == "sup" || t.name == "sub") {
          start ? s->open_script(t.name == "sup") : s->close_script();
        } else if (is_block_break(t.name)) {
          s->space();
        }
      }
      continue;
    }
    if (t.name == "caption") {
      if (start) {
        close_row();
        in_caption = true;
      } else if (in_caption) {
        in_caption = false;
        caption_element = caption_text.finish();
      }
      continue;
    }
    if (in_caption) {
      if (t.name == "sup" || t.name == "sub") {
        start ? caption_text.open_script(t.name == "sup") : caption_text.close_script();
      } else if (is_block_break(t.name)) {
        caption_text.space();
      }
      continue;
    }
    if (t.name == "tfoot") {
      close_row();
      in_tfoot = start;
      if (!start) {
        std::string s = tfoot_text.finish();
        if (!s.empty()) footnotes.push_back(std::move(s));
      }
      continue;
    }
    if (in_tfoot) {
      if (t.name == "sup" || t.name == "sub") {
        start ? tfoot_text.open_script(t.name == "sup") : tfoot_text.close_script();
      } else if (is_block_break(t.name)) {
        tfoot_text.space();
      }
      continue;
    }
    if (t.name == "thead") {
      close_row();
      in_thead = start;
      continue;
    }
    if (t.name == "tbody") {
      close_row();
      in_thead = false;
      continue;
    }
    if (t.name == "tr") {
      close_row();
      if (start) {
        row.emplace();
        row->in_thead = in_thead;
      }
      continue;
    }
    if (t.name == "td" || t.name == "th") {
      if (!start) {
        close_cell();
        continue;
      }
      close_cell();
      if (!row) {
        row.emplace();
        row->in_thead = in_thead;
      }
      in_cell = true;
      const std::size_t r = out.rows.size();
      const std::size_t c = row->cells.size();
      cell.header_markup = t.name == "th" || in_thead;
      cell.rowspan = parse_span(t, "rowspan", kMaxRowspan, out.warnings, r, c);
      cell.colspan = parse_span(t, "colspan", kMaxColspan, out.warnings, r, c);
      continue;
    }
    if (in_cell) {
      if (t.name == "sup" || t.name == "sub") {
        if (start) {
          cell_text.open_script(t.name == "sup");
        } else {
          cell_text.close_script();
        }
      } else if (is_block_break(t.name)) {
        cell_text.space();
      }
    }
  }
  if (in_tfoot) {
    std::string s = tfoot_text.finish();
    if (!s.empty()) footnotes.push_back(std::move(s));
  }
  close_row();

  // Phase 3: text after the table is footnote/caption material, up to the
  // next heading (which belongs to whatever follows).
  InlineText after;
  for (; i < tokens.size(); ++i) {
    const Token& t = tokens[i];
    if (t.kind == Token::Kind::StartTag && marks_title(t)) break;
    if (t.kind == Token::Kind::Text) {
      after.text(t.text);
    } else if (t.name == "sup" || t.name == "sub") {
      t.kind == Token::Kind::StartTag ? after.open_script(t.name == "sup") : after.close_script();
    } else {
      if (is_block_break(t.name)) after.space();
    }
  }
  if (std::string s = after.finish(); !s.empty()) footnotes.push_back(std::move(s));

  std::vector<std::string> caption_parts;
  if (!preceding_title.empty()) {
    out.title = preceding_title;
    if (!caption_element.empty()) caption_parts.push_back(caption_element);
  } else {
    out.title = caption_element;
  }
  for (auto& f : footnotes) caption_parts.push_back(std::move(f));
  out.caption = text::collapse_whitespace(text::join(caption_parts, " "));
  return out;
}

TableGrid expand_merged(const SpannedTable& spanned) {
  TableGrid grid;
  grid.source_id = spanned.source_id;
  grid.table_index = spanned.table_index;
  grid.title = spanned.title;
  grid.caption = spanned.caption;
  grid.warnings = spanned.warnings;

  const std::size_t nrows = spanned.rows.size();
  std::vector<std::vector<std::optional<Cell>>> occ(nrows);

  for (std::size_t r = 0; r < nrows; ++r) {
    const SpanRow& src = spanned.rows[r];
    std::size_t c = 0;
    for (std::size_t k = 0; k < src.cells.size(); ++k) {
      const SpanCell& sc = src.cells[k];
      while (c < occ[r].size() && occ[r][c]) ++c;
      const std::size_t rs =
          sc.rowspan <= 0 ? nrows - r : std::min<std::size_t>(static_cast<std::size_t>(sc.rowspan), nrows - r);
      const auto cs = static_cast<std::size_t>(std::max(sc.colspan, 1));
      bool overlapped = false;
      for (std::size_t dr = 0; dr < rs; ++dr) {
        auto& target = occ[r + dr];
        if (target.size() < c + cs) target.resize(c + cs);
        for (std::size_t dc = 0; dc < cs; ++dc) {
          auto& slot = target[c + dc];
          if (slot) {
            overlapped = true;
            continue;
          }
          Cell cell;
          cell.text = sc.text;
          cell.origin = {static_cast<int>(r), static_cast<int>(k)};
          cell.was_merged = dr != 0 || dc != 0;
          cell.header_markup = sc.header_markup || src.in_thead;
          slot = std::move(cell);
        }
      }
      if (overlapped) {
        grid.warnings.push_back("OverlappingSpans: cell (" + std::to_string(r) + ", " + std::to_string(k) +
                                ") truncated where an earlier span already claimed the position");
      }
      c += cs;
    }
  }

  std::size_t width = 1;
  for (const auto& row : occ) width = std::max(width, row.size());
  grid.width = width;
  for (std::size_t r = 0; r < nrows; ++r) {
    Row row;
    row.reserve(width);
    for (std::size_t c = 0; c < width; ++c) {
      if (c < occ[r].size() && occ[r][c]) {
        row.push_back(std::move(*occ[r][c]));
      } else {
        Cell pad;
        pad.header_markup = spanned.rows[r].in_thead;
        row.push_back(std::move(pad));
      }
    }
    grid.body.push_back(std::move(row));
  }
  return grid;
}

std::size_t detect_header_rows(const TableGrid& grid) {
  const std::size_t n = grid.row_count();
  std::size_t count = 0;
  for (; count < n; ++count) {
    const Row& row = grid.row_at(count);
    bool any = false;
    bool all = true;
    for (const auto& cell : row) {
      if (cell.origin.is_padding() && !cell.header_markup) continue;
      any = true;
      all = all && cell.header_markup;
    }
    if (!any || !all) break;
  }
  if (count > 0) return count;
  if (n > 1 && split::is_subheader(grid.row_at(0)).is_subheader) return 1;
  return 0;
}

TableGrid with_header_rows(TableGrid grid, std::size_t count) {
  std::vector<Row> rows = grid.all_rows();
  count = std::min(count, rows.size());
  grid.header.assign(std::make_move_iterator(rows.begin()), std::make_move_iterator(rows.begin() + count));
  grid.body.assign(std::make_move_iterator(rows.begin() + count), std::make_move_iterator(rows.end()));
  return grid;
}

TableGrid parse_html(const RawTable& raw) {
  TableGrid grid = expand_merged(parse_spans(raw));
  const std::size_t header_rows = detect_header_rows(grid);
  return with_header_rows(std::move(grid), header_rows);
}

namespace {

// One entry per top-level table; a file without tables still yields one entry
// so ingest reports it.
void append_tables(std::vector<RawTable>& corpus, std::string html, const std::string& source_id) {
  const std::size_t n = std::max<std::size_t>(count_tables(html), 1);
  for (std::size_t k = 0; k + 1 < n; ++k) corpus.push_back({html, source_id, static_cast<int>(k)});
  corpus.push_back({std::move(html), source_id, static_cast<int>(n - 1)});
}

}  // namespace

std::vector<RawTable> load_corpus(const std::filesystem::path& path) {
  namespace fs = std::filesystem;
  std::vector<RawTable> corpus;
  if (fs::is_directory(path)) {
    if (fs::exists(path / "manifest.json")) return load_corpus(path / "manifest.json");
    std::vector<fs::path> files;
    for (const auto& entry : fs::directory_iterator(path)) {
      const auto ext = text::to_lower_ascii(entry.path().extension().string());
      if (entry.is_regular_file() && (ext == ".html" || ext == ".htm")) files.push_back(entry.path());
    }
    std::sort(files.begin(), files.end());
    for (const auto& f : files) append_tables(corpus, io::read_file(f), f.stem().string());
    return corpus;
  }
  if (text::to_lower_ascii(path.extension().string()) == ".json") {
    nlohmann::json manifest;
    try {
      manifest = nlohmann::json::parse(io::read_file(path));
    } catch (const nlohmann::json::exception& e) {
      throw Error(ErrorCode::InvalidInput, "bad manifest " + path.string() + ": " + e.what());
    }
    if (!manifest.is_array()) throw Error(ErrorCode::InvalidInput, "manifest must be a JSON list");
    for (const auto& entry : manifest) {
      fs::path p = entry.at("path").get<std::string>();
      if (p.is_relative()) p = path.parent_path() / p;
      corpus.push_back({io::read_file(p), entry.at("source_id").get<std::string>(), entry.value("table_index", 0)});
    }
    return corpus;
  }
  append_tables(corpus, io::read_file(path), path.stem().string());
  return corpus;
}

}  // namespace tablemine::ingest
