#include "mobind/csv.hpp"

#include "mobind/error.hpp"

namespace mobind::csv {

std::string escape(std::string_view field) {
  if (field.find_first_of(",\"\r\n") == std::string_view::npos) return std::string(field);
  std::string out;
  out.reserve(field.size() + 2);
  out.push_back('"');
  for (char c : field) {
    if (c == '"') out.push_back('"');
    out.push_back(c);
  }
  out.push_back('"');
  return out;
}

void write_row(std::ostream& out, const Row& row) {
  for (std::size_t i = 0; i < row.size(); ++i) {
    if (i) out.put(',');
    out << escape(row[i]);
  }
  out.put('\n');
}

std::optional<Row> Reader::next() {
  std::string line;
  if (!std::getline(in_, line)) return std::nullopt;
  ++line_;
  row_line_ = line_;

  Row row;
  std::string field;
  bool quoted = false;
  std::size_t i = 0;
  for (;;) {
    if (i == line.size()) {
      if (!quoted) break;
      // Quoted field continues on the next physical line.
      if (!std::getline(in_, line)) {
        throw ParseError("unterminated quoted field", row_line_);
      }
      ++line_;
      field.push_back('\n');
      i = 0;
      continue;
    }
    const char c = line[i++];
    if (quoted) {
      if (c == '"') {
        if (i < line.size() && line[i] == '"') {
          field.push_back('"');
          ++i;
        } else {
          quoted = false;
        }
      } else {
        field.push_back(c);
      }
    } else if (c == '"') {
      quoted = true;
    } else if (c == ',') {
      row.push_back(std::move(field));
      field.clear();
    } else if (c == '\r' && i == line.size()) {
      // CRLF line ending
    } else {
      field.push_back(c);
    }
  }
  row.push_back(std::move(field));
  return row;
}

void expect_header(Reader& reader, const Row& expected, std::string_view what) {
  auto header = reader.next();
  if (!header) throw ParseError(std::string(what) + ": empty file, expected a header", 1);
  if (*header != expected) {
    std::string want;
    for (std::size_t i = 0; i < expected.size(); ++i) want += (i ? "," : "") + expected[i];
    throw ParseError(std::string(what) + ": header must be \"" + want + "\"", reader.line());
  }
}

}  // namespace mobind::csv
