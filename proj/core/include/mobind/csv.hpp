#pragma once

#include <istream>
#include <optional>
#include <ostream>
#include <string>
#include <string_view>
#include <vector>

namespace mobind::csv {

using Row = std::vector<std::string>;

/// Quotes a field when it contains a comma, quote, or line break.
std::string escape(std::string_view field);

void write_row(std::ostream& out, const Row& row);

/// Streaming RFC 4180 reader. Quoted fields may span lines.
class Reader {
 public:
  explicit Reader(std::istream& in) : in_(in) {}

  /// Next row, or nullopt at end of input. Throws ParseError on an
  /// unterminated quote.
  std::optional<Row> next();

  /// Physical line number where the last returned row started (1-based).
  std::size_t line() const noexcept { return row_line_; }

 private:
  std::istream& in_;
  std::size_t line_ = 0;
  std::size_t row_line_ = 0;
};

/// Reads a header row and checks it matches `expected` exactly.
/// Throws ParseError naming the mismatch.
void expect_header(Reader& reader, const Row& expected, std::string_view what);

}  // namespace mobind::csv
