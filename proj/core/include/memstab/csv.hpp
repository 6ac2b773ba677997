#pragma once

#include <cstddef>
#include <iosfwd>
#include <span>
#include <string>
#include <string_view>
#include <vector>

namespace memstab::csv {

/// A header plus string cells. Quoted fields follow the usual RFC 4180
/// rules; CRLF line endings are accepted.
struct Table {
  std::vector<std::string> header;
  std::vector<std::vector<std::string>> rows;

  /// Index of a named column; throws kParse if absent.
  std::size_t column(std::string_view name) const;
};

/// Throws kParse on an empty stream or ragged rows.
Table read(std::istream& in);

std::string escape(std::string_view field);
void write_row(std::ostream& out, std::span<const std::string> fields);
void write_row(std::ostream& out, std::initializer_list<std::string> fields);

/// Fixed 6-decimal rendering; "nan" for NaN and no negative zero.
std::string fixed6(double value);

double parse_double(std::string_view text, std::string_view what);
long long parse_int(std::string_view text, std::string_view what);

}  // namespace memstab::csv
