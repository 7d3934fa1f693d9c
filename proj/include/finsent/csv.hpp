#pragma once

#include <cstddef>
#include <filesystem>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

namespace finsent::csv {

struct Table {
  std::vector<std::string> header;
  std::vector<std::vector<std::string>> rows;

  /// Case-insensitive, whitespace-trimmed lookup.
  std::optional<std::size_t> find_column(std::string_view name) const;
  /// Same as find_column but throws MissingColumn naming the column.
  std::size_t require_column(std::string_view name) const;
};

/// RFC 4180 style: quoted fields, doubled quotes, CRLF or LF line ends,
/// newlines inside quotes. The first record is the header.
Table parse(std::string_view text);
Table read_file(const std::filesystem::path& path);

std::string escape_field(std::string_view field);
std::string join_row(const std::vector<std::string>& fields);

std::string trim(std::string_view s);

/// Shortest decimal that round-trips for the given significant digits.
std::string format_double(double value, int significant_digits = 17);

}  // namespace finsent::csv
