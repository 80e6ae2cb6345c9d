#pragma once

#include <filesystem>
#include <iosfwd>
#include <string>
#include <string_view>
#include <vector>

namespace cbf_surrogate::csv {

struct Table {
  std::vector<std::string> header;
  std::vector<std::vector<std::string>> rows;
  std::filesystem::path source;

  // Index of a header column; throws ValidationError naming the file if absent.
  std::size_t column(std::string_view name) const;
};

std::string trim(std::string_view s);

// Splits one record. Fields are trimmed; double-quoted fields may contain commas
// and doubled quotes.
std::vector<std::string> split_record(std::string_view line);

// Reads a whole file. Blank lines are skipped, CRLF tolerated. Every row must
// have as many fields as the header.
Table read(const std::filesystem::path& path);

// Requires the header to equal `expected` exactly (after trimming).
void require_header(const Table& table, const std::vector<std::string>& expected);

double parse_double(std::string_view field, const Table& table, std::size_t row);
long parse_int(std::string_view field, const Table& table, std::size_t row);

// Shortest round-trip decimal representation; locale independent.
std::string format_double(double value);

std::string escape(std::string_view field);

// Writes one record terminated by '\n', escaping fields as needed.
void write_record(std::ostream& out, const std::vector<std::string>& fields);

}  // namespace cbf_surrogate::csv
