#pragma once

#include <iosfwd>
#include <string>
#include <string_view>
#include <vector>

namespace randfeat::csv {

/// A parsed numeric table: header names plus row-major values.
struct Table {
  std::vector<std::string> header;
  std::vector<std::vector<double>> rows;

  /// Index of a named column; throws ConfigError if absent.
  std::size_t column(std::string_view name) const;
};

/// Reads a comma-separated file with a mandatory header row. Every data cell
/// must parse as a double; failures throw ParseError with 1-based row/column
/// (row 1 is the header). Blank lines are skipped.
Table read(const std::string& path);
Table parse(std::istream& in);

/// Shortest-exact-enough float formatting used for every CSV we write:
/// 17 significant digits, '.' decimal separator, "nan"/"inf" spelled out.
std::string format(double v);

/// Joins already-formatted cells with commas and appends '\n'.
void write_row(std::ostream& out, const std::vector<std::string>& cells);

}  // namespace randfeat::csv
