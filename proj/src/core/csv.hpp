#pragma once

#include <string>
#include <vector>

namespace recoil {

// Minimal CSV support: comma-separated, '#' comment lines, no quoting.
// Parse errors cite the 1-based row and column.
struct CsvTable {
  std::vector<std::string> header;
  std::vector<std::vector<std::string>> rows;
  std::vector<int> row_numbers;  // original line numbers, for diagnostics

  int column(const std::string& name) const;  // throws InputError
};

CsvTable parse_csv(const std::string& text);

double csv_to_double(const CsvTable& t, size_t row, int col);
long csv_to_long(const CsvTable& t, size_t row, int col);

std::string format_compact(double v);  // shortest round-trip decimal

}  // namespace recoil
