#include "csv.hpp"

#include <charconv>
#include <cstdlib>

#include "errors.hpp"

namespace recoil {

namespace {

std::string trim(const std::string& s) {
  size_t a = s.find_first_not_of(" \t\r");
  if (a == std::string::npos) return "";
  size_t b = s.find_last_not_of(" \t\r");
  return s.substr(a, b - a + 1);
}

std::vector<std::string> split_fields(const std::string& line) {
  std::vector<std::string> out;
  size_t start = 0;
  while (true) {
    size_t pos = line.find(',', start);
    if (pos == std::string::npos) {
      out.push_back(trim(line.substr(start)));
      break;
    }
    out.push_back(trim(line.substr(start, pos - start)));
    start = pos + 1;
  }
  return out;
}

}  // namespace

CsvTable parse_csv(const std::string& text) {
  CsvTable t;
  size_t start = 0;
  int line_no = 0;
  while (start <= text.size()) {
    size_t end = text.find('\n', start);
    if (end == std::string::npos) end = text.size();
    const std::string line = trim(text.substr(start, end - start));
    start = end + 1;
    ++line_no;
    if (line.empty() || line[0] == '#') {
      if (start > text.size()) break;
      continue;
    }
    auto fields = split_fields(line);
    if (t.header.empty()) {
      t.header = std::move(fields);
    } else {
      if (fields.size() != t.header.size())
        throw InputError("CSV row " + std::to_string(line_no) + ": expected " +
                         std::to_string(t.header.size()) + " fields, got " +
                         std::to_string(fields.size()));
      t.rows.push_back(std::move(fields));
      t.row_numbers.push_back(line_no);
    }
    if (start > text.size()) break;
  }
  if (t.header.empty()) throw InputError("CSV: no header row");
  return t;
}

int CsvTable::column(const std::string& name) const {
  for (size_t i = 0; i < header.size(); ++i)
    if (header[i] == name) return static_cast<int>(i);
  throw InputError("CSV: missing column '" + name + "'");
}

double csv_to_double(const CsvTable& t, size_t row, int col) {
  const std::string& s = t.rows[row][col];
  char* end = nullptr;
  const double v = std::strtod(s.c_str(), &end);
  if (end == s.c_str() || *end != '\0')
    throw InputError("CSV row " + std::to_string(t.row_numbers[row]) +
                     ", column " + std::to_string(col + 1) +
                     ": not a number: '" + s + "'");
  return v;
}

long csv_to_long(const CsvTable& t, size_t row, int col) {
  const std::string& s = t.rows[row][col];
  long v = 0;
  const auto res = std::from_chars(s.data(), s.data() + s.size(), v);
  if (res.ec != std::errc() || res.ptr != s.data() + s.size())
    throw InputError("CSV row " + std::to_string(t.row_numbers[row]) +
                     ", column " + std::to_string(col + 1) +
                     ": not an integer: '" + s + "'");
  return v;
}

std::string format_compact(double v) {
  char buf[32];
  const auto res = std::to_chars(buf, buf + sizeof(buf), v);
  return std::string(buf, res.ptr);
}

}  // namespace recoil
