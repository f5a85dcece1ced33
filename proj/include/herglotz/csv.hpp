#pragma once

#include <iosfwd>
#include <span>
#include <string>
#include <string_view>
#include <vector>

namespace herglotz {

// 17 significant digits, '.' separator, independent of the global locale.
std::string format_number(double v);

void write_csv_row(std::ostream& out, std::span<const double> values);
void write_csv_header(std::ostream& out, const std::vector<std::string>& names);

struct CsvTable {
  std::vector<std::string> header;
  std::vector<std::vector<double>> rows;
};

// Numeric table with one header line.  Lines starting with '#' are skipped.
CsvTable read_csv(std::istream& in);

}  // namespace herglotz
