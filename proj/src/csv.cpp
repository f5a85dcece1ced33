#include "herglotz/csv.hpp"

#include <charconv>
#include <cmath>
#include <istream>
#include <ostream>

#include "herglotz/error.hpp"

namespace herglotz {

std::string format_number(double v) {
  if (std::isnan(v)) return "nan";
  if (std::isinf(v)) return v > 0 ? "inf" : "-inf";
  char buf[64];
  auto [ptr, ec] = std::to_chars(buf, buf + sizeof buf, v, std::chars_format::general, 17);
  (void)ec;
  return std::string(buf, ptr);
}

void write_csv_row(std::ostream& out, std::span<const double> values) {
  std::string line;
  for (std::size_t i = 0; i < values.size(); ++i) {
    if (i) line += ',';
    line += format_number(values[i]);
  }
  line += '\n';
  out << line;
}

void write_csv_header(std::ostream& out, const std::vector<std::string>& names) {
  std::string line;
  for (std::size_t i = 0; i < names.size(); ++i) {
    if (i) line += ',';
    line += names[i];
  }
  line += '\n';
  out << line;
}

namespace {

std::vector<std::string_view> split(std::string_view line) {
  std::vector<std::string_view> out;
  std::size_t start = 0;
  for (;;) {
    std::size_t comma = line.find(',', start);
    std::string_view cell = line.substr(start, comma == std::string_view::npos ? line.npos : comma - start);
    while (!cell.empty() && (cell.front() == ' ' || cell.front() == '\t')) cell.remove_prefix(1);
    while (!cell.empty() && (cell.back() == ' ' || cell.back() == '\t' || cell.back() == '\r'))
      cell.remove_suffix(1);
    out.push_back(cell);
    if (comma == std::string_view::npos) break;
    start = comma + 1;
  }
  return out;
}

double parse_cell(std::string_view cell, int line_no) {
  if (cell == "nan") return NAN;
  if (cell == "inf") return INFINITY;
  if (cell == "-inf") return -INFINITY;
  double v = 0.0;
  auto [ptr, ec] = std::from_chars(cell.data(), cell.data() + cell.size(), v);
  if (cell.empty() || ec != std::errc() || ptr != cell.data() + cell.size())
    throw ValidationError("csv line " + std::to_string(line_no) + ": bad number '" + std::string(cell) + "'");
  return v;
}

}  // namespace

CsvTable read_csv(std::istream& in) {
  CsvTable t;
  std::string line;
  int line_no = 0;
  bool have_header = false;
  while (std::getline(in, line)) {
    ++line_no;
    if (line.empty() || line[0] == '#' || line == "\r") continue;
    auto cells = split(line);
    if (!have_header) {
      for (auto c : cells) t.header.emplace_back(c);
      have_header = true;
      continue;
    }
    if (cells.size() != t.header.size())
      throw ValidationError("csv line " + std::to_string(line_no) + ": expected " +
                            std::to_string(t.header.size()) + " columns");
    std::vector<double> row;
    row.reserve(cells.size());
    for (auto c : cells) row.push_back(parse_cell(c, line_no));
    t.rows.push_back(std::move(row));
  }
  if (!have_header) throw ValidationError("csv: empty input");
  return t;
}

}  // namespace herglotz
