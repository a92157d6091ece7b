#include "surfmon/csv.hpp"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <fstream>

#include "surfmon/error.hpp"

namespace surfmon {
namespace {

std::string trim(std::string_view s) {
  const auto first = s.find_first_not_of(" \t");
  if (first == std::string_view::npos) return {};
  const auto last = s.find_last_not_of(" \t");
  return std::string(s.substr(first, last - first + 1));
}

std::vector<std::string> split(const std::string& line) {
  std::vector<std::string> cells;
  std::size_t start = 0;
  while (true) {
    const auto comma = line.find(',', start);
    cells.push_back(trim(std::string_view(line).substr(start, comma - start)));
    if (comma == std::string::npos) break;
    start = comma + 1;
  }
  return cells;
}

std::string where(const std::filesystem::path& path, std::size_t row) {
  return path.string() + " row " + std::to_string(row + 1);
}

}  // namespace

std::size_t CsvTable::column(std::string_view name) const {
  const auto it = std::find(header.begin(), header.end(), name);
  if (it == header.end()) throw Error(ErrorKind::Decode, "CSV lacks column \"" + std::string(name) + "\"");
  return static_cast<std::size_t>(it - header.begin());
}

bool CsvTable::has_column(std::string_view name) const {
  return std::find(header.begin(), header.end(), name) != header.end();
}

CsvTable read_csv(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw Error(ErrorKind::Io, "cannot open " + path.string());
  CsvTable table;
  std::string line;
  bool have_header = false;
  while (std::getline(in, line)) {
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (trim(line).empty()) continue;
    auto cells = split(line);
    if (!have_header) {
      table.header = std::move(cells);
      have_header = true;
      continue;
    }
    if (cells.size() != table.header.size()) {
      throw Error(ErrorKind::Decode, where(path, table.rows.size()) + ": expected " +
                                         std::to_string(table.header.size()) + " cells");
    }
    table.rows.push_back(std::move(cells));
  }
  if (!have_header) throw Error(ErrorKind::Decode, path.string() + ": missing CSV header");
  return table;
}

double parse_double(const std::string& cell, const std::filesystem::path& path, std::size_t row) {
  double v = 0.0;
  const auto [ptr, ec] = std::from_chars(cell.data(), cell.data() + cell.size(), v);
  if (ec != std::errc() || ptr != cell.data() + cell.size() || !std::isfinite(v)) {
    throw Error(ErrorKind::Decode, where(path, row) + ": \"" + cell + "\" is not a finite number");
  }
  return v;
}

int parse_label(const std::string& cell, const std::filesystem::path& path, std::size_t row) {
  if (cell == "0") return 0;
  if (cell == "1") return 1;
  throw Error(ErrorKind::Decode, where(path, row) + ": label must be 0 or 1, got \"" + cell + "\"");
}

}  // namespace surfmon
