#pragma once

// Minimal CSV reading for the manifest, predictions and score files: comma
// separated, first line is the header, no quoting.

#include <filesystem>
#include <string>
#include <string_view>
#include <vector>

namespace surfmon {

struct CsvTable {
  std::vector<std::string> header;
  std::vector<std::vector<std::string>> rows;

  // Throws Decode when the column is missing.
  std::size_t column(std::string_view name) const;
  bool has_column(std::string_view name) const;
};

// Throws Io if unreadable, Decode on an empty file or ragged rows. Blank
// lines are skipped, trailing '\r' is stripped, cells are trimmed.
CsvTable read_csv(const std::filesystem::path& path);

double parse_double(const std::string& cell, const std::filesystem::path& path, std::size_t row);
int parse_label(const std::string& cell, const std::filesystem::path& path, std::size_t row);

}  // namespace surfmon
