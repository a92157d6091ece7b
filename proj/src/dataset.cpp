#include "surfmon/dataset.hpp"

#include <fstream>

#include "surfmon/csv.hpp"
#include "surfmon/error.hpp"

namespace surfmon {

DatasetManifest load_manifest(const std::filesystem::path& path) {
  const CsvTable table = read_csv(path);
  const std::size_t path_col = table.column("path");
  const std::size_t label_col = table.column("label");

  DatasetManifest manifest;
  manifest.root = path.parent_path();
  const auto root = std::filesystem::weakly_canonical(manifest.root.empty() ? "." : manifest.root);
  for (std::size_t i = 0; i < table.rows.size(); ++i) {
    const auto& row = table.rows[i];
    ManifestEntry e;
    e.path = std::filesystem::path(row[path_col]).lexically_normal();
    e.label = parse_label(row[label_col], path, i);
    if (e.path.empty()) throw Error(ErrorKind::Decode, path.string() + ": empty path in row " + std::to_string(i + 1));
    const auto full = std::filesystem::weakly_canonical(root / e.path);
    const auto rel = full.lexically_relative(root);
    if (rel.empty() || *rel.begin() == "..") {
      throw Error(ErrorKind::InvalidArgument, e.path.string() + " does not resolve under " + root.string());
    }
    manifest.entries.push_back(std::move(e));
  }
  return manifest;
}

void write_manifest(const std::filesystem::path& path, std::span<const ManifestEntry> entries) {
  std::ofstream out(path);
  if (!out) throw Error(ErrorKind::Io, "cannot write manifest " + path.string());
  out << "path,label\n";
  for (const auto& e : entries) out << e.path.generic_string() << ',' << e.label << '\n';
  if (!out) throw Error(ErrorKind::Io, "write failed for " + path.string());
}

}  // namespace surfmon
