#pragma once

#include <filesystem>
#include <span>
#include <string>
#include <vector>

namespace surfmon {

struct ManifestEntry {
  std::filesystem::path path;  // as written, relative to the manifest root
  int label = 0;               // 1 = faulty

  // File stem; used as the image id in reports, predictions and fixtures.
  std::string image_id() const { return path.stem().string(); }
};

// CSV with header `path,label`; paths resolve against the manifest's directory.
struct DatasetManifest {
  std::filesystem::path root;
  std::vector<ManifestEntry> entries;

  std::filesystem::path resolve(const ManifestEntry& entry) const { return root / entry.path; }
};

// Throws Decode on bad rows or labels, InvalidArgument when a path escapes the root.
DatasetManifest load_manifest(const std::filesystem::path& path);
void write_manifest(const std::filesystem::path& path, std::span<const ManifestEntry> entries);

}  // namespace surfmon
