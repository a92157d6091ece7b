#include <fstream>

#include "surfmon/error.hpp"
#include "surfmon/segmenter.hpp"

namespace surfmon {

ScriptedSegmenter ScriptedSegmenter::from_file(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw Error(ErrorKind::Io, "cannot open fixture " + path.string());
  nlohmann::json doc;
  try {
    doc = nlohmann::json::parse(in);
  } catch (const nlohmann::json::exception& e) {
    throw Error(ErrorKind::Config, "fixture " + path.string() + ": " + e.what());
  }
  return from_json(doc);
}

ScriptedSegmenter ScriptedSegmenter::from_json(const nlohmann::json& doc) {
  if (!doc.is_object()) throw Error(ErrorKind::Config, "fixture must be a JSON object");
  ScriptedSegmenter seg;
  for (const auto& [key, list] : doc.items()) {
    if (!list.is_array()) throw Error(ErrorKind::Config, "fixture entry " + key + " must be an array");
    std::vector<MaskRecord> masks;
    masks.reserve(list.size());
    try {
      for (const auto& m : list) masks.push_back(mask_from_json(m));
    } catch (const Error& e) {
      throw Error(ErrorKind::Config, "fixture entry " + key + ": " + e.what());
    }
    seg.fixture_.emplace(key, std::move(masks));
  }
  return seg;
}

std::vector<MaskRecord> ScriptedSegmenter::segment(const WindowView& window, const WindowIdentity& id) {
  const std::string key = id.key();
  const auto it = fixture_.find(key);
  if (it == fixture_.end()) throw Error(ErrorKind::FixtureMiss, "no fixture entry for " + key);
  for (const auto& m : it->second) {
    if (auto problem = mask_violation(m, window.width, window.height)) {
      throw Error(ErrorKind::Config, "fixture entry " + key + ": " + *problem);
    }
  }
  return it->second;
}

}  // namespace surfmon
