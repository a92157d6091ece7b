#include "surfmon/segmenter.hpp"

#include <algorithm>
#include <tuple>

#include "surfmon/bridge_client.hpp"
#include "surfmon/error.hpp"

namespace surfmon {

std::optional<std::string> mask_violation(const MaskRecord& m, int window_width, int window_height) {
  if (m.bbox_x < 0 || m.bbox_y < 0) return "bbox origin is negative";
  if (m.bbox_w < 1 || m.bbox_h < 1) return "bbox has empty extent";
  if (m.bbox_x + m.bbox_w > window_width || m.bbox_y + m.bbox_h > window_height) {
    return "bbox exceeds window bounds";
  }
  if (m.pixel_count < 1 || m.pixel_count > m.bbox_area()) {
    return "pixel_count outside [1, bbox area]";
  }
  if (m.rle) {
    const auto total = static_cast<std::uint64_t>(window_width) * window_height;
    std::uint64_t pos = 0;
    std::int64_t foreground = 0;
    for (std::size_t i = 0; i < m.rle->size(); ++i) {
      const std::uint64_t run = (*m.rle)[i];
      if (pos + run > total) return "rle runs exceed window area";
      if (i % 2 == 1) {
        for (std::uint64_t p = pos; p < pos + run; ++p) {
          const auto row = static_cast<int>(p / window_width);
          const auto col = static_cast<int>(p % window_width);
          if (row < m.bbox_y || row >= m.bbox_y + m.bbox_h || col < m.bbox_x ||
              col >= m.bbox_x + m.bbox_w) {
            return "rle foreground pixel outside bbox";
          }
        }
        foreground += static_cast<std::int64_t>(run);
      }
      pos += run;
    }
    if (foreground != m.pixel_count) return "rle foreground count differs from pixel_count";
  }
  return std::nullopt;
}

void canonicalize(std::vector<MaskRecord>& masks) {
  std::stable_sort(masks.begin(), masks.end(), [](const MaskRecord& a, const MaskRecord& b) {
    return std::tie(a.bbox_y, a.bbox_x, a.bbox_w, a.bbox_h, a.pixel_count) <
           std::tie(b.bbox_y, b.bbox_x, b.bbox_w, b.bbox_h, b.pixel_count);
  });
}

nlohmann::json to_json(const MaskRecord& m) {
  nlohmann::json j{{"bbox", {m.bbox_x, m.bbox_y, m.bbox_w, m.bbox_h}}, {"pixel_count", m.pixel_count}};
  if (m.rle) j["rle"] = *m.rle;
  return j;
}

MaskRecord mask_from_json(const nlohmann::json& j) {
  auto fail = [](const std::string& what) { return Error(ErrorKind::MalformedBackendReply, what); };
  if (!j.is_object()) throw fail("mask must be an object");
  const auto bbox = j.find("bbox");
  if (bbox == j.end() || !bbox->is_array() || bbox->size() != 4) {
    throw fail("mask.bbox must be [x, y, w, h]");
  }
  for (const auto& v : *bbox) {
    if (!v.is_number_integer()) throw fail("mask.bbox entries must be integers");
  }
  const auto count = j.find("pixel_count");
  if (count == j.end() || !count->is_number_integer()) throw fail("mask.pixel_count must be an integer");

  MaskRecord m;
  m.bbox_x = (*bbox)[0].get<int>();
  m.bbox_y = (*bbox)[1].get<int>();
  m.bbox_w = (*bbox)[2].get<int>();
  m.bbox_h = (*bbox)[3].get<int>();
  m.pixel_count = count->get<std::int64_t>();
  if (const auto rle = j.find("rle"); rle != j.end() && !rle->is_null()) {
    if (!rle->is_array()) throw fail("mask.rle must be an array");
    std::vector<std::uint32_t> runs;
    runs.reserve(rle->size());
    for (const auto& v : *rle) {
      if (!v.is_number_unsigned() && !(v.is_number_integer() && v.get<std::int64_t>() >= 0)) {
        throw fail("mask.rle entries must be non-negative integers");
      }
      runs.push_back(v.get<std::uint32_t>());
    }
    m.rle = std::move(runs);
  }
  return m;
}

void SegmenterConfig::validate() const {
  if (!threshold.otsu && (threshold.value < 0 || threshold.value > 255)) {
    throw Error(ErrorKind::Config, "segmenter.threshold must be in [0, 255] or \"otsu\"");
  }
  if (connectivity != 4 && connectivity != 8) {
    throw Error(ErrorKind::Config, "segmenter.connectivity must be 4 or 8");
  }
  if ((backend == BackendKind::Scripted) != !fixture_path.empty()) {
    throw Error(ErrorKind::Config, "segmenter.fixture_path is required iff backend is scripted");
  }
  if ((backend == BackendKind::External) != !endpoint.empty()) {
    throw Error(ErrorKind::Config, "segmenter.endpoint is required iff backend is external");
  }
}

std::string WindowIdentity::key() const {
  return image_id + ":" + std::to_string(origin_row) + ":" + std::to_string(origin_col);
}

std::unique_ptr<Segmenter> make_segmenter(const SegmenterConfig& config) {
  config.validate();
  switch (config.backend) {
    case BackendKind::Reference:
      return std::make_unique<ReferenceSegmenter>(config);
    case BackendKind::Scripted:
      return std::make_unique<ScriptedSegmenter>(ScriptedSegmenter::from_file(config.fixture_path));
    case BackendKind::External:
      return make_bridge_client(config.endpoint, config.options);
  }
  throw Error(ErrorKind::Config, "unknown segmenter backend");
}

}  // namespace surfmon
