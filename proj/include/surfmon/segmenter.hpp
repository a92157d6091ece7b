#pragma once

#include <cstdint>
#include <filesystem>
#include <map>
#include <memory>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "json.hpp"
#include "surfmon/raster.hpp"

namespace surfmon {

// One segmented region, in window coordinates.
struct MaskRecord {
  int bbox_x = 0;
  int bbox_y = 0;
  int bbox_w = 0;
  int bbox_h = 0;
  std::int64_t pixel_count = 0;
  // Row-major run lengths over the whole window, alternating background and
  // foreground, starting with background. Trailing background may be omitted.
  std::optional<std::vector<std::uint32_t>> rle;

  std::int64_t bbox_area() const { return static_cast<std::int64_t>(bbox_w) * bbox_h; }

  friend bool operator==(const MaskRecord&, const MaskRecord&) = default;
};

// Empty when the record satisfies every MaskRecord invariant for a window of
// the given size; otherwise a description of the first violation.
std::optional<std::string> mask_violation(const MaskRecord& mask, int window_width, int window_height);

// Sort by (bbox_y, bbox_x, bbox_w, bbox_h, pixel_count); stable otherwise.
void canonicalize(std::vector<MaskRecord>& masks);

nlohmann::json to_json(const MaskRecord& mask);
// Throws MalformedBackendReply on structural problems (missing keys, wrong types).
MaskRecord mask_from_json(const nlohmann::json& j);

enum class BackendKind { Reference, Scripted, External };
enum class Polarity { DarkForeground, LightForeground };

struct IntensityThreshold {
  bool otsu = false;
  int value = 128;

  static IntensityThreshold fixed(int v) { return {false, v}; }
  static IntensityThreshold automatic() { return {true, 0}; }
};

struct SegmenterConfig {
  BackendKind backend = BackendKind::Reference;
  IntensityThreshold threshold{};
  Polarity polarity = Polarity::DarkForeground;
  int connectivity = 8;
  std::string fixture_path;
  std::string endpoint;
  // Passed through verbatim to the external backend.
  nlohmann::json options = nlohmann::json::object();
  bool emit_rle = false;

  void validate() const;
};

// Key for scripted fixtures: "imageId:originRow:originCol".
struct WindowIdentity {
  std::string image_id;
  int origin_row = 0;
  int origin_col = 0;

  std::string key() const;
};

class Segmenter {
 public:
  virtual ~Segmenter() = default;
  // Must be safe to call concurrently.
  virtual std::vector<MaskRecord> segment(const WindowView& window, const WindowIdentity& id) = 0;
};

std::unique_ptr<Segmenter> make_segmenter(const SegmenterConfig& config);

// Standard Otsu split {v <= k} | {v > k}, maximizing between-class variance
// over k in [0, 254], ties toward the lower k. Empty when fewer than two
// distinct intensities occur.
std::optional<int> otsu_threshold(std::span<const std::uint8_t> gray);

// Threshold + connected components on a grayscale window. One mask per
// component, canonical order.
std::vector<MaskRecord> reference_segment(const WindowView& window, IntensityThreshold threshold,
                                          Polarity polarity, int connectivity, bool emit_rle = false);

class ReferenceSegmenter final : public Segmenter {
 public:
  explicit ReferenceSegmenter(const SegmenterConfig& config);
  std::vector<MaskRecord> segment(const WindowView& window, const WindowIdentity& id) override;

 private:
  IntensityThreshold threshold_;
  Polarity polarity_;
  int connectivity_;
  bool emit_rle_;
};

// Replays masks from a fixture document keyed by WindowIdentity::key().
class ScriptedSegmenter final : public Segmenter {
 public:
  static ScriptedSegmenter from_file(const std::filesystem::path& path);
  static ScriptedSegmenter from_json(const nlohmann::json& doc);

  std::vector<MaskRecord> segment(const WindowView& window, const WindowIdentity& id) override;
  std::size_t size() const { return fixture_.size(); }

 private:
  std::map<std::string, std::vector<MaskRecord>> fixture_;
};

}  // namespace surfmon
