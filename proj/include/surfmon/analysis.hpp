#pragma once

#include <cstdint>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "json.hpp"
#include "surfmon/raster.hpp"
#include "surfmon/segmenter.hpp"

namespace surfmon {

// Open interval (lower, upper) of admissible mask areas, in px^2.
struct AreaThresholds {
  double lower = 25.0;
  double upper = 1024.0;

  void validate() const;
  bool admits(double area) const { return lower < area && area < upper; }
};

enum class AreaMode { BBox, PixelCount };

struct AreaSample {
  std::int64_t area = 0;
  int window_row = 0;
  int window_col = 0;
  int mask_index = 0;
  // bbox of the source mask in window coordinates: x, y, w, h.
  int bbox[4] = {0, 0, 0, 0};

  friend bool operator==(const AreaSample&, const AreaSample&) = default;
};

struct ClusterParams {
  double tolerance = 50.0;
  AreaMode area_mode = AreaMode::BBox;

  void validate() const;
};

struct ClusterOutcome {
  // Each cluster sorted ascending by area; clusters in ascending order of
  // their smallest member.
  std::vector<std::vector<AreaSample>> clusters;
  std::optional<std::size_t> selected_index;
  // Mean area of the selected cluster, or 0 when it is a singleton or the
  // input was empty.
  double intersection = 0.0;
};

enum class Verdict { FaultFree, Faulty };

struct Decision {
  Verdict verdict = Verdict::FaultFree;
  double score = 0.0;
};

std::int64_t mask_area(const MaskRecord& mask, AreaMode mode);

// Masks of one window, keeping input order, filtered by the strict
// thresholds. Provenance fields are filled from the arguments.
std::vector<AreaSample> compute_areas(std::span<const MaskRecord> masks, const AreaThresholds& thresholds,
                                      AreaMode mode, int window_row = 0, int window_col = 0);

// Sequential tolerance clustering over ascending areas: an area joins the
// current cluster iff |area - running mean| <= tolerance. The selected
// cluster has the largest area sum; ties go to more members, then the
// smaller mean, then the earlier cluster.
ClusterOutcome cluster_areas(std::span<const AreaSample> samples, double tolerance);

inline ClusterOutcome cluster_areas(std::span<const AreaSample> samples, const ClusterParams& params) {
  params.validate();
  return cluster_areas(samples, params.tolerance);
}

// Faulty iff intersection > decision_threshold.
Decision decide(double intersection, double decision_threshold);

struct WindowMasks {
  WindowOrigin origin;
  std::vector<MaskRecord> masks;
};

struct AnalysisParams {
  WindowSpec window;
  AreaThresholds thresholds;
  ClusterParams cluster;
  double decision_threshold = 0.0;
  bool normalize_brightness = false;
};

struct ImageAnalysis {
  std::string image_id;
  int width = 0;
  int height = 0;
  Decision decision;
  ClusterOutcome outcome;
  std::vector<AreaSample> retained;
  std::vector<WindowMasks> windows;
};

// preprocess -> split_image -> segment each window -> pooled compute_areas
// -> cluster_areas -> decide. Windows are segmented on up to `workers`
// threads; the result does not depend on the worker count.
ImageAnalysis analyze_image(const ImageRaster& image, const std::string& image_id,
                            const AnalysisParams& params, Segmenter& segmenter, int workers = 1);

nlohmann::json to_json(const ImageAnalysis& analysis);

const char* to_string(Verdict verdict);

}  // namespace surfmon
