#pragma once

#include <filesystem>
#include <optional>

#include "json.hpp"
#include "surfmon/analysis.hpp"
#include "surfmon/raster.hpp"
#include "surfmon/segmenter.hpp"

namespace surfmon {

struct EwmaParams {
  double lambda = 0.1;
  double quantile = 0.95;
};

// Every tunable of the pipeline. JSON layout:
//   window.{width,height,step_w,step_h,edge_complete}
//   segmenter.{backend,threshold,polarity,connectivity,fixture_path,endpoint,options,emit_rle,timeout_ms}
//   thresholds.{lower,upper}
//   cluster.{tolerance,area_mode}
//   decision_threshold            number, or "calibrated" (the default)
//   ewma.{lambda,quantile}
//   preprocess.{normalize_brightness}
// Missing keys keep their defaults; unknown keys are rejected.
struct PipelineConfig {
  WindowSpec window;
  SegmenterConfig segmenter;
  AreaThresholds thresholds;
  ClusterParams cluster;
  std::optional<double> decision_threshold;  // empty: take it from calibration
  EwmaParams ewma;
  bool normalize_brightness = false;
  int segmenter_timeout_ms = 120000;

  void validate() const;
  AnalysisParams analysis_params(double decision_threshold) const;
};

// Relative fixture paths are resolved against base_dir.
PipelineConfig config_from_json(const nlohmann::json& doc, const std::filesystem::path& base_dir = {});
PipelineConfig load_config(const std::filesystem::path& path);
nlohmann::json to_json(const PipelineConfig& config);

std::unique_ptr<Segmenter> make_segmenter(const PipelineConfig& config);

}  // namespace surfmon
