#pragma once

// Subcommand implementations behind the `surfmon` CLI. Each returns the
// process exit code and reports problems on `err`; nothing here throws.

#include <cstdint>
#include <iosfwd>
#include <optional>
#include <string>
#include <vector>

#include "surfmon/analysis.hpp"
#include "surfmon/config.hpp"
#include "surfmon/dataset.hpp"

namespace surfmon {

inline constexpr int kExitOk = 0;
inline constexpr int kExitError = 1;
inline constexpr int kExitFaulty = 2;

struct DetectOptions {
  std::string image;
  std::string config;
  std::string limits;  // supplies decision_threshold when the config says "calibrated"
  std::string out;     // report path; stdout when empty
  std::string image_id;  // defaults to the image file stem
  int workers = 1;
};

// Exit 0 = fault free, 2 = faulty, 1 = error.
int cmd_detect(const DetectOptions& opt, std::ostream& out, std::ostream& err);

struct CalibrateOptions {
  std::string manifest;
  std::string config;
  std::string out;  // limits file; stdout when empty
  std::optional<double> quantile;
  std::optional<double> lambda;
  int workers = 1;
};

int cmd_calibrate(const CalibrateOptions& opt, std::ostream& out, std::ostream& err);

struct BatchOptions {
  std::string manifest;
  std::string config;
  std::string limits;
  std::string out;      // predictions CSV; stdout when empty
  std::string metrics;  // metrics JSON; stdout after predictions when empty and out is set
  int workers = 1;
};

int cmd_batch(const BatchOptions& opt, std::ostream& out, std::ostream& err);

struct MonitorOptions {
  std::string scores;  // CSV with a `score` (or `x`) column, in stream order
  std::string limits;
  std::string out;     // trace CSV; stdout when empty
};

int cmd_monitor(const MonitorOptions& opt, std::ostream& out, std::ostream& err);

struct SynthOptions {
  std::string out_dir;
  std::string config;  // window spec and thresholds the defects are sized for
  std::uint64_t seed = 7;
  int count = 50;
  int calibration = 0;
  int size = 128;
  std::string texture = "value_noise";
  int min_size = 40;
  int max_size = 160;
  int intensity_delta = 100;
};

int cmd_synth(const SynthOptions& opt, std::ostream& out, std::ostream& err);

struct EvaluateOptions {
  std::string predictions;
  std::string limits;  // EWMA mode when set: image t is faulty iff alarm at t
  std::string out;     // metrics JSON; stdout when empty
};

int cmd_evaluate(const EvaluateOptions& opt, std::ostream& out, std::ostream& err);

struct OverlayOptions {
  std::string image;
  std::string report;
  std::string out;
};

int cmd_overlay(const OverlayOptions& opt, std::ostream& out, std::ostream& err);

// Scores every manifest entry with the given config; per-image failures are
// captured in `error` rather than thrown. Results keep manifest order.
struct ScoredImage {
  ManifestEntry entry;
  std::optional<ImageAnalysis> analysis;
  std::string error;
};

std::vector<ScoredImage> score_manifest(const DatasetManifest& manifest, const PipelineConfig& config,
                                        double decision_threshold, int workers);

}  // namespace surfmon
