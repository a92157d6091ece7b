#pragma once

#include <cstdint>
#include <filesystem>
#include <optional>
#include <string>
#include <vector>

#include "surfmon/analysis.hpp"
#include "surfmon/raster.hpp"

namespace surfmon {

enum class Texture { Flat, Stripes, ValueNoise };

// Background intensities stay within [kTextureLow, kTextureHigh].
inline constexpr int kTextureLow = 150;
inline constexpr int kTextureHigh = 220;

struct DefectSpec {
  int min_size = 40;   // blob pixel count
  int max_size = 160;
  int intensity_delta = 100;  // subtracted from the texture under the blob
};

struct SynthSpec {
  int image_size = 128;
  int count_per_class = 50;
  int calibration_count = 0;  // extra fault-free images in calibration.csv
  Texture texture = Texture::ValueNoise;
  DefectSpec defect;
  std::uint64_t seed = 7;

  void validate() const;
};

struct BlobInfo {
  int row = 0;  // bbox origin in image coordinates
  int col = 0;
  int width = 0;
  int height = 0;
  std::int64_t pixel_count = 0;
  int covering_windows = 0;
};

struct SynthImage {
  ImageRaster image;
  int label = 0;
  std::optional<BlobInfo> blob;
};

enum class SynthStream : std::uint64_t { FaultFree = 0, Faulty = 1, Calibration = 2 };

// Deterministic in (spec.seed, stream, index). Faulty images carry one
// 4-connected dark blob whose bbox area lies strictly inside the thresholds
// and whose bbox is fully contained in at least two windows of `window`.
SynthImage generate_image(const SynthSpec& spec, const WindowSpec& window, const AreaThresholds& thresholds,
                          SynthStream stream, int index);

std::optional<Texture> parse_texture(const std::string& name);
const char* to_string(Texture texture);

struct SynthSummary {
  std::filesystem::path manifest;
  std::optional<std::filesystem::path> calibration_manifest;
  std::size_t images = 0;
};

// Writes images/ok_NNN.png, images/defect_NNN.png, manifest.csv (fault-free
// entries first), calibration/cal_NNN.png + calibration.csv when requested,
// and truth.json with blob geometry.
SynthSummary write_synth_dataset(const SynthSpec& spec, const WindowSpec& window, const AreaThresholds& thresholds,
                                 const std::filesystem::path& out_dir);

}  // namespace surfmon
