#pragma once

#include <cstddef>
#include <cstdint>
#include <span>
#include <utility>
#include <vector>

namespace surfmon {

// Decoded 8-bit image, row-major, channels interleaved.
class ImageRaster {
 public:
  ImageRaster() = default;
  // Throws InvalidArgument unless width, height >= 1, channels in {1, 3}
  // and pixels.size() == width * height * channels.
  ImageRaster(int width, int height, int channels, std::vector<std::uint8_t> pixels);
  ImageRaster(int width, int height, int channels, std::uint8_t fill);

  int width() const noexcept { return width_; }
  int height() const noexcept { return height_; }
  int channels() const noexcept { return channels_; }
  std::span<const std::uint8_t> pixels() const noexcept { return pixels_; }
  std::span<std::uint8_t> pixels() noexcept { return pixels_; }

  std::uint8_t at(int row, int col, int channel = 0) const {
    return pixels_[(static_cast<std::size_t>(row) * width_ + col) * channels_ + channel];
  }
  std::uint8_t& at(int row, int col, int channel = 0) {
    return pixels_[(static_cast<std::size_t>(row) * width_ + col) * channels_ + channel];
  }

  friend bool operator==(const ImageRaster&, const ImageRaster&) = default;

 private:
  int width_ = 0;
  int height_ = 0;
  int channels_ = 0;
  std::vector<std::uint8_t> pixels_;
};

struct WindowSpec {
  int window_width = 64;
  int window_height = 64;
  int width_step = 32;
  int height_step = 32;
  // Append one extra row/column of windows flush with the right/bottom
  // border when the step grid leaves an uncovered strip.
  bool edge_complete = false;

  void validate() const;
};

// Owned copy of one sub-image; origin is 0-based in source coordinates.
struct WindowView {
  int origin_row = 0;
  int origin_col = 0;
  int width = 0;
  int height = 0;
  int channels = 1;
  std::vector<std::uint8_t> pixels;

  std::uint8_t at(int row, int col, int channel = 0) const {
    return pixels[(static_cast<std::size_t>(row) * width + col) * channels + channel];
  }
};

struct WindowOrigin {
  int row;
  int col;
  friend bool operator==(const WindowOrigin&, const WindowOrigin&) = default;
};

// Origins along one axis: 0, step, 2*step, ... <= extent - window.
std::vector<int> axis_origins(int extent, int window, int step, bool edge_complete);

// Row-major origin grid for an image of the given size. Throws
// WindowLargerThanImage when the window does not fit.
std::vector<WindowOrigin> window_origins(int image_width, int image_height, const WindowSpec& spec);

std::vector<WindowView> split_image(const ImageRaster& image, const WindowSpec& spec);

// Grayscale conversion for 3-channel input, then optional min/max stretch.
ImageRaster preprocess(const ImageRaster& image, bool normalize_brightness);

}  // namespace surfmon
