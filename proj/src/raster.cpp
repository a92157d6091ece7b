#include "surfmon/raster.hpp"

#include <cstring>
#include <string>

#include "surfmon/error.hpp"
#include "surfmon/kernels.hpp"

namespace surfmon {

ImageRaster::ImageRaster(int width, int height, int channels, std::vector<std::uint8_t> pixels)
    : width_(width), height_(height), channels_(channels), pixels_(std::move(pixels)) {
  if (width < 1 || height < 1) {
    throw Error(ErrorKind::InvalidArgument, "image dimensions must be positive");
  }
  if (channels != 1 && channels != 3) {
    throw Error(ErrorKind::InvalidArgument, "image must have 1 or 3 channels");
  }
  const auto expected = static_cast<std::size_t>(width) * height * channels;
  if (pixels_.size() != expected) {
    throw Error(ErrorKind::InvalidArgument,
                "pixel buffer holds " + std::to_string(pixels_.size()) + " samples, expected " +
                    std::to_string(expected));
  }
}

ImageRaster::ImageRaster(int width, int height, int channels, std::uint8_t fill)
    : ImageRaster(width, height, channels,
                  std::vector<std::uint8_t>(
                      static_cast<std::size_t>(std::max(width, 0)) * std::max(height, 0) *
                          std::max(channels, 0),
                      fill)) {}

void WindowSpec::validate() const {
  if (window_width < 1 || window_height < 1) {
    throw Error(ErrorKind::InvalidArgument, "window dimensions must be >= 1");
  }
  if (width_step < 1 || height_step < 1) {
    throw Error(ErrorKind::InvalidArgument, "window steps must be >= 1");
  }
}

std::vector<int> axis_origins(int extent, int window, int step, bool edge_complete) {
  std::vector<int> origins;
  const int last = extent - window;
  for (int o = 0; o <= last; o += step) origins.push_back(o);
  if (edge_complete && !origins.empty() && origins.back() != last) origins.push_back(last);
  return origins;
}

std::vector<WindowOrigin> window_origins(int image_width, int image_height, const WindowSpec& spec) {
  spec.validate();
  if (spec.window_width > image_width || spec.window_height > image_height) {
    throw Error(ErrorKind::WindowLargerThanImage,
                "window " + std::to_string(spec.window_width) + "x" +
                    std::to_string(spec.window_height) + " exceeds image " +
                    std::to_string(image_width) + "x" + std::to_string(image_height));
  }
  const auto rows = axis_origins(image_height, spec.window_height, spec.height_step, spec.edge_complete);
  const auto cols = axis_origins(image_width, spec.window_width, spec.width_step, spec.edge_complete);
  std::vector<WindowOrigin> origins;
  origins.reserve(rows.size() * cols.size());
  for (int r : rows) {
    for (int c : cols) origins.push_back({r, c});
  }
  return origins;
}

std::vector<WindowView> split_image(const ImageRaster& image, const WindowSpec& spec) {
  const auto origins = window_origins(image.width(), image.height(), spec);
  const int ch = image.channels();
  const auto row_bytes = static_cast<std::size_t>(spec.window_width) * ch;
  const auto src = image.pixels();

  std::vector<WindowView> windows;
  windows.reserve(origins.size());
  for (const auto& o : origins) {
    WindowView w;
    w.origin_row = o.row;
    w.origin_col = o.col;
    w.width = spec.window_width;
    w.height = spec.window_height;
    w.channels = ch;
    w.pixels.resize(row_bytes * spec.window_height);
    for (int r = 0; r < spec.window_height; ++r) {
      const auto offset = (static_cast<std::size_t>(o.row + r) * image.width() + o.col) * ch;
      std::memcpy(w.pixels.data() + r * row_bytes, src.data() + offset, row_bytes);
    }
    windows.push_back(std::move(w));
  }
  return windows;
}

ImageRaster preprocess(const ImageRaster& image, bool normalize_brightness) {
  const auto& k = kernels::active();
  const auto n = static_cast<std::size_t>(image.width()) * image.height();

  std::vector<std::uint8_t> gray;
  if (image.channels() == 3) {
    gray.resize(n);
    k.rgb_to_gray(image.pixels(), gray);
  } else {
    gray.assign(image.pixels().begin(), image.pixels().end());
  }

  if (normalize_brightness) {
    const auto mm = k.min_max(gray);
    if (mm.lo < mm.hi) k.rescale(gray, gray, mm.lo, mm.hi);
  }
  return ImageRaster(image.width(), image.height(), 1, std::move(gray));
}

}  // namespace surfmon
