#pragma once

#include <span>
#include <vector>

#include "json.hpp"
#include "surfmon/raster.hpp"

namespace surfmon {

// Image-coordinate rectangle.
struct OverlayRect {
  int x = 0;
  int y = 0;
  int width = 0;
  int height = 0;
  friend bool operator==(const OverlayRect&, const OverlayRect&) = default;
};

// Retained samples of an analysis report, translated to image coordinates
// (window origin + bbox offset), in report order. Throws InvalidArgument when
// the report's dimensions differ from the image or a rectangle falls outside it.
std::vector<OverlayRect> rectangles_from_report(const nlohmann::json& report, int image_width, int image_height);

// 1-px outlines drawn in order; red on RGB, white on grayscale.
ImageRaster draw_rectangles(const ImageRaster& image, std::span<const OverlayRect> rects);

}  // namespace surfmon
