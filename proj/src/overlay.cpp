#include "surfmon/overlay.hpp"

#include "surfmon/error.hpp"

namespace surfmon {

std::vector<OverlayRect> rectangles_from_report(const nlohmann::json& report, int image_width, int image_height) {
  auto fail = [](const std::string& what) { return Error(ErrorKind::InvalidArgument, "report mismatch: " + what); };
  try {
    if (report.at("width").get<int>() != image_width || report.at("height").get<int>() != image_height) {
      throw fail("report was produced for a " + std::to_string(report.at("width").get<int>()) + "x" +
                 std::to_string(report.at("height").get<int>()) + " image");
    }
    std::vector<OverlayRect> rects;
    for (const auto& s : report.at("retained_samples")) {
      const auto& win = s.at("window");
      const auto& bbox = s.at("bbox");
      OverlayRect r{win.at(1).get<int>() + bbox.at(0).get<int>(), win.at(0).get<int>() + bbox.at(1).get<int>(),
                    bbox.at(2).get<int>(), bbox.at(3).get<int>()};
      if (r.x < 0 || r.y < 0 || r.width < 1 || r.height < 1 || r.x + r.width > image_width ||
          r.y + r.height > image_height) {
        throw fail("retained sample lies outside the image");
      }
      rects.push_back(r);
    }
    return rects;
  } catch (const nlohmann::json::exception& e) {
    throw fail(e.what());
  }
}

ImageRaster draw_rectangles(const ImageRaster& image, std::span<const OverlayRect> rects) {
  ImageRaster out = image;
  const bool rgb = image.channels() == 3;
  auto paint = [&](int row, int col) {
    if (rgb) {
      out.at(row, col, 0) = 255;
      out.at(row, col, 1) = 0;
      out.at(row, col, 2) = 0;
    } else {
      out.at(row, col) = 255;
    }
  };
  for (const auto& r : rects) {
    for (int c = r.x; c < r.x + r.width; ++c) {
      paint(r.y, c);
      paint(r.y + r.height - 1, c);
    }
    for (int row = r.y; row < r.y + r.height; ++row) {
      paint(row, r.x);
      paint(row, r.x + r.width - 1);
    }
  }
  return out;
}

}  // namespace surfmon
