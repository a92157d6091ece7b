#pragma once

#include <filesystem>

#include "surfmon/raster.hpp"

namespace surfmon {

// Reads 8-bit PNG (gray, gray+alpha, RGB, RGBA, palette) or binary PGM/PPM
// with maxval 255. Alpha is dropped, palettes are expanded to RGB, gray
// with alpha becomes 1-channel. 16-bit input is rejected. Format is chosen
// from the file signature, not the extension.
ImageRaster read_image(const std::filesystem::path& path);

// Writes PNG, or PGM/PPM when the extension is .pgm/.ppm/.pnm.
void write_image(const std::filesystem::path& path, const ImageRaster& image);

void write_png(const std::filesystem::path& path, const ImageRaster& image);
void write_pnm(const std::filesystem::path& path, const ImageRaster& image);

}  // namespace surfmon
