#include "surfmon/image_io.hpp"

#include <png.h>

#include <algorithm>
#include <array>
#include <cctype>
#include <cstdio>
#include <fstream>
#include <memory>
#include <string>

#include "surfmon/error.hpp"

namespace surfmon {
namespace {

using FilePtr = std::unique_ptr<std::FILE, decltype(&std::fclose)>;

FilePtr open_file(const std::filesystem::path& path, const char* mode) {
  FilePtr f(std::fopen(path.c_str(), mode), &std::fclose);
  if (!f) throw Error(ErrorKind::Io, "cannot open " + path.string());
  return f;
}

[[noreturn]] void png_error_fn(png_structp, png_const_charp msg) {
  throw Error(ErrorKind::Decode, std::string("libpng: ") + msg);
}

void png_warning_fn(png_structp, png_const_charp) {}

ImageRaster read_png(const std::filesystem::path& path) {
  auto file = open_file(path, "rb");
  png_structp png = png_create_read_struct(PNG_LIBPNG_VER_STRING, nullptr, png_error_fn, png_warning_fn);
  if (png == nullptr) throw Error(ErrorKind::Decode, "png_create_read_struct failed");
  png_infop info = png_create_info_struct(png);
  struct Guard {
    png_structp* p;
    png_infop* i;
    ~Guard() { png_destroy_read_struct(p, i, nullptr); }
  } guard{&png, &info};
  if (info == nullptr) throw Error(ErrorKind::Decode, "png_create_info_struct failed");

  png_init_io(png, file.get());
  png_read_info(png, info);

  const png_uint_32 width = png_get_image_width(png, info);
  const png_uint_32 height = png_get_image_height(png, info);
  const int bit_depth = png_get_bit_depth(png, info);
  const int color_type = png_get_color_type(png, info);

  if (bit_depth == 16) throw Error(ErrorKind::Decode, path.string() + ": 16-bit PNG not supported");
  if (color_type == PNG_COLOR_TYPE_PALETTE) png_set_palette_to_rgb(png);
  if (color_type == PNG_COLOR_TYPE_GRAY && bit_depth < 8) png_set_expand_gray_1_2_4_to_8(png);
  if (png_get_valid(png, info, PNG_INFO_tRNS)) png_set_tRNS_to_alpha(png);
  png_set_strip_alpha(png);
  png_read_update_info(png, info);

  const int channels = png_get_channels(png, info);
  if (channels != 1 && channels != 3) {
    throw Error(ErrorKind::Decode, path.string() + ": unsupported channel layout");
  }
  const auto row_bytes = static_cast<std::size_t>(width) * channels;
  if (png_get_rowbytes(png, info) != row_bytes) {
    throw Error(ErrorKind::Decode, path.string() + ": unexpected row size");
  }
  std::vector<std::uint8_t> pixels(row_bytes * height);
  std::vector<png_bytep> rows(height);
  for (png_uint_32 r = 0; r < height; ++r) rows[r] = pixels.data() + r * row_bytes;
  png_read_image(png, rows.data());
  png_read_end(png, nullptr);
  return ImageRaster(static_cast<int>(width), static_cast<int>(height), channels, std::move(pixels));
}

// Next whitespace-delimited header token, skipping '#' comments.
std::string pnm_token(std::istream& in) {
  std::string token;
  int c;
  while ((c = in.get()) != EOF) {
    if (c == '#') {
      while ((c = in.get()) != EOF && c != '\n') {}
      continue;
    }
    if (std::isspace(c)) {
      if (!token.empty()) break;
      continue;
    }
    token.push_back(static_cast<char>(c));
  }
  return token;
}

int pnm_int(std::istream& in, const std::filesystem::path& path) {
  const std::string tok = pnm_token(in);
  if (tok.empty() || !std::all_of(tok.begin(), tok.end(), [](char ch) { return std::isdigit(static_cast<unsigned char>(ch)); })) {
    throw Error(ErrorKind::Decode, path.string() + ": malformed PNM header");
  }
  return std::stoi(tok);
}

ImageRaster read_pnm(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw Error(ErrorKind::Io, "cannot open " + path.string());
  const std::string magic = pnm_token(in);
  int channels = 0;
  if (magic == "P5") channels = 1;
  else if (magic == "P6") channels = 3;
  else throw Error(ErrorKind::Decode, path.string() + ": only binary P5/P6 supported");

  const int width = pnm_int(in, path);
  const int height = pnm_int(in, path);
  const int maxval = pnm_int(in, path);
  if (maxval != 255) throw Error(ErrorKind::Decode, path.string() + ": maxval must be 255");
  if (width < 1 || height < 1) throw Error(ErrorKind::Decode, path.string() + ": bad dimensions");

  // pnm_token consumed exactly one whitespace byte after maxval.
  std::vector<std::uint8_t> pixels(static_cast<std::size_t>(width) * height * channels);
  in.read(reinterpret_cast<char*>(pixels.data()), static_cast<std::streamsize>(pixels.size()));
  if (in.gcount() != static_cast<std::streamsize>(pixels.size())) {
    throw Error(ErrorKind::Decode, path.string() + ": truncated pixel data");
  }
  return ImageRaster(width, height, channels, std::move(pixels));
}

std::string lower_extension(const std::filesystem::path& path) {
  std::string ext = path.extension().string();
  std::transform(ext.begin(), ext.end(), ext.begin(), [](unsigned char c) { return std::tolower(c); });
  return ext;
}

}  // namespace

ImageRaster read_image(const std::filesystem::path& path) {
  std::array<unsigned char, 8> sig{};
  {
    auto f = open_file(path, "rb");
    const auto got = std::fread(sig.data(), 1, sig.size(), f.get());
    if (got >= 8 && png_sig_cmp(sig.data(), 0, 8) == 0) return read_png(path);
    if (got >= 2 && sig[0] == 'P') return read_pnm(path);
  }
  throw Error(ErrorKind::Decode, path.string() + ": unrecognized image format");
}

void write_png(const std::filesystem::path& path, const ImageRaster& image) {
  auto file = open_file(path, "wb");
  png_structp png = png_create_write_struct(PNG_LIBPNG_VER_STRING, nullptr, png_error_fn, png_warning_fn);
  if (png == nullptr) throw Error(ErrorKind::Io, "png_create_write_struct failed");
  png_infop info = png_create_info_struct(png);
  struct Guard {
    png_structp* p;
    png_infop* i;
    ~Guard() { png_destroy_write_struct(p, i); }
  } guard{&png, &info};
  if (info == nullptr) throw Error(ErrorKind::Io, "png_create_info_struct failed");

  png_init_io(png, file.get());
  png_set_IHDR(png, info, image.width(), image.height(), 8,
               image.channels() == 3 ? PNG_COLOR_TYPE_RGB : PNG_COLOR_TYPE_GRAY, PNG_INTERLACE_NONE,
               PNG_COMPRESSION_TYPE_DEFAULT, PNG_FILTER_TYPE_DEFAULT);
  png_write_info(png, info);
  const auto row_bytes = static_cast<std::size_t>(image.width()) * image.channels();
  const auto* data = image.pixels().data();
  for (int r = 0; r < image.height(); ++r) {
    png_write_row(png, const_cast<png_bytep>(data + r * row_bytes));
  }
  png_write_end(png, nullptr);
}

void write_pnm(const std::filesystem::path& path, const ImageRaster& image) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw Error(ErrorKind::Io, "cannot open " + path.string());
  out << (image.channels() == 3 ? "P6" : "P5") << '\n'
      << image.width() << ' ' << image.height() << "\n255\n";
  out.write(reinterpret_cast<const char*>(image.pixels().data()),
            static_cast<std::streamsize>(image.pixels().size()));
  if (!out) throw Error(ErrorKind::Io, "write failed for " + path.string());
}

void write_image(const std::filesystem::path& path, const ImageRaster& image) {
  const std::string ext = lower_extension(path);
  if (ext == ".pgm" || ext == ".ppm" || ext == ".pnm") {
    write_pnm(path, image);
  } else {
    write_png(path, image);
  }
}

}  // namespace surfmon
