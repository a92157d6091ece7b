#include <gtest/gtest.h>

#include <random>

#include "support.hpp"
#include "surfmon/image_io.hpp"
#include "surfmon/raster.hpp"

using namespace surfmon;
using testing_support::TempDir;

namespace {

ImageRaster gradient(int w, int h, int c) {
  ImageRaster img(w, h, c, std::uint8_t{0});
  for (int r = 0; r < h; ++r)
    for (int x = 0; x < w; ++x)
      for (int ch = 0; ch < c; ++ch) img.at(r, x, ch) = static_cast<std::uint8_t>((r * 7 + x * 3 + ch * 50) & 0xff);
  return img;
}

}  // namespace

TEST(Raster, RejectsBadShapes) {
  EXPECT_ERROR_KIND(ImageRaster(0, 4, 1, std::vector<std::uint8_t>{}), ErrorKind::InvalidArgument);
  EXPECT_ERROR_KIND(ImageRaster(2, 2, 2, std::vector<std::uint8_t>(8)), ErrorKind::InvalidArgument);
  EXPECT_ERROR_KIND(ImageRaster(2, 2, 1, std::vector<std::uint8_t>(3)), ErrorKind::InvalidArgument);
}

TEST(Windowing, PaperGridYields49) {
  WindowSpec spec{128, 128, 64, 64, false};
  EXPECT_EQ(window_origins(512, 512, spec).size(), 49u);
}

TEST(Windowing, ExactFitIsOneWindow) {
  WindowSpec spec{64, 64, 32, 32, false};
  const auto o = window_origins(64, 64, spec);
  ASSERT_EQ(o.size(), 1u);
  EXPECT_EQ(o[0], (WindowOrigin{0, 0}));
}

TEST(Windowing, DefaultGridOn128) {
  EXPECT_EQ(window_origins(128, 128, WindowSpec{}).size(), 9u);
}

TEST(Windowing, TooLargeWindowFails) {
  EXPECT_ERROR_KIND(window_origins(63, 100, WindowSpec{}), ErrorKind::WindowLargerThanImage);
}

TEST(Windowing, InvalidStepFails) {
  WindowSpec spec;
  spec.width_step = 0;
  EXPECT_ERROR_KIND(window_origins(100, 100, spec), ErrorKind::InvalidArgument);
}

TEST(Windowing, EdgeCompleteAddsFlushWindow) {
  EXPECT_EQ(axis_origins(100, 64, 32, false), (std::vector<int>{0, 32}));
  EXPECT_EQ(axis_origins(100, 64, 32, true), (std::vector<int>{0, 32, 36}));
  EXPECT_EQ(axis_origins(96, 64, 32, true), (std::vector<int>{0, 32}));
}

TEST(Windowing, ClosedFormAndContainment) {
  std::mt19937 rng(5);
  for (int it = 0; it < 500; ++it) {
    const int W = std::uniform_int_distribution<int>(1, 300)(rng);
    const int H = std::uniform_int_distribution<int>(1, 300)(rng);
    WindowSpec s{std::uniform_int_distribution<int>(1, W)(rng), std::uniform_int_distribution<int>(1, H)(rng),
                 std::uniform_int_distribution<int>(1, 80)(rng), std::uniform_int_distribution<int>(1, 80)(rng), false};
    const auto o = window_origins(W, H, s);
    const std::size_t expected =
        static_cast<std::size_t>((H - s.window_height) / s.height_step + 1) * ((W - s.window_width) / s.width_step + 1);
    ASSERT_EQ(o.size(), expected);
    for (const auto& w : o) {
      ASSERT_GE(w.row, 0);
      ASSERT_GE(w.col, 0);
      ASSERT_LE(w.row + s.window_height, H);
      ASSERT_LE(w.col + s.window_width, W);
    }
  }
}

TEST(Windowing, SplitCopiesPixels) {
  const auto img = gradient(40, 30, 3);
  WindowSpec spec{16, 10, 8, 5, false};
  const auto views = split_image(img, spec);
  ASSERT_EQ(views.size(), window_origins(40, 30, spec).size());
  for (const auto& v : views) {
    ASSERT_EQ(v.width, 16);
    ASSERT_EQ(v.height, 10);
    ASSERT_EQ(v.channels, 3);
    for (int r = 0; r < v.height; ++r)
      for (int c = 0; c < v.width; ++c)
        for (int ch = 0; ch < 3; ++ch) ASSERT_EQ(v.at(r, c, ch), img.at(v.origin_row + r, v.origin_col + c, ch));
  }
}

TEST(Preprocess, GrayPassThroughAndNormalize) {
  ImageRaster img(3, 1, 1, std::vector<std::uint8_t>{100, 150, 200});
  EXPECT_EQ(preprocess(img, false), img);
  const auto n = preprocess(img, true);
  EXPECT_EQ(std::vector<std::uint8_t>(n.pixels().begin(), n.pixels().end()), (std::vector<std::uint8_t>{0, 128, 255}));
  ImageRaster flat(2, 2, 1, std::uint8_t{77});
  EXPECT_EQ(preprocess(flat, true), flat);
}

TEST(Preprocess, ColourBecomesGray) {
  ImageRaster img(1, 1, 3, std::vector<std::uint8_t>{255, 0, 0});
  const auto g = preprocess(img, false);
  EXPECT_EQ(g.channels(), 1);
  EXPECT_EQ(g.at(0, 0), 76);
}

TEST(ImageIo, PngRoundTripGrayAndRgb) {
  TempDir dir;
  for (int c : {1, 3}) {
    const auto img = gradient(33, 17, c);
    const auto p = dir / ("img" + std::to_string(c) + ".png");
    write_image(p, img);
    EXPECT_EQ(read_image(p), img);
  }
}

TEST(ImageIo, PnmRoundTrip) {
  TempDir dir;
  const auto g = gradient(5, 4, 1);
  write_image(dir / "a.pgm", g);
  EXPECT_EQ(read_image(dir / "a.pgm"), g);
  const auto c = gradient(5, 4, 3);
  write_image(dir / "a.ppm", c);
  EXPECT_EQ(read_image(dir / "a.ppm"), c);
}

TEST(ImageIo, PnmWithComment) {
  TempDir dir;
  std::string data = "P5\n# made by hand\n2 1\n255\n";
  data.push_back('\x05');
  data.push_back('\xfa');
  testing_support::write_file(dir / "c.pgm", data);
  const auto img = read_image(dir / "c.pgm");
  EXPECT_EQ(img.at(0, 0), 5);
  EXPECT_EQ(img.at(0, 1), 250);
}

TEST(ImageIo, Failures) {
  TempDir dir;
  EXPECT_ERROR_KIND(read_image(dir / "missing.png"), ErrorKind::Io);
  testing_support::write_file(dir / "junk.png", "not an image at all");
  EXPECT_ERROR_KIND(read_image(dir / "junk.png"), ErrorKind::Decode);
  std::string truncated = "\x89PNG\r\n\x1a\n";
  truncated += std::string(10, '\0');
  testing_support::write_file(dir / "trunc.png", truncated);
  EXPECT_ERROR_KIND(read_image(dir / "trunc.png"), ErrorKind::Decode);
  testing_support::write_file(dir / "short.pgm", "P5\n4 4\n255\nab");
  EXPECT_ERROR_KIND(read_image(dir / "short.pgm"), ErrorKind::Decode);
}
