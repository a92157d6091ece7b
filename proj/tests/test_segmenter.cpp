#include <gtest/gtest.h>

#include <random>

#include "oracles.hpp"
#include "support.hpp"
#include "surfmon/segmenter.hpp"

using namespace surfmon;

namespace {

WindowView make_window(int w, int h, std::vector<std::uint8_t> px) {
  WindowView v;
  v.width = w;
  v.height = h;
  v.channels = 1;
  v.pixels = std::move(px);
  return v;
}

// Binary window: foreground pixels are 0, background 255.
WindowView random_binary(int w, int h, double density, std::mt19937& rng, std::vector<std::uint8_t>& fg) {
  std::bernoulli_distribution d(density);
  fg.assign(static_cast<std::size_t>(w) * h, 0);
  std::vector<std::uint8_t> px(fg.size());
  for (std::size_t i = 0; i < fg.size(); ++i) {
    fg[i] = d(rng) ? 1 : 0;
    px[i] = fg[i] ? 0 : 255;
  }
  return make_window(w, h, std::move(px));
}

std::vector<std::uint8_t> decode_rle(const std::vector<std::uint32_t>& runs, std::size_t total) {
  std::vector<std::uint8_t> out(total, 0);
  std::size_t pos = 0;
  for (std::size_t i = 0; i < runs.size(); ++i) {
    if (i % 2 == 1) std::fill_n(out.begin() + static_cast<std::ptrdiff_t>(pos), runs[i], std::uint8_t{1});
    pos += runs[i];
  }
  return out;
}

}  // namespace

TEST(ReferenceSegmenter, MatchesFloodFillOracle) {
  std::mt19937 rng(21);
  for (int it = 0; it < 300; ++it) {
    const int w = std::uniform_int_distribution<int>(1, 40)(rng);
    const int h = std::uniform_int_distribution<int>(1, 40)(rng);
    const double density = std::uniform_real_distribution<double>(0.05, 0.7)(rng);
    std::vector<std::uint8_t> fg;
    const auto win = random_binary(w, h, density, rng, fg);
    for (int conn : {4, 8}) {
      const auto masks = reference_segment(win, IntensityThreshold::fixed(128), Polarity::DarkForeground, conn);
      const auto expected = oracle::flood_fill(fg, w, h, conn);
      ASSERT_EQ(masks.size(), expected.size());
      std::int64_t total = 0;
      for (std::size_t i = 0; i < masks.size(); ++i) {
        EXPECT_EQ(masks[i].bbox_x, expected[i].min_x);
        EXPECT_EQ(masks[i].bbox_y, expected[i].min_y);
        EXPECT_EQ(masks[i].bbox_w, expected[i].max_x - expected[i].min_x + 1);
        EXPECT_EQ(masks[i].bbox_h, expected[i].max_y - expected[i].min_y + 1);
        EXPECT_EQ(masks[i].pixel_count, expected[i].count);
        total += masks[i].pixel_count;
      }
      EXPECT_EQ(total, std::count(fg.begin(), fg.end(), 1));
    }
  }
}

TEST(ReferenceSegmenter, DiagonalDependsOnConnectivity) {
  // 1 0
  // 0 1
  const auto win = make_window(2, 2, {0, 255, 255, 0});
  EXPECT_EQ(reference_segment(win, IntensityThreshold::fixed(128), Polarity::DarkForeground, 4).size(), 2u);
  const auto eight = reference_segment(win, IntensityThreshold::fixed(128), Polarity::DarkForeground, 8);
  ASSERT_EQ(eight.size(), 1u);
  EXPECT_EQ(eight[0].bbox_area(), 4);
  EXPECT_EQ(eight[0].pixel_count, 2);
}

TEST(ReferenceSegmenter, RleReconstructsEachComponent) {
  std::mt19937 rng(8);
  for (int it = 0; it < 100; ++it) {
    const int w = std::uniform_int_distribution<int>(1, 30)(rng);
    const int h = std::uniform_int_distribution<int>(1, 30)(rng);
    std::vector<std::uint8_t> fg;
    const auto win = random_binary(w, h, 0.4, rng, fg);
    const auto masks = reference_segment(win, IntensityThreshold::fixed(128), Polarity::DarkForeground, 8, true);
    std::vector<std::uint8_t> union_mask(fg.size(), 0);
    for (const auto& m : masks) {
      ASSERT_TRUE(m.rle.has_value());
      ASSERT_FALSE(mask_violation(m, w, h).has_value()) << *mask_violation(m, w, h);
      const auto bits = decode_rle(*m.rle, fg.size());
      for (std::size_t i = 0; i < bits.size(); ++i) {
        if (!bits[i]) continue;
        ASSERT_EQ(union_mask[i], 0) << "pixel claimed twice";
        union_mask[i] = 1;
      }
    }
    EXPECT_EQ(union_mask, fg);
  }
}

TEST(ReferenceSegmenter, PolarityAndStrictThreshold) {
  const auto win = make_window(3, 1, {100, 128, 200});
  const auto dark = reference_segment(win, IntensityThreshold::fixed(128), Polarity::DarkForeground, 8);
  ASSERT_EQ(dark.size(), 1u);
  EXPECT_EQ(dark[0].bbox_x, 0);
  const auto light = reference_segment(win, IntensityThreshold::fixed(128), Polarity::LightForeground, 8);
  ASSERT_EQ(light.size(), 1u);
  EXPECT_EQ(light[0].bbox_x, 2);
}

TEST(ReferenceSegmenter, UniformWindowHasNoMasks) {
  const auto win = make_window(8, 8, std::vector<std::uint8_t>(64, 200));
  EXPECT_TRUE(reference_segment(win, IntensityThreshold::fixed(128), Polarity::DarkForeground, 8).empty());
  EXPECT_TRUE(reference_segment(win, IntensityThreshold::automatic(), Polarity::DarkForeground, 8).empty());
}

TEST(Otsu, BimodalSplitsBetweenModes) {
  std::vector<std::uint8_t> px(100, 40);
  std::fill(px.begin() + 50, px.end(), 210);
  const auto t = otsu_threshold(px);
  ASSERT_TRUE(t.has_value());
  EXPECT_GE(*t, 40);
  EXPECT_LT(*t, 210);
  const auto win = make_window(10, 10, px);
  const auto masks = reference_segment(win, IntensityThreshold::automatic(), Polarity::DarkForeground, 8);
  ASSERT_EQ(masks.size(), 1u);
  EXPECT_EQ(masks[0].pixel_count, 50);
}

TEST(Otsu, TwoValuesTieGoesToLowestCut) {
  std::vector<std::uint8_t> px = {0, 0, 255, 255};
  EXPECT_EQ(otsu_threshold(px), 0);
  std::vector<std::uint8_t> single(5, 9);
  EXPECT_FALSE(otsu_threshold(single).has_value());
}

TEST(Otsu, MatchesBruteForceBetweenClassVariance) {
  std::mt19937 rng(2);
  for (int it = 0; it < 200; ++it) {
    std::vector<std::uint8_t> px(std::uniform_int_distribution<int>(2, 300)(rng));
    const int lo = std::uniform_int_distribution<int>(0, 200)(rng);
    for (auto& p : px) p = static_cast<std::uint8_t>(std::uniform_int_distribution<int>(lo, lo + 55)(rng));
    double best = -1.0;
    int best_k = -1;
    for (int k = 0; k < 255; ++k) {
      double n0 = 0, s0 = 0, n1 = 0, s1 = 0;
      for (auto p : px) {
        if (p <= k) { n0 += 1; s0 += p; } else { n1 += 1; s1 += p; }
      }
      if (n0 == 0 || n1 == 0) continue;
      const double d = s0 / n0 - s1 / n1;
      const double var = n0 * n1 * d * d;
      if (var > best * (1 + 1e-12)) {
        best = var;
        best_k = k;
      }
    }
    const auto t = otsu_threshold(px);
    if (best_k < 0) {
      EXPECT_FALSE(t.has_value());
    } else {
      ASSERT_TRUE(t.has_value());
      EXPECT_EQ(*t, best_k);
    }
  }
}

TEST(MaskRecord, ViolationsAreReported) {
  EXPECT_FALSE(mask_violation(MaskRecord{0, 0, 2, 2, 4, std::nullopt}, 4, 4).has_value());
  EXPECT_TRUE(mask_violation(MaskRecord{-1, 0, 2, 2, 4, std::nullopt}, 4, 4).has_value());
  EXPECT_TRUE(mask_violation(MaskRecord{3, 0, 2, 2, 4, std::nullopt}, 4, 4).has_value());
  EXPECT_TRUE(mask_violation(MaskRecord{0, 0, 0, 2, 1, std::nullopt}, 4, 4).has_value());
  EXPECT_TRUE(mask_violation(MaskRecord{0, 0, 2, 2, 5, std::nullopt}, 4, 4).has_value());
  EXPECT_TRUE(mask_violation(MaskRecord{0, 0, 2, 2, 0, std::nullopt}, 4, 4).has_value());
  EXPECT_TRUE(mask_violation(MaskRecord{0, 0, 1, 1, 1, std::vector<std::uint32_t>{1, 1}}, 4, 4).has_value());
  EXPECT_FALSE(mask_violation(MaskRecord{0, 0, 1, 1, 1, std::vector<std::uint32_t>{0, 1}}, 4, 4).has_value());
}

TEST(MaskRecord, JsonRoundTripAndRejects) {
  MaskRecord m{1, 2, 3, 4, 5, std::vector<std::uint32_t>{6, 5}};
  EXPECT_EQ(mask_from_json(to_json(m)), m);
  EXPECT_ERROR_KIND(mask_from_json(nlohmann::json{{"bbox", {1, 2, 3}}, {"pixel_count", 1}}),
                    ErrorKind::MalformedBackendReply);
  EXPECT_ERROR_KIND(mask_from_json(nlohmann::json{{"bbox", {1, 2, 3, 4}}}), ErrorKind::MalformedBackendReply);
  EXPECT_ERROR_KIND(mask_from_json(nlohmann::json{{"bbox", {1, 2, 3, 4}}, {"pixel_count", 1}, {"rle", {-1}}}),
                    ErrorKind::MalformedBackendReply);
}

TEST(ScriptedSegmenter, ReturnsFixtureVerbatim) {
  auto seg = ScriptedSegmenter::from_json(nlohmann::json{
      {"img:0:0", {{{"bbox", {0, 0, 20, 20}}, {"pixel_count", 300}}}}, {"img:0:32", nlohmann::json::array()}});
  const auto win = make_window(64, 64, std::vector<std::uint8_t>(64 * 64, 0));
  const auto a = seg.segment(win, {"img", 0, 0});
  ASSERT_EQ(a.size(), 1u);
  EXPECT_EQ(a[0].bbox_area(), 400);
  EXPECT_TRUE(seg.segment(win, {"img", 0, 32}).empty());
  EXPECT_ERROR_KIND(seg.segment(win, {"img", 32, 0}), ErrorKind::FixtureMiss);
}

TEST(ScriptedSegmenter, InvalidFixtureMask) {
  auto seg = ScriptedSegmenter::from_json(nlohmann::json{{"x:0:0", {{{"bbox", {60, 0, 20, 20}}, {"pixel_count", 1}}}}});
  const auto win = make_window(64, 64, std::vector<std::uint8_t>(64 * 64, 0));
  EXPECT_ERROR_KIND(seg.segment(win, {"x", 0, 0}), ErrorKind::Config);
  EXPECT_ERROR_KIND(ScriptedSegmenter::from_json(nlohmann::json::array()), ErrorKind::Config);
}

TEST(SegmenterConfig, Validation) {
  SegmenterConfig c;
  c.connectivity = 6;
  EXPECT_ERROR_KIND(c.validate(), ErrorKind::Config);
  c = {};
  c.backend = BackendKind::Scripted;
  EXPECT_ERROR_KIND(c.validate(), ErrorKind::Config);
  c = {};
  c.threshold = IntensityThreshold::fixed(300);
  EXPECT_ERROR_KIND(c.validate(), ErrorKind::Config);
}

TEST(WindowIdentity, KeyFormat) { EXPECT_EQ((WindowIdentity{"part", 32, 64}).key(), "part:32:64"); }
