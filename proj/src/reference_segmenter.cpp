#include <algorithm>
#include <array>
#include <numeric>

#include "surfmon/error.hpp"
#include "surfmon/kernels.hpp"
#include "surfmon/segmenter.hpp"

namespace surfmon {
namespace {

// Union-find over provisional labels; parent[i] <= i always holds so the
// root of a set is its smallest (earliest in raster order) label.
class LabelForest {
 public:
  std::int32_t make() {
    parent_.push_back(static_cast<std::int32_t>(parent_.size()));
    return parent_.back();
  }
  std::int32_t find(std::int32_t x) {
    while (parent_[x] != x) {
      parent_[x] = parent_[parent_[x]];
      x = parent_[x];
    }
    return x;
  }
  void unite(std::int32_t a, std::int32_t b) {
    a = find(a);
    b = find(b);
    if (a == b) return;
    if (a < b) parent_[b] = a;
    else parent_[a] = b;
  }
  std::size_t size() const { return parent_.size(); }

 private:
  std::vector<std::int32_t> parent_;
};

struct Component {
  int min_x, min_y, max_x, max_y;
  std::int64_t count = 0;
  std::vector<std::uint32_t> rle;
  std::uint64_t rle_end = 0;  // one past the last foreground index
};

}  // namespace

std::optional<int> otsu_threshold(std::span<const std::uint8_t> gray) {
  std::array<std::uint64_t, 256> hist{};
  for (std::uint8_t v : gray) ++hist[v];
  const double total = static_cast<double>(gray.size());
  double sum_all = 0.0;
  for (int v = 0; v < 256; ++v) sum_all += static_cast<double>(v) * static_cast<double>(hist[v]);

  std::optional<int> best;
  double best_var = -1.0;
  double w0 = 0.0;
  double sum0 = 0.0;
  for (int k = 0; k < 255; ++k) {
    w0 += static_cast<double>(hist[k]);
    sum0 += static_cast<double>(k) * static_cast<double>(hist[k]);
    const double w1 = total - w0;
    if (w0 == 0.0 || w1 == 0.0) continue;
    const double diff = sum0 / w0 - (sum_all - sum0) / w1;
    const double between = w0 * w1 * diff * diff;
    if (between > best_var) {
      best_var = between;
      best = k;
    }
  }
  return best;
}

std::vector<MaskRecord> reference_segment(const WindowView& window, IntensityThreshold threshold,
                                          Polarity polarity, int connectivity, bool emit_rle) {
  if (window.channels != 1) {
    throw Error(ErrorKind::InvalidArgument, "reference segmenter needs a grayscale window");
  }
  if (connectivity != 4 && connectivity != 8) {
    throw Error(ErrorKind::InvalidArgument, "connectivity must be 4 or 8");
  }
  const int w = window.width;
  const int h = window.height;
  const auto n = static_cast<std::size_t>(w) * h;
  if (window.pixels.size() != n || n == 0) {
    throw Error(ErrorKind::InvalidArgument, "window pixel buffer does not match its size");
  }

  const bool dark = polarity == Polarity::DarkForeground;
  int cut = threshold.value;
  if (threshold.otsu) {
    const auto k = otsu_threshold(window.pixels);
    if (!k) return {};
    cut = dark ? *k + 1 : *k;
  }

  std::vector<std::uint8_t> fg(n);
  kernels::active().threshold(window.pixels, fg, cut, dark);

  // First pass: provisional labels with equivalences.
  std::vector<std::int32_t> label(n, -1);
  LabelForest forest;
  for (int r = 0; r < h; ++r) {
    for (int c = 0; c < w; ++c) {
      const std::size_t i = static_cast<std::size_t>(r) * w + c;
      if (!fg[i]) continue;
      std::int32_t assigned = -1;
      auto visit = [&](int rr, int cc) {
        if (rr < 0 || cc < 0 || cc >= w) return;
        const std::int32_t l = label[static_cast<std::size_t>(rr) * w + cc];
        if (l < 0) return;
        if (assigned < 0) assigned = l;
        else forest.unite(assigned, l);
      };
      visit(r, c - 1);
      visit(r - 1, c);
      if (connectivity == 8) {
        visit(r - 1, c - 1);
        visit(r - 1, c + 1);
      }
      label[i] = assigned >= 0 ? assigned : forest.make();
    }
  }

  // Second pass: resolve to roots and accumulate per component.
  std::vector<std::int32_t> slot(forest.size(), -1);
  std::vector<Component> comps;
  for (int r = 0; r < h; ++r) {
    for (int c = 0; c < w; ++c) {
      const std::size_t i = static_cast<std::size_t>(r) * w + c;
      if (label[i] < 0) continue;
      const std::int32_t root = forest.find(label[i]);
      if (slot[root] < 0) {
        slot[root] = static_cast<std::int32_t>(comps.size());
        comps.push_back(Component{c, r, c, r, 0, {}, 0});
      }
      Component& comp = comps[slot[root]];
      comp.min_x = std::min(comp.min_x, c);
      comp.max_x = std::max(comp.max_x, c);
      comp.min_y = std::min(comp.min_y, r);
      comp.max_y = std::max(comp.max_y, r);
      ++comp.count;
      if (emit_rle) {
        if (!comp.rle.empty() && comp.rle_end == i) {
          ++comp.rle.back();
        } else {
          comp.rle.push_back(static_cast<std::uint32_t>(i - comp.rle_end));
          comp.rle.push_back(1);
        }
        comp.rle_end = i + 1;
      }
    }
  }

  std::vector<MaskRecord> masks;
  masks.reserve(comps.size());
  for (auto& comp : comps) {
    MaskRecord m;
    m.bbox_x = comp.min_x;
    m.bbox_y = comp.min_y;
    m.bbox_w = comp.max_x - comp.min_x + 1;
    m.bbox_h = comp.max_y - comp.min_y + 1;
    m.pixel_count = comp.count;
    if (emit_rle) m.rle = std::move(comp.rle);
    masks.push_back(std::move(m));
  }
  canonicalize(masks);
  return masks;
}

ReferenceSegmenter::ReferenceSegmenter(const SegmenterConfig& config)
    : threshold_(config.threshold),
      polarity_(config.polarity),
      connectivity_(config.connectivity),
      emit_rle_(config.emit_rle) {}

std::vector<MaskRecord> ReferenceSegmenter::segment(const WindowView& window, const WindowIdentity&) {
  return reference_segment(window, threshold_, polarity_, connectivity_, emit_rle_);
}

}  // namespace surfmon
