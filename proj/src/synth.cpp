#include "surfmon/synth.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <limits>
#include <fstream>
#include <numbers>
#include <random>

#include "json.hpp"
#include "surfmon/dataset.hpp"
#include "surfmon/error.hpp"
#include "surfmon/image_io.hpp"

namespace surfmon {
namespace {

// Engine output is fully specified by the standard; the distributions are
// not, so draws are mapped by hand to stay identical across toolchains.
class Rng {
 public:
  explicit Rng(std::uint64_t seed) : engine_(seed) {}

  std::uint64_t below(std::uint64_t n) {
    const std::uint64_t limit = std::numeric_limits<std::uint64_t>::max() - std::numeric_limits<std::uint64_t>::max() % n;
    std::uint64_t v;
    do {
      v = engine_();
    } while (v >= limit);
    return v % n;
  }
  int between(int lo, int hi) { return lo + static_cast<int>(below(static_cast<std::uint64_t>(hi - lo + 1))); }
  double unit() { return static_cast<double>(engine_() >> 11) * 0x1.0p-53; }

 private:
  std::mt19937_64 engine_;
};

std::uint64_t splitmix(std::uint64_t x) {
  x += 0x9E3779B97F4A7C15ULL;
  x = (x ^ (x >> 30)) * 0xBF58476D1CE4E5B9ULL;
  x = (x ^ (x >> 27)) * 0x94D049BB133111EBULL;
  return x ^ (x >> 31);
}

std::uint64_t image_seed(std::uint64_t seed, SynthStream stream, int index) {
  return splitmix(splitmix(seed) ^ splitmix(static_cast<std::uint64_t>(stream) << 32 | static_cast<std::uint32_t>(index)));
}

double smoothstep(double t) { return t * t * (3.0 - 2.0 * t); }

// One octave of lattice value noise in [0, 1).
std::vector<double> value_noise_octave(Rng& rng, int size, int cell) {
  const int lattice = size / cell + 2;
  std::vector<double> grid(static_cast<std::size_t>(lattice) * lattice);
  for (auto& g : grid) g = rng.unit();
  std::vector<double> out(static_cast<std::size_t>(size) * size);
  for (int r = 0; r < size; ++r) {
    const int gr = r / cell;
    const double fr = smoothstep(static_cast<double>(r % cell) / cell);
    for (int c = 0; c < size; ++c) {
      const int gc = c / cell;
      const double fc = smoothstep(static_cast<double>(c % cell) / cell);
      auto at = [&](int y, int x) { return grid[static_cast<std::size_t>(y) * lattice + x]; };
      const double top = at(gr, gc) * (1.0 - fc) + at(gr, gc + 1) * fc;
      const double bottom = at(gr + 1, gc) * (1.0 - fc) + at(gr + 1, gc + 1) * fc;
      out[static_cast<std::size_t>(r) * size + c] = top * (1.0 - fr) + bottom * fr;
    }
  }
  return out;
}

ImageRaster make_texture(Rng& rng, int size, Texture texture) {
  ImageRaster img(size, size, 1, static_cast<std::uint8_t>((kTextureLow + kTextureHigh) / 2));
  const double span = kTextureHigh - kTextureLow;
  switch (texture) {
    case Texture::Flat:
      break;
    case Texture::Stripes: {
      const int period = rng.between(8, 24);
      const double phase = rng.unit() * period;
      const bool vertical = rng.below(2) == 1;
      for (int r = 0; r < size; ++r) {
        for (int c = 0; c < size; ++c) {
          const double u = (vertical ? c : r) + phase;
          const double s = 0.5 + 0.5 * std::sin(2.0 * std::numbers::pi * u / period);
          img.at(r, c) = static_cast<std::uint8_t>(kTextureLow + std::lround(s * span));
        }
      }
      break;
    }
    case Texture::ValueNoise: {
      const auto coarse = value_noise_octave(rng, size, 16);
      const auto fine = value_noise_octave(rng, size, 4);
      for (int r = 0; r < size; ++r) {
        for (int c = 0; c < size; ++c) {
          const std::size_t i = static_cast<std::size_t>(r) * size + c;
          const double v = (2.0 * coarse[i] + fine[i]) / 3.0;
          img.at(r, c) = static_cast<std::uint8_t>(kTextureLow + std::lround(v * span));
        }
      }
      break;
    }
  }
  return img;
}

struct Blob {
  int width = 0;
  int height = 0;
  std::vector<std::pair<int, int>> cells;  // (row, col) relative to bbox origin
};

// Eden growth: repeatedly add a random 4-neighbour of the current blob.
Blob grow_blob(Rng& rng, int target, int extent) {
  std::vector<std::uint8_t> taken(static_cast<std::size_t>(extent) * extent, 0);
  std::vector<std::pair<int, int>> cells;
  std::vector<std::pair<int, int>> frontier;
  auto idx = [extent](int r, int c) { return static_cast<std::size_t>(r) * extent + c; };
  auto add = [&](int r, int c) {
    taken[idx(r, c)] = 1;
    cells.emplace_back(r, c);
    const int dr[] = {-1, 1, 0, 0};
    const int dc[] = {0, 0, -1, 1};
    for (int k = 0; k < 4; ++k) {
      const int nr = r + dr[k];
      const int nc = c + dc[k];
      if (nr >= 0 && nc >= 0 && nr < extent && nc < extent && !taken[idx(nr, nc)]) frontier.emplace_back(nr, nc);
    }
  };
  add(extent / 2, extent / 2);
  while (static_cast<int>(cells.size()) < target && !frontier.empty()) {
    const auto pick = static_cast<std::size_t>(rng.below(frontier.size()));
    const auto [r, c] = frontier[pick];
    frontier[pick] = frontier.back();
    frontier.pop_back();
    if (!taken[idx(r, c)]) add(r, c);
  }
  int min_r = extent, min_c = extent, max_r = -1, max_c = -1;
  for (const auto& [r, c] : cells) {
    min_r = std::min(min_r, r);
    min_c = std::min(min_c, c);
    max_r = std::max(max_r, r);
    max_c = std::max(max_c, c);
  }
  Blob blob;
  blob.width = max_c - min_c + 1;
  blob.height = max_r - min_r + 1;
  for (const auto& [r, c] : cells) blob.cells.emplace_back(r - min_r, c - min_c);
  return blob;
}

int windows_containing(const std::vector<WindowOrigin>& origins, const WindowSpec& w, int row, int col, int h,
                       int wd) {
  int n = 0;
  for (const auto& o : origins) {
    if (o.row <= row && row + h <= o.row + w.window_height && o.col <= col && col + wd <= o.col + w.window_width) ++n;
  }
  return n;
}

}  // namespace

void SynthSpec::validate() const {
  if (image_size < 8) throw Error(ErrorKind::InvalidArgument, "image_size must be >= 8");
  if (count_per_class < 0 || calibration_count < 0) throw Error(ErrorKind::InvalidArgument, "counts must be >= 0");
  if (defect.min_size < 1 || defect.max_size < defect.min_size) {
    throw Error(ErrorKind::InvalidArgument, "defect sizes need 1 <= min_size <= max_size");
  }
  if (defect.intensity_delta < 1 || defect.intensity_delta > 255) {
    throw Error(ErrorKind::InvalidArgument, "intensity_delta must lie in [1, 255]");
  }
}

SynthImage generate_image(const SynthSpec& spec, const WindowSpec& window, const AreaThresholds& thresholds,
                          SynthStream stream, int index) {
  spec.validate();
  Rng rng(image_seed(spec.seed, stream, index));
  SynthImage out;
  out.image = make_texture(rng, spec.image_size, spec.texture);
  out.label = stream == SynthStream::Faulty ? 1 : 0;
  if (stream != SynthStream::Faulty) return out;

  const auto origins = window_origins(spec.image_size, spec.image_size, window);
  const int extent = std::min(window.window_width, window.window_height);
  for (int attempt = 0; attempt < 200; ++attempt) {
    const int target = rng.between(spec.defect.min_size, spec.defect.max_size);
    Blob blob = grow_blob(rng, target, extent);
    const double area = static_cast<double>(blob.width) * blob.height;
    if (!thresholds.admits(area)) continue;

    std::vector<std::pair<int, int>> placements;
    for (int r = 0; r + blob.height <= spec.image_size; ++r) {
      for (int c = 0; c + blob.width <= spec.image_size; ++c) {
        if (windows_containing(origins, window, r, c, blob.height, blob.width) >= 2) placements.emplace_back(r, c);
      }
    }
    if (placements.empty()) continue;
    const auto [row, col] = placements[static_cast<std::size_t>(rng.below(placements.size()))];
    for (const auto& [dr, dc] : blob.cells) {
      auto& px = out.image.at(row + dr, col + dc);
      px = static_cast<std::uint8_t>(std::max(0, px - spec.defect.intensity_delta));
    }
    out.blob = BlobInfo{row, col, blob.width, blob.height, static_cast<std::int64_t>(blob.cells.size()),
                        windows_containing(origins, window, row, col, blob.height, blob.width)};
    return out;
  }
  throw Error(ErrorKind::InvalidArgument,
              "cannot place a defect blob with bbox area inside the thresholds and covered by two windows");
}

std::optional<Texture> parse_texture(const std::string& name) {
  if (name == "flat") return Texture::Flat;
  if (name == "stripes") return Texture::Stripes;
  if (name == "value_noise") return Texture::ValueNoise;
  return std::nullopt;
}

const char* to_string(Texture texture) {
  switch (texture) {
    case Texture::Flat: return "flat";
    case Texture::Stripes: return "stripes";
    case Texture::ValueNoise: return "value_noise";
  }
  return "unknown";
}

SynthSummary write_synth_dataset(const SynthSpec& spec, const WindowSpec& window, const AreaThresholds& thresholds,
                                 const std::filesystem::path& out_dir) {
  spec.validate();
  namespace fs = std::filesystem;
  std::error_code ec;
  fs::create_directories(out_dir / "images", ec);
  if (ec) throw Error(ErrorKind::Io, "cannot create " + (out_dir / "images").string() + ": " + ec.message());

  auto name = [](const char* prefix, int i) {
    char buf[64];
    std::snprintf(buf, sizeof buf, "%s_%03d.png", prefix, i);
    return std::string(buf);
  };

  SynthSummary summary;
  nlohmann::json truth = nlohmann::json::array();
  std::vector<ManifestEntry> entries;
  for (SynthStream stream : {SynthStream::FaultFree, SynthStream::Faulty}) {
    for (int i = 0; i < spec.count_per_class; ++i) {
      const SynthImage img = generate_image(spec, window, thresholds, stream, i);
      const fs::path rel = fs::path("images") / name(stream == SynthStream::Faulty ? "defect" : "ok", i);
      write_png(out_dir / rel, img.image);
      entries.push_back({rel, img.label});
      nlohmann::json t{{"path", rel.generic_string()}, {"label", img.label}};
      if (img.blob) {
        t["blob"] = {{"bbox", {img.blob->col, img.blob->row, img.blob->width, img.blob->height}},
                     {"pixel_count", img.blob->pixel_count},
                     {"covering_windows", img.blob->covering_windows}};
      }
      truth.push_back(std::move(t));
      ++summary.images;
    }
  }
  summary.manifest = out_dir / "manifest.csv";
  write_manifest(summary.manifest, entries);

  if (spec.calibration_count > 0) {
    fs::create_directories(out_dir / "calibration", ec);
    if (ec) throw Error(ErrorKind::Io, "cannot create calibration directory: " + ec.message());
    std::vector<ManifestEntry> cal;
    for (int i = 0; i < spec.calibration_count; ++i) {
      const SynthImage img = generate_image(spec, window, thresholds, SynthStream::Calibration, i);
      const fs::path rel = fs::path("calibration") / name("cal", i);
      write_png(out_dir / rel, img.image);
      cal.push_back({rel, 0});
      ++summary.images;
    }
    summary.calibration_manifest = out_dir / "calibration.csv";
    write_manifest(*summary.calibration_manifest, cal);
  }

  std::ofstream t(out_dir / "truth.json");
  if (!t) throw Error(ErrorKind::Io, "cannot write truth.json");
  t << truth.dump(2) << '\n';
  return summary;
}

}  // namespace surfmon
