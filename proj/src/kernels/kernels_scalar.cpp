#include <algorithm>

#include "surfmon/kernels.hpp"

namespace surfmon::kernels {
namespace {

void rgb_to_gray_scalar(std::span<const std::uint8_t> rgb, std::span<std::uint8_t> gray) {
  for (std::size_t i = 0; i < gray.size(); ++i) {
    const std::uint32_t r = rgb[3 * i];
    const std::uint32_t g = rgb[3 * i + 1];
    const std::uint32_t b = rgb[3 * i + 2];
    gray[i] = static_cast<std::uint8_t>((299 * r + 587 * g + 114 * b + 500) / 1000);
  }
}

MinMax min_max_scalar(std::span<const std::uint8_t> data) {
  MinMax mm{data[0], data[0]};
  for (std::uint8_t v : data) {
    mm.lo = std::min(mm.lo, v);
    mm.hi = std::max(mm.hi, v);
  }
  return mm;
}

void rescale_scalar(std::span<const std::uint8_t> in, std::span<std::uint8_t> out,
                    std::uint8_t lo, std::uint8_t hi) {
  const std::uint32_t range = hi - lo;
  for (std::size_t i = 0; i < in.size(); ++i) {
    const std::uint32_t d = in[i] - lo;
    out[i] = static_cast<std::uint8_t>((2 * d * 255 + range) / (2 * range));
  }
}

void threshold_scalar(std::span<const std::uint8_t> in, std::span<std::uint8_t> out,
                      int threshold, bool below) {
  for (std::size_t i = 0; i < in.size(); ++i) {
    const int v = in[i];
    out[i] = below ? (v < threshold) : (v > threshold);
  }
}

std::size_t count_nonzero_scalar(std::span<const std::uint8_t> data) {
  return static_cast<std::size_t>(std::count_if(data.begin(), data.end(),
                                                [](std::uint8_t v) { return v != 0; }));
}

constexpr KernelTable kScalar{
    "scalar",          rgb_to_gray_scalar, min_max_scalar, rescale_scalar,
    threshold_scalar,  count_nonzero_scalar,
};

}  // namespace

const KernelTable& scalar_table() { return kScalar; }

}  // namespace surfmon::kernels
