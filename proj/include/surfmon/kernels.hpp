#pragma once

// Per-pixel kernels used by preprocessing and the reference segmenter.
//
// Every kernel has a scalar reference implementation. Vectorized variants
// must produce bit-identical output; the active table is chosen once at
// runtime from CPU features and can be pinned with SURFMON_KERNELS=scalar.

#include <cstddef>
#include <cstdint>
#include <span>
#include <string_view>

namespace surfmon::kernels {

struct MinMax {
  std::uint8_t lo;
  std::uint8_t hi;
};

struct KernelTable {
  std::string_view name;

  // rgb holds 3*n interleaved samples, gray receives n samples.
  // gray = (299 R + 587 G + 114 B + 500) / 1000, i.e. luma rounded half-up.
  void (*rgb_to_gray)(std::span<const std::uint8_t> rgb, std::span<std::uint8_t> gray);

  // Requires a non-empty span.
  MinMax (*min_max)(std::span<const std::uint8_t> data);

  // Linear map lo -> 0, hi -> 255, rounded half-up. Requires lo < hi and
  // every sample in [lo, hi].
  void (*rescale)(std::span<const std::uint8_t> in, std::span<std::uint8_t> out,
                  std::uint8_t lo, std::uint8_t hi);

  // out[i] = 1 if in[i] < threshold (below) or in[i] > threshold (!below), else 0.
  void (*threshold)(std::span<const std::uint8_t> in, std::span<std::uint8_t> out,
                    int threshold, bool below);

  std::size_t (*count_nonzero)(std::span<const std::uint8_t> data);
};

const KernelTable& scalar_table();

// nullptr when the build or the CPU lacks AVX2.
const KernelTable* avx2_table();

const KernelTable& active();

}  // namespace surfmon::kernels
