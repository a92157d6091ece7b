// AVX2 variants of the per-pixel kernels. This translation unit is compiled
// with -mavx2 and must only be entered after a runtime CPU check.

#include <immintrin.h>

#include <algorithm>
#include <bit>
#include <cstring>

#include "surfmon/kernels.hpp"

namespace surfmon::kernels {
namespace {

// Low byte of each of the eight 32-bit lanes, in order.
inline void store_low_bytes(__m256i v, std::uint8_t* dst) {
  const __m128i lo = _mm256_castsi256_si128(v);
  const __m128i hi = _mm256_extracti128_si256(v, 1);
  const __m128i words = _mm_packus_epi32(lo, hi);
  const __m128i bytes = _mm_packus_epi16(words, words);
  _mm_storel_epi64(reinterpret_cast<__m128i*>(dst), bytes);
}

void rgb_to_gray_avx2(std::span<const std::uint8_t> rgb, std::span<std::uint8_t> gray) {
  const std::size_t n = gray.size();
  const auto* base = reinterpret_cast<const int*>(rgb.data());
  const __m256i offsets = _mm256_setr_epi32(0, 3, 6, 9, 12, 15, 18, 21);
  const __m256i byte_mask = _mm256_set1_epi32(0xFF);
  const __m256i wr = _mm256_set1_epi32(299);
  const __m256i wg = _mm256_set1_epi32(587);
  const __m256i wb = _mm256_set1_epi32(114);
  const __m256i half = _mm256_set1_epi32(500);
  const __m256 thousand = _mm256_set1_ps(1000.0f);

  std::size_t i = 0;
  // Each gather reads 4 bytes per pixel, one past the pixel's last sample,
  // so keep a full pixel of slack before the end of the buffer.
  for (; i + 9 <= n; i += 8) {
    const auto* p = reinterpret_cast<const int*>(reinterpret_cast<const std::uint8_t*>(base) + 3 * i);
    const __m256i v = _mm256_i32gather_epi32(p, offsets, 1);
    const __m256i r = _mm256_and_si256(v, byte_mask);
    const __m256i g = _mm256_and_si256(_mm256_srli_epi32(v, 8), byte_mask);
    const __m256i b = _mm256_and_si256(_mm256_srli_epi32(v, 16), byte_mask);
    __m256i sum = _mm256_add_epi32(_mm256_mullo_epi32(r, wr), _mm256_mullo_epi32(g, wg));
    sum = _mm256_add_epi32(sum, _mm256_mullo_epi32(b, wb));
    sum = _mm256_add_epi32(sum, half);
    // sum <= 255500 is exact in float; correctly rounded division keeps the
    // floor exact because a nonzero remainder is at least 1/1000 away.
    const __m256 q = _mm256_floor_ps(_mm256_div_ps(_mm256_cvtepi32_ps(sum), thousand));
    store_low_bytes(_mm256_cvttps_epi32(q), gray.data() + i);
  }
  for (; i < n; ++i) {
    const std::uint32_t r = rgb[3 * i];
    const std::uint32_t g = rgb[3 * i + 1];
    const std::uint32_t b = rgb[3 * i + 2];
    gray[i] = static_cast<std::uint8_t>((299 * r + 587 * g + 114 * b + 500) / 1000);
  }
}

MinMax min_max_avx2(std::span<const std::uint8_t> data) {
  const std::size_t n = data.size();
  MinMax mm{data[0], data[0]};
  std::size_t i = 0;
  if (n >= 32) {
    __m256i vmin = _mm256_loadu_si256(reinterpret_cast<const __m256i*>(data.data()));
    __m256i vmax = vmin;
    for (i = 32; i + 32 <= n; i += 32) {
      const __m256i v = _mm256_loadu_si256(reinterpret_cast<const __m256i*>(data.data() + i));
      vmin = _mm256_min_epu8(vmin, v);
      vmax = _mm256_max_epu8(vmax, v);
    }
    alignas(32) std::uint8_t lo[32];
    alignas(32) std::uint8_t hi[32];
    _mm256_store_si256(reinterpret_cast<__m256i*>(lo), vmin);
    _mm256_store_si256(reinterpret_cast<__m256i*>(hi), vmax);
    mm.lo = *std::min_element(lo, lo + 32);
    mm.hi = *std::max_element(hi, hi + 32);
  }
  for (; i < n; ++i) {
    mm.lo = std::min(mm.lo, data[i]);
    mm.hi = std::max(mm.hi, data[i]);
  }
  return mm;
}

void rescale_avx2(std::span<const std::uint8_t> in, std::span<std::uint8_t> out,
                  std::uint8_t lo, std::uint8_t hi) {
  const std::size_t n = in.size();
  const std::uint32_t range = hi - lo;
  const __m256i vlo = _mm256_set1_epi32(lo);
  const __m256 scale = _mm256_set1_ps(255.0f);
  const __m256 vrange = _mm256_set1_ps(static_cast<float>(range));
  const __m256 half = _mm256_set1_ps(0.5f);

  std::size_t i = 0;
  for (; i + 8 <= n; i += 8) {
    const __m128i bytes = _mm_loadl_epi64(reinterpret_cast<const __m128i*>(in.data() + i));
    const __m256i d = _mm256_sub_epi32(_mm256_cvtepu8_epi32(bytes), vlo);
    // d*255 is exact; the quotient is exact at half-integers and otherwise
    // at least 1/(2*range) away from one, far above float rounding error.
    const __m256 q = _mm256_div_ps(_mm256_mul_ps(_mm256_cvtepi32_ps(d), scale), vrange);
    const __m256 r = _mm256_floor_ps(_mm256_add_ps(q, half));
    store_low_bytes(_mm256_cvttps_epi32(r), out.data() + i);
  }
  for (; i < n; ++i) {
    const std::uint32_t d = in[i] - lo;
    out[i] = static_cast<std::uint8_t>((2 * d * 255 + range) / (2 * range));
  }
}

void threshold_avx2(std::span<const std::uint8_t> in, std::span<std::uint8_t> out,
                    int threshold, bool below) {
  const std::size_t n = in.size();
  // Out-of-range thresholds make the predicate constant.
  if (below && threshold <= 0) { std::memset(out.data(), 0, n); return; }
  if (below && threshold > 255) { std::memset(out.data(), 1, n); return; }
  if (!below && threshold >= 255) { std::memset(out.data(), 0, n); return; }
  if (!below && threshold < 0) { std::memset(out.data(), 1, n); return; }

  // v < t  <=>  min(v, t-1) == v ;  v > t  <=>  max(v, t+1) == v
  const __m256i bound = _mm256_set1_epi8(static_cast<char>(below ? threshold - 1 : threshold + 1));
  const __m256i one = _mm256_set1_epi8(1);
  std::size_t i = 0;
  for (; i + 32 <= n; i += 32) {
    const __m256i v = _mm256_loadu_si256(reinterpret_cast<const __m256i*>(in.data() + i));
    const __m256i clamped = below ? _mm256_min_epu8(v, bound) : _mm256_max_epu8(v, bound);
    const __m256i hit = _mm256_and_si256(_mm256_cmpeq_epi8(clamped, v), one);
    _mm256_storeu_si256(reinterpret_cast<__m256i*>(out.data() + i), hit);
  }
  for (; i < n; ++i) {
    const int v = in[i];
    out[i] = below ? (v < threshold) : (v > threshold);
  }
}

std::size_t count_nonzero_avx2(std::span<const std::uint8_t> data) {
  const std::size_t n = data.size();
  const __m256i zero = _mm256_setzero_si256();
  std::size_t count = 0;
  std::size_t i = 0;
  for (; i + 32 <= n; i += 32) {
    const __m256i v = _mm256_loadu_si256(reinterpret_cast<const __m256i*>(data.data() + i));
    const auto zeros = static_cast<std::uint32_t>(_mm256_movemask_epi8(_mm256_cmpeq_epi8(v, zero)));
    count += 32 - static_cast<std::size_t>(std::popcount(zeros));
  }
  for (; i < n; ++i) count += data[i] != 0;
  return count;
}

constexpr KernelTable kAvx2{
    "avx2",          rgb_to_gray_avx2, min_max_avx2, rescale_avx2,
    threshold_avx2,  count_nonzero_avx2,
};

}  // namespace

const KernelTable* avx2_table_unchecked() { return &kAvx2; }

}  // namespace surfmon::kernels
