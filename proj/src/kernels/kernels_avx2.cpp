// Compiled with -mavx2; only reached after a runtime CPU check.

#include <immintrin.h>

#include <algorithm>
#include <array>
#include <cassert>
#include <limits>

#include "gmslam/kernels/kernels.hpp"

namespace gmslam::kernels::avx2 {

void pack_at_least(std::span<const float> src, float cut, std::span<std::uint32_t> dst) {
  const std::size_t n = src.size();
  const std::size_t words = (n + 31) / 32;
  assert(dst.size() >= words);
  const __m256 vcut = _mm256_set1_ps(cut);
  const float* p = src.data();

  std::size_t w = 0;
  for (; (w + 1) * 32 <= n; ++w) {
    const float* base = p + w * 32;
    const auto m0 = static_cast<std::uint32_t>(
        _mm256_movemask_ps(_mm256_cmp_ps(_mm256_loadu_ps(base), vcut, _CMP_GE_OQ)));
    const auto m1 = static_cast<std::uint32_t>(
        _mm256_movemask_ps(_mm256_cmp_ps(_mm256_loadu_ps(base + 8), vcut, _CMP_GE_OQ)));
    const auto m2 = static_cast<std::uint32_t>(
        _mm256_movemask_ps(_mm256_cmp_ps(_mm256_loadu_ps(base + 16), vcut, _CMP_GE_OQ)));
    const auto m3 = static_cast<std::uint32_t>(
        _mm256_movemask_ps(_mm256_cmp_ps(_mm256_loadu_ps(base + 24), vcut, _CMP_GE_OQ)));
    dst[w] = m0 | (m1 << 8) | (m2 << 16) | (m3 << 24);
  }
  if (w < words) {
    std::uint32_t bits = 0;
    for (std::size_t i = w * 32; i < n; ++i) {
      if (p[i] >= cut) bits |= 1u << (i % 32);
    }
    dst[w] = bits;
  }
}

namespace {

inline __m256i inside(__m256i x, __m256i y, __m256i width, __m256i height) {
  const __m256i minus_one = _mm256_set1_epi32(-1);
  const __m256i ge0 = _mm256_and_si256(_mm256_cmpgt_epi32(x, minus_one),
                                       _mm256_cmpgt_epi32(y, minus_one));
  const __m256i lt = _mm256_and_si256(_mm256_cmpgt_epi32(width, x),
                                      _mm256_cmpgt_epi32(height, y));
  return _mm256_and_si256(ge0, lt);
}

inline __m256i gather_bits(const BitPlane& plane, __m256i x, __m256i y, __m256i mask,
                           __m256i words_per_row) {
  const __m256i index =
      _mm256_add_epi32(_mm256_mullo_epi32(y, words_per_row), _mm256_srai_epi32(x, 5));
  const __m256i words = _mm256_mask_i32gather_epi32(
      _mm256_setzero_si256(), reinterpret_cast<const int*>(plane.words), index, mask, 4);
  const __m256i shift = _mm256_and_si256(x, _mm256_set1_epi32(31));
  return _mm256_and_si256(_mm256_srlv_epi32(words, shift), _mm256_set1_epi32(1));
}

}  // namespace

void window_search(const BitPlane& plane, const BeamCells& cells,
                   std::span<const WindowOffset> order, std::span<std::int16_t> out) {
  const std::size_t n = out.size();
  const __m256i width = _mm256_set1_epi32(plane.width);
  const __m256i height = _mm256_set1_epi32(plane.height);
  const __m256i wpr = _mm256_set1_epi32(plane.words_per_row);
  const __m256i one = _mm256_set1_epi32(1);

  std::size_t i = 0;
  for (; i + 8 <= n; i += 8) {
    const auto load = [i](std::span<const std::int32_t> s) {
      return _mm256_loadu_si256(reinterpret_cast<const __m256i*>(s.data() + i));
    };
    const __m256i hx = load(cells.hit_x), hy = load(cells.hit_y);
    const __m256i mx = load(cells.miss_x), my = load(cells.miss_y);

    __m256i pending = _mm256_and_si256(inside(hx, hy, width, height),
                                       inside(mx, my, width, height));
    __m256i result = _mm256_set1_epi32(-1);

    for (std::size_t j = 0; j < order.size(); ++j) {
      if (_mm256_testz_si256(pending, pending)) break;
      const __m256i kx = _mm256_set1_epi32(order[j].kx);
      const __m256i ky = _mm256_set1_epi32(order[j].ky);
      const __m256i ax = _mm256_add_epi32(hx, kx), ay = _mm256_add_epi32(hy, ky);
      const __m256i bx = _mm256_add_epi32(mx, kx), by = _mm256_add_epi32(my, ky);
      const __m256i live = _mm256_and_si256(
          pending, _mm256_and_si256(inside(ax, ay, width, height), inside(bx, by, width, height)));
      if (_mm256_testz_si256(live, live)) continue;

      const __m256i hit_bit = gather_bits(plane, ax, ay, live, wpr);
      const __m256i miss_bit = gather_bits(plane, bx, by, live, wpr);
      const __m256i accept = _mm256_and_si256(
          live, _mm256_andnot_si256(_mm256_cmpeq_epi32(miss_bit, one),
                                    _mm256_cmpeq_epi32(hit_bit, one)));
      result = _mm256_blendv_epi8(result, _mm256_set1_epi32(static_cast<int>(j)), accept);
      pending = _mm256_andnot_si256(accept, pending);
    }

    alignas(32) std::array<std::int32_t, 8> lanes;
    _mm256_store_si256(reinterpret_cast<__m256i*>(lanes.data()), result);
    for (std::size_t l = 0; l < 8; ++l) out[i + l] = static_cast<std::int16_t>(lanes[l]);
  }

  if (i < n) {
    const BeamCells tail{cells.hit_x.subspan(i), cells.hit_y.subspan(i), cells.miss_x.subspan(i),
                         cells.miss_y.subspan(i)};
    scalar::window_search(plane, tail, order, out.subspan(i));
  }
}

namespace {

// Round-to-nearest (ties away from zero) of an int64 Q32.32 product down to
// Q16.16, per 64-bit lane.
inline __m256i round_shift_q16(__m256i product) {
  const __m256i neg = _mm256_cmpgt_epi64(_mm256_setzero_si256(), product);
  const __m256i magnitude = _mm256_sub_epi64(_mm256_xor_si256(product, neg), neg);
  const __m256i shifted =
      _mm256_srli_epi64(_mm256_add_epi64(magnitude, _mm256_set1_epi64x(1 << 15)), 16);
  return _mm256_sub_epi64(_mm256_xor_si256(shifted, neg), neg);
}

inline __m256i out_of_int32(__m256i v) {
  const __m256i hi = _mm256_set1_epi64x(std::numeric_limits<std::int32_t>::max());
  const __m256i lo = _mm256_set1_epi64x(std::numeric_limits<std::int32_t>::min());
  return _mm256_or_si256(_mm256_cmpgt_epi64(v, hi), _mm256_cmpgt_epi64(lo, v));
}

// One 4-lane chain: floor((base + round(range * trig)) * inv_res) on the
// low 32 bits of each 64-bit lane. Accumulates saturation into `bad`.
inline __m256i cell_chain(__m256i range, __m256i trig, __m256i base64, __m256i inv_res,
                          __m256i& bad) {
  const __m256i offset = round_shift_q16(_mm256_mul_epi32(range, trig));
  bad = _mm256_or_si256(bad, out_of_int32(offset));
  const __m256i pos = _mm256_add_epi64(base64, offset);
  bad = _mm256_or_si256(bad, out_of_int32(pos));
  const __m256i scaled = round_shift_q16(_mm256_mul_epi32(pos, inv_res));
  bad = _mm256_or_si256(bad, out_of_int32(scaled));
  return scaled;
}

inline __m256i project8(__m256i range, __m256i trig, __m256i base64, __m256i inv_res,
                        __m256i& bad) {
  const __m256i even = cell_chain(range, trig, base64, inv_res, bad);
  const __m256i odd = cell_chain(_mm256_srli_epi64(range, 32), _mm256_srli_epi64(trig, 32),
                                 base64, inv_res, bad);
  const __m256i packed = _mm256_blend_epi32(even, _mm256_slli_epi64(odd, 32), 0b10101010);
  return _mm256_srai_epi32(packed, 16);
}

}  // namespace

bool project_cells_q16(const FixedProjection& proj, const FixedBeams& beams,
                       const BeamCellsOut& out) {
  const std::size_t n = out.hit_x.size();
  const __m256i base_x = _mm256_set1_epi64x(proj.base_x.raw());
  const __m256i base_y = _mm256_set1_epi64x(proj.base_y.raw());
  const __m256i inv_res = _mm256_set1_epi64x(proj.inv_resolution.raw());
  __m256i bad = _mm256_setzero_si256();

  std::size_t i = 0;
  for (; i + 8 <= n; i += 8) {
    const auto load = [i](std::span<const std::int32_t> s) {
      return _mm256_loadu_si256(reinterpret_cast<const __m256i*>(s.data() + i));
    };
    const auto store = [i](std::span<std::int32_t> s, __m256i v) {
      _mm256_storeu_si256(reinterpret_cast<__m256i*>(s.data() + i), v);
    };
    const __m256i c = load(beams.cos_raw), s = load(beams.sin_raw);
    const __m256i r = load(beams.range_raw), q = load(beams.pullback_raw);
    store(out.hit_x, project8(r, c, base_x, inv_res, bad));
    store(out.hit_y, project8(r, s, base_y, inv_res, bad));
    store(out.miss_x, project8(q, c, base_x, inv_res, bad));
    store(out.miss_y, project8(q, s, base_y, inv_res, bad));
  }
  if (!_mm256_testz_si256(bad, bad)) return false;

  if (i < n) {
    FixedStatus status;
    const FixedBeams tail{beams.cos_raw.subspan(i), beams.sin_raw.subspan(i),
                          beams.range_raw.subspan(i), beams.pullback_raw.subspan(i)};
    const BeamCellsOut tail_out{out.hit_x.subspan(i), out.hit_y.subspan(i), out.miss_x.subspan(i),
                                out.miss_y.subspan(i)};
    scalar::project_cells_q16(proj, tail, tail_out, status);
    if (status.overflowed) return false;
  }
  return true;
}

}  // namespace gmslam::kernels::avx2
