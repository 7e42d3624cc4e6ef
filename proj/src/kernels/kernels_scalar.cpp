#include <algorithm>
#include <cassert>

#include "gmslam/kernels/kernels.hpp"

namespace gmslam::kernels::scalar {

void pack_at_least(std::span<const float> src, float cut, std::span<std::uint32_t> dst) {
  const std::size_t words = (src.size() + 31) / 32;
  assert(dst.size() >= words);
  std::fill_n(dst.begin(), words, 0u);
  for (std::size_t i = 0; i < src.size(); ++i) {
    if (src[i] >= cut) dst[i / 32] |= 1u << (i % 32);
  }
}

namespace {

inline bool inside(const BitPlane& p, std::int32_t x, std::int32_t y) {
  return x >= 0 && y >= 0 && x < p.width && y < p.height;
}

inline bool bit(const BitPlane& p, std::int32_t x, std::int32_t y) {
  const std::uint32_t w = p.words[static_cast<std::size_t>(y) * static_cast<std::size_t>(p.words_per_row) +
                                  static_cast<std::size_t>(x >> 5)];
  return (w >> (x & 31)) & 1u;
}

}  // namespace

void window_search(const BitPlane& plane, const BeamCells& cells,
                   std::span<const WindowOffset> order, std::span<std::int16_t> out) {
  const std::size_t n = out.size();
  for (std::size_t i = 0; i < n; ++i) {
    const std::int32_t hx = cells.hit_x[i], hy = cells.hit_y[i];
    const std::int32_t mx = cells.miss_x[i], my = cells.miss_y[i];
    out[i] = -1;
    if (!inside(plane, hx, hy) || !inside(plane, mx, my)) continue;
    for (std::size_t j = 0; j < order.size(); ++j) {
      const std::int32_t ax = hx + order[j].kx, ay = hy + order[j].ky;
      const std::int32_t bx = mx + order[j].kx, by = my + order[j].ky;
      if (!inside(plane, ax, ay) || !inside(plane, bx, by)) continue;
      if (bit(plane, ax, ay) && !bit(plane, bx, by)) {
        out[i] = static_cast<std::int16_t>(j);
        break;
      }
    }
  }
}

void project_cells_q16(const FixedProjection& proj, const FixedBeams& beams,
                       const BeamCellsOut& out, FixedStatus& status) {
  const std::size_t n = out.hit_x.size();
  auto cell = [&](FixedQ16 base, std::int32_t range, std::int32_t trig) {
    const FixedQ16 offset = fixed_mul(FixedQ16::from_raw(range), FixedQ16::from_raw(trig), status);
    const FixedQ16 pos = fixed_add(base, offset, status);
    return fixed_mul(pos, proj.inv_resolution, status).floor_int();
  };
  for (std::size_t i = 0; i < n; ++i) {
    out.hit_x[i] = cell(proj.base_x, beams.range_raw[i], beams.cos_raw[i]);
    out.hit_y[i] = cell(proj.base_y, beams.range_raw[i], beams.sin_raw[i]);
    out.miss_x[i] = cell(proj.base_x, beams.pullback_raw[i], beams.cos_raw[i]);
    out.miss_y[i] = cell(proj.base_y, beams.pullback_raw[i], beams.sin_raw[i]);
  }
}

}  // namespace gmslam::kernels::scalar
