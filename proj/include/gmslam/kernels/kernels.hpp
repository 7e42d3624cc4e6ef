#pragma once

// Data-parallel inner loops of the accelerated backend.
//
// Every kernel has a scalar reference in `kernels::scalar` and, on x86-64, an
// AVX2 variant in `kernels::avx2`. The unqualified entry points dispatch to the
// variant chosen at startup (best supported, overridable with the
// GMSLAM_SIMD=scalar|avx2 environment variable or set_active_isa()). All
// variants produce bit-identical output; tests/unit/kernels_test.cpp holds
// them to that.

#include <cstdint>
#include <span>
#include <string_view>

#include "gmslam/geometry/fixed_q16.hpp"

namespace gmslam::kernels {

enum class Isa { kScalar, kAvx2 };

std::string_view isa_name(Isa isa);
bool isa_supported(Isa isa);
Isa active_isa();
/// Throws std::invalid_argument if `isa` is not supported on this CPU/build.
void set_active_isa(Isa isa);

/// Read-only view of a row-major bit array. Bit x of row y lives in word
/// y * words_per_row + x / 32 at position x % 32.
struct BitPlane {
  const std::uint32_t* words = nullptr;
  std::int32_t width = 0;
  std::int32_t height = 0;
  std::int32_t words_per_row = 0;
};

struct WindowOffset {
  std::int32_t kx = 0;
  std::int32_t ky = 0;
};

/// Per-beam cell coordinates of the hit and pullback ("missed") points,
/// in the BitPlane's frame.
struct BeamCells {
  std::span<const std::int32_t> hit_x;
  std::span<const std::int32_t> hit_y;
  std::span<const std::int32_t> miss_x;
  std::span<const std::int32_t> miss_y;
};

/// Inputs of the fixed-point endpoint projection for one pose. `base_x/y`
/// are the pose position relative to the plane's minimum corner.
struct FixedProjection {
  FixedQ16 base_x;
  FixedQ16 base_y;
  FixedQ16 inv_resolution;
};

struct FixedBeams {
  std::span<const std::int32_t> cos_raw;
  std::span<const std::int32_t> sin_raw;
  std::span<const std::int32_t> range_raw;
  std::span<const std::int32_t> pullback_raw;
};

struct BeamCellsOut {
  std::span<std::int32_t> hit_x;
  std::span<std::int32_t> hit_y;
  std::span<std::int32_t> miss_x;
  std::span<std::int32_t> miss_y;
};

namespace scalar {
void pack_at_least(std::span<const float> src, float cut, std::span<std::uint32_t> dst);
void window_search(const BitPlane& plane, const BeamCells& cells,
                   std::span<const WindowOffset> order, std::span<std::int16_t> out);
void project_cells_q16(const FixedProjection& proj, const FixedBeams& beams,
                       const BeamCellsOut& out, FixedStatus& status);
}  // namespace scalar

namespace avx2 {
void pack_at_least(std::span<const float> src, float cut, std::span<std::uint32_t> dst);
void window_search(const BitPlane& plane, const BeamCells& cells,
                   std::span<const WindowOffset> order, std::span<std::int16_t> out);
/// Returns false (leaving `out` unspecified) if any intermediate would
/// saturate; the caller must then use the scalar kernel.
bool project_cells_q16(const FixedProjection& proj, const FixedBeams& beams,
                       const BeamCellsOut& out);
}  // namespace avx2

/// Sets bit i of `dst` iff src[i] >= cut (NaN gives 0). Bits past
/// src.size() in the last word are cleared. dst.size() >= ceil(n / 32).
void pack_at_least(std::span<const float> src, float cut, std::span<std::uint32_t> dst);

/// For each beam i: the index into `order` of the first offset k for which
/// hit + k is set and miss + k is clear, skipping offsets that leave the
/// plane; -1 if no offset is accepted or if the hit or missed cell itself
/// lies off the plane.
void window_search(const BitPlane& plane, const BeamCells& cells,
                   std::span<const WindowOffset> order, std::span<std::int16_t> out);

/// cell = floor((base + range * trig) * inv_resolution) evaluated in Q16.16
/// with round-to-nearest products, for the hit range and the pullback range.
void project_cells_q16(const FixedProjection& proj, const FixedBeams& beams,
                       const BeamCellsOut& out, FixedStatus& status);

}  // namespace gmslam::kernels
