#include <atomic>
#include <cstdlib>
#include <stdexcept>
#include <string>

#include "gmslam/kernels/kernels.hpp"

namespace gmslam::kernels {

namespace {

bool cpu_has_avx2() {
#if defined(GMSLAM_HAVE_AVX2) && (defined(__GNUC__) || defined(__clang__))
  return __builtin_cpu_supports("avx2");
#else
  return false;
#endif
}

Isa initial_isa() {
  Isa isa = cpu_has_avx2() ? Isa::kAvx2 : Isa::kScalar;
  if (const char* env = std::getenv("GMSLAM_SIMD")) {
    const std::string_view want{env};
    if (want == "scalar") isa = Isa::kScalar;
    // Requests for an unsupported ISA keep the detected one.
  }
  return isa;
}

std::atomic<Isa>& active() {
  static std::atomic<Isa> isa{initial_isa()};
  return isa;
}

}  // namespace

std::string_view isa_name(Isa isa) {
  switch (isa) {
    case Isa::kScalar:
      return "scalar";
    case Isa::kAvx2:
      return "avx2";
  }
  return "unknown";
}

bool isa_supported(Isa isa) { return isa == Isa::kScalar || cpu_has_avx2(); }

Isa active_isa() { return active().load(std::memory_order_relaxed); }

void set_active_isa(Isa isa) {
  if (!isa_supported(isa))
    throw std::invalid_argument("instruction set " + std::string(isa_name(isa)) +
                                " is not supported here");
  active().store(isa, std::memory_order_relaxed);
}

void pack_at_least(std::span<const float> src, float cut, std::span<std::uint32_t> dst) {
#ifdef GMSLAM_HAVE_AVX2
  if (active_isa() == Isa::kAvx2) return avx2::pack_at_least(src, cut, dst);
#endif
  scalar::pack_at_least(src, cut, dst);
}

void window_search(const BitPlane& plane, const BeamCells& cells,
                   std::span<const WindowOffset> order, std::span<std::int16_t> out) {
#ifdef GMSLAM_HAVE_AVX2
  if (active_isa() == Isa::kAvx2) return avx2::window_search(plane, cells, order, out);
#endif
  scalar::window_search(plane, cells, order, out);
}

void project_cells_q16(const FixedProjection& proj, const FixedBeams& beams,
                       const BeamCellsOut& out, FixedStatus& status) {
#ifdef GMSLAM_HAVE_AVX2
  if (active_isa() == Isa::kAvx2 && avx2::project_cells_q16(proj, beams, out)) return;
#endif
  scalar::project_cells_q16(proj, beams, out, status);
}

}  // namespace gmslam::kernels
