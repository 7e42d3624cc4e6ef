#include "gmslam/grid/cell.hpp"

#include <algorithm>
#include <cmath>
#include <cstdlib>
#include <ostream>

namespace gmslam::grid {

std::ostream& operator<<(std::ostream& os, const CellIndex& c) {
  return os << "(" << c.cx << ", " << c.cy << ")";
}

namespace {

// floor((v - origin) / resolution), corrected so that cell c covers exactly
// [origin + c * resolution, origin + (c + 1) * resolution) as cell_to_world
// evaluates those edges. Division alone can land one cell low on an edge.
std::int32_t axis_cell(double v, double origin, double resolution) {
  auto c = static_cast<std::int64_t>(std::floor((v - origin) / resolution));
  if (origin + static_cast<double>(c + 1) * resolution <= v) ++c;
  else if (origin + static_cast<double>(c) * resolution > v) --c;
  return static_cast<std::int32_t>(c);
}

}  // namespace

CellIndex world_to_cell(const GridParams& params, double x, double y) {
  return {axis_cell(x, params.origin_x, params.resolution),
          axis_cell(y, params.origin_y, params.resolution)};
}

WorldPoint cell_to_world(const GridParams& params, CellIndex cell) {
  return {params.origin_x + static_cast<double>(cell.cx) * params.resolution,
          params.origin_y + static_cast<double>(cell.cy) * params.resolution};
}

void bresenham(CellIndex from, CellIndex to, std::vector<CellIndex>& out) {
  out.clear();
  const std::int32_t dx = std::abs(to.cx - from.cx);
  const std::int32_t dy = std::abs(to.cy - from.cy);
  const std::int32_t sx = from.cx < to.cx ? 1 : -1;
  const std::int32_t sy = from.cy < to.cy ? 1 : -1;
  out.reserve(static_cast<std::size_t>(std::max(dx, dy)));

  std::int32_t err = dx - dy;
  CellIndex c = from;
  while (c != to) {
    out.push_back(c);
    const std::int32_t e2 = 2 * err;
    if (e2 > -dy) {
      err -= dy;
      c.cx += sx;
    }
    if (e2 < dx) {
      err += dx;
      c.cy += sy;
    }
  }
}

std::vector<CellIndex> bresenham(CellIndex from, CellIndex to) {
  std::vector<CellIndex> out;
  bresenham(from, to, out);
  return out;
}

}  // namespace gmslam::grid
