#pragma once

#include <compare>
#include <cstdint>
#include <iosfwd>
#include <vector>

namespace gmslam::grid {

/// Integer grid cell index. Negative indices are valid: the grid grows in
/// every direction.
struct CellIndex {
  std::int32_t cx = 0;
  std::int32_t cy = 0;

  friend constexpr auto operator<=>(const CellIndex&, const CellIndex&) = default;
  friend constexpr CellIndex operator+(CellIndex a, CellIndex b) {
    return {a.cx + b.cx, a.cy + b.cy};
  }
  friend constexpr CellIndex operator-(CellIndex a, CellIndex b) {
    return {a.cx - b.cx, a.cy - b.cy};
  }
};

std::ostream& operator<<(std::ostream& os, const CellIndex& c);

/// World placement of a grid: cell (0, 0) has its minimum corner at
/// (origin_x, origin_y) and every cell is `resolution` meters wide.
struct GridParams {
  double origin_x = 0.0;
  double origin_y = 0.0;
  double resolution = 0.05;
};

/// Map-frame point to the cell that contains it (floor toward -inf).
CellIndex world_to_cell(const GridParams& params, double x, double y);

/// Minimum corner of `cell` in the map frame.
struct WorldPoint {
  double x = 0.0;
  double y = 0.0;
};
WorldPoint cell_to_world(const GridParams& params, CellIndex cell);

/// 8-connected Bresenham line from `from` (inclusive) to `to` (exclusive).
std::vector<CellIndex> bresenham(CellIndex from, CellIndex to);

/// Same as bresenham() but appends into `out` after clearing it.
void bresenham(CellIndex from, CellIndex to, std::vector<CellIndex>& out);

}  // namespace gmslam::grid
