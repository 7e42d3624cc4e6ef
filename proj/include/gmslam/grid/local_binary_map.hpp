#pragma once

#include <cstdint>
#include <vector>

#include "gmslam/geometry/pose.hpp"
#include "gmslam/grid/cell.hpp"
#include "gmslam/grid/occupancy_grid.hpp"
#include "gmslam/kernels/kernels.hpp"

namespace gmslam::grid {

/// Fixed-size 2W x 2W crop of an occupancy grid around a center cell,
/// quantized to one bit per cell (set iff the source cell is occupied under
/// the extraction threshold). Immutable after construction.
///
/// Local coordinates (kx, ky) range over [-W, W); the bit at (kx, ky)
/// corresponds to grid cell center + (kx, ky).
class LocalBinaryMap {
 public:
  LocalBinaryMap(GridParams params, CellIndex center, std::int32_t half_width);

  const GridParams& params() const { return params_; }
  CellIndex center() const { return center_; }
  std::int32_t half_width() const { return half_width_; }
  std::int32_t side() const { return 2 * half_width_; }
  /// Grid cell at local plane position (0, 0), i.e. center - (W, W).
  CellIndex corner() const { return {center_.cx - half_width_, center_.cy - half_width_}; }

  bool bit(std::int32_t kx, std::int32_t ky) const;
  /// Occupancy of a grid cell; false outside the window.
  bool occupied(CellIndex cell) const;
  bool contains(CellIndex cell) const;

  std::size_t popcount() const;
  kernels::BitPlane plane() const {
    return {words_.data(), side(), side(), words_per_row_};
  }

 private:
  friend LocalBinaryMap extract_local_map(const OccupancyGrid&, const Pose2D&, std::int32_t,
                                          const OccupancyThreshold&);

  GridParams params_;
  CellIndex center_;
  std::int32_t half_width_;
  std::int32_t words_per_row_;
  std::vector<std::uint32_t> words_;
};

/// Crops the 2W x 2W window centered on the cell containing `pose` and
/// binarizes it with `threshold`. Never-observed cells read as 0.
LocalBinaryMap extract_local_map(const OccupancyGrid& map, const Pose2D& pose,
                                 std::int32_t half_width, const OccupancyThreshold& threshold);

}  // namespace gmslam::grid
