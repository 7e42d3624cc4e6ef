#pragma once

#include <array>
#include <cmath>
#include <cstddef>
#include <cstdint>
#include <limits>
#include <memory>
#include <optional>
#include <span>
#include <vector>

#include "gmslam/geometry/pose.hpp"
#include "gmslam/grid/cell.hpp"
#include "gmslam/match/scan.hpp"

namespace gmslam::grid {

/// Standard log-odds inverse 1 / (1 + exp(-l)).
double probability_of(double log_odds);

/// Binary Bayes increments and clamp range, in log-odds.
struct LogOddsModel {
  float hit = 0.85f;
  float miss = -0.4f;
  float min = -10.0f;
  float max = 10.0f;
};

/// The occupancy decision "probability_of(l) > T" expressed as a single
/// log-odds cut: for every non-NaN float l,
///   probability_of(l) > T  <=>  l >= cut().
/// The cut is found by bisection over the ordered float bit patterns, so the
/// equivalence is exact rather than approximate.
class OccupancyThreshold {
 public:
  explicit OccupancyThreshold(double probability = 0.5);

  double probability() const { return probability_; }
  float cut() const { return cut_; }
  /// NaN (never observed) is never occupied.
  bool occupied(float log_odds) const { return log_odds >= cut_; }

 private:
  double probability_;
  float cut_;
};

struct CellBounds {
  CellIndex min;  // inclusive
  CellIndex max;  // inclusive
};

/// Sparse, dynamically growing occupancy grid of clamped log-odds cells.
///
/// Cells live in 64x64 tiles allocated on first write; reads of absent
/// tiles report "never observed" (NaN). Tiles are reference counted and
/// shared between clones; a write to a shared tile copies it first, so a
/// clone never observes another clone's mutations. The reference count is
/// atomic, so clones may be mutated concurrently on different threads.
/// A single grid instance still allows only one writer at a time.
class OccupancyGrid {
 public:
  static constexpr int kTileShift = 6;
  static constexpr int kTileSize = 1 << kTileShift;
  static constexpr std::size_t kTileCells = kTileSize * kTileSize;
  static constexpr float kUnobserved = std::numeric_limits<float>::quiet_NaN();

  using Tile = std::array<float, kTileCells>;

  explicit OccupancyGrid(GridParams params = {}, LogOddsModel model = {});

  const GridParams& params() const { return params_; }
  const LogOddsModel& model() const { return model_; }

  /// NaN if the cell was never observed.
  float log_odds(CellIndex c) const {
    const Tile* t = tile_at(c.cx >> kTileShift, c.cy >> kTileShift);
    return t ? (*t)[local_index(c)] : kUnobserved;
  }
  bool observed(CellIndex c) const { return !std::isnan(log_odds(c)); }
  /// Occupancy probability, or nullopt if never observed.
  std::optional<double> probability(CellIndex c) const;

  /// Adds `delta` (an unobserved cell starts at 0) and clamps to the model range.
  void update(CellIndex c, float delta);
  /// Stores `value` clamped to the model range.
  void set_log_odds(CellIndex c, float value);

  /// O(tiles) copy sharing every tile with this grid.
  OccupancyGrid cow_clone() const { return *this; }

  bool empty() const { return tile_count_ == 0; }
  std::size_t tile_count() const { return tile_count_; }
  /// Bounding box of observed cells; nullopt if nothing was observed.
  std::optional<CellBounds> observed_bounds() const;

  /// Copies row `cy`, columns [cx_begin, cx_begin + out.size()), into `out`
  /// (NaN where unobserved).
  void read_row(std::int32_t cy, std::int32_t cx_begin, std::span<float> out) const;

  /// Identities of the allocated tiles, for sharing/memory accounting.
  std::vector<const Tile*> tile_identities() const;

 private:
  static std::size_t local_index(CellIndex c) {
    return static_cast<std::size_t>(c.cy & (kTileSize - 1)) * kTileSize +
           static_cast<std::size_t>(c.cx & (kTileSize - 1));
  }
  const Tile* tile_at(std::int32_t tx, std::int32_t ty) const {
    const std::int64_t ix = std::int64_t{tx} - tile_x0_;
    const std::int64_t iy = std::int64_t{ty} - tile_y0_;
    if (ix < 0 || iy < 0 || ix >= tiles_x_ || iy >= tiles_y_) return nullptr;
    return tiles_[static_cast<std::size_t>(iy * tiles_x_ + ix)].get();
  }
  float& mutable_cell(CellIndex c);
  void grow_to_include(std::int32_t tx, std::int32_t ty);

  GridParams params_;
  LogOddsModel model_;
  // Dense directory over the tile bounding box [x0, x0 + nx) x [y0, y0 + ny).
  std::vector<std::shared_ptr<Tile>> tiles_;
  std::int32_t tile_x0_ = 0;
  std::int32_t tile_y0_ = 0;
  std::int32_t tiles_x_ = 0;
  std::int32_t tiles_y_ = 0;
  std::size_t tile_count_ = 0;
};

/// Number of distinct tiles referenced by a group of grids.
std::size_t unique_tile_count(std::span<const OccupancyGrid* const> grids);

struct ScanIntegration {
  std::size_t beams_integrated = 0;
  std::size_t beams_skipped = 0;
};

/// Integrates `scan` taken from `pose`: the endpoint cell of every valid beam
/// receives the hit increment and every Bresenham cell between the sensor
/// cell and the endpoint receives the miss increment.
ScanIntegration add_scan(OccupancyGrid& map, const Pose2D& pose, const Scan& scan);

}  // namespace gmslam::grid
