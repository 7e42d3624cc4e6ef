#include "gmslam/grid/occupancy_grid.hpp"

#include <algorithm>
#include <atomic>
#include <bit>
#include <stdexcept>
#include <unordered_set>

namespace gmslam::grid {

double probability_of(double log_odds) { return 1.0 / (1.0 + std::exp(-log_odds)); }

namespace {

// Monotone map from floats (excluding NaN) to unsigned keys.
std::uint32_t float_key(float f) {
  const auto bits = std::bit_cast<std::uint32_t>(f);
  return (bits & 0x80000000u) ? ~bits : (bits | 0x80000000u);
}

float key_float(std::uint32_t key) {
  const std::uint32_t bits = (key & 0x80000000u) ? (key & 0x7fffffffu) : ~key;
  return std::bit_cast<float>(bits);
}

}  // namespace

OccupancyThreshold::OccupancyThreshold(double probability) : probability_(probability) {
  if (!(probability > 0.0 && probability < 1.0))
    throw std::invalid_argument("occupancy threshold must lie in (0, 1)");
  auto occupied = [probability](std::uint32_t key) {
    return probability_of(key_float(key)) > probability;
  };
  // Invariant: lo is not occupied, hi is.
  std::uint32_t lo = float_key(-std::numeric_limits<float>::infinity());
  std::uint32_t hi = float_key(std::numeric_limits<float>::infinity());
  while (hi - lo > 1) {
    const std::uint32_t mid = lo + (hi - lo) / 2;
    (occupied(mid) ? hi : lo) = mid;
  }
  cut_ = key_float(hi);
}

OccupancyGrid::OccupancyGrid(GridParams params, LogOddsModel model)
    : params_(params), model_(model) {
  if (!(params_.resolution > 0.0) || !std::isfinite(params_.resolution))
    throw std::invalid_argument("grid resolution must be positive");
  if (!(model_.min <= 0.0f && model_.max >= 0.0f && model_.min < model_.max))
    throw std::invalid_argument("log-odds clamp range must contain 0");
}

std::optional<double> OccupancyGrid::probability(CellIndex c) const {
  const float l = log_odds(c);
  if (std::isnan(l)) return std::nullopt;
  return probability_of(l);
}

void OccupancyGrid::grow_to_include(std::int32_t tx, std::int32_t ty) {
  constexpr std::int32_t kPad = 2;
  std::int32_t x0 = tile_x0_, y0 = tile_y0_;
  std::int32_t x1 = tile_x0_ + tiles_x_, y1 = tile_y0_ + tiles_y_;  // exclusive
  if (tiles_x_ == 0 || tiles_y_ == 0) {
    x0 = tx - kPad;
    y0 = ty - kPad;
    x1 = tx + kPad + 1;
    y1 = ty + kPad + 1;
  } else {
    if (tx < x0) x0 = tx - kPad;
    if (ty < y0) y0 = ty - kPad;
    if (tx >= x1) x1 = tx + kPad + 1;
    if (ty >= y1) y1 = ty + kPad + 1;
  }
  const std::int32_t nx = x1 - x0, ny = y1 - y0;
  std::vector<std::shared_ptr<Tile>> grown(static_cast<std::size_t>(nx) * static_cast<std::size_t>(ny));
  for (std::int32_t iy = 0; iy < tiles_y_; ++iy) {
    for (std::int32_t ix = 0; ix < tiles_x_; ++ix) {
      auto& src = tiles_[static_cast<std::size_t>(iy) * tiles_x_ + ix];
      if (!src) continue;
      const std::int32_t gx = tile_x0_ + ix - x0, gy = tile_y0_ + iy - y0;
      grown[static_cast<std::size_t>(gy) * nx + gx] = std::move(src);
    }
  }
  tiles_ = std::move(grown);
  tile_x0_ = x0;
  tile_y0_ = y0;
  tiles_x_ = nx;
  tiles_y_ = ny;
}

float& OccupancyGrid::mutable_cell(CellIndex c) {
  const std::int32_t tx = c.cx >> kTileShift, ty = c.cy >> kTileShift;
  if (tx < tile_x0_ || ty < tile_y0_ || tx >= tile_x0_ + tiles_x_ || ty >= tile_y0_ + tiles_y_)
    grow_to_include(tx, ty);
  auto& slot = tiles_[static_cast<std::size_t>(ty - tile_y0_) * tiles_x_ + (tx - tile_x0_)];
  if (!slot) {
    slot = std::make_shared<Tile>();
    slot->fill(kUnobserved);
    ++tile_count_;
  } else if (slot.use_count() > 1) {
    slot = std::make_shared<Tile>(*slot);
  } else {
    // Pairs with the release in another clone's reference drop.
    std::atomic_thread_fence(std::memory_order_acquire);
  }
  return (*slot)[local_index(c)];
}

void OccupancyGrid::update(CellIndex c, float delta) {
  float& cell = mutable_cell(c);
  const float base = std::isnan(cell) ? 0.0f : cell;
  cell = std::clamp(base + delta, model_.min, model_.max);
}

void OccupancyGrid::set_log_odds(CellIndex c, float value) {
  if (std::isnan(value)) throw std::invalid_argument("cannot mark a cell as never observed");
  mutable_cell(c) = std::clamp(value, model_.min, model_.max);
}

std::optional<CellBounds> OccupancyGrid::observed_bounds() const {
  std::optional<CellBounds> bounds;
  for (std::int32_t iy = 0; iy < tiles_y_; ++iy) {
    for (std::int32_t ix = 0; ix < tiles_x_; ++ix) {
      const Tile* t = tiles_[static_cast<std::size_t>(iy) * tiles_x_ + ix].get();
      if (!t) continue;
      const std::int32_t bx = (tile_x0_ + ix) * kTileSize, by = (tile_y0_ + iy) * kTileSize;
      for (int ly = 0; ly < kTileSize; ++ly) {
        for (int lx = 0; lx < kTileSize; ++lx) {
          if (std::isnan((*t)[static_cast<std::size_t>(ly) * kTileSize + lx])) continue;
          const CellIndex c{bx + lx, by + ly};
          if (!bounds) {
            bounds = CellBounds{c, c};
          } else {
            bounds->min = {std::min(bounds->min.cx, c.cx), std::min(bounds->min.cy, c.cy)};
            bounds->max = {std::max(bounds->max.cx, c.cx), std::max(bounds->max.cy, c.cy)};
          }
        }
      }
    }
  }
  return bounds;
}

void OccupancyGrid::read_row(std::int32_t cy, std::int32_t cx_begin, std::span<float> out) const {
  const std::int32_t ty = cy >> kTileShift;
  const std::size_t row_base = static_cast<std::size_t>(cy & (kTileSize - 1)) * kTileSize;
  std::size_t i = 0;
  while (i < out.size()) {
    const std::int32_t cx = cx_begin + static_cast<std::int32_t>(i);
    const std::int32_t tx = cx >> kTileShift;
    const std::int32_t lx = cx & (kTileSize - 1);
    const std::size_t run = std::min<std::size_t>(kTileSize - lx, out.size() - i);
    if (const Tile* t = tile_at(tx, ty)) {
      std::copy_n(t->begin() + static_cast<std::ptrdiff_t>(row_base + lx), run, out.begin() + i);
    } else {
      std::fill_n(out.begin() + i, run, kUnobserved);
    }
    i += run;
  }
}

std::vector<const OccupancyGrid::Tile*> OccupancyGrid::tile_identities() const {
  std::vector<const Tile*> ids;
  ids.reserve(tile_count_);
  for (const auto& t : tiles_)
    if (t) ids.push_back(t.get());
  return ids;
}

std::size_t unique_tile_count(std::span<const OccupancyGrid* const> grids) {
  std::unordered_set<const OccupancyGrid::Tile*> seen;
  for (const OccupancyGrid* g : grids)
    for (const auto* t : g->tile_identities()) seen.insert(t);
  return seen.size();
}

ScanIntegration add_scan(OccupancyGrid& map, const Pose2D& pose, const Scan& scan) {
  ScanIntegration stats;
  const GridParams& params = map.params();
  const CellIndex sensor = world_to_cell(params, pose.x, pose.y);
  std::vector<CellIndex> ray;
  for (const Beam& beam : scan.beams) {
    if (!scan.is_valid(beam)) {
      ++stats.beams_skipped;
      continue;
    }
    const double heading = pose.theta + beam.angle;
    const double hx = pose.x + beam.range * std::cos(heading);
    const double hy = pose.y + beam.range * std::sin(heading);
    const CellIndex hit = world_to_cell(params, hx, hy);
    bresenham(sensor, hit, ray);
    for (const CellIndex& c : ray) map.update(c, map.model().miss);
    map.update(hit, map.model().hit);
    ++stats.beams_integrated;
  }
  return stats;
}

}  // namespace gmslam::grid
