#include "gmslam/grid/local_binary_map.hpp"

#include <bit>
#include <numeric>
#include <stdexcept>

namespace gmslam::grid {

LocalBinaryMap::LocalBinaryMap(GridParams params, CellIndex center, std::int32_t half_width)
    : params_(params), center_(center), half_width_(half_width) {
  if (half_width <= 0) throw std::invalid_argument("local map half-width must be positive");
  words_per_row_ = (side() + 31) / 32;
  words_.assign(static_cast<std::size_t>(words_per_row_) * static_cast<std::size_t>(side()), 0u);
}

bool LocalBinaryMap::bit(std::int32_t kx, std::int32_t ky) const {
  if (kx < -half_width_ || ky < -half_width_ || kx >= half_width_ || ky >= half_width_)
    return false;
  const std::int32_t x = kx + half_width_, y = ky + half_width_;
  const std::uint32_t w =
      words_[static_cast<std::size_t>(y) * static_cast<std::size_t>(words_per_row_) +
             static_cast<std::size_t>(x >> 5)];
  return (w >> (x & 31)) & 1u;
}

bool LocalBinaryMap::contains(CellIndex cell) const {
  const CellIndex k = cell - center_;
  return k.cx >= -half_width_ && k.cy >= -half_width_ && k.cx < half_width_ && k.cy < half_width_;
}

bool LocalBinaryMap::occupied(CellIndex cell) const {
  const CellIndex k = cell - center_;
  return bit(k.cx, k.cy);
}

std::size_t LocalBinaryMap::popcount() const {
  return std::accumulate(words_.begin(), words_.end(), std::size_t{0},
                         [](std::size_t acc, std::uint32_t w) { return acc + std::popcount(w); });
}

LocalBinaryMap extract_local_map(const OccupancyGrid& map, const Pose2D& pose,
                                 std::int32_t half_width, const OccupancyThreshold& threshold) {
  LocalBinaryMap local(map.params(), world_to_cell(map.params(), pose.x, pose.y), half_width);
  const std::int32_t side = local.side();
  const CellIndex corner = local.corner();
  std::vector<float> row(static_cast<std::size_t>(side));
  for (std::int32_t y = 0; y < side; ++y) {
    map.read_row(corner.cy + y, corner.cx, row);
    const auto dst = std::span(local.words_).subspan(
        static_cast<std::size_t>(y) * static_cast<std::size_t>(local.words_per_row_),
        static_cast<std::size_t>(local.words_per_row_));
    kernels::pack_at_least(row, threshold.cut(), dst);
  }
  return local;
}

}  // namespace gmslam::grid
