#pragma once

#include <cstdint>
#include <filesystem>
#include <vector>

#include "gmslam/grid/occupancy_grid.hpp"

namespace gmslam::grid {

/// Gray level of a never-observed cell (map-server convention).
inline constexpr std::uint8_t kPgmUnknown = 205;

struct PgmImage {
  std::int32_t width = 0;
  std::int32_t height = 0;
  double origin_x = 0.0;  // world position of the lower-left pixel's corner
  double origin_y = 0.0;
  double resolution = 0.0;
  std::vector<std::uint8_t> pixels;  // row-major, row 0 is the top (max cy)
};

/// Renders the observed bounding box: unknown -> 205, otherwise
/// round(254 * (1 - p)). Throws std::invalid_argument for an empty map.
PgmImage render_pgm(const OccupancyGrid& map);

/// Sidecar path written next to `pgm_path`.
std::filesystem::path pgm_sidecar_path(const std::filesystem::path& pgm_path);

/// Writes a binary P5 image plus a `key value` sidecar with origin_x,
/// origin_y, resolution, width and height. Throws std::runtime_error naming
/// the path on I/O failure.
void export_pgm(const OccupancyGrid& map, const std::filesystem::path& path);

}  // namespace gmslam::grid
