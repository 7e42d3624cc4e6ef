#include "gmslam/grid/pgm.hpp"

#include <cmath>
#include <fstream>
#include <iomanip>
#include <stdexcept>

namespace gmslam::grid {

PgmImage render_pgm(const OccupancyGrid& map) {
  const auto bounds = map.observed_bounds();
  if (!bounds) throw std::invalid_argument("cannot export an empty map");

  PgmImage img;
  img.width = bounds->max.cx - bounds->min.cx + 1;
  img.height = bounds->max.cy - bounds->min.cy + 1;
  const WorldPoint origin = cell_to_world(map.params(), bounds->min);
  img.origin_x = origin.x;
  img.origin_y = origin.y;
  img.resolution = map.params().resolution;
  img.pixels.resize(static_cast<std::size_t>(img.width) * static_cast<std::size_t>(img.height));

  for (std::int32_t row = 0; row < img.height; ++row) {
    const std::int32_t cy = bounds->max.cy - row;
    for (std::int32_t col = 0; col < img.width; ++col) {
      const float l = map.log_odds({bounds->min.cx + col, cy});
      std::uint8_t value = kPgmUnknown;
      if (!std::isnan(l))
        value = static_cast<std::uint8_t>(std::lround(254.0 * (1.0 - probability_of(l))));
      img.pixels[static_cast<std::size_t>(row) * img.width + col] = value;
    }
  }
  return img;
}

std::filesystem::path pgm_sidecar_path(const std::filesystem::path& pgm_path) {
  auto sidecar = pgm_path;
  sidecar += ".meta";
  return sidecar;
}

void export_pgm(const OccupancyGrid& map, const std::filesystem::path& path) {
  const PgmImage img = render_pgm(map);
  {
    std::ofstream out(path, std::ios::binary);
    if (!out) throw std::runtime_error("cannot open " + path.string() + " for writing");
    out << "P5\n" << img.width << " " << img.height << "\n255\n";
    out.write(reinterpret_cast<const char*>(img.pixels.data()),
              static_cast<std::streamsize>(img.pixels.size()));
    if (!out) throw std::runtime_error("failed writing " + path.string());
  }
  const auto sidecar = pgm_sidecar_path(path);
  std::ofstream meta(sidecar);
  if (!meta) throw std::runtime_error("cannot open " + sidecar.string() + " for writing");
  meta << std::setprecision(17);
  meta << "origin_x " << img.origin_x << "\n"
       << "origin_y " << img.origin_y << "\n"
       << "resolution " << img.resolution << "\n"
       << "width " << img.width << "\n"
       << "height " << img.height << "\n";
  if (!meta) throw std::runtime_error("failed writing " + sidecar.string());
}

}  // namespace gmslam::grid
