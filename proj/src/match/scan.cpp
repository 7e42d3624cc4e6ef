#include "gmslam/match/scan.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

namespace gmslam {

std::size_t Scan::valid_count() const {
  return static_cast<std::size_t>(
      std::count_if(beams.begin(), beams.end(), [this](const Beam& b) { return is_valid(b); }));
}

void Scan::validate() const {
  if (!(range_min >= 0.0 && range_max > range_min))
    throw std::invalid_argument("scan range bounds must satisfy 0 <= range_min < range_max");
  for (std::size_t i = 1; i < beams.size(); ++i) {
    if (!(beams[i].angle > beams[i - 1].angle))
      throw std::invalid_argument("scan beam angles must be strictly increasing");
  }
  for (const Beam& b : beams) {
    if (!std::isfinite(b.angle) || std::isnan(b.range))
      throw std::invalid_argument("scan beam has a non-finite field");
  }
}

Scan Scan::uniform(const std::vector<double>& ranges, double first_angle, double fov,
                   double range_min, double range_max) {
  Scan scan;
  scan.range_min = range_min;
  scan.range_max = range_max;
  scan.beams.reserve(ranges.size());
  const std::size_t n = ranges.size();
  const double step = n > 1 ? fov / static_cast<double>(n - 1) : 0.0;
  for (std::size_t i = 0; i < n; ++i)
    scan.beams.push_back({ranges[i], first_angle + step * static_cast<double>(i)});
  return scan;
}

}  // namespace gmslam
