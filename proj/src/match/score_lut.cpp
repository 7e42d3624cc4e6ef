#include "gmslam/match/score_lut.hpp"

#include <cmath>
#include <stdexcept>

namespace gmslam::match {

ScoreLUT::ScoreLUT(std::int32_t radius, double resolution, double sigma)
    : radius_(radius), resolution_(resolution), sigma_(sigma) {
  if (radius < 1) throw std::invalid_argument("score table radius must be >= 1");
  if (!(resolution > 0.0) || !(sigma > 0.0))
    throw std::invalid_argument("score table needs positive resolution and sigma");
  const std::int32_t side = 2 * radius + 1;
  entries_.resize(static_cast<std::size_t>(side * side));
  log_entries_.resize(entries_.size());
  const double scale = resolution * resolution / (2.0 * sigma * sigma);
  for (std::int32_t ky = -radius; ky <= radius; ++ky) {
    for (std::int32_t kx = -radius; kx <= radius; ++kx) {
      const double exponent = -static_cast<double>(kx * kx + ky * ky) * scale;
      entries_[index(kx, ky)] = std::exp(exponent);
      log_entries_[index(kx, ky)] = exponent;
    }
  }
}

ScoreLUT build_score_lut(std::int32_t radius, double resolution, double sigma) {
  return ScoreLUT(radius, resolution, sigma);
}

}  // namespace gmslam::match
