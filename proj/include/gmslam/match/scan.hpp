#pragma once

#include <cstddef>
#include <vector>

namespace gmslam {

struct Beam {
  double range = 0.0;  // meters
  double angle = 0.0;  // radians, sensor frame
};

/// One LiDAR sweep. Beam angles are strictly increasing; a beam is valid iff
/// range_min < range < range_max.
struct Scan {
  std::vector<Beam> beams;
  double range_min = 0.05;
  double range_max = 20.0;

  bool is_valid(const Beam& b) const { return b.range > range_min && b.range < range_max; }
  std::size_t valid_count() const;

  /// Throws std::invalid_argument when angles are not strictly increasing or
  /// the bounds are inconsistent.
  void validate() const;

  /// One beam per range, spread uniformly over [first_angle, first_angle + fov].
  static Scan uniform(const std::vector<double>& ranges, double first_angle, double fov,
                      double range_min = 0.05, double range_max = 20.0);
};

}  // namespace gmslam
