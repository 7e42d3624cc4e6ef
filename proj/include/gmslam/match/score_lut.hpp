#pragma once

#include <cstdint>
#include <vector>

namespace gmslam::match {

/// Gaussian score u(d') = exp(-d'^2 / (2 sigma^2)) for every window offset,
/// where d' = sqrt(kx^2 + ky^2) * resolution. Indexed by (kx + K, ky + K).
class ScoreLUT {
 public:
  ScoreLUT(std::int32_t radius, double resolution, double sigma);

  std::int32_t radius() const { return radius_; }
  double resolution() const { return resolution_; }
  double sigma() const { return sigma_; }

  double at(std::int32_t kx, std::int32_t ky) const {
    return entries_[index(kx, ky)];
  }
  /// log(at(kx, ky)), tabulated alongside.
  double log_at(std::int32_t kx, std::int32_t ky) const {
    return log_entries_[index(kx, ky)];
  }
  const std::vector<double>& entries() const { return entries_; }

 private:
  std::size_t index(std::int32_t kx, std::int32_t ky) const {
    const std::int32_t side = 2 * radius_ + 1;
    return static_cast<std::size_t>((ky + radius_) * side + (kx + radius_));
  }

  std::int32_t radius_;
  double resolution_;
  double sigma_;
  std::vector<double> entries_;
  std::vector<double> log_entries_;
};

ScoreLUT build_score_lut(std::int32_t radius, double resolution, double sigma);

}  // namespace gmslam::match
