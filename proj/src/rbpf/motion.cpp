#include "gmslam/rbpf/motion.hpp"

#include <cmath>
#include <random>

namespace gmslam::rbpf {

Pose2D sample_motion(const Pose2D& pose, const Pose2D& control, const MotionNoise& noise,
                     CounterRng& rng) {
  const Pose2D mean = compose(pose, control);
  const double trans = control.translation_norm();
  const double rot = std::abs(control.theta);
  const double sigma_xy = noise.a1 * trans + noise.a2 * rot + noise.floor_xy;
  const double sigma_theta = noise.a3 * rot + noise.a4 * trans + noise.floor_theta;
  if (sigma_xy <= 0.0 && sigma_theta <= 0.0) return mean;

  std::normal_distribution<double> unit(0.0, 1.0);
  const double ex = unit(rng) * sigma_xy;
  const double ey = unit(rng) * sigma_xy;
  const double et = unit(rng) * sigma_theta;
  return {mean.x + ex, mean.y + ey, mean.theta + et};
}

bool should_process(const std::optional<Pose2D>& last_processed, const Pose2D& odom,
                    const ProcessThresholds& thresholds) {
  if (!last_processed) return true;
  const Pose2D delta = inverse_compose(odom, *last_processed);
  return delta.translation_norm() > thresholds.linear ||
         std::abs(delta.theta) > thresholds.angular;
}

}  // namespace gmslam::rbpf
