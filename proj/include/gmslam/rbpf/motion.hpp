#pragma once

#include <optional>

#include "gmslam/geometry/pose.hpp"
#include "gmslam/rbpf/rng.hpp"

namespace gmslam::rbpf {

/// Odometry noise: per-component standard deviations grow with the size of
/// the control, plus constant floors.
///   sigma_xy    = a1 |trans| + a2 |rot| + floor_xy
///   sigma_theta = a3 |rot| + a4 |trans| + floor_theta
struct MotionNoise {
  double a1 = 0.1;
  double a2 = 0.05;
  double a3 = 0.1;
  double a4 = 0.05;
  double floor_xy = 0.001;
  double floor_theta = 0.0005;
};

/// compose(pose, control) perturbed by zero-mean Gaussian noise.
Pose2D sample_motion(const Pose2D& pose, const Pose2D& control, const MotionNoise& noise,
                     CounterRng& rng);

struct ProcessThresholds {
  double linear = 0.1;    // meters
  double angular = 0.05;  // radians
};

/// True for the first scan, or when odometry moved beyond either threshold
/// since the last processed scan.
bool should_process(const std::optional<Pose2D>& last_processed, const Pose2D& odom,
                    const ProcessThresholds& thresholds);

}  // namespace gmslam::rbpf
