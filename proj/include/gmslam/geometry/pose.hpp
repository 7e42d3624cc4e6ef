#pragma once

#include <cmath>
#include <iosfwd>
#include <numbers>

namespace gmslam {

/// Wraps an angle into the half-open interval [-pi, pi).
double normalize_angle(double theta);

/// Planar rigid-body pose. `theta` is kept in [-pi, pi) by every operation
/// that produces a pose.
struct Pose2D {
  double x = 0.0;
  double y = 0.0;
  double theta = 0.0;

  constexpr Pose2D() = default;
  Pose2D(double x_, double y_, double theta_)
      : x(x_), y(y_), theta(normalize_angle(theta_)) {}

  static Pose2D identity() { return {}; }

  double translation_norm() const { return std::hypot(x, y); }
  bool is_finite() const {
    return std::isfinite(x) && std::isfinite(y) && std::isfinite(theta);
  }

  friend bool operator==(const Pose2D&, const Pose2D&) = default;
};

/// A pose tagged with the time it was observed, in seconds.
struct TimedPose {
  double timestamp = 0.0;
  Pose2D pose;
};

/// a ⊕ b: applies `b` expressed in the frame of `a`.
Pose2D compose(const Pose2D& a, const Pose2D& b);

/// a ⊖ b: the relative pose d with compose(b, d) == a.
Pose2D inverse_compose(const Pose2D& a, const Pose2D& b);

/// The pose p with compose(a, p) == identity.
Pose2D inverse(const Pose2D& a);

std::ostream& operator<<(std::ostream& os, const Pose2D& p);

}  // namespace gmslam
