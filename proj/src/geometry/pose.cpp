#include "gmslam/geometry/pose.hpp"

#include <cassert>
#include <ostream>

namespace gmslam {

double normalize_angle(double theta) {
  assert(std::isfinite(theta));
  constexpr double kPi = std::numbers::pi;
  constexpr double kTwoPi = 2.0 * std::numbers::pi;
  if (theta >= -kPi && theta < kPi) return theta;
  double wrapped = std::fmod(theta + kPi, kTwoPi);
  if (wrapped < 0.0) wrapped += kTwoPi;
  wrapped -= kPi;
  // fmod/add rounding can land exactly on +pi.
  if (wrapped >= kPi) wrapped -= kTwoPi;
  if (wrapped < -kPi) wrapped = -kPi;
  return wrapped;
}

Pose2D compose(const Pose2D& a, const Pose2D& b) {
  const double c = std::cos(a.theta);
  const double s = std::sin(a.theta);
  return {a.x + b.x * c - b.y * s, a.y + b.x * s + b.y * c, a.theta + b.theta};
}

Pose2D inverse_compose(const Pose2D& a, const Pose2D& b) {
  const double c = std::cos(b.theta);
  const double s = std::sin(b.theta);
  const double dx = a.x - b.x;
  const double dy = a.y - b.y;
  return {c * dx + s * dy, -s * dx + c * dy, a.theta - b.theta};
}

Pose2D inverse(const Pose2D& a) { return inverse_compose(Pose2D{}, a); }

std::ostream& operator<<(std::ostream& os, const Pose2D& p) {
  return os << "(" << p.x << ", " << p.y << ", " << p.theta << ")";
}

}  // namespace gmslam
