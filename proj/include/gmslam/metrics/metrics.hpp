#pragma once

#include <cstddef>
#include <iosfwd>
#include <optional>
#include <span>
#include <stdexcept>
#include <string>
#include <vector>

#include "gmslam/dataset/relations.hpp"
#include "gmslam/geometry/pose.hpp"

namespace gmslam::metrics {

/// Poses ordered by strictly increasing timestamp.
using Trajectory = std::vector<TimedPose>;

inline constexpr double kDefaultTolerance = 0.15;      // seconds, relation endpoints
inline constexpr double kAlignmentTolerance = 1e-6;    // seconds, trajectory vs trajectory

class MetricError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

struct MetricReport {
  double eps_trans = 0.0;    // meters
  double sigma_trans = 0.0;  // meters
  double eps_rot = 0.0;      // radians
  double sigma_rot = 0.0;    // radians
  std::size_t relations_used = 0;
  std::size_t relations_skipped = 0;
};

/// Throws MetricError unless timestamps are strictly increasing and poses finite.
void validate_trajectory(const Trajectory& trajectory);

/// Pose whose timestamp is nearest to `t` (earlier one on a tie), if it is
/// within `tolerance`.
std::optional<Pose2D> pose_at(const Trajectory& trajectory, double t,
                              double tolerance = kDefaultTolerance);

/// Mean and population standard deviation of |trans| and |rot| of
/// (x(t2) ⊖ x(t1)) ⊖ delta over every relation whose endpoints resolve.
/// Throws MetricError if the trajectory is empty or no relation resolves.
MetricReport relation_errors(const Trajectory& trajectory,
                             std::span<const dataset::Relation> relations,
                             double tolerance = kDefaultTolerance);

/// Same statistics with the relative motions of `b` taken as ground truth,
/// over consecutive pose pairs of `a` whose timestamps both appear in `b`.
/// Throws MetricError if no pair aligns.
MetricReport trajectory_difference(const Trajectory& a, const Trajectory& b,
                                   double tolerance = kAlignmentTolerance);

/// Relations between consecutive poses of `trajectory` (and, with
/// `stride` > 1, between poses `stride` apart).
std::vector<dataset::Relation> relations_from(const Trajectory& trajectory, std::size_t stride = 1);

/// `key value` lines in a fixed order.
std::string to_key_value(const MetricReport& report);
/// One JSON object with one numeric field per statistic.
std::string to_json(const MetricReport& report);
/// "trans: 0.115 ± 0.129 m" and "rot: 0.086 ± 0.092 rad" lines.
std::string to_summary(const MetricReport& report);

/// `timestamp x y theta` per line, 6 decimals.
void write_trajectory(std::ostream& out, const Trajectory& trajectory);
/// Throws MetricError naming the line on malformed input.
Trajectory parse_trajectory(std::istream& in);
Trajectory load_trajectory(const std::string& path);

}  // namespace gmslam::metrics
