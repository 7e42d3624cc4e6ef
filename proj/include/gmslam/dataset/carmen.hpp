#pragma once

#include <cstddef>
#include <iosfwd>
#include <numbers>
#include <optional>
#include <span>
#include <stdexcept>
#include <string>
#include <vector>

#include "gmslam/geometry/pose.hpp"
#include "gmslam/match/scan.hpp"
#include "gmslam/rbpf/motion.hpp"

namespace gmslam::dataset {

/// One timestamped odometry reading, optionally carrying a laser scan.
struct LogEvent {
  double timestamp = 0.0;
  Pose2D odom;
  std::optional<Scan> scan;
};

struct CarmenOptions {
  bool strict = false;                      // abort on the first malformed line
  double field_of_view = std::numbers::pi;  // first to last beam
  double range_min = 0.05;
  double range_max = 20.0;
};

struct ParseIssue {
  std::size_t line = 0;
  std::string message;
};

struct ParseDiagnostics {
  std::size_t lines = 0;
  std::size_t skipped = 0;    // unknown message types, comments
  std::size_t malformed = 0;
  std::vector<ParseIssue> issues;
};

/// Malformed input in strict mode, or an unreadable source.
class ParseError : public std::runtime_error {
 public:
  ParseError(std::size_t line, const std::string& message);
  std::size_t line() const { return line_; }

 private:
  std::size_t line_;
};

/// Reads FLASER and ODOM messages:
///   FLASER n r_1 .. r_n laser_x laser_y laser_theta odom_x odom_y odom_theta ts host logts
///   ODOM x y theta tv rv accel ts host logts
/// Other message types are skipped. Malformed lines are recorded in
/// `diagnostics` and skipped, or throw ParseError in strict mode.
std::vector<LogEvent> parse_carmen(std::istream& in, const CarmenOptions& options = {},
                                   ParseDiagnostics* diagnostics = nullptr);

/// parse_carmen on a file; throws ParseError if the file cannot be opened.
std::vector<LogEvent> load_carmen(const std::string& path, const CarmenOptions& options = {},
                                  ParseDiagnostics* diagnostics = nullptr);

/// Writes events back as FLASER (with scan) or ODOM lines, 6 decimals.
/// The laser pose fields repeat the odometry pose.
void write_carmen(std::ostream& out, std::span<const LogEvent> events);

struct ControlStep {
  double timestamp = 0.0;
  Pose2D odom;
  Pose2D control;  // odometry increment since the previous returned step
  Scan scan;
};

/// One step per laser event: control = odom ⊖ previous odom, zero for the
/// first. With `gating`, laser events that moved less than the thresholds
/// since the last returned step are dropped and their motion folds into the
/// next returned control.
std::vector<ControlStep> controls_from_odometry(
    std::span<const LogEvent> events,
    const std::optional<rbpf::ProcessThresholds>& gating = std::nullopt);

}  // namespace gmslam::dataset
