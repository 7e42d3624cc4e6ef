#pragma once

// Greedy endpoint matching: per-beam nearest-obstacle search in a
// (2K+1) x (2K+1) window, a Gaussian score summed over beams, and axial
// hill climbing over (x, y, theta).
//
// Two backends share the acceptance rule and search order:
//  - reference: double precision, full occupancy grid, converges when the
//    linear step drops below `convergence_step`;
//  - accelerated: Q16.16 arithmetic, binarized local map, score lookup
//    table, exactly `fixed_iterations` iterations per call.

#include <cstdint>
#include <optional>
#include <span>
#include <vector>

#include "gmslam/geometry/fixed_q16.hpp"
#include "gmslam/geometry/pose.hpp"
#include "gmslam/grid/local_binary_map.hpp"
#include "gmslam/grid/occupancy_grid.hpp"
#include "gmslam/kernels/kernels.hpp"
#include "gmslam/match/scan.hpp"
#include "gmslam/match/score_lut.hpp"

namespace gmslam::match {

enum class Backend { kReference, kAccelerated };

struct MatchParams {
  std::int32_t window_radius = 1;         // K
  double pullback = 0.0707106781186548;   // delta: sqrt(2) * resolution
  double sigma = 0.05;
  double occupancy_threshold = 0.5;       // T
  double initial_linear_step = 0.05;
  double initial_angular_step = 0.025;
  std::int32_t max_iterations = 50;       // reference only
  double convergence_step = 0.00625;      // reference only
  std::int32_t fixed_iterations = 25;     // accelerated only
  double no_match_likelihood = 0.018315638888734179;  // exp(-4)

  /// Defaults tied to the map resolution (pullback, sigma, convergence).
  static MatchParams for_resolution(double resolution);
  /// Throws std::invalid_argument on violated invariants.
  void validate() const;
};

/// Window offsets ordered by search priority: squared length, then ky, then kx.
std::vector<kernels::WindowOffset> window_search_order(std::int32_t radius);

struct WindowMatch {
  std::int32_t kx = 0;
  std::int32_t ky = 0;
  std::int32_t squared_length() const { return kx * kx + ky * ky; }
  friend bool operator==(const WindowMatch&, const WindowMatch&) = default;
};

/// Fixed-point pose used by the accelerated backend.
struct FixedPose {
  FixedQ16 x;
  FixedQ16 y;
  FixedQ16 theta;

  static FixedPose from_pose(const Pose2D& p);
  Pose2D to_pose() const;
};

/// Endpoint of `beam` seen from `pose` in the map frame.
grid::WorldPoint project_beam(const Pose2D& pose, const Beam& beam);

/// Fixed-point endpoint projection; saturation is recorded in `status`.
std::pair<FixedQ16, FixedQ16> project_beam_q16(const FixedPose& pose, const Beam& beam,
                                               FixedStatus& status);

/// Hit cell C^H and pullback cell C^M of one beam.
struct BeamCellPair {
  grid::CellIndex hit;
  grid::CellIndex miss;
};
BeamCellPair beam_cells(const Pose2D& pose, const Beam& beam, const grid::GridParams& params,
                        double pullback);

/// Minimum-distance window search against the full-precision grid.
std::optional<WindowMatch> find_min_distance(const Pose2D& pose, const grid::OccupancyGrid& map,
                                             const Beam& beam, const MatchParams& params);

/// Minimum-distance window search against a binarized local map, with
/// fixed-point projection. No match if C^H or C^M is outside the local map.
std::optional<WindowMatch> find_min_distance(const Pose2D& pose, const grid::LocalBinaryMap& map,
                                             const Beam& beam, const MatchParams& params);

struct ScoreResult {
  double score = 0.0;
  std::size_t matched = 0;
};

ScoreResult score(const Pose2D& pose, const grid::OccupancyGrid& map, const Scan& scan,
                  const MatchParams& params, const ScoreLUT& lut);
ScoreResult score(const Pose2D& pose, const grid::LocalBinaryMap& map, const Scan& scan,
                  const MatchParams& params, const ScoreLUT& lut);

/// Sum over valid beams of log u(d') for matched beams and
/// log(no_match_likelihood) for the rest.
double log_likelihood(const Pose2D& pose, const grid::OccupancyGrid& map, const Scan& scan,
                      const MatchParams& params);
double log_likelihood(const Pose2D& pose, const grid::LocalBinaryMap& map, const Scan& scan,
                      const MatchParams& params);

struct MatchResult {
  Pose2D pose;
  double score = 0.0;
  std::size_t matched_beams = 0;
  std::size_t valid_beams = 0;
  double log_likelihood = 0.0;  // at `pose`
  std::int32_t iterations_used = 0;
  std::size_t score_evaluations = 0;
};

MatchResult hill_climb(const grid::OccupancyGrid& map, const Scan& scan, const Pose2D& initial,
                       const MatchParams& params);
/// Throws std::invalid_argument if `initial` lies outside the local map.
MatchResult hill_climb(const grid::LocalBinaryMap& map, const Scan& scan, const Pose2D& initial,
                       const MatchParams& params);

/// Scores one pose at a time against the full-precision grid. Holds a
/// reference to `map`, which must outlive it.
class ReferenceMatcher {
 public:
  struct Evaluation {
    double score = 0.0;
    std::size_t matched = 0;
    double log_likelihood = 0.0;
  };

  ReferenceMatcher(const grid::OccupancyGrid& map, const Scan& scan, const MatchParams& params);

  Evaluation evaluate(const Pose2D& pose);
  std::optional<WindowMatch> match_beam(const Pose2D& pose, std::size_t valid_index);
  std::size_t valid_beams() const { return ranges_.size(); }
  MatchResult hill_climb(const Pose2D& initial);

 private:
  void update_trig(double theta);

  const grid::OccupancyGrid& map_;
  MatchParams params_;
  grid::OccupancyThreshold threshold_;
  std::vector<kernels::WindowOffset> order_;
  double gaussian_scale_;  // resolution^2 / (2 sigma^2)
  double log_floor_;
  std::vector<double> ranges_;
  std::vector<double> angles_;
  std::optional<double> trig_theta_;
  std::vector<double> cos_;
  std::vector<double> sin_;
};

/// Scores fixed-point poses against a binarized local map using the
/// kernels layer. Holds a reference to `map`, which must outlive it.
class AcceleratedMatcher {
 public:
  struct Evaluation {
    double score = 0.0;
    std::size_t matched = 0;
    double log_likelihood = 0.0;
  };

  AcceleratedMatcher(const grid::LocalBinaryMap& map, const Scan& scan, const MatchParams& params);

  Evaluation evaluate(const FixedPose& pose);
  /// Per-valid-beam index into window_search_order(), or -1, for the last
  /// evaluated pose.
  std::span<const std::int16_t> last_matches() const { return match_index_; }
  const std::vector<kernels::WindowOffset>& order() const { return order_; }
  std::size_t valid_beams() const { return range_raw_.size(); }
  MatchResult hill_climb(const Pose2D& initial);
  /// Sticky saturation flag of all fixed-point work done so far.
  const FixedStatus& status() const { return status_; }

 private:
  void update_trig(FixedQ16 theta);

  const grid::LocalBinaryMap& map_;
  MatchParams params_;
  ScoreLUT lut_;
  std::vector<kernels::WindowOffset> order_;
  std::vector<double> order_score_;
  std::vector<double> order_log_score_;
  double log_floor_;
  FixedQ16 corner_x_;
  FixedQ16 corner_y_;
  FixedQ16 inv_resolution_;
  std::vector<std::int32_t> range_raw_;
  std::vector<std::int32_t> pullback_raw_;
  std::vector<std::int32_t> angle_raw_;
  std::optional<FixedQ16> trig_theta_;
  std::vector<std::int32_t> cos_raw_;
  std::vector<std::int32_t> sin_raw_;
  std::vector<std::int32_t> hit_x_, hit_y_, miss_x_, miss_y_;
  std::vector<std::int16_t> match_index_;
  FixedStatus status_;
};

}  // namespace gmslam::match
