#pragma once

#include <array>
#include <cstddef>
#include <cstdint>
#include <memory>
#include <string_view>
#include <vector>

#include "gmslam/geometry/pose.hpp"
#include "gmslam/grid/occupancy_grid.hpp"
#include "gmslam/match/scan.hpp"
#include "gmslam/match/scan_matcher.hpp"
#include "gmslam/rbpf/motion.hpp"
#include "gmslam/rbpf/worker_pool.hpp"

namespace gmslam::rbpf {

struct FilterConfig {
  std::size_t particles = 32;
  double resample_fraction = 0.5;  // resample when ESS < fraction * M
  MotionNoise motion;
  ProcessThresholds gating;
  match::MatchParams match;
  match::Backend backend = match::Backend::kReference;
  grid::GridParams grid;
  grid::LogOddsModel log_odds;
  std::int32_t local_window = 128;  // W: local maps are 2W x 2W cells
  double min_match_fraction = 0.4;  // below this, the refined pose is rejected
  std::uint64_t seed = 0;
  std::size_t threads = 0;          // 0: all hardware threads
  Pose2D sensor_offset;             // laser pose in the robot frame
  Pose2D initial_pose;

  void validate() const;
};

/// Append-only pose history. Copies share their common prefix.
class TrajectoryHistory {
 public:
  void append(double timestamp, const Pose2D& pose);
  std::size_t size() const { return head_ ? head_->depth : 0; }
  std::vector<TimedPose> poses() const;
  const TimedPose* last() const { return head_ ? &head_->value : nullptr; }

 private:
  struct Node {
    TimedPose value;
    std::size_t depth;
    std::shared_ptr<const Node> parent;
  };
  std::shared_ptr<const Node> head_;
};

struct Particle {
  Pose2D pose;
  double log_weight = 0.0;
  grid::OccupancyGrid map;
  TrajectoryHistory trajectory;
};

enum class Stage : std::size_t {
  kInitialGuess,
  kScanMatching,
  kMapUpdate,
  kWeightUpdate,
  kResampling,
};
inline constexpr std::size_t kStageCount = 5;
inline constexpr std::array<std::string_view, kStageCount> kStageNames = {
    "initial_guess", "scan_matching", "map_update", "weight_update", "resampling"};

struct StepReport {
  std::array<double, kStageCount> stage_seconds{};
  double effective_sample_size = 0.0;
  bool resampled = false;
  bool matched = false;               // false for the first scan
  std::size_t score_evaluations = 0;  // summed over particles
  std::int32_t min_iterations = 0;
  std::int32_t max_iterations = 0;
  std::size_t rejected = 0;           // particles that kept their motion sample
  bool fixed_point_saturated = false;
};

class ParticleFilter {
 public:
  explicit ParticleFilter(FilterConfig config);

  /// Advances every particle by `control` and incorporates `scan`.
  /// Timestamps must be strictly increasing. Throws FilterDivergence when
  /// every weight underflows.
  StepReport process(const Pose2D& control, const Scan& scan, double timestamp);

  const FilterConfig& config() const { return config_; }
  const std::vector<Particle>& particles() const { return particles_; }
  std::size_t steps() const { return steps_; }
  double effective_sample_size() const;
  std::size_t best_index() const;
  const Particle& best_particle() const { return particles_[best_index()]; }
  /// Bytes held by distinct map tiles across all particles.
  std::size_t map_memory_bytes() const;
  std::size_t threads() const { return pool_.size(); }

 private:
  FilterConfig config_;
  std::vector<Particle> particles_;
  WorkerPool pool_;
  std::size_t steps_ = 0;
  bool has_timestamp_ = false;
  double last_timestamp_ = 0.0;
};

}  // namespace gmslam::rbpf
