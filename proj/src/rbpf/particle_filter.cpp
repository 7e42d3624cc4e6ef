#include "gmslam/rbpf/particle_filter.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <stdexcept>

#include "gmslam/grid/local_binary_map.hpp"
#include "gmslam/rbpf/rng.hpp"
#include "gmslam/rbpf/weights.hpp"

namespace gmslam::rbpf {

void FilterConfig::validate() const {
  if (particles < 1) throw std::invalid_argument("particle count must be at least 1");
  if (!(resample_fraction > 0.0 && resample_fraction <= 1.0))
    throw std::invalid_argument("resample fraction must lie in (0, 1]");
  if (local_window < 1) throw std::invalid_argument("local window must be positive");
  if (!(min_match_fraction >= 0.0 && min_match_fraction <= 1.0))
    throw std::invalid_argument("minimum match fraction must lie in [0, 1]");
  if (!(grid.resolution > 0.0)) throw std::invalid_argument("resolution must be positive");
  match.validate();
}

void TrajectoryHistory::append(double timestamp, const Pose2D& pose) {
  head_ = std::make_shared<const Node>(Node{{timestamp, pose}, size() + 1, head_});
}

std::vector<TimedPose> TrajectoryHistory::poses() const {
  std::vector<TimedPose> out(size());
  std::size_t i = out.size();
  for (const Node* n = head_.get(); n; n = n->parent.get()) out[--i] = n->value;
  return out;
}

namespace {

using Clock = std::chrono::steady_clock;

double seconds_since(Clock::time_point start) {
  return std::chrono::duration<double>(Clock::now() - start).count();
}

bool is_zero(const Pose2D& p) { return p.x == 0.0 && p.y == 0.0 && p.theta == 0.0; }

struct MatchOutcome {
  Pose2D pose;
  double log_likelihood = 0.0;
  std::size_t score_evaluations = 0;
  std::int32_t iterations = 0;
  bool rejected = false;
  bool saturated = false;
};

}  // namespace

ParticleFilter::ParticleFilter(FilterConfig config)
    : config_(std::move(config)), pool_((config_.validate(), config_.threads)) {
  particles_.reserve(config_.particles);
  const double uniform = -std::log(static_cast<double>(config_.particles));
  for (std::size_t k = 0; k < config_.particles; ++k)
    particles_.push_back({config_.initial_pose, uniform,
                          grid::OccupancyGrid(config_.grid, config_.log_odds), {}});
}

double ParticleFilter::effective_sample_size() const {
  std::vector<double> lw(particles_.size());
  for (std::size_t k = 0; k < lw.size(); ++k) lw[k] = particles_[k].log_weight;
  return rbpf::effective_sample_size(lw);
}

std::size_t ParticleFilter::best_index() const {
  std::vector<double> lw(particles_.size());
  for (std::size_t k = 0; k < lw.size(); ++k) lw[k] = particles_[k].log_weight;
  return rbpf::best_index(lw);
}

std::size_t ParticleFilter::map_memory_bytes() const {
  std::vector<const grid::OccupancyGrid*> maps;
  maps.reserve(particles_.size());
  for (const auto& p : particles_) maps.push_back(&p.map);
  return grid::unique_tile_count(maps) * sizeof(grid::OccupancyGrid::Tile);
}

StepReport ParticleFilter::process(const Pose2D& control, const Scan& scan, double timestamp) {
  if (!std::isfinite(timestamp)) throw std::invalid_argument("timestamp must be finite");
  if (has_timestamp_ && !(timestamp > last_timestamp_))
    throw std::invalid_argument("timestamps must be strictly increasing");
  scan.validate();

  const std::size_t m = particles_.size();
  const bool first = steps_ == 0;
  const bool offset = !is_zero(config_.sensor_offset);
  const Pose2D offset_inverse = inverse(config_.sensor_offset);
  auto sensor_pose = [&](const Pose2D& robot) {
    return offset ? compose(robot, config_.sensor_offset) : robot;
  };

  StepReport report;
  report.matched = !first;
  std::vector<MatchOutcome> outcome(m);

  // Initial guess.
  auto start = Clock::now();
  if (!first) {
    pool_.parallel_for(m, [&](std::size_t k) {
      CounterRng rng(config_.seed, k, steps_);
      outcome[k].pose = sample_motion(particles_[k].pose, control, config_.motion, rng);
    });
  } else {
    for (std::size_t k = 0; k < m; ++k) outcome[k].pose = particles_[k].pose;
  }
  report.stage_seconds[static_cast<std::size_t>(Stage::kInitialGuess)] = seconds_since(start);

  // Scan matching.
  start = Clock::now();
  if (!first) {
    const grid::OccupancyThreshold threshold(config_.match.occupancy_threshold);
    const double log_floor = std::log(config_.match.no_match_likelihood);
    pool_.parallel_for(m, [&](std::size_t k) {
      MatchOutcome& out = outcome[k];
      const Pose2D guess = sensor_pose(out.pose);
      match::MatchResult r;
      if (config_.backend == match::Backend::kAccelerated) {
        const grid::LocalBinaryMap local =
            grid::extract_local_map(particles_[k].map, guess, config_.local_window, threshold);
        match::AcceleratedMatcher matcher(local, scan, config_.match);
        r = matcher.hill_climb(guess);
        out.saturated = matcher.status().overflowed;
      } else {
        match::ReferenceMatcher matcher(particles_[k].map, scan, config_.match);
        r = matcher.hill_climb(guess);
      }
      out.score_evaluations = r.score_evaluations;
      out.iterations = r.iterations_used;
      const double needed = config_.min_match_fraction * static_cast<double>(r.valid_beams);
      if (static_cast<double>(r.matched_beams) < needed) {
        out.rejected = true;
        out.log_likelihood = static_cast<double>(r.valid_beams) * log_floor;
      } else {
        out.pose = offset ? compose(r.pose, offset_inverse) : r.pose;
        out.log_likelihood = r.log_likelihood;
      }
    });
  }
  report.stage_seconds[static_cast<std::size_t>(Stage::kScanMatching)] = seconds_since(start);

  // Map update.
  start = Clock::now();
  pool_.parallel_for(m, [&](std::size_t k) {
    particles_[k].pose = outcome[k].pose;
    grid::add_scan(particles_[k].map, sensor_pose(outcome[k].pose), scan);
  });
  report.stage_seconds[static_cast<std::size_t>(Stage::kMapUpdate)] = seconds_since(start);

  // Weight update.
  start = Clock::now();
  std::vector<double> lw(m);
  for (std::size_t k = 0; k < m; ++k) {
    Particle& p = particles_[k];
    p.log_weight += outcome[k].log_likelihood;
    p.trajectory.append(timestamp, p.pose);
    lw[k] = p.log_weight;
  }
  normalize_log_weights(lw);
  for (std::size_t k = 0; k < m; ++k) particles_[k].log_weight = lw[k];
  report.effective_sample_size = rbpf::effective_sample_size(lw);
  report.stage_seconds[static_cast<std::size_t>(Stage::kWeightUpdate)] = seconds_since(start);

  // Resampling.
  start = Clock::now();
  if (report.effective_sample_size < config_.resample_fraction * static_cast<double>(m)) {
    CounterRng rng(config_.seed, m, steps_);
    const std::vector<std::size_t> picks = systematic_resample(lw, rng.uniform01());
    std::vector<Particle> next;
    next.reserve(m);
    const double uniform = -std::log(static_cast<double>(m));
    for (const std::size_t src : picks) {
      const Particle& s = particles_[src];
      next.push_back({s.pose, uniform, s.map.cow_clone(), s.trajectory});
    }
    particles_ = std::move(next);
    report.resampled = true;
  }
  report.stage_seconds[static_cast<std::size_t>(Stage::kResampling)] = seconds_since(start);

  if (!first) {
    report.min_iterations = outcome[0].iterations;
    report.max_iterations = outcome[0].iterations;
  }
  for (const MatchOutcome& o : outcome) {
    report.score_evaluations += o.score_evaluations;
    if (o.rejected) ++report.rejected;
    report.fixed_point_saturated = report.fixed_point_saturated || o.saturated;
    report.min_iterations = std::min(report.min_iterations, o.iterations);
    report.max_iterations = std::max(report.max_iterations, o.iterations);
  }

  ++steps_;
  has_timestamp_ = true;
  last_timestamp_ = timestamp;
  return report;
}

}  // namespace gmslam::rbpf
