#pragma once

#include <array>
#include <cstddef>
#include <cstdint>
#include <string>
#include <vector>

#include "gmslam/rbpf/particle_filter.hpp"

namespace gmslam::app {

/// Latency and work accounting for one SLAM run.
struct RunReport {
  struct Step {
    double timestamp = 0.0;
    std::array<double, rbpf::kStageCount> stage_seconds{};
    std::size_t score_evaluations = 0;
    std::int32_t min_iterations = 0;
    std::int32_t max_iterations = 0;
    std::size_t rejected = 0;
    bool matched = false;
    bool resampled = false;
    double effective_sample_size = 0.0;
  };

  std::string backend;
  std::size_t particles = 0;
  std::size_t threads = 0;
  std::string isa;
  std::vector<Step> steps;
  double total_seconds = 0.0;
  std::size_t peak_map_bytes = 0;
  std::size_t skipped_events = 0;
  bool diverged = false;
  bool fixed_point_saturated = false;

  void add(double timestamp, const rbpf::StepReport& step);

  std::size_t iterations() const { return steps.size(); }
  std::array<double, rbpf::kStageCount> stage_totals() const;
  /// Mean seconds per processed scan for each stage.
  std::array<double, rbpf::kStageCount> stage_means() const;
  std::size_t resample_count() const;
  std::size_t rejected_total() const;

  /// `key value` lines.
  std::string to_text() const;
  /// One line per step: index, timestamp, stage seconds, work counters.
  std::string steps_table() const;
};

}  // namespace gmslam::app
