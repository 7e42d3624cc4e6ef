#pragma once

#include <cstddef>
#include <iosfwd>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "gmslam/app/config.hpp"
#include "gmslam/app/run_report.hpp"
#include "gmslam/dataset/carmen.hpp"
#include "gmslam/grid/occupancy_grid.hpp"
#include "gmslam/metrics/metrics.hpp"

namespace gmslam::app {

enum ExitCode : int {
  kExitOk = 0,
  kExitUsage = 1,
  kExitInput = 2,
  kExitDivergence = 3,
};

struct SlamResult {
  metrics::Trajectory trajectory;  // best particle's history
  RunReport report;
  std::optional<grid::OccupancyGrid> map;  // best particle's map
  std::string error;                       // set when the filter diverged
};

/// Laser steps of `events` with odometry controls, gated as configured.
std::vector<dataset::ControlStep> prepare_steps(std::span<const dataset::LogEvent> events,
                                                const RunOptions& options);

/// Runs the filter over `steps`; the first step's odometry pose seeds the
/// initial pose. Divergence is reported through `report.diverged`.
SlamResult run_slam(const rbpf::FilterConfig& config, std::span<const dataset::ControlStep> steps);

/// Writes trajectory.txt, map.pgm (+ sidecar), report.txt and steps.txt to
/// options.out_dir, plus metrics.txt when a relations file is given.
int cmd_run(const RunOptions& options, std::ostream& out, std::ostream& err);

enum class ReportFormat { kText, kJson };

int cmd_evaluate(const std::string& trajectory_path, const std::string& relations_path,
                 double tolerance, ReportFormat format, std::ostream& out, std::ostream& err);

int cmd_compare(const std::string& trajectory_a, const std::string& trajectory_b,
                ReportFormat format, std::ostream& out, std::ostream& err);

struct BenchOptions {
  RunOptions base;
  std::vector<std::size_t> particle_counts = {16, 32, 64};
  std::vector<match::Backend> backends = {match::Backend::kReference,
                                          match::Backend::kAccelerated};
  std::vector<std::size_t> thread_counts = {0};
  std::size_t repetitions = 1;
};

struct BenchRow {
  std::size_t particles = 0;
  match::Backend backend = match::Backend::kReference;
  std::size_t threads = 0;
  std::array<double, rbpf::kStageCount> stage_means{};  // seconds per iteration
  double iteration_mean = 0.0;                          // seconds per iteration
  double run_seconds = 0.0;                             // mean over repetitions
  std::size_t iterations = 0;
};

std::vector<BenchRow> run_bench(const BenchOptions& options,
                                std::span<const dataset::ControlStep> steps);
std::string format_bench(const std::vector<BenchRow>& rows);
int cmd_bench(const BenchOptions& options, std::ostream& out, std::ostream& err);

struct SimulateOptions {
  std::string out_dir = ".";
  std::size_t steps = 200;
  std::uint64_t seed = 1;
  std::string world = "furnished";  // furnished | rectangle | octagon
};

/// Writes log.carmen, ground_truth.txt, odometry.txt and relations.txt.
int cmd_simulate(const SimulateOptions& options, std::ostream& out, std::ostream& err);

std::string backend_name(match::Backend backend);

}  // namespace gmslam::app
