#include "gmslam/app/commands.hpp"

#include <chrono>
#include <filesystem>
#include <fstream>
#include <iomanip>
#include <ostream>
#include <sstream>

#include "gmslam/dataset/relations.hpp"
#include "gmslam/grid/pgm.hpp"
#include "gmslam/kernels/kernels.hpp"
#include "gmslam/rbpf/weights.hpp"
#include "gmslam/sim/simulator.hpp"

namespace gmslam::app {

namespace fs = std::filesystem;

std::string backend_name(match::Backend backend) {
  return backend == match::Backend::kAccelerated ? "accelerated" : "reference";
}

std::vector<dataset::ControlStep> prepare_steps(std::span<const dataset::LogEvent> events,
                                                const RunOptions& options) {
  std::optional<rbpf::ProcessThresholds> gating;
  if (options.gating) gating = options.filter.gating;
  return dataset::controls_from_odometry(events, gating);
}

SlamResult run_slam(const rbpf::FilterConfig& config, std::span<const dataset::ControlStep> steps) {
  using Clock = std::chrono::steady_clock;
  rbpf::FilterConfig cfg = config;
  if (!steps.empty()) cfg.initial_pose = steps.front().odom;

  SlamResult result;
  rbpf::ParticleFilter filter(cfg);
  RunReport& report = result.report;
  report.backend = backend_name(cfg.backend);
  report.particles = cfg.particles;
  report.threads = filter.threads();
  report.isa = std::string(kernels::isa_name(kernels::active_isa()));

  const auto start = Clock::now();
  bool have_last = false;
  double last = 0.0;
  for (const dataset::ControlStep& s : steps) {
    if (have_last && !(s.timestamp > last)) {
      ++report.skipped_events;
      continue;
    }
    try {
      report.add(s.timestamp, filter.process(s.control, s.scan, s.timestamp));
    } catch (const rbpf::FilterDivergence& e) {
      report.diverged = true;
      result.error = e.what();
      break;
    }
    have_last = true;
    last = s.timestamp;
    report.peak_map_bytes = std::max(report.peak_map_bytes, filter.map_memory_bytes());
  }
  report.total_seconds = std::chrono::duration<double>(Clock::now() - start).count();

  const rbpf::Particle& best = filter.best_particle();
  result.trajectory = best.trajectory.poses();
  if (!best.map.empty()) result.map = best.map;
  return result;
}

namespace {

void write_text(const fs::path& path, const std::string& text) {
  std::ofstream f(path);
  f << text;
  if (!f) throw std::runtime_error("cannot write '" + path.string() + "'");
}

void print_report(const metrics::MetricReport& r, ReportFormat format, std::ostream& out) {
  if (format == ReportFormat::kJson) {
    out << metrics::to_json(r);
  } else {
    out << metrics::to_key_value(r) << metrics::to_summary(r);
  }
}

}  // namespace

int cmd_run(const RunOptions& options, std::ostream& out, std::ostream& err) {
  if (options.log_path.empty()) {
    err << "error: --log is required\n";
    return kExitUsage;
  }
  std::vector<dataset::LogEvent> events;
  std::vector<dataset::Relation> relations;
  dataset::ParseDiagnostics diag;
  try {
    events = dataset::load_carmen(options.log_path, options.carmen, &diag);
    if (!options.relations_path.empty()) relations = dataset::load_relations(options.relations_path);
  } catch (const std::exception& e) {
    err << "error: " << e.what() << '\n';
    return kExitInput;
  }
  for (const auto& issue : diag.issues)
    err << "warning: " << options.log_path << ":" << issue.line << ": " << issue.message << '\n';
  const auto steps = prepare_steps(events, options);
  if (steps.empty()) {
    err << "error: log contains no laser scans\n";
    return kExitInput;
  }

  SlamResult result = run_slam(options.filter, steps);
  try {
    const fs::path dir(options.out_dir);
    fs::create_directories(dir);
    {
      std::ofstream f(dir / "trajectory.txt");
      if (result.report.diverged) f << "# partial: filter diverged\n";
      metrics::write_trajectory(f, result.trajectory);
      if (!f) throw std::runtime_error("cannot write trajectory");
    }
    if (result.map) grid::export_pgm(*result.map, dir / "map.pgm");
    write_text(dir / "report.txt", result.report.to_text());
    write_text(dir / "steps.txt", result.report.steps_table());
    if (!relations.empty() && !result.report.diverged) {
      const auto m = metrics::relation_errors(result.trajectory, relations);
      write_text(dir / "metrics.txt", metrics::to_key_value(m));
      out << metrics::to_summary(m);
    }
  } catch (const std::exception& e) {
    err << "error: " << e.what() << '\n';
    return kExitInput;
  }
  out << result.report.to_text();
  if (result.report.diverged) {
    err << "error: filter diverged: " << result.error << " (artifacts are partial)\n";
    return kExitDivergence;
  }
  return kExitOk;
}

int cmd_evaluate(const std::string& trajectory_path, const std::string& relations_path,
                 double tolerance, ReportFormat format, std::ostream& out, std::ostream& err) {
  try {
    const auto trajectory = metrics::load_trajectory(trajectory_path);
    const auto relations = dataset::load_relations(relations_path);
    print_report(metrics::relation_errors(trajectory, relations, tolerance), format, out);
  } catch (const std::exception& e) {
    err << "error: " << e.what() << '\n';
    return kExitInput;
  }
  return kExitOk;
}

int cmd_compare(const std::string& trajectory_a, const std::string& trajectory_b,
                ReportFormat format, std::ostream& out, std::ostream& err) {
  try {
    const auto a = metrics::load_trajectory(trajectory_a);
    const auto b = metrics::load_trajectory(trajectory_b);
    print_report(metrics::trajectory_difference(a, b), format, out);
  } catch (const std::exception& e) {
    err << "error: " << e.what() << '\n';
    return kExitInput;
  }
  return kExitOk;
}

std::vector<BenchRow> run_bench(const BenchOptions& options,
                                std::span<const dataset::ControlStep> steps) {
  std::vector<BenchRow> rows;
  const std::size_t reps = std::max<std::size_t>(1, options.repetitions);
  for (const std::size_t m : options.particle_counts) {
    for (const match::Backend backend : options.backends) {
      for (const std::size_t threads : options.thread_counts) {
        rbpf::FilterConfig cfg = options.base.filter;
        cfg.particles = m;
        cfg.backend = backend;
        cfg.threads = threads;
        BenchRow row;
        row.particles = m;
        row.backend = backend;
        for (std::size_t r = 0; r < reps; ++r) {
          const SlamResult res = run_slam(cfg, steps);
          if (res.report.diverged) throw rbpf::FilterDivergence(res.error);
          const auto means = res.report.stage_means();
          for (std::size_t i = 0; i < means.size(); ++i) row.stage_means[i] += means[i];
          row.run_seconds += res.report.total_seconds;
          row.iterations = res.report.iterations();
          row.threads = res.report.threads;
        }
        for (double& v : row.stage_means) v /= static_cast<double>(reps);
        row.run_seconds /= static_cast<double>(reps);
        row.iteration_mean = row.iterations ? row.run_seconds / static_cast<double>(row.iterations) : 0.0;
        rows.push_back(row);
      }
    }
  }
  return rows;
}

std::string format_bench(const std::vector<BenchRow>& rows) {
  std::ostringstream os;
  os << std::left << std::setw(6) << "M" << std::setw(13) << "backend" << std::setw(8) << "threads";
  for (const auto name : rbpf::kStageNames) os << std::setw(15) << std::string(name).substr(0, 14);
  os << std::setw(15) << "per_iteration" << std::setw(12) << "run_s" << "match_ratio\n";
  os << std::fixed;
  for (const BenchRow& r : rows) {
    os << std::setw(6) << r.particles << std::setw(13) << backend_name(r.backend) << std::setw(8)
       << r.threads << std::setprecision(6);
    for (const double v : r.stage_means) os << std::setw(15) << v;
    os << std::setw(15) << r.iteration_mean << std::setw(12) << std::setprecision(3)
       << r.run_seconds;
    // Reference over accelerated scan-matching time for the same M and threads.
    const auto match_time = [](const BenchRow& b) {
      return b.stage_means[static_cast<std::size_t>(rbpf::Stage::kScanMatching)];
    };
    std::string ratio = "-";
    if (r.backend == match::Backend::kAccelerated) {
      for (const BenchRow& o : rows) {
        if (o.backend == match::Backend::kReference && o.particles == r.particles &&
            o.threads == r.threads && match_time(r) > 0.0) {
          std::ostringstream v;
          v << std::setprecision(2) << std::fixed << match_time(o) / match_time(r);
          ratio = v.str();
        }
      }
    }
    os << ratio << '\n';
  }
  return os.str();
}

int cmd_bench(const BenchOptions& options, std::ostream& out, std::ostream& err) {
  if (options.base.log_path.empty()) {
    err << "error: --log is required\n";
    return kExitUsage;
  }
  std::vector<dataset::LogEvent> events;
  try {
    events = dataset::load_carmen(options.base.log_path, options.base.carmen);
  } catch (const std::exception& e) {
    err << "error: " << e.what() << '\n';
    return kExitInput;
  }
  const auto steps = prepare_steps(events, options.base);
  if (steps.empty()) {
    err << "error: log contains no laser scans\n";
    return kExitInput;
  }
  try {
    out << format_bench(run_bench(options, steps));
  } catch (const rbpf::FilterDivergence& e) {
    err << "error: filter diverged: " << e.what() << '\n';
    return kExitDivergence;
  }
  return kExitOk;
}

int cmd_simulate(const SimulateOptions& options, std::ostream& out, std::ostream& err) {
  sim::SimConfig cfg;
  cfg.steps = options.steps;
  cfg.seed = options.seed;
  if (options.world == "rectangle") {
    cfg.world = sim::World::rectangular_room(10.0, 8.0);
  } else if (options.world == "octagon") {
    cfg.world = sim::World::octagon_room(5.0);
    cfg.waypoints = {{-2, -2}, {2, -2}, {2, 2}, {-2, 2}};
  } else if (options.world != "furnished") {
    err << "error: unknown world '" << options.world << "'\n";
    return kExitUsage;
  }
  try {
    const sim::SimLog log = sim::simulate(cfg);
    const fs::path dir(options.out_dir);
    fs::create_directories(dir);
    std::ofstream carmen(dir / "log.carmen");
    dataset::write_carmen(carmen, log.events);
    std::ofstream gt(dir / "ground_truth.txt");
    metrics::write_trajectory(gt, log.ground_truth);
    std::ofstream odom(dir / "odometry.txt");
    metrics::write_trajectory(odom, log.odometry);
    std::ofstream rel(dir / "relations.txt");
    dataset::write_relations(rel, metrics::relations_from(log.ground_truth));
    if (!carmen || !gt || !odom || !rel) throw std::runtime_error("cannot write simulation output");
    out << "wrote " << log.events.size() << " scans to " << dir.string() << '\n';
  } catch (const std::exception& e) {
    err << "error: " << e.what() << '\n';
    return kExitInput;
  }
  return kExitOk;
}

}  // namespace gmslam::app
